"""JIT-compiled inner loops: event simulation, two-state restoration, CUSUM scan.

The simulator RNG is an inline SplitMix64 stream so that a (params, initial,
seed, horizon) tuple reproduces a bit-identical trace independently of
numpy/numba RNG stream versions. All uint64 arithmetic is kept strictly
uint64; mixing with int64 would silently promote to float64 under numba.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_S11 = np.uint64(11)
# (z >> 11) + 1 is uniform on {1, ..., 2^53}; times 2^-53 gives (0, 1].
_INV53 = 1.0 / 9007199254740992.0

CHUNK_FULL = 0
HIT_TIME_LIMIT = 1
ZERO_TOTAL_RATE = 2


@njit(inline="always")
def _next_uniform(s):
    s = s + _GOLDEN
    z = s
    z = (z ^ (z >> _S30)) * _MIX1
    z = (z ^ (z >> _S27)) * _MIX2
    z = z ^ (z >> _S31)
    return s, (float(z >> _S11) + 1.0) * _INV53


@njit(cache=True, nogil=True)
def simulate_chunk(i, r, reg, t, s, beta1, beta2, gamma, mu, l, a1, a2,
                   i_max, r_max, t_limit, out_t, out_kind, out_i, out_r, out_reg):
    """Run the competing-exponentials loop until the chunk fills or t_limit passes.

    reg is 1 (buzz-free) or 2 (buzz); kind codes are 0=arrival, 1=watch-end,
    2=memory-end, 3=regime-switch. Returns the carried state plus the number
    of events written and a status code.
    """
    n = 0
    cap = out_t.shape[0]
    status = CHUNK_FULL
    while n < cap:
        if reg == 1:
            beta = beta1
            a = a1
        else:
            beta = beta2
            a = a2
        lam = 0.0
        if i < i_max:
            lam = l + (i + r) * beta
        w = gamma * i
        m = mu * r
        total = lam + w + m + a
        if total <= 0.0:
            status = ZERO_TOTAL_RATE
            break
        s, u = _next_uniform(s)
        t_next = t - math.log(u) / total
        if t_next > t_limit:
            t = t_limit
            status = HIT_TIME_LIMIT
            break
        t = t_next
        s, u = _next_uniform(s)
        x = u * total
        if x < lam:
            i += 1
            kind = 0
        elif x < lam + w:
            i -= 1
            if r < r_max:
                r += 1
            kind = 1
        elif x < lam + w + m:
            r -= 1
            kind = 2
        else:
            reg = 3 - reg
            kind = 3
        out_t[n] = t
        out_kind[n] = kind
        out_i[n] = i
        out_r[n] = r
        out_reg[n] = reg
        n += 1
    return i, r, reg, t, s, n, status


@njit(cache=True, nogil=True)
def viterbi_two_state(ll1, ll2, penalty):
    """Max-a-posteriori two-state path with a per-switch log penalty.

    ll1/ll2 are per-sample log likelihoods under the two regimes. Ties are
    broken toward state 0 (buzz-free). Returns a uint8 path of 0/1.
    """
    n = ll1.shape[0]
    back = np.empty((n, 2), np.uint8)
    s1 = ll1[0]
    s2 = ll2[0]
    for k in range(1, n):
        stay1 = s1
        jump1 = s2 - penalty
        if stay1 >= jump1:
            back[k, 0] = 0
            new1 = stay1 + ll1[k]
        else:
            back[k, 0] = 1
            new1 = jump1 + ll1[k]
        jump2 = s1 - penalty
        stay2 = s2
        if jump2 >= stay2:
            back[k, 1] = 0
            new2 = jump2 + ll2[k]
        else:
            back[k, 1] = 1
            new2 = stay2 + ll2[k]
        s1 = new1
        s2 = new2
    path = np.empty(n, np.uint8)
    state = 0 if s1 >= s2 else 1
    path[n - 1] = state
    for k in range(n - 1, 0, -1):
        state = back[k, state]
        path[k - 1] = state
    return path


@njit(cache=True, nogil=True)
def cusum_runs(norm_gaps, log_ratio, drift, threshold):
    """One-sided CUSUM for a rate increase by a fixed ratio on Exp(1) gaps.

    Score update: S_k = max(0, S_{k-1} + log_ratio - drift * g_k). A run is
    the stretch between a zero crossing upward and the return to zero; runs
    whose peak score reaches `threshold` are reported as
    (start index, index of peak score, peak score).
    """
    n = norm_gaps.shape[0]
    starts = np.empty(n, np.int64)
    peaks = np.empty(n, np.int64)
    scores = np.empty(n, np.float64)
    count = 0
    s = 0.0
    run_start = -1
    peak_idx = -1
    peak_val = 0.0
    for k in range(n):
        s_new = s + log_ratio - drift * norm_gaps[k]
        if s_new <= 0.0:
            if run_start >= 0 and peak_val >= threshold:
                starts[count] = run_start
                peaks[count] = peak_idx
                scores[count] = peak_val
                count += 1
            s = 0.0
            run_start = -1
            peak_idx = -1
            peak_val = 0.0
        else:
            if run_start < 0:
                run_start = k
            if s_new > peak_val:
                peak_val = s_new
                peak_idx = k
            s = s_new
    if run_start >= 0 and peak_val >= threshold:
        starts[count] = run_start
        peaks[count] = peak_idx
        scores[count] = peak_val
        count += 1
    return starts[:count], peaks[:count], scores[:count]
