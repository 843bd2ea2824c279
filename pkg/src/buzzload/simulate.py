"""Exact event-driven simulation of the hidden-regime epidemic chain.

simulate() draws competing exponentials (Gillespie direct method) with an
explicit 64-bit seed; the same (params, initial, seed, horizon) always
reproduces a bit-identical trace. Horizons are either an event count or an
end time -- the two natural readings of "trace length" for this chain.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import _kernels
from .errors import BuzzloadError, DataError, ParameterError
from .params import (
    DEFAULT_INITIAL_STATE,
    ModelParams,
    Regime,
    SystemState,
    flat_state_index,
    validate_state,
)

KIND_ARRIVAL = 0
KIND_WATCH_END = 1
KIND_MEMORY_END = 2
KIND_REGIME_SWITCH = 3
KIND_LABELS = np.array(["A", "W", "M", "S"])
_LABEL_TO_KIND = {"A": 0, "W": 1, "M": 2, "S": 3}

_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class Event:
    """One elementary transition; state_after is the state it leads to."""

    t: float
    kind: str
    state_after: SystemState


@dataclass
class EventTrace:
    """Time-ordered elementary transitions plus the context to replay them.

    Column arrays hold, per event: timestamp, kind code (0..3), and the
    (i, r, regime) state after the event. `initial` is the state on
    [t0, t[0]). Ingested real traces carry params=None and seed=None.
    """

    params: ModelParams | None
    seed: int | None
    initial: SystemState
    t0: float
    t_end: float
    t: np.ndarray
    kind: np.ndarray
    i: np.ndarray
    r: np.ndarray
    regime: np.ndarray

    def __len__(self) -> int:
        return self.t.shape[0]

    def __getitem__(self, k: int) -> Event:
        return Event(
            t=float(self.t[k]),
            kind=str(KIND_LABELS[self.kind[k]]),
            state_after=SystemState(int(self.i[k]), int(self.r[k]), Regime(int(self.regime[k]))),
        )

    @property
    def span(self) -> float:
        return self.t_end - self.t0

    def step_i(self) -> "StepFunction":
        """I(t) as an exact right-continuous step function."""
        return StepFunction(self.t0, self.t_end, self.t, self.i.astype(np.float64),
                            float(self.initial.i))

    def step_r(self) -> "StepFunction":
        return StepFunction(self.t0, self.t_end, self.t, self.r.astype(np.float64),
                            float(self.initial.r))

    def step_regime(self) -> "StepFunction":
        return StepFunction(self.t0, self.t_end, self.t, self.regime.astype(np.float64),
                            float(self.initial.regime))


class StepFunction:
    """Right-continuous piecewise-constant function with exact integrals.

    Value is v0 on [t0, times[0]) and values[k] on [times[k], times[k+1]),
    the last segment ending at t_end.
    """

    def __init__(self, t0: float, t_end: float, times: np.ndarray, values: np.ndarray,
                 v0: float):
        self.t0 = float(t0)
        self.t_end = float(t_end)
        self.bounds = np.concatenate(([self.t0], np.asarray(times, dtype=np.float64)))
        self.values = np.concatenate(([v0], np.asarray(values, dtype=np.float64)))
        durations = np.diff(np.concatenate((self.bounds, [self.t_end])))
        self._durations = durations
        self._cum = np.concatenate(([0.0], np.cumsum(self.values * durations)))

    def __call__(self, t) -> np.ndarray:
        idx = np.searchsorted(self.bounds, np.asarray(t, dtype=np.float64), side="right") - 1
        return self.values[np.clip(idx, 0, len(self.values) - 1)]

    def integral_to(self, t) -> np.ndarray:
        """Exact integral from t0 to t (clipped into [t0, t_end])."""
        tt = np.clip(np.asarray(t, dtype=np.float64), self.t0, self.t_end)
        idx = np.searchsorted(self.bounds, tt, side="right") - 1
        idx = np.clip(idx, 0, len(self.values) - 1)
        return self._cum[idx] + self.values[idx] * (tt - self.bounds[idx])

    def integral(self, a=None, b=None) -> float:
        a = self.t0 if a is None else a
        b = self.t_end if b is None else b
        return float(self.integral_to(b) - self.integral_to(a))

    def mean(self) -> float:
        return self.integral() / (self.t_end - self.t0)

    def dwell_histogram(self) -> tuple[np.ndarray, np.ndarray]:
        """(values 0..max, total dwell time at each value) for integer-valued steps."""
        vals = self.values.astype(np.int64)
        if vals.min() < 0:
            raise DataError("dwell_histogram needs non-negative integer values")
        weights = np.bincount(vals, weights=self._durations)
        return np.arange(len(weights)), weights

    def quantile(self, q: float) -> float:
        """Time-weighted quantile of the value distribution."""
        order = np.argsort(self.values, kind="stable")
        cum = np.cumsum(self._durations[order])
        k = np.searchsorted(cum, q * cum[-1], side="left")
        return float(self.values[order[min(k, len(order) - 1)]])


def simulate(params: ModelParams, initial: SystemState | None = None, *,
             n_events: int | None = None, t_end: float | None = None,
             seed: int = 0) -> EventTrace:
    """Simulate the chain for exactly n_events events or until time t_end.

    Exactly one horizon must be given. Deterministic per (params, initial,
    seed, horizon).
    """
    if (n_events is None) == (t_end is None):
        raise ParameterError("give exactly one of n_events or t_end")
    initial = DEFAULT_INITIAL_STATE if initial is None else initial
    validate_state(initial, params)

    state = np.uint64(seed & _MASK64)
    i, r, reg = initial.i, initial.r, int(initial.regime)
    t = 0.0
    limit = np.inf if t_end is None else float(t_end)
    if t_end is not None and limit <= 0:
        raise ParameterError("t_end must be positive")

    pieces = []
    remaining = int(n_events) if n_events is not None else None
    if remaining is not None and remaining < 0:
        raise ParameterError("n_events must be non-negative")
    chunk_size = 1 << 18
    while True:
        if remaining is not None:
            if remaining == 0:
                break
            size = min(remaining, 1 << 22)
        else:
            size = chunk_size
            chunk_size = min(chunk_size * 2, 1 << 22)
        out_t = np.empty(size, np.float64)
        out_kind = np.empty(size, np.uint8)
        out_i = np.empty(size, np.int32)
        out_r = np.empty(size, np.int32)
        out_reg = np.empty(size, np.uint8)
        i, r, reg, t, state, n, status = _kernels.simulate_chunk(
            i, r, reg, t, state,
            params.beta1, params.beta2, params.gamma, params.mu,
            params.l, params.a1, params.a2, params.i_max, params.r_max,
            limit, out_t, out_kind, out_i, out_r, out_reg)
        if n:
            pieces.append((out_t[:n], out_kind[:n], out_i[:n], out_r[:n], out_reg[:n]))
        if status == _kernels.ZERO_TOTAL_RATE:
            raise BuzzloadError("internal invariant violated: zero total rate "
                                f"at state (i={i}, r={r}, regime={reg})")
        if remaining is not None:
            remaining -= n
        if status == _kernels.HIT_TIME_LIMIT:
            break

    if pieces:
        arrays = [np.concatenate(cols) for cols in zip(*pieces)]
    else:
        arrays = [np.empty(0, np.float64), np.empty(0, np.uint8),
                  np.empty(0, np.int32), np.empty(0, np.int32), np.empty(0, np.uint8)]
    tr_t, tr_kind, tr_i, tr_r, tr_reg = arrays
    end = limit if t_end is not None else (float(tr_t[-1]) if len(tr_t) else 0.0)
    return EventTrace(params=params, seed=seed, initial=initial, t0=0.0, t_end=end,
                      t=tr_t, kind=tr_kind, i=tr_i, r=tr_r, regime=tr_reg)


def replay_consistent(trace: EventTrace) -> bool:
    """Check that applying each event's kind to the previous state gives state_after."""
    prev_i = np.concatenate(([trace.initial.i], trace.i[:-1])) if len(trace) else np.empty(0)
    prev_r = np.concatenate(([trace.initial.r], trace.r[:-1])) if len(trace) else np.empty(0)
    prev_g = np.concatenate(([int(trace.initial.regime)], trace.regime[:-1])) if len(trace) \
        else np.empty(0)
    di = trace.i - prev_i
    dr = trace.r - prev_r
    k = trace.kind
    r_max = trace.params.r_max if trace.params is not None else np.inf
    ok = np.ones(len(trace), dtype=bool)
    ok &= ~(k == KIND_ARRIVAL) | ((di == 1) & (dr == 0) & (trace.regime == prev_g))
    at_cap = prev_r == r_max
    ok &= ~(k == KIND_WATCH_END) | (
        (di == -1) & (trace.regime == prev_g)
        & (((dr == 1) & ~at_cap) | ((dr == 0) & at_cap)))
    ok &= ~(k == KIND_MEMORY_END) | ((di == 0) & (dr == -1) & (trace.regime == prev_g))
    ok &= ~(k == KIND_REGIME_SWITCH) | ((di == 0) & (dr == 0) & (trace.regime == 3 - prev_g))
    increasing = np.all(np.diff(trace.t) > 0) if len(trace) > 1 else True
    return bool(np.all(ok)) and bool(increasing)


def time_average_i(trace: EventTrace, warmup_fraction: float = 0.0) -> float:
    """Exact time average of I(t), optionally discarding an initial fraction."""
    step = trace.step_i()
    a = trace.t0 + warmup_fraction * trace.span
    return step.integral(a, trace.t_end) / (trace.t_end - a)


def i_histogram(trace: EventTrace, warmup_fraction: float = 0.0) -> np.ndarray:
    """Dwell-weighted distribution of I; entry k is the fraction of time at I=k."""
    a = trace.t0 + warmup_fraction * trace.span
    vals = np.concatenate(([trace.initial.i], trace.i)).astype(np.int64)
    bounds = np.concatenate(([trace.t0], trace.t, [trace.t_end]))
    weights = np.diff(np.clip(bounds, a, None))
    hist = np.bincount(vals, weights=weights)
    return hist / hist.sum()


def state_occupancy(trace: EventTrace, i_max: int, r_max: int,
                    warmup_fraction: float = 0.0) -> np.ndarray:
    """Fraction of time in each flat (i, r, regime) state; see flat_state_index."""
    all_i = np.concatenate(([trace.initial.i], trace.i))
    all_r = np.concatenate(([trace.initial.r], trace.r))
    all_g = np.concatenate(([int(trace.initial.regime)], trace.regime)).astype(np.int64)
    bounds = np.concatenate(([trace.t0], trace.t, [trace.t_end]))
    a = trace.t0 + warmup_fraction * trace.span
    durations = np.diff(np.clip(bounds, a, None))
    flat = flat_state_index(all_i.astype(np.int64), all_r.astype(np.int64), all_g,
                            i_max, r_max)
    size = (i_max + 1) * (r_max + 1) * 2
    occ = np.bincount(flat, weights=durations, minlength=size)
    return occ / occ.sum()


def slice_after(trace: EventTrace, t_cut: float) -> EventTrace:
    """Sub-trace on [t_cut, t_end]; the initial state becomes the state at t_cut."""
    if not (trace.t0 <= t_cut < trace.t_end):
        raise DataError(f"cut {t_cut} outside [{trace.t0}, {trace.t_end})")
    k = int(np.searchsorted(trace.t, t_cut, side="right"))
    if k == 0:
        initial = trace.initial
    else:
        initial = SystemState(int(trace.i[k - 1]), int(trace.r[k - 1]),
                              Regime(int(trace.regime[k - 1])))
    return EventTrace(params=trace.params, seed=trace.seed, initial=initial,
                      t0=t_cut, t_end=trace.t_end, t=trace.t[k:], kind=trace.kind[k:],
                      i=trace.i[k:], r=trace.r[k:], regime=trace.regime[k:])


def sample_series(trace: EventTrace, dt: float):
    """Sample I(t), R(t), regime(t) on a uniform grid (right-continuous).

    The value at a grid point is the state after the last event at or before
    it. Returns a WorkloadSeries; empty trace with zero span gives an empty
    series.
    """
    from .traceio import WorkloadSeries

    if dt <= 0:
        raise ParameterError("dt must be positive")
    if trace.span <= 0 and len(trace) == 0:
        return WorkloadSeries(t0=trace.t0, dt=dt, i=np.empty(0, np.int64))
    n = int(np.floor(trace.span / dt)) + 1
    grid = trace.t0 + dt * np.arange(n)
    idx = np.searchsorted(trace.t, grid, side="right") - 1
    def pick(column, init):
        full = np.concatenate(([init], column))
        return full[idx + 1]
    return WorkloadSeries(
        t0=trace.t0, dt=dt,
        i=pick(trace.i, trace.initial.i).astype(np.int64),
        r_hat=pick(trace.r, trace.initial.r).astype(np.float64),
        regime_hat=pick(trace.regime, int(trace.initial.regime)).astype(np.uint8),
    )


def write_trace_csv(trace: EventTrace, path: str | Path) -> None:
    """CSV with header t,kind,i,r,regime (kind in {A,W,M,S}; regime in {1,2})."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t", "kind", "i", "r", "regime"])
        labels = KIND_LABELS[trace.kind]
        writer.writerows(zip(map(repr, trace.t.tolist()), labels,
                             trace.i.tolist(), trace.r.tolist(), trace.regime.tolist()))


def read_trace_csv(path: str | Path, params: ModelParams | None = None,
                   initial: SystemState | None = None) -> EventTrace:
    from .errors import TraceFormatError

    t, kind, i, r, reg = [], [], [], [], []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header[:2]] != ["t", "kind"]:
            raise TraceFormatError(f"expected header t,kind,i,r,regime in {path}", line=1)
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            try:
                t.append(float(row[0]))
                kind.append(_LABEL_TO_KIND[row[1].strip()])
                i.append(int(row[2]))
                r.append(int(row[3]))
                reg.append(int(row[4]))
            except (KeyError, ValueError, IndexError) as exc:
                raise TraceFormatError(f"bad event row {row!r}: {exc}", line=lineno) from None
    initial = DEFAULT_INITIAL_STATE if initial is None else initial
    t = np.asarray(t, np.float64)
    return EventTrace(params=params, seed=None, initial=initial, t0=0.0,
                      t_end=float(t[-1]) if len(t) else 0.0, t=t,
                      kind=np.asarray(kind, np.uint8), i=np.asarray(i, np.int32),
                      r=np.asarray(r, np.int32), regime=np.asarray(reg, np.uint8))


def write_trace_npz(trace: EventTrace, path: str | Path) -> None:
    """Compact binary trace form."""
    meta = {
        "params": None if trace.params is None else json.loads(trace.params.to_json()),
        "seed": trace.seed,
        "initial": [trace.initial.i, trace.initial.r, int(trace.initial.regime)],
        "t0": trace.t0,
        "t_end": trace.t_end,
    }
    np.savez_compressed(path, t=trace.t, kind=trace.kind, i=trace.i, r=trace.r,
                        regime=trace.regime, meta=json.dumps(meta))


def read_trace_npz(path: str | Path) -> EventTrace:
    with np.load(path, allow_pickle=False) as data:
        meta = json.loads(str(data["meta"]))
        params = None
        if meta["params"] is not None:
            params = ModelParams.from_json(json.dumps(meta["params"]))
        ini = meta["initial"]
        return EventTrace(
            params=params, seed=meta["seed"],
            initial=SystemState(int(ini[0]), int(ini[1]), Regime(int(ini[2]))),
            t0=float(meta["t0"]), t_end=float(meta["t_end"]),
            t=data["t"], kind=data["kind"], i=data["i"], r=data["r"],
            regime=data["regime"])
