"""Model core: parameter set, state space, transition rates, stability, mean workload.

The demand model is a finite, irreducible continuous-time Markov chain over
(i, r, regime): `i` current viewers (the observable workload), `r` past
viewers still relaying the gossip, and a hidden two-state regime that switches
the dissemination rate between a nominal value (beta1) and a buzz value
(beta2 >> beta1).
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass
from enum import IntEnum
from pathlib import Path

from .errors import ParameterError, StabilityError, StateError


class Regime(IntEnum):
    """Hidden dissemination regime; serialized as 1/2 in all file formats."""

    BUZZ_FREE = 1
    BUZZ = 2

    @property
    def other(self) -> "Regime":
        return Regime.BUZZ if self is Regime.BUZZ_FREE else Regime.BUZZ_FREE


@dataclass(frozen=True)
class ModelParams:
    """The seven rates of the demand model plus the population caps.

    All rates are in reciprocal units of the trace's time unit; the core does
    no unit conversion.

    beta1   gossip dissemination rate per (person * unit time), nominal regime
    beta2   dissemination rate in the buzz regime (beta2 >= beta1)
    gamma   watch-end rate (1/gamma = mean viewing duration)
    mu      memory-end rate (1/mu = mean gossip latency of a past viewer)
    l       spontaneous arrival rate, independent of the population
    a1      buzz onset rate
    a2      buzz offset rate
    i_max   cap on concurrent viewers (arrivals suppressed at the cap)
    r_max   cap on remembering past viewers (watch-ends bypass R at the cap)
    """

    beta1: float
    beta2: float
    gamma: float
    mu: float
    l: float
    a1: float
    a2: float
    i_max: int
    r_max: int

    def __post_init__(self):
        for name in ("beta1", "beta2", "gamma", "mu", "l", "a1", "a2"):
            value = getattr(self, name)
            if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
                raise ParameterError(f"{name} must be a finite rate > 0, got {value!r}")
        if self.beta2 < self.beta1:
            raise ParameterError(
                f"beta2 ({self.beta2}) must be >= beta1 ({self.beta1}); "
                "the buzz regime is the high-dissemination one"
            )
        if self.i_max < 1 or self.r_max < 1:
            raise ParameterError("i_max and r_max must be at least 1")

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2)

    @classmethod
    def from_json(cls, text: str) -> "ModelParams":
        raw = json.loads(text)
        try:
            return cls(
                beta1=float(raw["beta1"]),
                beta2=float(raw["beta2"]),
                gamma=float(raw["gamma"]),
                mu=float(raw["mu"]),
                l=float(raw["l"]),
                a1=float(raw["a1"]),
                a2=float(raw["a2"]),
                i_max=int(raw["i_max"]),
                r_max=int(raw["r_max"]),
            )
        except KeyError as missing:
            raise ParameterError(f"parameter file missing field {missing}") from None


def load_params(path: str | Path) -> ModelParams:
    return ModelParams.from_json(Path(path).read_text())


def dump_params(params: ModelParams, path: str | Path) -> None:
    Path(path).write_text(params.to_json() + "\n")


@dataclass(frozen=True)
class SystemState:
    """Instantaneous chain state: viewers, gossiping past viewers, regime."""

    i: int
    r: int
    regime: Regime = Regime.BUZZ_FREE


DEFAULT_INITIAL_STATE = SystemState(0, 0, Regime.BUZZ_FREE)


@dataclass(frozen=True)
class TransitionRates:
    """Exit rates of the four competing transition families at one state."""

    arrival: float
    watch_end: float
    memory_end: float
    regime_switch: float

    @property
    def total(self) -> float:
        return self.arrival + self.watch_end + self.memory_end + self.regime_switch


def validate_state(state: SystemState, params: ModelParams) -> None:
    if not (0 <= state.i <= params.i_max):
        raise StateError(f"i={state.i} outside [0, {params.i_max}]")
    if not (0 <= state.r <= params.r_max):
        raise StateError(f"r={state.r} outside [0, {params.r_max}]")
    if state.regime not in (Regime.BUZZ_FREE, Regime.BUZZ):
        raise StateError(f"invalid regime {state.regime!r}")


def transition_rates(state: SystemState, params: ModelParams) -> TransitionRates:
    """Instantaneous rates out of `state`.

    Arrivals occur at l + (i+r)*beta of the current regime and are suppressed
    at i = i_max (lost, not queued). Watch-ends fire at gamma*i; at r = r_max
    the finished viewer leaves the system instead of entering R, so the rate
    is not clipped. Memory-ends fire at mu*r.
    """
    validate_state(state, params)
    beta = params.beta1 if state.regime is Regime.BUZZ_FREE else params.beta2
    arrival = 0.0 if state.i == params.i_max else params.l + (state.i + state.r) * beta
    switch = params.a1 if state.regime is Regime.BUZZ_FREE else params.a2
    return TransitionRates(
        arrival=arrival,
        watch_end=params.gamma * state.i,
        memory_end=params.mu * state.r,
        regime_switch=switch,
    )


def mean_beta(params: ModelParams) -> float:
    """Dissemination rate averaged over the regime's stationary occupation."""
    return (params.beta1 * params.a2 + params.beta2 * params.a1) / (params.a1 + params.a2)


def is_stable(params: ModelParams) -> bool:
    """True iff the uncapped chain has a finite mean workload: 1/b > 1/mu + 1/gamma."""
    bbar = mean_beta(params)
    return 1.0 / bbar > 1.0 / params.mu + 1.0 / params.gamma


def mean_workload(params: ModelParams) -> float:
    """Flow-balance mean of the workload: mu*l / (mu*gamma - (mu+gamma)*bbar).

    Raises StabilityError when the balance denominator is not positive, i.e.
    exactly when is_stable() is False.
    """
    bbar = mean_beta(params)
    denom = params.mu * params.gamma - (params.mu + params.gamma) * bbar
    if denom <= 0:
        raise StabilityError(
            f"unstable parameters: balance denominator {denom:.3e} <= 0 "
            f"(1/bbar = {1.0 / bbar:.4g} vs 1/mu + 1/gamma = "
            f"{1.0 / params.mu + 1.0 / params.gamma:.4g})"
        )
    return params.mu * params.l / denom


def flat_state_index(i, r, regime, i_max: int, r_max: int):
    """Flat index of (i, r, regime) used everywhere a dense state vector appears.

    Layout: regime-major blocks of (r, i) rows, i fastest. Accepts scalars or
    numpy arrays.
    """
    per_regime = (i_max + 1) * (r_max + 1)
    return (regime - 1) * per_regime + r * (i_max + 1) + i


def state_space_size(params: ModelParams) -> int:
    return (params.i_max + 1) * (params.r_max + 1) * 2
