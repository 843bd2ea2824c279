"""Epidemic VoD workload modeling toolkit.

Simulate gossip-driven demand with buzz regimes, calibrate the seven model
rates from a single workload trace, compute theoretical and empirical
large-deviation spectra of the mean workload, and derive provisioning
quantities (reconfiguration scale, capacity safety margin, server packing).
"""

from .errors import (
    BuzzloadError,
    DataError,
    EstimationError,
    InsufficientDataError,
    NumericalError,
    ParameterError,
    ResourceError,
    StabilityError,
    StateError,
    TraceFormatError,
)
from .params import (
    ModelParams,
    Regime,
    SystemState,
    TransitionRates,
    dump_params,
    is_stable,
    load_params,
    mean_beta,
    mean_workload,
    transition_rates,
)
from .presets import PRESETS, get_preset
from .simulate import EventTrace, sample_series, simulate, time_average_i
from .traceio import (
    SessionRecord,
    WorkloadSeries,
    autocorrelation,
    histogram,
    ingest_sessions,
    split,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
