"""Exception hierarchy shared across the package."""


class BuzzloadError(Exception):
    """Base class for all package errors."""


class ParameterError(BuzzloadError, ValueError):
    """Model parameters violate their invariants."""


class StateError(BuzzloadError, ValueError):
    """A system state lies outside the valid state space."""


class StabilityError(BuzzloadError, ArithmeticError):
    """The parameter set has no finite mean workload."""


class TraceFormatError(BuzzloadError, ValueError):
    """Malformed input file; carries the offending line number when known."""

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class DataError(BuzzloadError, ValueError):
    """Input data cannot support the requested computation."""


class EstimationError(BuzzloadError, RuntimeError):
    """An estimator failed; usually a model-misfit signal."""


class InsufficientDataError(EstimationError):
    """Not enough events/samples for the estimator to apply."""


class NumericalError(BuzzloadError, ArithmeticError):
    """An iterative numerical routine failed to converge."""

    def __init__(self, message: str, residual: float | None = None):
        if residual is not None:
            message = f"{message} (residual {residual:.3e})"
        super().__init__(message)
        self.residual = residual


class ResourceError(BuzzloadError, RuntimeError):
    """A computation would exceed a configured size limit."""
