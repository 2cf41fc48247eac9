"""Exception hierarchy shared by every module."""


class FDBetaError(Exception):
    """Base class for all library errors."""


class DomainError(FDBetaError, ValueError):
    """Argument outside the domain of a function (e.g. phi at u < 0)."""


class ParameterError(FDBetaError, ValueError):
    """Invalid model parameter (negative radius, tail level >= 1, ...)."""


class ShapeError(FDBetaError, ValueError):
    """Inputs with incompatible lengths or dimensions."""


class DegenerateError(FDBetaError, ValueError):
    """A ratio denominator vanished (zero market risk, zero variance, ...)."""


class DataError(FDBetaError, ValueError):
    """Malformed or unalignable input data."""


class InfeasibleError(FDBetaError, ValueError):
    """Optimization problem has an empty feasible set."""


class SolverError(FDBetaError, RuntimeError):
    """Numerical solver failed to converge or bracket a root."""

    def __init__(self, message, residuals=None, last_iterate=None):
        super().__init__(message)
        self.residuals = residuals
        self.last_iterate = last_iterate
