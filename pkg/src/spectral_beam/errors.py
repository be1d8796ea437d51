"""Exception hierarchy shared by all modules."""


class SpectralBeamError(Exception):
    """Base class for all package errors."""


class DomainError(SpectralBeamError, ValueError):
    """Argument outside its mathematical domain."""


class ProfileError(SpectralBeamError, ValueError):
    """Volume-fraction profile violates its invariants."""


class AccuracyError(SpectralBeamError):
    """An integral or assembled quantity failed its self-consistency check."""


class ConditioningError(SpectralBeamError):
    """Matrix is not (numerically) symmetric positive definite."""

    def __init__(self, message, pivot=None):
        super().__init__(message)
        self.pivot = pivot


class NumericalError(SpectralBeamError):
    """Iterative method failed to converge."""


class ConvergenceError(NumericalError):
    """Newton iteration failed; carries the last iterate for diagnostics."""

    def __init__(self, message, *, step=None, residual=None, state=None):
        super().__init__(message)
        self.step = step
        self.residual = residual
        self.state = state


class EvaluationError(SpectralBeamError):
    """A user-supplied function returned a non-finite value."""


class ConfigError(SpectralBeamError, ValueError):
    """Malformed or incomplete run configuration."""
