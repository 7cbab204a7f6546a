"""Semantic exceptions shared across the library."""


class NomaSicError(Exception):
    """Base class for all library errors."""


class DomainError(NomaSicError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class SizeError(NomaSicError, ValueError):
    """A problem size exceeds what an exact method can handle."""


class ConvergenceError(NomaSicError, RuntimeError):
    """An iterative routine exhausted its budget; carries the best estimate."""

    def __init__(self, message: str, best: float, error_estimate: float | None = None):
        super().__init__(message)
        self.best = best
        self.error_estimate = error_estimate


class FitError(NomaSicError, RuntimeError):
    """Nonlinear fit failed to converge; carries the best iterate."""

    def __init__(self, message: str, best=None):
        super().__init__(message)
        self.best = best


class FeasibilityError(NomaSicError, RuntimeError):
    """A sampling scheme would run effectively forever (acceptance too low)."""


class DegenerateChannelError(NomaSicError, ValueError):
    """A channel coefficient is zero where detection requires |h| > 0."""


class EvaluationError(NomaSicError, ArithmeticError):
    """A closed-form expression produced a non-finite intermediate term."""

    def __init__(self, message: str, term: str):
        super().__init__(message)
        self.term = term


class ConfigError(NomaSicError, ValueError):
    """Experiment configuration is invalid; message carries key/line context."""
