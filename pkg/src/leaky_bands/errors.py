"""Exception types shared across the package."""


class LeakyBandsError(Exception):
    """Base class for all package errors."""


class QuadratureError(LeakyBandsError):
    """Composite quadrature did not reach its self-consistency tolerance."""


class AssumptionError(LeakyBandsError):
    """A geometric assumption on the curvature profile is violated."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class PreconditionError(LeakyBandsError):
    """Parameters fall outside the range an operation is defined for."""


class ConvergenceError(LeakyBandsError):
    """An iterative or discretized computation failed its accuracy check."""
