"""Exception types shared across the package."""


class ZenoLabError(Exception):
    """Base class for all package errors."""


class BelowThreshold(ZenoLabError, ValueError):
    """Raised when a decay channel is closed (m_i <= m_a + m_b)."""


class NotConverged(ZenoLabError, RuntimeError):
    """A quadrature did not reach its tolerance.

    The best available estimate is attached as ``result`` so callers can
    still report it (flagged) instead of discarding it.
    """

    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result


class InsufficientPoints(ZenoLabError, ValueError):
    """Too few samples for a fit or scan."""


class DegenerateInput(ZenoLabError, ValueError):
    """Input data for which the requested quantity is undefined."""
