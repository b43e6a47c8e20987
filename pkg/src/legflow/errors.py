"""Exception types shared across the package."""


class LegflowError(Exception):
    """Base class for all package errors."""


class SingularityError(LegflowError):
    """A flow reached a genuine singularity (curvature hitting zero).

    Carries the time reached and the offending sample so that drivers can
    report the breakdown instead of a bare traceback.
    """

    def __init__(self, message, time=None, index=None):
        super().__init__(message)
        self.time = time
        self.index = index


class DegenerateCurveError(LegflowError, ValueError):
    """Curve fails an immersion or regularity requirement."""

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class HolonomyMismatchError(LegflowError, ValueError):
    """Declared vertical holonomy disagrees with the sampled z data."""


class ConvexityError(LegflowError, ValueError):
    """Support function lost strict convexity (radius of curvature <= 0)."""

    def __init__(self, message, theta=None, critical_time=None):
        super().__init__(message)
        self.theta = theta
        self.critical_time = critical_time


class LegendrianError(LegflowError, ValueError):
    """Input curve is not horizontal within tolerance."""


class ParseError(LegflowError, ValueError):
    """Malformed text file; ``line`` is 1-based."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line
