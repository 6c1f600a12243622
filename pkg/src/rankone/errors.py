"""Exceptions raised by the analysis routines."""


class RootFindingError(ArithmeticError):
    """Aberth iteration did not converge; ``best`` holds the last iterate."""

    def __init__(self, message, best):
        super().__init__(message)
        self.best = best


class ConditioningError(ArithmeticError):
    """A numerical consistency check failed (e.g. interpolation hold-out)."""


class DegenerateError(ValueError):
    """Input lies on the non-generic set the requested model excludes."""
