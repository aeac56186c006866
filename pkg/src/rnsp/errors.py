"""Exception types shared across the package."""


class RNSPError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(RNSPError, ValueError):
    """Invalid user-supplied data or configuration."""


class EmptyOrTooShortError(ValidationError):
    """A series (or segment) has fewer observations than the operation needs."""


class NonFiniteValueError(ValidationError):
    """A series contains NaN/Inf; carries the first offending 1-based index."""

    def __init__(self, index: int):
        self.index = index
        super().__init__(f"non-finite value at index {index}")


class IndexOutOfRangeError(ValidationError):
    """An interval [s, e] does not satisfy 1 <= s <= e <= n."""


class SegmentTooShortError(ValidationError):
    """An operation requiring at least two points was given fewer."""


class TooShortForAsymptoticError(ValidationError):
    """The analytic threshold formula needs T >= 3; use the Monte-Carlo route."""


class DegenerateIntervalError(ValidationError):
    """Interval sampling needs a parent interval with e - s >= 1."""


class UnknownModelError(ValidationError):
    """A simulation model name is not in the registry."""
