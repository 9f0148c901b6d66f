"""Exception hierarchy shared by every module."""


class SumsetLabError(Exception):
    """Base class for all library errors."""


class DimensionError(SumsetLabError, ValueError):
    pass


class EmptyInputError(SumsetLabError, ValueError):
    pass


class ArgumentError(SumsetLabError, ValueError):
    pass


class UnsupportedDimensionError(SumsetLabError, ValueError):
    pass


class CapacityError(SumsetLabError):
    """An enumeration or search would exceed its configured cap."""


class NoCoverError(SumsetLabError):
    """No hull of the requested shape exists (treated as size +inf)."""


class GenerationError(SumsetLabError):
    pass


class HypothesisError(SumsetLabError):
    """The hypotheses of a statement are not met by the given instance."""

    def __init__(self, message, violations=None):
        super().__init__(message)
        self.violations = list(violations or [])


class InfeasibleError(SumsetLabError):
    pass
