"""Exception types shared across the package."""


class WsnError(Exception):
    """Base class for all linewsn errors."""


class LengthMismatchError(WsnError):
    """Input lists that must agree in length do not."""


class UnsortedPositionsError(WsnError):
    """Node positions are not sorted left to right."""


class NonPositiveRangeError(WsnError):
    """A transmission radius is zero or negative."""


class IndexOutOfRangeError(WsnError, IndexError):
    """A node index falls outside 0..N+1."""


class TooLargeError(WsnError):
    """Instance exceeds a small-instance guard for an exhaustive routine."""


class InfeasibleSolutionError(WsnError):
    """A solution violates the per-sensor energy budgets it was checked against."""


class CapacityViolationError(WsnError):
    """A schedule overdraws the energy capacity of some sensor."""


class NumericalFailureError(WsnError):
    """The LP feasibility routine exceeded its iteration cap."""


class RejectionExhaustedError(WsnError):
    """Instance generation failed to produce a connected deployment."""
