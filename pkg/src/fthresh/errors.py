"""Exception types shared across the package."""


class FThreshError(Exception):
    """Base class for all package-specific errors."""


class UndefinedDensityError(FThreshError):
    """1-density requested for a graph with fewer than two vertices."""


class ResourceLimitError(FThreshError):
    """An enumeration exceeded its configured cap; never silently truncated."""


class NotStrictlyOneBalancedError(FThreshError):
    """Template validation failed; carries a violating subgraph."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class DisconnectedInputError(FThreshError):
    """A connected graph was required."""


class DomainError(FThreshError):
    """Numeric argument outside the admissible range."""


class InternalInconsistencyError(FThreshError):
    """A structural fact that must hold for valid inputs was violated."""


class NotACleanCycleError(FThreshError):
    """A clean-cycle argument was required."""


class WitnessNotFoundError(FThreshError):
    """Exhaustive witness search came back empty where one must exist."""


class CounterexampleError(FThreshError):
    """A verification sweep found a violating instance; carries the witness."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness
