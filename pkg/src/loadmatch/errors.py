"""Exception types shared across the package."""


class LoadMatchError(Exception):
    """Base class for all package-specific errors."""


class SelfLoopError(LoadMatchError, ValueError):
    """An edge joins a vertex to itself."""


class VertexRangeError(LoadMatchError, ValueError):
    """A vertex id falls outside [0, n)."""


class NonPositiveThresholdError(LoadMatchError, ValueError):
    """A density threshold t must be positive."""


class ThresholdOrderError(LoadMatchError, ValueError):
    """Expected 0 < r < t."""


class NonPositiveEpsilonError(LoadMatchError, ValueError):
    """Expected eps > 0."""


class DomainMismatchError(LoadMatchError, ValueError):
    """An allocation or matching does not cover the required domain."""


class SizeMismatchError(LoadMatchError, ValueError):
    """Two objects that must share a vertex count do not."""


class TooLargeError(LoadMatchError, ValueError):
    """Input exceeds the enumeration guard for an exhaustive routine."""


class SOutOfRangeError(LoadMatchError, ValueError):
    """Derived subsampling rate s exceeds 1."""


class DegenerateSError(LoadMatchError, ValueError):
    """s = 1 (or ps = 1) makes a likelihood constant undefined."""


class UniverseMismatchError(LoadMatchError, ValueError):
    """A graph and an orbit decomposition disagree on their pair universe."""


class NestingViolationError(LoadMatchError, ValueError):
    """Expected u_prev ⊆ u ⊆ domain of the partial matching."""


class NonConvergenceError(LoadMatchError, RuntimeError):
    """Iterative rebalancing stalled above tolerance."""

    def __init__(self, message: str, residual: float):
        super().__init__(message)
        self.residual = residual


class CapacityOverflowError(LoadMatchError, OverflowError):
    """Capacities would exceed the 64-bit integer range."""


class UnboundedFlowError(LoadMatchError, ValueError):
    """An unbounded-capacity source-to-sink path exists."""


class UnknownSuiteError(LoadMatchError, ValueError):
    """Unknown verification suite name."""


class InvariantViolationError(LoadMatchError, RuntimeError):
    """An internal structural invariant failed at runtime."""
