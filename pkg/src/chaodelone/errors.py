"""Exception types raised across the package."""


class ChaoDeloneError(Exception):
    pass


class NonHyperbolicElement(ChaoDeloneError):
    """An isometry with |trace| <= 2 where a hyperbolic one was required."""


class NoSolution(ChaoDeloneError):
    pass


class VertexCycleFailure(ChaoDeloneError):
    pass


class BudgetExceeded(ChaoDeloneError):
    pass


class TripleCluster(ChaoDeloneError):
    pass


class WindowTooSmall(ChaoDeloneError):
    pass


class NotFoundWithinBudget(ChaoDeloneError):
    pass


class NotSeparatedInput(ChaoDeloneError):
    pass


class ParamOrder(ChaoDeloneError):
    """epsilon < delta where the extension lemmas need epsilon >= delta."""


class NotDeloneOnA(ChaoDeloneError):
    pass


class SchemaViolation(ChaoDeloneError):
    pass


class AmbiguousBoundary(UserWarning):
    """Orbit points within the boundary tolerance of the tube wall."""
