"""Exception types shared across the package."""


class CoarseKitError(Exception):
    """Base class for all errors raised by coarsekit."""


class NotCoarselyConnected(CoarseKitError):
    pass


class DomainMismatch(CoarseKitError):
    pass


class NotAPartition(CoarseKitError):
    pass


class NotConnected(CoarseKitError):
    pass


class BudgetExceeded(CoarseKitError):
    """Raised when an enumeration hits its node/move budget before finishing."""

    def __init__(self, nodes_seen, message=None):
        self.nodes_seen = nodes_seen
        super().__init__(message or f"budget exceeded after {nodes_seen} nodes")


class NotFoundWithinRadius(CoarseKitError):
    pass


class GenerationFailure(CoarseKitError):
    pass


class LoopInvalid(CoarseKitError):
    pass


class HypothesisViolated(CoarseKitError):
    def __init__(self, index, message=None):
        self.index = index
        super().__init__(message or f"hypothesis violated at index {index}")


class PointOffCircle(CoarseKitError):
    pass


class BadParams(CoarseKitError):
    pass


class TooFewSamples(CoarseKitError):
    pass


class NotATree(CoarseKitError):
    pass


class DegreeTooSmall(CoarseKitError):
    pass


class NoEvaluation(CoarseKitError):
    pass


class BadN(CoarseKitError):
    pass


class LetterClash(CoarseKitError):
    pass


class NotAUnit(CoarseKitError):
    pass


class DimensionMismatch(CoarseKitError):
    pass
