"""Exception types raised across the package."""


class InfoCountError(ValueError):
    """Base class for all errors raised by infocount."""


class NegativeProbability(InfoCountError):
    pass


class NotNormalized(InfoCountError):
    pass


class DimensionMismatch(InfoCountError):
    pass


class DomainError(InfoCountError):
    pass


class BaseMismatch(InfoCountError):
    """Two entropy values in different logarithm bases were combined."""


class NotADensity(InfoCountError):
    pass


class CompositionMismatch(InfoCountError):
    pass


class RankOutOfRange(InfoCountError):
    pass


class CorruptHeader(InfoCountError):
    pass


class TooManyInputs(InfoCountError):
    pass


class IncompatibleDistributions(InfoCountError):
    pass


class EmptySet(InfoCountError):
    pass


class BudgetExceeded(InfoCountError):
    def __init__(self, estimate: float, budget: float):
        super().__init__(
            f"estimated {estimate:.3g} symbol operations exceeds budget {budget:.3g}"
        )
        self.estimate = estimate
        self.budget = budget


class NotConverged(InfoCountError):
    """Capacity iteration hit max_iter with the bound gap still above tol.

    ``result`` holds the best-so-far CapacityResult.
    """

    def __init__(self, result):
        super().__init__(
            f"capacity bracket {result.residual:.3g} after {result.iterations} iterations"
        )
        self.result = result
