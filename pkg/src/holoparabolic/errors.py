"""Exception hierarchy shared by every module of the package."""


class HoloParabolicError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(HoloParabolicError, ValueError):
    """A point lies outside the domain of a function or operation."""


class NonFiniteError(HoloParabolicError, ArithmeticError):
    """An evaluation overflowed or produced NaN."""


class ExpressionError(HoloParabolicError, ValueError):
    """An expression string could not be parsed."""


class QuadratureFailure(HoloParabolicError):
    """Adaptive quadrature did not reach its tolerance within the panel budget."""


class EstimatorInconclusive(HoloParabolicError):
    """A Monte Carlo bound could not resolve a comparison at the requested confidence."""


class SearchBudgetExceeded(HoloParabolicError):
    """No entropy-bound violation was found below the search budget."""


class FiberFloorNegative(HoloParabolicError, ValueError):
    """The fiber sectional-curvature floor is negative, so the Ricci bound is not claimed."""


class ExcessiveCensoring(HoloParabolicError):
    """Too many simulated paths exhausted their step budget.

    The partially computed statistics are kept on ``stats``.
    """

    def __init__(self, message, stats=None):
        super().__init__(message)
        self.stats = stats


class UnknownAnalysis(HoloParabolicError, KeyError):
    """An analysis name is not part of the catalog of analyses."""


class ScenarioError(HoloParabolicError, ValueError):
    """A scenario file failed validation."""
