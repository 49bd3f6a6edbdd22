"""Exception hierarchy shared by all modules."""


class AleError(Exception):
    """Base class for every error raised by :mod:`aletwistor`."""


class ZeroPolynomial(AleError, ValueError):
    pass


class NonConvergence(AleError, ArithmeticError):
    """An iterative method exhausted its iteration budget."""


class AmbiguousClustering(AleError):
    """Root clustering changed between ``tol`` and ``2 * tol``."""


class SingularSystem(AleError, ArithmeticError):
    pass


class NonIntegralSolution(AleError, ArithmeticError):
    pass


class UnsupportedType(AleError, ValueError):
    pass


class NonPositiveDiscriminant(AleError, ValueError):
    pass


class Divergence(AleError, ArithmeticError):
    pass


class RankDeficient(AleError, ArithmeticError):
    pass


class RootCollision(AleError, ValueError):
    pass


class QuadratureNonConvergence(AleError, ArithmeticError):
    pass


class PathThroughBranchPoint(AleError, ValueError):
    pass


class DomainError(AleError, ValueError):
    pass


class GridTooSmall(AleError, ValueError):
    pass


class ParseError(AleError, ValueError):
    """Malformed run configuration; ``where`` names the offending field or line."""

    def __init__(self, message, where=None):
        super().__init__(message if where is None else f"{where}: {message}")
        self.where = where
