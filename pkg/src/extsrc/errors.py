"""Exception hierarchy shared by all modules."""


class ExtSrcError(Exception):
    """Base class for computation errors raised by this package."""


class UnsupportedRegimeError(ExtSrcError):
    """Raised for parameters outside the supercritical regime a > 1."""


class DomainError(ExtSrcError, ValueError):
    """Raised when an argument lies outside the domain of an operation."""


class PrecisionError(ExtSrcError):
    """Raised when a quadrature cannot reach its accuracy target."""


class EvaluationError(ExtSrcError):
    """Raised when an integrand is not finite at a quadrature node."""


class BranchPointError(DomainError):
    """Raised when a point is too close to a branch point of the spectral curve."""


class StatisticsError(ExtSrcError):
    """Raised when a Monte Carlo statistic has too few samples."""


class UseDiagonalError(DomainError):
    """Raised when an off-diagonal kernel is requested at (nearly) coincident points."""


class ShrinkGridError(DomainError):
    """Raised when a scaled grid leaves the band it is meant to probe."""
