"""Random matrices with an external source: spectral curve, multiple Hermite
polynomials, finite-n kernels, large-n asymptotics and a Monte Carlo sampler."""

from .errors import (BranchPointError, DomainError, EvaluationError, ExtSrcError, PrecisionError,
                     ShrinkGridError, StatisticsError, UnsupportedRegimeError, UseDiagonalError)
from .multiple_hermite import EnsembleParams, eval_P
from .spectral_curve import CurveData, make_curve, rho

__version__ = "0.1.0"

__all__ = ["make_curve", "CurveData", "rho", "EnsembleParams", "eval_P", "ExtSrcError",
           "UnsupportedRegimeError", "DomainError", "PrecisionError", "EvaluationError",
           "BranchPointError", "StatisticsError", "UseDiagonalError", "ShrinkGridError"]
