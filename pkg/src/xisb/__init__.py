"""Size-biased distributions built from the Riemann xi function.

The family X_k (k >= 1) has density proportional to ``v_k(x) / x`` where
``v_k = D^k w_k`` and ``w_k`` is the inverse Mellin transform of
``(Gamma(s/2) zeta(s) pi^(-s/2))^k``.  Its Mellin transform is ``(2 xi(s))^k``.
"""

from .distribution import SamplerState, XiSizeBiased, build, cdf, mean_variance, moment, pdf, quantile, sample
from .errors import ConvergenceError, DomainError, PoleError, ResourceError, TruncationError, XisbError
from .mellin import ContourSpec, QuadratureSpec, inverse_mellin, mellin_transform
from .specfun import SeriesPrecision, bessel_k, divisor_table, gamma, xi, zeta
from .theorems import ClaimEntry, ClaimLedger, build_ledger
from .xi_core import VkEval, theta, v1, v2, v_general, w1, w2

__version__ = "0.1.0"

__all__ = [
    "SamplerState", "XiSizeBiased", "build", "cdf", "mean_variance", "moment", "pdf", "quantile", "sample",
    "ConvergenceError", "DomainError", "PoleError", "ResourceError", "TruncationError", "XisbError",
    "ContourSpec", "QuadratureSpec", "inverse_mellin", "mellin_transform",
    "SeriesPrecision", "bessel_k", "divisor_table", "gamma", "xi", "zeta",
    "ClaimEntry", "ClaimLedger", "build_ledger",
    "VkEval", "theta", "v1", "v2", "v_general", "w1", "w2",
]
