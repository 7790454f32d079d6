"""Stable densities, their derivative determinants and total positivity."""
from .errors import (BracketingFailure, DomainError, InvalidParams, NonConvergence, NumericFailure,
                     PoleError, StableTPError)
from .specfun import DEFAULT_PRECISION, BetaParams, Precision
from .stable import EvalConfig, StableParams, density, density_derivative, density_fast
from .kernels import (INF, Kernel, TPOrder, cauchy_type_kernel, fractional_integration_kernel,
                      gaussian_spacetime_kernel, positive_stable_kernel, predict_tp_general,
                      predict_tp_positive, radial_kernel, stable_convolution_kernel)
from .tp import MinorResult, TPReport, minor, tp_search
from .asymptotics import delta_k, delta_k_at_zero

__version__ = "0.1.0"

__all__ = [
    "BracketingFailure", "DomainError", "InvalidParams", "NonConvergence", "NumericFailure",
    "PoleError", "StableTPError", "DEFAULT_PRECISION", "BetaParams", "Precision", "EvalConfig",
    "StableParams", "density", "density_derivative", "density_fast", "INF", "Kernel", "TPOrder",
    "cauchy_type_kernel", "fractional_integration_kernel", "gaussian_spacetime_kernel",
    "positive_stable_kernel", "predict_tp_general", "predict_tp_positive", "radial_kernel",
    "stable_convolution_kernel", "MinorResult", "TPReport", "minor", "tp_search", "delta_k",
    "delta_k_at_zero",
]
