"""Numerical checks for power-type barriers of the fractional p-Laplacian."""

from .evaluator import EvalResult, NegativePower, Power, QuadratureConfig, TruncatedPower, eval_flap
from .params import ProblemParams, classify, critical_exponents

__version__ = "0.1.0"

__all__ = [
    "EvalResult",
    "NegativePower",
    "Power",
    "ProblemParams",
    "QuadratureConfig",
    "TruncatedPower",
    "__version__",
    "classify",
    "critical_exponents",
    "eval_flap",
]
