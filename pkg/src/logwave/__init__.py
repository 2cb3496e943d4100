"""Numerical laboratory for blow-up of the conformal semilinear wave equation
with a log-perturbed power nonlinearity."""

__version__ = "0.1.0"

from .model import ModelParams, build_nonlinearity_table, kappa, nonlinearity, psi
from .simvars import SimilarityFrame

__all__ = [
    "__version__",
    "ModelParams",
    "SimilarityFrame",
    "kappa",
    "psi",
    "nonlinearity",
    "build_nonlinearity_table",
]
