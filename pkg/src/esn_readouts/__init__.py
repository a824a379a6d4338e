"""Echo state network classifiers with ridge, sparse (Dantzig) and PCA-residual readouts."""

from ._kernels import BACKEND
from .linalg import principal_components, ridge_solve, spectral_radius
from .reservoir import ReservoirConfig, ReservoirWeights, init_weights, run, run_batch

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "ReservoirConfig",
    "ReservoirWeights",
    "init_weights",
    "run",
    "run_batch",
    "ridge_solve",
    "principal_components",
    "spectral_radius",
]
