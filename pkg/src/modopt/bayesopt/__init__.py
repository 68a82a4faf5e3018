from .kernels import KernelSpec, matern_kernel, matern_matrix
from .gp import GpModel, gp_fit, gp_predict, gp_predict_batch
from .acquisition import (
    ACQUISITIONS,
    EI,
    GP_UCB,
    PI,
    UCB,
    SweepConfig,
    acq_value,
    gp_ucb_kappa,
    maximize_acquisition,
)
from .loop import BoConfig, Evaluation, SearchResult, bo_loop, grid_search, random_search

__all__ = [
    "KernelSpec", "matern_kernel", "matern_matrix",
    "GpModel", "gp_fit", "gp_predict", "gp_predict_batch",
    "acq_value", "gp_ucb_kappa", "maximize_acquisition", "SweepConfig",
    "UCB", "GP_UCB", "EI", "PI", "ACQUISITIONS",
    "BoConfig", "Evaluation", "SearchResult", "bo_loop", "random_search", "grid_search",
]
