"""Viewpoint generation: feasible sampling, bilevel MPC and baselines"""

from .sampling import Gaussian, UniformRegion, sample_feasible
from .mpc import bilevel_mpc, fit_distribution, rank, stage1_seed
from .baselines import baseline_policy

__all__ = [
    "Gaussian", "UniformRegion", "sample_feasible",
    "bilevel_mpc", "fit_distribution", "rank", "stage1_seed",
    "baseline_policy",
]
