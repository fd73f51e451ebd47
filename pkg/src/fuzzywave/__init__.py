"""Bayesian wavelet smoothing centred on a fuzzy prior guess of the regression curve."""

__version__ = "0.1.0"

from .conjugate import PosteriorSummary, QuadratureConfig, fit_conjugate
from .data import Dataset, builtin_g0, read_dataset, simulate, simulate_seasonal
from .decomposition import CoefficientVector, project_coefficients, reconstruct, remainder_kernel
from .mcmc import ChainConfig, ChainSummary, run_chain
from .membership import GammaStructure, HyperPrior, MembershipSpec, combine, membership_log_eval
from .model_check import BayesFactorResult, bayes_factor, select_resolution
from .problem import Problem, build_problem
from .robustness import MCConfig, RatioBand, point_bayes_factor, solve_band
from .wavelets import build_family, make_plan, plan_resolution, refine_scaling

__all__ = [
    "BayesFactorResult", "ChainConfig", "ChainSummary", "CoefficientVector", "Dataset", "GammaStructure",
    "HyperPrior", "MCConfig", "MembershipSpec", "PosteriorSummary", "Problem", "QuadratureConfig", "RatioBand",
    "bayes_factor", "build_family", "build_problem", "builtin_g0", "combine", "fit_conjugate", "make_plan",
    "membership_log_eval", "plan_resolution", "point_bayes_factor", "project_coefficients", "read_dataset",
    "reconstruct", "refine_scaling", "remainder_kernel", "run_chain", "select_resolution", "simulate",
    "simulate_seasonal", "solve_band",
]
