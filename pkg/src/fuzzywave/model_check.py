"""Bayes factor for M0: g = g0 against M1: g != g0 under the Gaussian membership."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable

import numpy as np
from scipy.special import gammaln, logsumexp

from .conjugate import QuadratureConfig, SpectralForm, centered_u_nodes, spectral_from_problem
from .data import Dataset
from .membership import HyperPrior
from .problem import Problem, build_problem

# max(B01, 1/B01) thresholds
_GRADES = ((100.0, "very strong"), (10.0, "strong"), (3.0, "substantial"), (1.0, "weak"))


def evidence_label(log_b01: float) -> str:
    ratio = math.exp(min(abs(log_b01), 700.0))
    favoured = "M0" if log_b01 >= 0 else "M1"
    for threshold, grade in _GRADES:
        if ratio >= threshold:
            break
    if grade == "weak":
        return f"weak (slightly favours {favoured})" if log_b01 != 0 else "weak (indifferent)"
    return f"{grade} for {favoured}"


@dataclass(frozen=True)
class BayesFactorResult:
    log_m0: float
    log_m1: float
    log_B01: float
    label: str

    @property
    def B01(self) -> float:
        return math.exp(self.log_B01)


def _log_const(n: int, hp: HyperPrior) -> float:
    # (2 pi)^(-n/2) k^(c-1) / Gamma(c-1) * Gamma(n/2 + c - 1)
    c, k = hp.c, hp.k
    return -0.5 * n * math.log(2 * math.pi) + (c - 1) * math.log(k) - gammaln(c - 1) + gammaln(0.5 * n + c - 1)


def log_marginal_m0(y, g0_values, hp: HyperPrior) -> float:
    y = np.asarray(y, dtype=float)
    resid = y - np.asarray(g0_values, dtype=float)
    n = y.size
    return _log_const(n, hp) - (0.5 * n + hp.c - 1) * math.log(hp.k + 0.5 * float(resid @ resid))


def _log_m1_integrand(u, sf: SpectralForm, hp: HyperPrior):
    tb = hp.with_kernel("textbook")
    u = np.asarray(u, dtype=float)
    ud = 1.0 + u[..., None] * sf.d
    S = np.sum(sf.s_vec ** 2 / ud, axis=-1)
    return (-(0.5 * sf.n + hp.c - 1) * np.log(hp.k + 0.5 * S)
            - 0.5 * np.sum(np.log(ud), axis=-1) + tb.log_u(u))


def log_marginal_m1(sf: SpectralForm, hp: HyperPrior, quad: QuadratureConfig = QuadratureConfig()) -> float:
    """log m(y | M1): sigma^2 integrated analytically, u by quadrature against the F(b, a) prior."""
    u, log_w = centered_u_nodes(lambda v: float(_log_m1_integrand(v, sf, hp)), quad.nodes, quad.centered)
    total = logsumexp(_log_m1_integrand(u, sf, hp) + log_w)
    if not np.isfinite(total):
        raise ArithmeticError("u-integral of the M1 marginal is not finite")
    return _log_const(sf.n, hp) + float(total)


def bayes_factor_from_problem(problem: Problem, hp: HyperPrior, quad=QuadratureConfig()) -> BayesFactorResult:
    lm0 = log_marginal_m0(problem.y, problem.g0_values, hp)
    lm1 = log_marginal_m1(spectral_from_problem(problem), hp, quad)
    lb = lm0 - lm1
    return BayesFactorResult(lm0, lm1, lb, evidence_label(lb))


def bayes_factor(dataset: Dataset, g0: Callable, hp: HyperPrior, quad=QuadratureConfig(), **problem_kw) -> BayesFactorResult:
    return bayes_factor_from_problem(build_problem(dataset, g0, **problem_kw), hp, quad)


def select_resolution(dataset: Dataset, g0: Callable, hp: HyperPrior, J_range: Iterable[int],
                      quad=QuadratureConfig(), tie_tol: float = 1e-6, **problem_kw) -> tuple[int, dict[int, float]]:
    """Smallest J whose log m(y | M1) is within ``tie_tol`` of the best candidate.

    X Gamma X' + Qn does not depend on J (a level's weight is the same in
    the design and in the remainder), so scores differ only through the
    projected prior guess; with g0 = 0 all levels tie and the coarsest wins.
    """
    scores = {}
    for J in J_range:
        problem = build_problem(dataset, g0, J=J, **problem_kw)
        scores[J] = log_marginal_m1(spectral_from_problem(problem), hp, quad)
    if not scores:
        raise ValueError("empty resolution range")
    top = max(scores.values())
    best = min(j for j, v in scores.items() if v >= top - tie_tol)
    return best, scores
