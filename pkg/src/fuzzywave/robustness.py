"""Range of the Bayes factor over a density-ratio class of priors.

The class holds every prior pi(theta) with c1 h(theta) <= alpha pi(theta) <=
c2 h(theta) for some alpha > 0, where h is the Gaussian membership
exp(-w ||theta - theta0||^2), normalized to N(theta0, I / 2w), and the
(sigma^2, u) prior is held fixed.  For
B01(pi) = int q1 pi / int q2 pi the infimum is the root in lambda of

    c2 int (q1 - lambda q2)^- h + c1 int (q1 - lambda q2)^+ h = 0

and the supremum swaps c1 and c2.  Integrals against h are Monte-Carlo
averages over one bank of draws from h, shared by every lambda and both
orientations, so the bounds are deterministic functions of that bank.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq
from scipy.special import gammaln, logsumexp

from .conjugate import QuadratureConfig, centered_u_nodes
from .membership import HyperPrior
from .model_check import log_marginal_m0
from .problem import Problem


@dataclass(frozen=True)
class MCConfig:
    samples: int = 20000
    seed: int = 0
    weight: float = 1.0  # membership exp(-weight * rho^2), i.e. N(theta0, I / (2 weight))

    def __post_init__(self):
        if self.weight <= 0:
            raise ValueError("membership weight must be positive")

    @property
    def h_var(self) -> float:
        return 0.5 / self.weight


@dataclass(frozen=True)
class RatioBand:
    c1: float
    c2: float
    inf_B01: float
    sup_B01: float
    point_B01: float
    mc_se: float
    n_samples: int

    @property
    def width(self) -> float:
        return self.sup_B01 - self.inf_B01


def psi(lam, q1, q2, weights, c_neg: float, c_pos: float) -> float:
    """c_neg * E_w[(q1 - lam q2)^-] + c_pos * E_w[(q1 - lam q2)^+].

    The negative part is min(q, 0), so the first term is <= 0.
    """
    diff = np.asarray(q1) - lam * np.asarray(q2)
    w = np.asarray(weights)
    return float(c_neg * np.dot(w, np.minimum(diff, 0.0)) + c_pos * np.dot(w, np.maximum(diff, 0.0)))


def _solve(q1, q2, w, c_neg, c_pos, rtol, max_doublings=60) -> float:
    q1 = np.broadcast_to(np.asarray(q1, dtype=float), np.shape(q2))
    ratios = q1[q2 > 0] / q2[q2 > 0]
    lo, hi = float(ratios.min()), float(ratios.max())
    if lo == hi:
        return lo
    # psi(lo) >= 0 >= psi(hi) holds exactly; grow only if round-off says otherwise
    for _ in range(max_doublings):
        if psi(lo, q1, q2, w, c_neg, c_pos) >= 0 and psi(hi, q1, q2, w, c_neg, c_pos) <= 0:
            break
        lo, hi = lo / 2.0, hi * 2.0
    else:
        raise ArithmeticError("could not bracket the bound")
    return brentq(lambda lam: psi(lam, q1, q2, w, c_neg, c_pos), lo, hi, xtol=np.finfo(float).tiny, rtol=rtol, maxiter=500)


def ratio_bounds(q1, q2, weights, c1: float, c2: float, rtol: float = 1e-14) -> tuple[float, float]:
    """(inf, sup) of sum(q1 pi)/sum(q2 pi) over c1 w <= alpha pi <= c2 w.

    ``weights`` are the reference measure (h at atoms, or 1/N for Monte-Carlo
    draws from h).  q2 must be positive.
    """
    if not 0 < c1 <= c2:
        raise ValueError("need 0 < c1 <= c2")
    q2 = np.asarray(q2, dtype=float)
    if np.any(q2 <= 0):
        raise ValueError("q2 must be positive")
    w = np.asarray(weights, dtype=float)
    lower = _solve(q1, q2, w, c2, c1, rtol)
    upper = _solve(q1, q2, w, c1, c2, rtol)
    return lower, upper


def log_q2_values(thetas, problem: Problem, hp: HyperPrior, quad: QuadratureConfig = QuadratureConfig(),
                  u_center: float | None = None) -> np.ndarray:
    """log q2(theta) = log int f(y | theta, sigma^2, u) pi0(sigma^2) pi0(u).

    sigma^2 is integrated analytically; u by quadrature with the remainder
    Gram matrix diagonalized as Qn = H diag(e) H'.
    """
    thetas = np.atleast_2d(np.asarray(thetas, dtype=float))
    e, HQ = np.linalg.eigh(problem.design.Qn)
    e = np.clip(e, 0.0, None)
    r = (problem.y[None, :] - thetas @ problem.X.T) @ HQ  # (N, n)
    n = problem.n
    c, k = hp.c, hp.k
    tb = hp.with_kernel("textbook")
    const = -0.5 * n * math.log(2 * math.pi) + (c - 1) * math.log(k) - gammaln(c - 1) + gammaln(0.5 * n + c - 1)
    if u_center is None:
        u, log_w = centered_u_nodes(lambda v: float(tb.log_u(v)), quad.nodes, True)
    else:
        u, log_w = centered_u_nodes(None, quad.nodes, False)
        u, log_w = u * u_center, log_w + math.log(u_center)
    ue = 1.0 + u[:, None] * e[None, :]  # (U, n)
    log_det = -0.5 * np.sum(np.log(ue), axis=1)
    S = (r ** 2) @ (1.0 / ue).T  # (N, U)
    log_int = -(0.5 * n + c - 1) * np.log(k + 0.5 * S) + (log_det + tb.log_u(u) + log_w)[None, :]
    return const + logsumexp(log_int, axis=1)


def q2_value(theta, problem: Problem, hp: HyperPrior, quad: QuadratureConfig = QuadratureConfig()) -> float:
    return float(np.exp(log_q2_values(theta, problem, hp, quad)[0]))


def draw_membership(problem: Problem, mc: MCConfig) -> np.ndarray:
    if mc.samples < 100:
        raise ValueError("need at least 100 Monte-Carlo samples")
    rng = np.random.default_rng(mc.seed)
    z = rng.standard_normal((mc.samples, problem.p))
    return problem.theta0.values[None, :] + math.sqrt(mc.h_var) * z


def solve_band(problem: Problem, hp: HyperPrior, c1: float, c2: float, mc: MCConfig = MCConfig(),
               quad: QuadratureConfig = QuadratureConfig(), thetas=None) -> RatioBand:
    """Inf and sup of B01 over the density-ratio class with bounds c1 h, c2 h."""
    if not 0 < c1 <= c2:
        raise ValueError("need 0 < c1 <= c2")
    if thetas is None:
        thetas = draw_membership(problem, mc)
    log_q1 = log_marginal_m0(problem.y, problem.g0_values, hp)
    log_q2 = log_q2_values(thetas, problem, hp, quad)
    shift = max(log_q1, float(log_q2.max()))
    q1 = math.exp(log_q1 - shift)
    q2 = np.exp(log_q2 - shift)
    if np.any(q2 <= 0):
        # underflow relative to the largest draw; those draws carry no weight in q2
        q2 = np.maximum(q2, np.finfo(float).tiny)
    N = q2.size
    w = np.full(N, 1.0 / N)
    lower, upper = ratio_bounds(q1, q2, w, c1, c2)
    mean_q2 = float(q2.mean())
    point = q1 / mean_q2
    se = point * float(q2.std(ddof=1)) / (math.sqrt(N) * mean_q2)
    return RatioBand(c1, c2, lower, upper, point, se, N)


def membership_marginal(problem: Problem, hp: HyperPrior, weight: float = 1.0,
                        log_s2=(-14.0, 10.0), log_u=(-16.0, 8.0), step=0.02) -> float:
    """log int q2(theta) h(theta) dtheta by deterministic (sigma^2, u) quadrature.

    theta is integrated in closed form: y | sigma^2, u ~ N(X theta0,
    X X' / (2 weight) + sigma^2 (I + u Qn)).  Serves as the point value that
    the Monte-Carlo band must collapse to when c1 = c2.
    """
    X, y = problem.X, problem.y
    n = problem.n
    A = (X @ X.T) * MCConfig(weight=weight).h_var
    r = y - X @ problem.theta0.values
    tb = hp.with_kernel("textbook")
    lu = np.arange(log_u[0], log_u[1] + step / 2, step)
    ls = np.arange(log_s2[0], log_s2[1] + step / 2, step)
    s2 = np.exp(ls)
    rows = np.empty(lu.size)
    for i, u in enumerate(np.exp(lu)):
        B = np.eye(n) + u * problem.design.Qn
        lb, Vb = np.linalg.eigh(B)
        Bih = (Vb / np.sqrt(lb)) @ Vb.T  # B^-1/2
        lam, U = np.linalg.eigh(Bih @ A @ Bih)
        z = U.T @ (Bih @ r)
        tot = lam[None, :] + s2[:, None]  # eigenvalues of B^-1/2 Cov B^-1/2
        ll = (-0.5 * n * math.log(2 * math.pi) - 0.5 * np.sum(np.log(lb))
              - 0.5 * np.sum(np.log(tot), axis=1) - 0.5 * np.sum(z[None, :] ** 2 / tot, axis=1))
        integrand = ll + tb.log_sigma2(s2) + ls
        rows[i] = logsumexp(integrand) + math.log(step) + float(tb.log_u(u)) + lu[i]
    return float(logsumexp(rows) + math.log(step))


def point_bayes_factor(problem: Problem, hp: HyperPrior, weight: float = 1.0) -> float:
    """q1 / int q2 h for the nominal prior h (no Monte Carlo)."""
    return math.exp(log_marginal_m0(problem.y, problem.g0_values, hp) - membership_marginal(problem, hp, weight))
