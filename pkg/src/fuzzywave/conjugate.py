"""Exact posterior under the Gaussian membership prior.

Given u = tau^2 / sigma^2 everything is Gaussian / inverse-gamma, so theta
and sigma^2 are integrated analytically and only a one-dimensional
integral over u remains.  That integral is done by Gauss-Legendre after
mapping u = u_c t / (1 - t), t in (0, 1), with u_c the mode of the
integrand so the nodes sit where the mass is.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize_scalar
from scipy.special import logsumexp

from .decomposition import CoefficientVector, reconstruct
from .membership import GammaStructure, HyperPrior, MembershipSpec
from .problem import Problem

EIG_CLIP_TOL = 1e-10


class DegeneratePosterior(ArithmeticError):
    pass


@dataclass(frozen=True)
class QuadratureConfig:
    nodes: int = 201
    centered: bool = True


@dataclass(frozen=True)
class SpectralForm:
    """X Gamma X' + Qn = H diag(d) H', with s = H'(y - X theta0)."""

    H: np.ndarray = field(repr=False)
    d: np.ndarray
    s_vec: np.ndarray

    @property
    def n(self) -> int:
        return self.d.size


def spectral_form(X, gamma: GammaStructure, Qn, y, theta0) -> SpectralForm:
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    th0 = theta0.values if isinstance(theta0, CoefficientVector) else np.asarray(theta0, float)
    if X.shape != (y.size, th0.size) or np.shape(Qn) != (y.size, y.size):
        raise ValueError("dimension mismatch between X, Qn, y and theta0")
    K = (X * gamma.diag) @ X.T + Qn
    K = 0.5 * (K + K.T)
    if not np.all(np.isfinite(K)):
        raise ValueError("non-finite entries in X Gamma X' + Qn")
    d, H = np.linalg.eigh(K)
    d, H = d[::-1], H[:, ::-1]
    if d.size and d[-1] < -EIG_CLIP_TOL * max(1.0, abs(d[0])):
        raise ValueError("X Gamma X' + Qn is not positive semidefinite")
    d = np.clip(d, 0.0, None)
    return SpectralForm(H, d, H.T @ (y - X @ th0))


def spectral_from_problem(problem: Problem) -> SpectralForm:
    return spectral_form(problem.X, problem.gamma, problem.design.Qn, problem.y, problem.theta0)


def log_pi22(u, sf: SpectralForm, hp: HyperPrior):
    """Log of the unnormalized u-marginal posterior.

    For ``hp.kernel == "as-printed"`` this is exactly
    log[u^(b/2) (a+bu)^(-(a+b)/2) prod(1+u d_i)^(-1/2) (2k + sum s_i^2/(1+u d_i))^(-(n+2c)/2)];
    for "textbook" the u factor is u^(b/2-1) and the last exponent -(n+2c-2)/2.
    """
    u = np.asarray(u, dtype=float)
    ud = 1.0 + u[..., None] * sf.d
    S = np.sum(sf.s_vec ** 2 / ud, axis=-1)
    a, b = hp.a, hp.b
    u_pow = b / 2.0 if hp.kernel == "as-printed" else b / 2.0 - 1.0
    out = (
        u_pow * np.log(u)
        - 0.5 * (a + b) * np.log(a + b * u)
        - 0.5 * np.sum(np.log(ud), axis=-1)
        - (0.5 * sf.n + hp.sigma2_shape) * np.log(2.0 * hp.k + S)
    )
    return out


def pi22_unnorm(u: float, sf: SpectralForm, hp: HyperPrior) -> float:
    if u <= 0:
        raise ValueError("u must be positive")
    return float(np.exp(log_pi22(u, sf, hp)))


def centered_u_nodes(log_f, n_nodes: int = 201, centered: bool = True):
    """Nodes u_i and log-weights for integrating exp(log_f(u)) over (0, inf)."""
    t, w = np.polynomial.legendre.leggauss(n_nodes)
    t = 0.5 * (t + 1.0)
    w = 0.5 * w
    uc = 1.0
    if centered:
        res = minimize_scalar(lambda lu: -(log_f(math.exp(lu)) + lu), bounds=(-40.0, 40.0), method="bounded")
        if np.isfinite(res.fun):
            uc = math.exp(res.x)
    u = uc * t / (1.0 - t)
    log_w = np.log(w) + math.log(uc) - 2.0 * np.log1p(-t)
    return u, log_w


@dataclass
class UPosterior:
    u: np.ndarray
    weights: np.ndarray  # normalized quadrature weights x density
    log_norm: float

    def expect(self, values):
        return np.tensordot(self.weights, values, axes=(0, 0))


def u_posterior(sf: SpectralForm, hp: HyperPrior, quad: QuadratureConfig = QuadratureConfig()) -> UPosterior:
    u, log_w = centered_u_nodes(lambda v: float(log_pi22(v, sf, hp)), quad.nodes, quad.centered)
    log_vals = log_pi22(u, sf, hp) + log_w
    log_norm = logsumexp(log_vals)
    if not np.isfinite(log_norm):
        raise DegeneratePosterior("degenerate u-posterior: normalizer is not finite")
    return UPosterior(u, np.exp(log_vals - log_norm), float(log_norm))


def _correction_vectors(sf: SpectralForm, u: np.ndarray) -> np.ndarray:
    # rows: u_q s / (1 + u_q d), the conditional-mean correction in the H basis
    return (u[:, None] * sf.s_vec[None, :]) / (1.0 + u[:, None] * sf.d[None, :])


def posterior_mean(sf, gamma: GammaStructure, X, theta0, hp, quad=QuadratureConfig(), upost=None) -> np.ndarray:
    """theta0 + Gamma X' H E[u (I + uD)^-1 | y] s."""
    th0 = theta0.values if isinstance(theta0, CoefficientVector) else np.asarray(theta0, float)
    if not np.any(sf.s_vec):
        return th0.copy()
    upost = upost or u_posterior(sf, hp, quad)
    Z = (gamma.diag[:, None] * np.asarray(X).T) @ sf.H
    v_bar = upost.expect(_correction_vectors(sf, upost.u))
    return th0 + Z @ v_bar


def sigma2_given_u(sf: SpectralForm, hp: HyperPrior, u) -> np.ndarray:
    """E[sigma^2 | y, u]."""
    u = np.asarray(u, dtype=float)
    S = np.sum(sf.s_vec ** 2 / (1.0 + u[..., None] * sf.d), axis=-1)
    shape = 0.5 * sf.n + hp.sigma2_shape
    return (hp.k + 0.5 * S) / (shape - 1.0)


def posterior_cov(sf, gamma: GammaStructure, X, hp, quad=QuadratureConfig(), upost=None) -> np.ndarray:
    """Var(theta | y) = E[Var(theta | y, u)] + Var(E[theta | y, u]).

    Var(theta | y, u) = E[sigma^2 | y, u] (u Gamma - u^2 Gamma X' H (I + uD)^-1 H' X Gamma).
    """
    upost = upost or u_posterior(sf, hp, quad)
    u = upost.u
    Z = (gamma.diag[:, None] * np.asarray(X).T) @ sf.H
    es2 = sigma2_given_u(sf, hp, u)
    term1 = upost.expect(es2 * u)
    e_diag = upost.expect((es2 * u ** 2)[:, None] / (1.0 + u[:, None] * sf.d[None, :]))
    v = _correction_vectors(sf, u)
    v_bar = upost.expect(v)
    centered = v - v_bar
    cov_v = (centered * upost.weights[:, None]).T @ centered
    cov = term1 * np.diag(gamma.diag) - (Z * e_diag) @ Z.T + Z @ cov_v @ Z.T
    return 0.5 * (cov + cov.T)


@dataclass
class PosteriorSummary:
    mean: CoefficientVector
    cov: np.ndarray
    u_nodes: np.ndarray
    u_weights: np.ndarray
    x_out: np.ndarray
    fitted: np.ndarray
    fitted_sd: np.ndarray
    method: str = "conjugate"
    extras: dict = field(default_factory=dict)

    @property
    def sd(self) -> np.ndarray:
        return np.sqrt(np.clip(np.diag(self.cov), 0.0, None))


def curve(mean: CoefficientVector, cov: np.ndarray, table, x_out):
    x_out = np.asarray(x_out, dtype=float).ravel()
    if x_out.size == 0:
        return x_out, np.empty(0), np.empty(0)
    from .decomposition import _basis_columns

    rows = _basis_columns(mean.plan, table, x_out)
    fit = reconstruct(mean, x_out, table)
    var = np.einsum("ij,jk,ik->i", rows, cov, rows)
    return x_out, fit, np.sqrt(np.clip(var, 0.0, None))


def fit_conjugate(problem: Problem, hp: HyperPrior, x_out=(), quad=QuadratureConfig(),
                  spec: MembershipSpec | None = None) -> PosteriorSummary:
    if spec is not None and spec.kind != "gaussian":
        raise ValueError("the exact posterior needs the Gaussian membership")
    sf = spectral_from_problem(problem)
    upost = u_posterior(sf, hp, quad)
    mean = posterior_mean(sf, problem.gamma, problem.X, problem.theta0, hp, quad, upost)
    cov = posterior_cov(sf, problem.gamma, problem.X, hp, quad, upost)
    mean_cv = CoefficientVector(mean, problem.plan)
    xs, fit, sd = curve(mean_cv, cov, problem.table, x_out)
    return PosteriorSummary(mean_cv, cov, upost.u, upost.weights, xs, fit, sd,
                            extras={"E_u": float(upost.expect(upost.u)),
                                    "E_sigma2": float(upost.expect(sigma2_given_u(sf, hp, upost.u)))})
