"""Metropolis-within-Gibbs sampler for the membership priors.

One sweep updates theta (exact normal draw for the Gaussian and, given
delta^2, the student-t membership; blocked random-walk Metropolis for the
ellipsoid), then delta^2 (student-t only), then log sigma^2 and log u by
random-walk Metropolis.  Proposal scales adapt during burn-in only.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .membership import HyperPrior, MembershipSpec, hyper_log_density, membership_log_eval, rho_J_sq
from .problem import Problem

_LOG_2PI = math.log(2.0 * math.pi)


@dataclass(frozen=True)
class ChainConfig:
    iters: int = 20000
    burn_in: int = 5000
    thin: int = 5
    seed: int = 0
    step_log_sigma2: float = 0.3
    step_log_u: float = 0.5
    step_theta: float = 0.05
    adapt_every: int = 50

    def __post_init__(self):
        if self.iters <= self.burn_in or self.burn_in < 0:
            raise ValueError("need iters > burn_in >= 0")
        if self.thin < 1:
            raise ValueError("thin must be at least 1")
        if min(self.step_log_sigma2, self.step_log_u, self.step_theta) <= 0:
            raise ValueError("step sizes must be positive")


@dataclass
class ChainState:
    theta: np.ndarray
    sigma2: float
    u: float
    delta2: float | None = None

    def __post_init__(self):
        if self.sigma2 <= 0 or self.u <= 0 or (self.delta2 is not None and self.delta2 <= 0):
            raise ValueError("sigma2, u and delta2 must be positive")

    @property
    def tau2(self) -> float:
        return self.u * self.sigma2


@dataclass
class ChainSummary:
    names: list[str]
    n_kept: int
    mean: np.ndarray
    var: np.ndarray
    ess: np.ndarray
    accept_rate: dict[str, float]

    @property
    def mc_se(self) -> np.ndarray:
        return np.sqrt(self.var / self.ess)


def effective_sample_size(x: np.ndarray) -> float:
    """ESS with Geyer's initial positive sequence truncation."""
    x = np.asarray(x, dtype=float)
    n = x.size
    if n < 4 or np.var(x) == 0:
        return float(n)
    xc = x - x.mean()
    f = np.fft.rfft(xc, n=2 * n)
    acov = np.fft.irfft(f * np.conj(f))[:n] / n
    rho = acov / acov[0]
    tau = -1.0
    for m in range(0, n // 2):
        pair = rho[2 * m] + rho[2 * m + 1]
        if pair <= 0:
            break
        tau += 2.0 * pair
    return float(min(n, n / max(tau, 1e-12)))


class Sampler:
    """Posterior over (theta, sigma^2, u[, delta^2]) for one problem and membership."""

    def __init__(self, problem: Problem, spec: MembershipSpec, hp: HyperPrior):
        self.problem = problem
        self.spec = spec
        self.hp = hp
        e, HQ = np.linalg.eigh(problem.design.Qn) if problem.n else (np.zeros(0), np.zeros((0, 0)))
        self.e = np.clip(e, 0.0, None)
        self.XQ = HQ.T @ problem.X
        self.yQ = HQ.T @ problem.y
        self.theta0 = spec.theta0.values
        self.gdiag = problem.gamma.diag
        self.log_det_gamma = float(np.sum(np.log(self.gdiag)))
        self.blocks = self._level_blocks()
        if spec.kind == "student-t":
            self.V_inv = np.linalg.inv(spec.V)
            self.log_det_V = float(np.linalg.slogdet(spec.V)[1])

    def _level_blocks(self) -> list[np.ndarray]:
        levels = self.problem.plan.levels()
        return [np.flatnonzero(levels == lev) for lev in np.unique(levels)]

    # log densities -----------------------------------------------------------
    def log_likelihood(self, theta, sigma2: float, u: float) -> float:
        if self.problem.n == 0:
            return 0.0
        w = sigma2 * (1.0 + u * self.e)
        r = self.yQ - self.XQ @ theta
        return float(-0.5 * (self.problem.n * _LOG_2PI + np.sum(np.log(w)) + np.sum(r * r / w)))

    def log_gaussian_prior(self, theta, sigma2: float, u: float) -> float:
        """log N(theta; theta0, u sigma^2 Gamma)."""
        tau2 = u * sigma2
        d = theta - self.theta0
        p = d.size
        return float(-0.5 * (p * (_LOG_2PI + math.log(tau2)) + self.log_det_gamma + np.sum(d * d / self.gdiag) / tau2))

    def log_joint(self, state: ChainState) -> float:
        try:
            if self.spec.kind == "gaussian":
                prior = self.log_gaussian_prior(state.theta, state.sigma2, state.u)
            else:
                prior = membership_log_eval(self.spec, state.theta)
            total = self.log_likelihood(state.theta, state.sigma2, state.u) + prior
            total += hyper_log_density(self.hp, state.sigma2, state.u)
        except (ValueError, FloatingPointError, OverflowError):
            return -math.inf
        return total if math.isfinite(total) else -math.inf

    def _log_variance_target(self, theta, sigma2, u) -> float:
        # density of (log sigma^2, log u): Jacobian sigma^2 u
        if sigma2 <= 0 or u <= 0 or not (math.isfinite(sigma2) and math.isfinite(u)):
            return -math.inf
        val = self.log_likelihood(theta, sigma2, u) + hyper_log_density(self.hp, sigma2, u)
        if self.spec.kind == "gaussian":
            val += self.log_gaussian_prior(theta, sigma2, u)
        val += math.log(sigma2) + math.log(u)
        return val if math.isfinite(val) else -math.inf

    # conditional updates -----------------------------------------------------
    def theta_conditional(self, state: ChainState) -> tuple[np.ndarray, np.ndarray]:
        """Mean and precision of the normal full conditional of theta."""
        w = 1.0 / (state.sigma2 * (1.0 + state.u * self.e))
        P = (self.XQ.T * w) @ self.XQ
        if self.spec.kind == "gaussian":
            P0 = np.diag(1.0 / (state.tau2 * self.gdiag))
        elif self.spec.kind == "student-t":
            if state.delta2 is None:
                raise ValueError("student-t update needs delta2")
            P0 = self.V_inv / (self.spec.q * state.delta2)
        else:
            raise ValueError("the ellipsoid membership has no normal full conditional")
        P = P + P0
        b = self.XQ.T @ (w * self.yQ) + P0 @ self.theta0
        L = np.linalg.cholesky(0.5 * (P + P.T))
        mean = np.linalg.solve(L.T, np.linalg.solve(L, b))
        return mean, L

    def draw_theta_gaussian(self, state: ChainState, rng) -> np.ndarray:
        try:
            mean, L = self.theta_conditional(state)
        except np.linalg.LinAlgError as exc:
            raise ArithmeticError("theta full-conditional precision is not positive definite") from exc
        z = rng.standard_normal(mean.size)
        return mean + np.linalg.solve(L.T, z)

    def draw_theta_ellipsoid(self, state: ChainState, rng, steps) -> tuple[np.ndarray, list[bool]]:
        theta = state.theta.copy()
        current = self.log_likelihood(theta, state.sigma2, state.u)
        accepted = []
        for block, step in zip(self.blocks, steps):
            prop = theta.copy()
            prop[block] += step * rng.standard_normal(block.size)
            if math.sqrt(rho_J_sq(prop, self.theta0)) > self.spec.delta:
                accepted.append(False)
                continue
            cand = self.log_likelihood(prop, state.sigma2, state.u)
            if math.log(rng.uniform()) < cand - current:
                theta, current = prop, cand
                accepted.append(True)
            else:
                accepted.append(False)
        return theta, accepted

    def draw_delta2(self, theta, rng) -> float:
        """delta^2 from its conditional: 1/(q delta^2) ~ Gamma((p+q)/2, rate (q + Q)/2)."""
        q = self.spec.q
        d = theta - self.theta0
        Q = float(d @ self.V_inv @ d)
        omega = rng.gamma(0.5 * (d.size + q), 2.0 / (q + Q))
        return 1.0 / (q * omega)

    def draw_variances(self, state: ChainState, rng, step_s: float, step_u: float) -> tuple[float, float, bool, bool]:
        s2, u = state.sigma2, state.u
        current = self._log_variance_target(state.theta, s2, u)
        prop = s2 * math.exp(step_s * rng.standard_normal())
        cand = self._log_variance_target(state.theta, prop, u)
        acc_s = math.log(rng.uniform()) < cand - current
        if acc_s:
            s2, current = prop, cand
        prop = u * math.exp(step_u * rng.standard_normal())
        cand = self._log_variance_target(state.theta, s2, prop)
        acc_u = math.log(rng.uniform()) < cand - current
        if acc_u:
            u = prop
        return s2, u, acc_s, acc_u

    def initial_state(self) -> ChainState:
        theta = self.theta0.copy()
        if self.problem.n > 1:
            r = self.problem.y - self.problem.X @ theta
            s2 = max(float(np.var(r)), 1e-3)
        else:
            s2 = 1.0
        delta2 = 1.0 / self.spec.q if self.spec.kind == "student-t" else None
        return ChainState(theta, s2, 1.0, delta2)


def _adapt(step: float, rate: float, target: float) -> float:
    return step * math.exp(rate - target)


def run_chain(problem: Problem, spec: MembershipSpec, hp: HyperPrior, config: ChainConfig = ChainConfig(),
              state: ChainState | None = None, sample_path: str | Path | None = None):
    """Run one chain; returns (ChainSummary, kept samples with columns ``summary.names``)."""
    sampler = Sampler(problem, spec, hp)
    rng = np.random.default_rng(config.seed)
    state = state or sampler.initial_state()
    kind = spec.kind
    p = problem.p
    names = [f"theta[{i}]" for i in range(p)] + ["sigma2", "u"] + (["delta2"] if kind == "student-t" else [])
    n_blocks = len(sampler.blocks)
    steps_theta = [config.step_theta] * n_blocks
    step_s, step_u = config.step_log_sigma2, config.step_log_u
    window = np.zeros(2 + n_blocks)
    totals = np.zeros(2 + n_blocks)
    kept = []
    for it in range(config.iters):
        if kind == "ellipsoid":
            theta, acc = sampler.draw_theta_ellipsoid(state, rng, steps_theta)
            window[2:] += acc
            if it >= config.burn_in:
                totals[2:] += acc
        else:
            theta = sampler.draw_theta_gaussian(state, rng)
        state.theta = theta
        if kind == "student-t":
            state.delta2 = sampler.draw_delta2(theta, rng)
        s2, u, acc_s, acc_u = sampler.draw_variances(state, rng, step_s, step_u)
        state.sigma2, state.u = s2, u
        window[:2] += (acc_s, acc_u)
        if it >= config.burn_in:
            totals[:2] += (acc_s, acc_u)
        if it < config.burn_in and (it + 1) % config.adapt_every == 0:
            rates = window / config.adapt_every
            step_s = _adapt(step_s, rates[0], 0.44)
            step_u = _adapt(step_u, rates[1], 0.44)
            steps_theta = [_adapt(s, r, 0.3) for s, r in zip(steps_theta, rates[2:])]
            window[:] = 0
        if it >= config.burn_in and (it - config.burn_in) % config.thin == config.thin - 1:
            row = list(state.theta) + [state.sigma2, state.u]
            if kind == "student-t":
                row.append(state.delta2)
            kept.append(row)
    samples = np.array(kept)
    n_post = config.iters - config.burn_in
    accept = {"sigma2": totals[0] / n_post, "u": totals[1] / n_post}
    if kind == "ellipsoid":
        for b, block in enumerate(sampler.blocks):
            accept[f"theta_block{b}"] = totals[2 + b] / n_post
    ess = np.array([effective_sample_size(samples[:, i]) for i in range(samples.shape[1])])
    summary = ChainSummary(names, samples.shape[0], samples.mean(axis=0), samples.var(axis=0, ddof=1), ess, accept)
    if sample_path is not None:
        write_samples(sample_path, samples, names)
    return summary, samples


def write_samples(path, samples: np.ndarray, names: list[str]) -> None:
    from .io import atomic_write_text

    lines = [",".join(names)]
    lines += [",".join(repr(float(v)) for v in row) for row in samples]
    atomic_write_text(path, "\n".join(lines) + "\n")
