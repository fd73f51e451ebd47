"""Membership functions on wavelet coefficients and the (sigma^2, u) hyperprior."""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from scipy.special import betaln, gammaln

from .decomposition import CoefficientVector
from .wavelets import ResolutionPlan

KINDS = ("gaussian", "student-t", "ellipsoid")
F_KERNELS = ("as-printed", "textbook")

# Selectable (c, k) pairs and ellipsoid radii used in the simulations.
CK_PRESETS = ((2.0, 1.5), (1.5, 0.5), (1.05, 0.05))
DELTA_PRESETS = (0.5, 1.0, 5.0)


def same_layout(a: ResolutionPlan, b: ResolutionPlan) -> bool:
    return (a.family.name, a.J, a.domain, a.k_ranges) == (b.family.name, b.J, b.domain, b.k_ranges)


@dataclass(frozen=True)
class GammaStructure:
    """Diagonal prior scale: 1 on the scaling block, 2**(-2 j s) on level j."""

    diag: np.ndarray

    @classmethod
    def from_plan(cls, plan: ResolutionPlan, s: float) -> "GammaStructure":
        levels = plan.levels()
        d = np.where(levels < 0, 1.0, 2.0 ** (-2.0 * np.maximum(levels, 0) * s))
        return cls(d)

    def __post_init__(self):
        d = np.asarray(self.diag, dtype=float)
        if d.ndim != 1 or np.any(d <= 0):
            raise ValueError("Gamma diagonal must be a positive vector")
        object.__setattr__(self, "diag", d)

    @property
    def matrix(self) -> np.ndarray:
        return np.diag(self.diag)


def default_a(b: float) -> float:
    """a = 8(b + 2)/(b - 2), the pairing used with b = 3."""
    if b <= 2:
        raise ValueError("b must exceed 2")
    return 8.0 * (b + 2.0) / (b - 2.0)


@dataclass(frozen=True)
class HyperPrior:
    """Prior on sigma^2 (inverse-gamma, parameters c, k) and u = tau^2/sigma^2 (F(b, a)).

    ``kernel`` selects the joint prior.  "textbook": sigma^2 has density
    k^(c-1)/Gamma(c-1) exp(-k/sigma^2) sigma^(-2c) and u is F(b, a).
    "as-printed": the joint prior under which the u-marginal posterior takes
    the form u^(b/2) (a + b u)^(-(a+b)/2) ... (2k + S)^(-(n+2c)/2), i.e.
    sigma^2 ~ IG(shape c, scale k) and u has the size-biased F(b, a) density.
    """

    a: float = 40.0
    b: float = 3.0
    c: float = 2.0
    k: float = 1.5
    kernel: str = "as-printed"

    def __post_init__(self):
        if self.a <= 0 or self.b <= 0:
            raise ValueError("a and b must be positive")
        if self.c <= 1:
            raise ValueError("c must exceed 1 for a proper prior")
        if self.k <= 0:
            raise ValueError("k must be positive for a proper prior")
        if self.kernel not in F_KERNELS:
            raise ValueError(f"kernel must be one of {F_KERNELS}")
        if self.kernel == "as-printed" and self.a <= 2:
            raise ValueError("the as-printed u prior needs a > 2 to be proper")

    def with_kernel(self, kernel: str) -> "HyperPrior":
        return replace(self, kernel=kernel)

    @property
    def sigma2_shape(self) -> float:
        return self.c - 1.0 if self.kernel == "textbook" else self.c

    def log_sigma2(self, sigma2):
        sigma2 = np.asarray(sigma2, dtype=float)
        shape = self.sigma2_shape
        return shape * math.log(self.k) - gammaln(shape) - (shape + 1.0) * np.log(sigma2) - self.k / sigma2

    def log_u(self, u):
        u = np.asarray(u, dtype=float)
        a, b = self.a, self.b
        # F(b, a) log-density; scipy.stats.f.logpdf carries too much call overhead inside the sampler
        const = 0.5 * b * math.log(b / a) - betaln(0.5 * b, 0.5 * a)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = const + (0.5 * b - 1.0) * np.log(u) - 0.5 * (a + b) * np.log1p(b * u / a)
        out = np.where(u > 0, out, -np.inf)
        if self.kernel == "as-printed":
            out = out + np.log(u) + math.log((self.a - 2.0) / self.a)
        return out


def hyper_log_density(hp: HyperPrior, sigma2: float, u: float) -> float:
    if sigma2 <= 0 or u <= 0:
        raise ValueError("sigma2 and u must be positive")
    return float(hp.log_sigma2(sigma2) + hp.log_u(u))


@dataclass(frozen=True)
class MembershipSpec:
    kind: str
    theta0: CoefficientVector
    gamma: GammaStructure | None = None
    weight: float = 1.0
    q: float | None = None
    V: np.ndarray | None = field(default=None, repr=False)
    delta: float | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown membership kind {self.kind!r}")
        p = self.theta0.plan.p
        if self.gamma is not None and self.gamma.diag.shape != (p,):
            raise ValueError("Gamma structure does not match theta0")
        if self.kind == "gaussian" and self.weight <= 0:
            raise ValueError("weight must be positive")
        if self.kind == "student-t":
            if self.q is None or self.q <= 2:
                raise ValueError("student-t membership needs q > 2")
            V = self.V
            if V is None:
                if self.gamma is None:
                    raise ValueError("student-t membership needs V or a Gamma structure")
                V = self.gamma.matrix
            V = np.asarray(V, dtype=float)
            if V.shape != (p, p):
                raise ValueError("V has the wrong shape")
            try:
                chol = np.linalg.cholesky(V)
            except np.linalg.LinAlgError as exc:
                raise ValueError("V is not positive definite") from exc
            object.__setattr__(self, "V", V)
            object.__setattr__(self, "_chol", chol)
        if self.kind == "ellipsoid" and (self.delta is None or self.delta <= 0):
            raise ValueError("ellipsoid membership needs delta > 0")

    @property
    def p(self) -> int:
        return self.theta0.plan.p

    def quad_form(self, theta) -> float:
        """(theta - theta0)' V^-1 (theta - theta0) for the student-t kind."""
        d = _values(theta) - self.theta0.values
        z = np.linalg.solve(self._chol, d)
        return float(z @ z)

    def log_eval(self, theta) -> float:
        return membership_log_eval(self, theta)


def _values(theta) -> np.ndarray:
    return theta.values if isinstance(theta, CoefficientVector) else np.asarray(theta, dtype=float)


def rho_J_sq(theta, theta0) -> float:
    """Truncated squared L2 distance between the two coefficient vectors."""
    if isinstance(theta, CoefficientVector) and isinstance(theta0, CoefficientVector):
        if not same_layout(theta.plan, theta0.plan):
            raise ValueError("coefficient vectors index different plans")
    a, b = _values(theta), _values(theta0)
    if a.shape != b.shape:
        raise ValueError("coefficient vectors have different lengths")
    d = a - b
    return float(d @ d)


def membership_log_eval(spec: MembershipSpec, theta) -> float:
    if isinstance(theta, CoefficientVector) and not same_layout(theta.plan, spec.theta0.plan):
        raise ValueError("theta indexes a different plan")
    if spec.kind == "gaussian":
        return -spec.weight * rho_J_sq(theta, spec.theta0)
    if spec.kind == "student-t":
        return -0.5 * (spec.p + spec.q) * math.log1p(spec.quad_form(theta) / spec.q)
    return 0.0 if math.sqrt(rho_J_sq(theta, spec.theta0)) <= spec.delta else -math.inf


@dataclass(frozen=True)
class CompositeMembership:
    """Product of independent memberships, evaluated on the log scale."""

    specs: tuple[MembershipSpec, ...]

    def log_eval(self, theta) -> float:
        total = 0.0
        for spec in self.specs:
            total += membership_log_eval(spec, theta)
            if total == -math.inf:
                break
        return total


def combine(specs: Sequence[MembershipSpec]) -> CompositeMembership:
    specs = tuple(specs)
    if not specs:
        raise ValueError("combine needs at least one membership")
    first = specs[0].theta0.plan
    if any(not same_layout(s.theta0.plan, first) for s in specs[1:]):
        raise ValueError("memberships index different plans")
    return CompositeMembership(specs)
