"""Compactly supported orthonormal wavelets evaluated pointwise.

Daubechies scaling functions have no closed form, so ``refine_scaling``
tabulates phi and psi on a dyadic grid with the cascade (two-scale)
recursion and evaluation interpolates on that grid.  Haar is kept as a
test family because all of its integrals are available in closed form.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import comb

FAMILIES = ("haar", "daubechies2", "daubechies3", "daubechies4")

# Nominal (Sobolev) regularity of psi for each family.
_SMOOTHNESS = {
    "haar": 0.5,
    "daubechies2": 1.0,
    "daubechies3": 1.415,
    "daubechies4": 1.775,
}

_ALIASES = {"db1": "haar", "db2": "daubechies2", "db3": "daubechies3", "db4": "daubechies4", "d4": "daubechies2"}


def daubechies_filter(n_vanish: int) -> np.ndarray:
    """Low-pass filter of the extremal-phase Daubechies wavelet with
    ``n_vanish`` vanishing moments, normalized so that sum(h) = sqrt(2)."""
    if n_vanish < 1:
        raise ValueError("need at least one vanishing moment")
    if n_vanish == 1:
        return np.array([1.0, 1.0]) / math.sqrt(2.0)
    # |H(w)|^2 factor P(y), y = sin^2(w/2); take roots inside the unit circle.
    p_coef = np.array([comb(n_vanish - 1 + k, k, exact=True) for k in range(n_vanish)], float)
    y_roots = np.roots(p_coef[::-1])
    z_roots = []
    for y in y_roots:
        # y = (1 - (z + 1/z)/2)/2  <=>  z^2 - (2 - 4y) z + 1 = 0
        pair = np.roots([1.0, -(2.0 - 4.0 * y), 1.0])
        z_roots.append(pair[np.argmin(np.abs(pair))])
    poly = np.poly(z_roots)
    for _ in range(n_vanish):
        poly = np.convolve(poly, [1.0, 1.0])
    h = np.real(poly)
    return h * math.sqrt(2.0) / h.sum()


@dataclass(frozen=True)
class WaveletFamily:
    name: str
    filter: np.ndarray = field(repr=False)
    support_len_phi: float
    support_len_psi: float
    smoothness: float

    @property
    def test_only(self) -> bool:
        return self.smoothness <= 0.5

    @property
    def highpass(self) -> np.ndarray:
        h = self.filter
        m = np.arange(len(h))
        return (-1.0) ** m * h[::-1]


def build_family(name: str) -> WaveletFamily:
    key = _ALIASES.get(name.lower(), name.lower())
    if key not in FAMILIES:
        raise ValueError(f"unknown wavelet family {name!r}; expected one of {FAMILIES}")
    n_vanish = 1 if key == "haar" else int(key[-1])
    h = daubechies_filter(n_vanish)
    _check_filter(h)
    length = float(len(h) - 1)
    return WaveletFamily(key, h, length, length, _SMOOTHNESS[key])


def _check_filter(h: np.ndarray, tol: float = 1e-12) -> None:
    if abs(h.sum() - math.sqrt(2.0)) > tol:
        raise ValueError("filter does not sum to sqrt(2)")
    for shift in range(0, len(h) // 2):
        s = np.dot(h[: len(h) - 2 * shift], h[2 * shift:])
        if abs(s - (1.0 if shift == 0 else 0.0)) > tol:
            raise ValueError("filter is not orthonormal to its even shifts")


@dataclass(frozen=True)
class ScalingTable:
    """phi and psi sampled at x = i / 2**depth, i = 0..support * 2**depth."""

    family: WaveletFamily
    depth: int
    phi_grid: np.ndarray = field(repr=False)
    psi_grid: np.ndarray = field(repr=False)
    step_interp: bool = False

    @property
    def step(self) -> float:
        return 2.0 ** -self.depth

    @property
    def grid(self) -> np.ndarray:
        return np.arange(len(self.phi_grid)) * self.step

    def _lookup(self, values: np.ndarray, t, support: float) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        out = np.zeros(t.shape)
        inside = (t >= 0.0) & (t < support)
        if not inside.any():
            return out
        s = t[inside] * (1 << self.depth)
        idx = np.floor(s).astype(np.int64)
        if self.step_interp:
            out[inside] = values[idx]
        else:
            frac = s - idx
            out[inside] = values[idx] * (1.0 - frac) + values[idx + 1] * frac
        return out

    def phi(self, t) -> np.ndarray:
        return self._lookup(self.phi_grid, t, self.family.support_len_phi)

    def psi(self, t) -> np.ndarray:
        return self._lookup(self.psi_grid, t, self.family.support_len_psi)

    def phi_k(self, k, x) -> np.ndarray:
        return self.phi(np.asarray(x, float) - k)

    def psi_jk(self, j, k, x) -> np.ndarray:
        return 2.0 ** (j / 2.0) * self.psi(2.0 ** j * np.asarray(x, float) - k)

    def two_scale_residual(self) -> float:
        """max |phi(x) - sqrt2 sum h_m phi(2x - m)| over the grid."""
        x = self.grid
        rhs = np.zeros_like(x)
        for m, hm in enumerate(self.family.filter):
            rhs += hm * self.phi(2.0 * x - m)
        rhs *= math.sqrt(2.0)
        lhs = self.phi(x)
        return float(np.max(np.abs(lhs - rhs)))


def _integer_values(h: np.ndarray) -> np.ndarray:
    length = len(h)
    if length == 2:
        # Haar: right-continuous box on [0, 1).
        return np.array([1.0, 0.0])
    m = np.zeros((length, length))
    for i in range(length):
        for j in range(length):
            if 0 <= 2 * i - j < length:
                m[i, j] = math.sqrt(2.0) * h[2 * i - j]
    w, v = np.linalg.eig(m)
    vec = np.real(v[:, np.argmin(np.abs(w - 1.0))])
    return vec / vec.sum()


def refine_scaling(family: WaveletFamily, depth: int = 12) -> ScalingTable:
    """Cascade refinement of phi from its integer values down to step 2**-depth."""
    if not 4 <= depth <= 20:
        raise ValueError(f"depth must lie in [4, 20], got {depth}")
    h = family.filter
    length = len(h) - 1
    phi = _integer_values(h)
    sqrt2 = math.sqrt(2.0)
    for r in range(depth):
        # phi at i / 2**(r+1) from phi at multiples of 2**-r.
        scale = 1 << r
        n_new = length * 2 * scale + 1
        i = np.arange(n_new)
        new = np.zeros(n_new)
        for m, hm in enumerate(h):
            src = i - m * scale  # 2x - m on the current grid
            ok = (src >= 0) & (src <= length * scale)
            new[ok] += hm * phi[src[ok]]
        phi = sqrt2 * new
    n_pts = len(phi)
    i = np.arange(n_pts)
    psi = np.zeros(n_pts)
    g = family.highpass
    for m, gm in enumerate(g):
        src = 2 * i - m * (1 << depth)
        ok = (src >= 0) & (src < n_pts)
        psi[ok] += gm * phi[src[ok]]
    psi *= sqrt2
    return ScalingTable(family, depth, phi, psi, step_interp=(family.name == "haar"))


@dataclass(frozen=True)
class ResolutionPlan:
    """Index layout of the retained coefficients.

    Translates are kept when their support meets the interior of the domain;
    ``k_ranges[0]`` indexes the scaling block and ``k_ranges[1 + j]`` level j.
    """

    family: WaveletFamily
    J: int
    domain: tuple[float, float]
    k_ranges: tuple[tuple[int, int], ...]

    @property
    def length(self) -> float:
        return self.domain[1] - self.domain[0]

    @property
    def K(self) -> list[int]:
        # K_0 for the scaling block, then K_j per level: largest |k| retained.
        return [max(abs(lo), abs(hi)) for lo, hi in self.k_ranges]

    @property
    def block_sizes(self) -> list[int]:
        return [hi - lo + 1 for lo, hi in self.k_ranges]

    @property
    def n_alpha(self) -> int:
        return self.block_sizes[0]

    @property
    def M_beta(self) -> int:
        return sum(self.block_sizes[1:])

    @property
    def p(self) -> int:
        return self.n_alpha + self.M_beta

    def index(self) -> list[tuple[int, int]]:
        """(level, k) per coefficient; level -1 marks the scaling block."""
        out = []
        for b, (lo, hi) in enumerate(self.k_ranges):
            out.extend((b - 1, k) for k in range(lo, hi + 1))
        return out

    def levels(self) -> np.ndarray:
        return np.array([lev for lev, _ in self.index()])


def translate_range(family: WaveletFamily, domain, j: int | None) -> tuple[int, int]:
    lo, hi = domain
    support = family.support_len_phi if j is None else family.support_len_psi
    scale = 1.0 if j is None else 2.0 ** j
    # open-interval overlap of [k, k + support] / scale with (lo, hi)
    k_lo = math.floor(scale * lo - support) + 1
    k_hi = math.ceil(scale * hi) - 1
    return k_lo, k_hi


def parameter_bound(family: WaveletFamily, length: float, J: int) -> float:
    return length * 2 ** (J + 1) + J * (family.support_len_psi + 1) + (
        family.support_len_phi + family.support_len_psi + 2
    )


def make_plan(family: WaveletFamily, domain, J: int) -> ResolutionPlan:
    if J < 0:
        raise ValueError("J must be non-negative")
    lo, hi = float(domain[0]), float(domain[1])
    if not hi > lo:
        raise ValueError("domain must have positive length")
    ranges = [translate_range(family, (lo, hi), None)]
    ranges += [translate_range(family, (lo, hi), j) for j in range(J + 1)]
    return ResolutionPlan(family, J, (lo, hi), tuple(ranges))


def max_resolution(family: WaveletFamily, length: float, n: int) -> int:
    if n < 1:
        raise ValueError("n must be positive")
    if parameter_bound(family, length, 0) > n:
        raise ValueError(
            f"insufficient data: n={n} cannot support even J=0 "
            f"(needs {parameter_bound(family, length, 0):g})"
        )
    J = 0
    while parameter_bound(family, length, J + 1) <= n:
        J += 1
    return J


def plan_resolution(family: WaveletFamily, domain, n: int) -> ResolutionPlan:
    """Largest J whose parameter count bound does not exceed n."""
    length = float(domain[1]) - float(domain[0])
    return make_plan(family, domain, max_resolution(family, length, n))
