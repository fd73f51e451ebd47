"""Wavelet coefficients, design matrix and remainder Gram matrix."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .wavelets import ResolutionPlan, ScalingTable

GL_NODES_PER_PANEL = 16
DEFAULT_QUAD_POINTS = 1024
DEFAULT_TAIL_TOL = 1e-8


@dataclass(frozen=True)
class CoefficientVector:
    """theta ordered as the scaling block (ascending k), then levels j = 0..J."""

    values: np.ndarray
    plan: ResolutionPlan = field(repr=False)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.shape != (self.plan.p,):
            raise ValueError(f"expected {self.plan.p} coefficients, got shape {v.shape}")
        object.__setattr__(self, "values", v)

    @property
    def alpha(self) -> np.ndarray:
        return self.values[: self.plan.n_alpha]

    def beta(self, j: int) -> np.ndarray:
        sizes = self.plan.block_sizes
        start = sum(sizes[: j + 1])
        return self.values[start: start + sizes[j + 1]]

    def __len__(self):
        return self.plan.p


@dataclass(frozen=True)
class DesignMatrices:
    X: np.ndarray
    Qn: np.ndarray
    x: np.ndarray


def _basis_columns(plan: ResolutionPlan, table: ScalingTable, x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    cols = []
    for level, k in plan.index():
        if level < 0:
            cols.append(table.phi(x - k))
        else:
            cols.append(table.psi_jk(level, k, x))
    return np.stack(cols, axis=-1) if cols else np.zeros(x.shape + (0,))


def design_matrix(x, plan: ResolutionPlan, table: ScalingTable) -> np.ndarray:
    x = np.atleast_1d(np.asarray(x, dtype=float))
    lo, hi = plan.domain
    if np.any((x < lo) | (x > hi)):
        raise ValueError(f"abscissae must lie in the domain [{lo}, {hi}]")
    return _basis_columns(plan, table, x)


def reconstruct(theta: CoefficientVector, x, table: ScalingTable):
    """g_J at x from the coefficient vector."""
    x_arr = np.asarray(x, dtype=float)
    row = _basis_columns(theta.plan, table, np.atleast_1d(x_arr))
    out = row @ theta.values
    return float(out[0]) if x_arr.ndim == 0 else out


def _panel_nodes(a: float, b: float, panels_per_unit: int):
    breaks = np.arange(math.floor(a * panels_per_unit) + 1, math.ceil(b * panels_per_unit)) / panels_per_unit
    edges = np.concatenate([[a], breaks, [b]])
    t, w = np.polynomial.legendre.leggauss(GL_NODES_PER_PANEL)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    nodes = (mid[:, None] + half[:, None] * t[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


def project_coefficients(
    g0: Callable,
    plan: ResolutionPlan,
    table: ScalingTable,
    quad_points: int = DEFAULT_QUAD_POINTS,
    over: str = "domain",
) -> CoefficientVector:
    """Inner products of g0 with every retained basis function.

    With ``over="domain"`` the integrals run over the domain only; with
    ``over="support"`` they run over each basis function's full support, which
    needs g0 defined beyond the domain but makes projection the exact inverse
    of ``reconstruct`` (the translates are orthonormal on the real line, not
    on the domain).  Integrals are taken in the basis function's own
    coordinate t by composite Gauss-Legendre with ``quad_points`` nodes per
    unit length of t, panels aligned to the integer breakpoints of t.
    """
    if quad_points < 64:
        raise ValueError("quad_points must be at least 64")
    if over not in ("domain", "support"):
        raise ValueError("over must be 'domain' or 'support'")
    panels_per_unit = max(1, quad_points // GL_NODES_PER_PANEL)
    lo, hi = plan.domain
    fam = table.family
    out = np.empty(plan.p)
    for i, (level, k) in enumerate(plan.index()):
        scale = 1.0 if level < 0 else 2.0 ** level
        support = fam.support_len_phi if level < 0 else fam.support_len_psi
        if over == "domain":
            a, b = max(0.0, scale * lo - k), min(support, scale * hi - k)
        else:
            a, b = 0.0, support
        if b <= a:
            out[i] = 0.0
            continue
        t, w = _panel_nodes(a, b, panels_per_unit)
        gx = np.asarray(g0((t + k) / scale), dtype=float)
        if gx.shape != t.shape:
            gx = np.broadcast_to(gx, t.shape)
        if not np.all(np.isfinite(gx)):
            raise ValueError("g0 returned a non-finite value")
        if level < 0:
            out[i] = np.dot(w, table.phi(t) * gx)
        else:
            out[i] = 2.0 ** (-level / 2.0) * np.dot(w, table.psi(t) * gx)
    return CoefficientVector(out, plan)


def remainder_levels(table: ScalingTable, J: int, s_eff: float, tail_tol: float) -> int:
    """Last level kept so that the bound on the discarded tail is below tail_tol."""
    if s_eff <= 0.5:
        raise ValueError(f"remainder series needs s_eff > 1/2, got {s_eff}")
    if tail_tol <= 0:
        raise ValueError("tail_tol must be positive")
    fam = table.family
    c = math.ceil(fam.support_len_psi) * float(np.max(np.abs(table.psi_grid))) ** 2
    r = 2.0 ** (1.0 - 2.0 * s_eff)
    j_max = J + 1
    while c * r ** (j_max + 1) / (1.0 - r) >= tail_tol:
        j_max += 1
    return j_max


def remainder_cross(
    xa, xb, plan: ResolutionPlan, table: ScalingTable, s_eff: float, tail_tol: float = DEFAULT_TAIL_TOL
) -> np.ndarray:
    """Q(xa_i, xb_l) summed over levels J+1..J_max."""
    xa = np.atleast_1d(np.asarray(xa, dtype=float))
    xb = np.atleast_1d(np.asarray(xb, dtype=float))
    j_max = remainder_levels(table, plan.J, s_eff, tail_tol)
    n_shift = math.ceil(table.family.support_len_psi)
    q = np.zeros((xa.size, xb.size))
    for j in range(plan.J + 1, j_max + 1):
        scale = 2.0 ** j
        ta, tb = scale * xa, scale * xb
        base = np.floor(ta)
        level = np.zeros_like(q)
        for m in range(n_shift):
            k = base - m
            va = table.psi(ta - k)
            vb = table.psi(tb[None, :] - k[:, None])
            level += va[:, None] * vb
        q += scale * 2.0 ** (-2.0 * j * s_eff) * level
    return q


def remainder_kernel(x: float, y: float, plan, table, s_eff: float, tail_tol: float = DEFAULT_TAIL_TOL) -> float:
    return float(remainder_cross(x, y, plan, table, s_eff, tail_tol)[0, 0])


def gram_remainder(x, plan, table, s_eff: float, tail_tol: float = DEFAULT_TAIL_TOL, clip: bool = True) -> np.ndarray:
    q = remainder_cross(x, x, plan, table, s_eff, tail_tol)
    q = 0.5 * (q + q.T)
    if clip:
        w, v = np.linalg.eigh(q)
        if np.any(w < 0):
            q = (v * np.clip(w, 0.0, None)) @ v.T
            q = 0.5 * (q + q.T)
    return q


def build_design(x, plan, table, s_eff: float | None = None, tail_tol: float = DEFAULT_TAIL_TOL) -> DesignMatrices:
    x = np.atleast_1d(np.asarray(x, dtype=float))
    s = table.family.smoothness if s_eff is None else s_eff
    X = design_matrix(x, plan, table)
    return DesignMatrices(X, gram_remainder(x, plan, table, s, tail_tol), x)
