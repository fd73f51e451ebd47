"""Assembly of the regression problem shared by every inference route."""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np

from .data import Dataset
from .decomposition import (
    DEFAULT_QUAD_POINTS,
    DEFAULT_TAIL_TOL,
    CoefficientVector,
    DesignMatrices,
    build_design,
    project_coefficients,
)
from .membership import GammaStructure
from .wavelets import ResolutionPlan, ScalingTable, build_family, make_plan, plan_resolution, refine_scaling


@lru_cache(maxsize=16)
def scaling_table(family: str, depth: int = 12) -> ScalingTable:
    return refine_scaling(build_family(family), depth)


@dataclass(frozen=True)
class Problem:
    dataset: Dataset
    plan: ResolutionPlan
    table: ScalingTable
    design: DesignMatrices
    gamma: GammaStructure
    theta0: CoefficientVector
    g0_values: np.ndarray
    s_eff: float

    @property
    def X(self) -> np.ndarray:
        return self.design.X

    @property
    def y(self) -> np.ndarray:
        return self.dataset.y

    @property
    def n(self) -> int:
        return self.dataset.n

    @property
    def p(self) -> int:
        return self.plan.p


def build_problem(
    dataset: Dataset,
    g0: Callable,
    family: str = "daubechies2",
    J: int | None = None,
    domain=(0.0, 1.0),
    s_eff: float | None = None,
    depth: int = 12,
    tail_tol: float = DEFAULT_TAIL_TOL,
    quad_points: int = DEFAULT_QUAD_POINTS,
    projection: str = "domain",
) -> Problem:
    """Plan, tables, design matrices, Gamma and the prior-guess coefficients."""
    domain = (float(domain[0]), float(domain[1]))
    dataset.check_domain(domain)
    table = scaling_table(family, depth)
    fam = table.family
    plan = plan_resolution(fam, domain, dataset.n) if J is None else make_plan(fam, domain, J)
    s = fam.smoothness if s_eff is None else float(s_eff)
    design = build_design(dataset.x, plan, table, s, tail_tol)
    theta0 = project_coefficients(g0, plan, table, quad_points, over=projection)
    g0_values = np.asarray(g0(dataset.x), dtype=float) * np.ones(dataset.n)
    return Problem(dataset, plan, table, design, GammaStructure.from_plan(plan, s), theta0, g0_values, s)
