import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.optimize import fsolve

from fuzzywave.problem import scaling_table
from fuzzywave.wavelets import (
    FAMILIES, build_family, daubechies_filter, make_plan, max_resolution, parameter_bound,
    plan_resolution, refine_scaling, translate_range,
)

SQ2 = math.sqrt(2.0)


def _d2_equations(h):
    # orthonormality, unit sum and two vanishing moments of the highpass
    g = [(-1) ** m * h[3 - m] for m in range(4)]
    return [
        sum(h) - SQ2,
        h[0] * h[2] + h[1] * h[3],
        sum(g),
        sum(m * gm for m, gm in enumerate(g)),
    ]


def test_d2_filter_matches_equation_solve():
    guess = np.array([0.5, 0.8, 0.2, -0.1])
    oracle = fsolve(_d2_equations, guess, xtol=1e-13)
    h = daubechies_filter(2)
    assert abs(h.sum() - SQ2) < 1e-12
    np.testing.assert_allclose(h, oracle, atol=1e-12)
    np.testing.assert_allclose(h, np.array([1 + 3 ** 0.5, 3 + 3 ** 0.5, 3 - 3 ** 0.5, 1 - 3 ** 0.5]) / (4 * SQ2), atol=1e-14)


@pytest.mark.parametrize("n_vanish", [1, 2, 3, 4, 5])
def test_filter_orthonormal_with_vanishing_moments(n_vanish):
    h = daubechies_filter(n_vanish)
    L = h.size
    assert L == 2 * n_vanish
    for shift in range(n_vanish):
        dot = float(np.dot(h[: L - 2 * shift], h[2 * shift:]))
        assert dot == pytest.approx(1.0 if shift == 0 else 0.0, abs=1e-10)
    g = np.array([(-1) ** m * h[L - 1 - m] for m in range(L)])
    m = np.arange(L, dtype=float)
    for r in range(n_vanish):
        assert abs(np.dot(m ** r, g)) < 1e-8 * max(1.0, L ** r)


def test_haar_family():
    fam = build_family("haar")
    np.testing.assert_allclose(fam.filter, [1 / SQ2, 1 / SQ2])
    assert fam.support_len_phi == fam.support_len_psi == 1
    assert fam.test_only


def test_family_lookup():
    assert build_family("db2").name == "daubechies2"
    assert build_family("Daubechies3").name == "daubechies3"
    with pytest.raises(ValueError):
        build_family("Daubechies99")


def test_haar_table_closed_form():
    tab = refine_scaling(build_family("haar"), depth=4)
    t = np.linspace(0, 0.999, 57)
    np.testing.assert_array_equal(tab.phi(t), np.ones_like(t))
    np.testing.assert_array_equal(tab.psi(t), np.where(t < 0.5, 1.0, -1.0))
    assert tab.psi_jk(0, 0, 0.25) == pytest.approx(1.0)
    assert tab.psi_jk(1, 0, 0.1) == pytest.approx(SQ2)


def test_depth_range():
    fam = build_family("daubechies2")
    with pytest.raises(ValueError):
        refine_scaling(fam, depth=2)
    with pytest.raises(ValueError):
        refine_scaling(fam, depth=21)


@pytest.mark.parametrize("name", FAMILIES[1:])
def test_cascade_two_scale_and_unit_integral(name):
    tab = scaling_table(name)
    assert tab.two_scale_residual() < 1e-10
    assert np.sum(tab.phi_grid) * tab.step == pytest.approx(1.0, abs=1e-6)


@pytest.mark.parametrize("name", FAMILIES[1:])
def test_partition_of_unity(name):
    tab = scaling_table(name)
    x = np.linspace(0.0, 1.0, 101)
    L = int(tab.family.support_len_phi)
    total = sum(tab.phi(x - k) for k in range(-L, 2))
    np.testing.assert_allclose(total, 1.0, atol=1e-4)


@pytest.mark.parametrize("name", FAMILIES[1:])
def test_translates_orthonormal(name):
    tab = scaling_table(name)
    t = tab.grid
    L = int(tab.family.support_len_phi)
    dt = tab.step
    phi, psi = tab.phi(t), tab.psi(t)
    assert np.sum(phi * phi) * dt == pytest.approx(1.0, abs=1e-4)
    assert np.sum(psi * psi) * dt == pytest.approx(1.0, abs=1e-4)
    for k in range(1, L + 1):
        assert abs(np.sum(phi * tab.phi(t - k)) * dt) < 1e-4
    for k in range(-L, L + 1):
        assert abs(np.sum(psi * tab.phi(t - k)) * dt) < 1e-4


def test_psi_outside_support_is_zero():
    tab = scaling_table("daubechies2")
    assert tab.psi_jk(0, 5, 0.5) == 0.0


def test_resolution_examples():
    d2 = build_family("daubechies2")
    assert plan_resolution(d2, (0, 1), 185).J == 6
    # J=1 needs 16 <= 20, J=2 needs 24 > 20
    assert parameter_bound(d2, 1.0, 1) == 16 and parameter_bound(d2, 1.0, 2) == 24
    assert plan_resolution(d2, (0, 1), 20).J == 1
    with pytest.raises(ValueError, match="insufficient"):
        plan_resolution(d2, (0, 1), 5)


def test_d2_plan_layout():
    plan = make_plan(build_family("daubechies2"), (0, 1), 1)
    assert plan.k_ranges == ((-2, 0), (-2, 0), (-2, 1))
    assert plan.p == 10 and plan.n_alpha == 3 and plan.M_beta == 7
    assert len(plan.index()) == plan.p


@given(st.sampled_from(FAMILIES), st.integers(1, 3000), st.integers(1, 3000))
def test_plan_resolution_monotone_in_n(name, n1, n2):
    fam = build_family(name)
    lo_n, hi_n = sorted((n1, n2))
    try:
        j_lo = max_resolution(fam, 1.0, lo_n)
    except ValueError:
        return
    j_hi = max_resolution(fam, 1.0, hi_n)
    assert j_lo <= j_hi
    assert parameter_bound(fam, 1.0, j_hi) <= hi_n < parameter_bound(fam, 1.0, j_hi + 1)


@given(st.sampled_from(FAMILIES), st.integers(0, 6), st.integers(-3000, 3000), st.integers(50, 4000))
def test_translate_range_keeps_exactly_intersecting_supports(name, j, lo_milli, width_milli):
    fam = build_family(name)
    lo, hi = lo_milli / 1000, (lo_milli + width_milli) / 1000
    k_lo, k_hi = translate_range(fam, (lo, hi), j)
    scale = 2.0 ** j
    sup = fam.support_len_psi

    def meets(k):
        return k / scale < hi and (k + sup) / scale > lo

    assert all(meets(k) for k in (k_lo, k_hi))
    assert not meets(k_lo - 1) and not meets(k_hi + 1)
