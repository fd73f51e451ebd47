import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import integrate, stats

from fuzzywave.decomposition import CoefficientVector
from fuzzywave.membership import (
    GammaStructure, HyperPrior, MembershipSpec, combine, default_a, hyper_log_density, membership_log_eval, rho_J_sq,
)
from fuzzywave.problem import scaling_table
from fuzzywave.wavelets import make_plan

D2 = scaling_table("daubechies2")


def vec(values, J=0):
    plan = make_plan(D2.family, (0, 1), J)
    return CoefficientVector(np.asarray(values, float), plan)


def p_of(J=0):
    return make_plan(D2.family, (0, 1), J).p


def test_distance_examples(rng):
    p = p_of()
    th0 = vec(np.zeros(p))
    assert rho_J_sq(th0, th0) == 0.0
    e = np.zeros(p)
    e[2] = 1.0
    assert rho_J_sq(vec(e), th0) == 1.0
    a, b = rng.normal(size=p), rng.normal(size=p)
    assert rho_J_sq(vec(a), vec(b)) == pytest.approx(sum((x - y) ** 2 for x, y in zip(a, b)), abs=1e-12)


def test_distance_rejects_mismatched_plans():
    with pytest.raises(ValueError):
        rho_J_sq(vec(np.zeros(p_of(0)), 0), vec(np.zeros(p_of(1)), 1))


@pytest.mark.parametrize("kind,kw", [("gaussian", {}), ("student-t", {"q": 5.0}), ("ellipsoid", {"delta": 0.3})])
def test_membership_of_guess_is_one(kind, kw, rng):
    th0 = vec(rng.normal(size=p_of()))
    spec = MembershipSpec(kind, th0, GammaStructure(np.ones(p_of())), **kw)
    assert membership_log_eval(spec, th0) == 0.0


def test_ellipsoid_boundary():
    p = p_of()
    th0 = vec(np.zeros(p))
    spec = MembershipSpec("ellipsoid", th0, delta=1.0)
    e = np.zeros(p)
    e[0] = 1.0001
    assert membership_log_eval(spec, vec(e)) == -math.inf
    e[0] = 0.9999
    assert membership_log_eval(spec, vec(e)) == 0.0


def test_student_t_value():
    # a p=2 layout: Haar scaling block plus one level-0 wavelet
    haar = scaling_table("haar")
    plan = make_plan(haar.family, (0, 1), 0)
    assert plan.p == 2
    th0 = CoefficientVector(np.zeros(2), plan)
    spec = MembershipSpec("student-t", th0, q=4.0, V=np.eye(2))
    theta = CoefficientVector(np.array([2.0, 0.0]), plan)
    assert membership_log_eval(spec, theta) == pytest.approx(-3 * math.log(2.0), abs=1e-14)


def test_student_t_matches_multivariate_t_kernel(rng):
    p = p_of()
    th0 = vec(rng.normal(size=p))
    A = rng.normal(size=(p, p))
    V = A @ A.T + p * np.eye(p)
    spec = MembershipSpec("student-t", th0, q=6.0, V=V)
    dist = stats.multivariate_t(loc=th0.values, shape=V, df=6.0)
    theta = th0.values + rng.normal(size=p)
    expected = dist.logpdf(theta) - dist.logpdf(th0.values)
    assert membership_log_eval(spec, theta) == pytest.approx(expected, abs=1e-10)


@pytest.mark.parametrize("kw", [{"q": 2.0}, {"q": 1.5}, {"q": 5.0, "V": -np.eye(3)}])
def test_student_t_validation(kw):
    with pytest.raises(ValueError):
        MembershipSpec("student-t", vec(np.zeros(p_of())), GammaStructure(np.ones(p_of())), **kw)


def test_other_validation():
    th0 = vec(np.zeros(p_of()))
    with pytest.raises(ValueError):
        MembershipSpec("ellipsoid", th0, delta=0.0)
    with pytest.raises(ValueError):
        MembershipSpec("cauchy", th0)
    with pytest.raises(ValueError):
        MembershipSpec("gaussian", th0, weight=-1.0)


def test_combine_single_is_identity(rng):
    th0 = vec(np.zeros(p_of()))
    spec = MembershipSpec("gaussian", th0, weight=0.7)
    comp = combine([spec])
    theta = rng.normal(size=p_of())
    assert comp.log_eval(theta) == membership_log_eval(spec, theta)


@given(st.floats(0.01, 10), st.floats(0.01, 10), st.integers(0, 1000))
def test_combine_gaussians_adds_weights(w1, w2, seed):
    rng = np.random.default_rng(seed)
    th0 = vec(rng.normal(size=p_of()))
    comp = combine([MembershipSpec("gaussian", th0, weight=w1), MembershipSpec("gaussian", th0, weight=w2)])
    merged = MembershipSpec("gaussian", th0, weight=w1 + w2)
    theta = rng.normal(size=p_of())
    assert comp.log_eval(theta) == pytest.approx(membership_log_eval(merged, theta), rel=1e-12)


def test_combine_gaussian_with_ellipsoid_truncates(rng):
    th0 = vec(np.zeros(p_of()))
    g = MembershipSpec("gaussian", th0)
    comp = combine([g, MembershipSpec("ellipsoid", th0, delta=0.5)])
    inside = np.full(p_of(), 0.1)
    outside = np.full(p_of(), 1.0)
    assert comp.log_eval(inside) == membership_log_eval(g, inside)
    assert comp.log_eval(outside) == -math.inf


def test_combine_rejects_mixed_plans():
    a = MembershipSpec("gaussian", vec(np.zeros(p_of(0)), 0))
    b = MembershipSpec("gaussian", vec(np.zeros(p_of(1)), 1))
    with pytest.raises(ValueError):
        combine([a, b])


def test_gamma_structure():
    plan = make_plan(D2.family, (0, 1), 2)
    g = GammaStructure.from_plan(plan, 1.0)
    lev = plan.levels()
    np.testing.assert_array_equal(g.diag[lev < 0], 1.0)
    for j in range(3):
        np.testing.assert_allclose(g.diag[lev == j], 4.0 ** -j)


def test_hyperprior_examples():
    assert default_a(3.0) == 40.0
    hp = HyperPrior(c=2.0, k=1.5, kernel="textbook")
    assert float(hp.log_sigma2(1.0)) == pytest.approx(math.log(1.5) - 1.5, abs=1e-14)
    for kernel in ("textbook", "as-printed"):
        hp = HyperPrior(kernel=kernel)
        assert math.exp(float(hp.log_u(1e-12))) < 1e-5


def test_hyperprior_validation():
    for kw in ({"c": 1.0}, {"k": 0.0}, {"a": -1.0}, {"kernel": "other"}, {"a": 2.0}):
        with pytest.raises(ValueError):
            HyperPrior(**kw)
    with pytest.raises(ValueError):
        hyper_log_density(HyperPrior(), -1.0, 1.0)


@pytest.mark.parametrize("kernel", ["textbook", "as-printed"])
@pytest.mark.parametrize("c,k", [(2.0, 1.5), (1.5, 0.5)])
def test_hyper_density_integrates_to_one(kernel, c, k):
    hp = HyperPrior(c=c, k=k, kernel=kernel)

    def f(lu, ls):
        return math.exp(hyper_log_density(hp, math.exp(ls), math.exp(lu)) + ls + lu)

    total, err = integrate.dblquad(f, -40, 40, -30, 20, epsabs=1e-10)
    assert total == pytest.approx(1.0, abs=1e-6)


def test_u_prior_is_f_distribution_for_textbook():
    hp = HyperPrior(kernel="textbook")
    u = np.array([0.01, 0.3, 1.0, 7.5])
    np.testing.assert_allclose(hp.log_u(u), stats.f.logpdf(u, 3, 40), atol=1e-12)
