import numpy as np
import pytest

from unitalnorm import algebra as alg
from unitalnorm import norms
from unitalnorm import protonorm as pn
from unitalnorm.errors import (
    KernelComponent,
    OutOfDomain,
    PathCrossesNonUnits,
    QuadratureNonConvergent,
)
from unitalnorm.rng import STREAM_TESTS, make_rng, sample_ball


def evaluator(name, params, **kw):
    a = alg.lookup(name)
    return norms.UnitalNormEvaluator(a, norms.params_to_matrix(name, params), **kw)


def test_evaluate_at_identity_is_one():
    for name, params in (("C", [0.3]), ("uT4", [0.1, 0.2, 0.3]), ("M2", [])):
        ev = evaluator(name, params)
        assert ev.evaluate(ev.algebra.unity) == 1.0


def test_evaluate_examples():
    assert abs(evaluator("C", [0.0]).evaluate([3, 4]) - 5.0) < 1e-10
    assert abs(evaluator("dual", [1.0]).evaluate([1, 1]) - np.e) < 1e-10
    assert abs(evaluator("M2", []).evaluate([2, 0, 0, 3]) - np.sqrt(6.0)) < 1e-10


def test_gradient_examples():
    ev = evaluator("C", [0.0])
    assert np.allclose(ev.gradient([3, 4]), [0.6, 0.8], atol=1e-7)
    # at the identity the gradient law gives L 1 / |1|^2 exactly
    for name, params in (("C", [0.4]), ("RplusR", [0.0]), ("uT3", [0.5, 0.25])):
        ev = evaluator(name, params)
        a = ev.algebra
        want = ev.L @ a.unity / a.one_norm_sq()
        assert np.allclose(ev.gradient(a.unity), want, atol=1e-7)
    ev = evaluator("RplusR", [0.0])
    assert np.allclose(ev.gradient([4, 1]), [0.25, 1.0], atol=1e-7)


def test_gradient_law_at_seeded_units():
    rng = make_rng(0, STREAM_TESTS)
    for name, params in (("C", [0.7]), ("dual", [0.3]), ("tri4", [0.2, 0.1, 0.4])):
        ev = evaluator(name, params)
        a = ev.algebra
        for _ in range(5):
            s = a.unity + 0.1 * sample_ball(rng, a.dim)
            u = ev.evaluate(s)
            want = u * (ev.L @ a.inverse(s)) / a.one_norm_sq()
            got = ev.gradient(s)
            assert np.linalg.norm(got - want) < 1e-4 * max(1.0, np.linalg.norm(want))


def test_euler_relation():
    rng = make_rng(1, STREAM_TESTS)
    for name, params in (("splitC", [0.4]), ("uT4", [0.3, 0.2, 0.1])):
        ev = evaluator(name, params)
        a = ev.algebra
        for _ in range(5):
            s = a.unity + 0.1 * sample_ball(rng, a.dim)
            assert abs(float(s @ ev.gradient(s)) - ev.evaluate(s)) < 1e-4


def test_unital_decomposition_examples():
    ev = evaluator("C", [0.0])
    mag, sphere, resid = ev.unital_decomposition(ev.algebra.unity)
    assert abs(mag - 1.0) < 1e-12 and resid < 1e-9
    assert np.allclose(sphere, ev.algebra.unity, atol=1e-8)

    mag, sphere, resid = ev.unital_decomposition([3, 4])
    assert abs(mag - 5.0) < 1e-9
    assert np.allclose(sphere, [0.6, 0.8], atol=1e-7)
    assert resid < 1e-6

    ev = evaluator("RplusR", [0.0])
    mag, sphere, resid = ev.unital_decomposition([4, 1])
    assert abs(mag - 2.0) < 1e-9
    assert np.allclose(sphere, [2.0, 0.5], atol=1e-7)
    assert resid < 1e-6


def test_unital_decomposition_kernel_guard():
    # sigma = 1 makes L = diag(2, 0); generic units have a kernel component
    ev = evaluator("RplusR", [1.0], quad_rel_tol=1e-12)
    with pytest.raises(KernelComponent):
        ev.unital_decomposition([1.1, 0.9])


def test_unital_decomposition_singular_member_on_kernel_complement():
    # dual numbers with beta = 0: L = diag(1, 0); units on the x-axis stay
    # clear of the kernel and decompose exactly
    ev = evaluator("dual", [0.0], quad_rel_tol=1e-12)
    mag, sphere, resid = ev.unital_decomposition([1.3, 0.0])
    assert abs(mag - 1.3) < 1e-9
    assert np.allclose(sphere, [1.0, 0.0], atol=1e-7)
    assert resid < 1e-6
    with pytest.raises(KernelComponent):
        ev.unital_decomposition([1.3, 0.4])


def test_inverse_product_examples():
    assert evaluator("C", [0.3]).inverse_product_check(alg.lookup("C").unity) == 0.0
    assert evaluator("C", [1.0]).inverse_product_check([2, 1]) < 1e-8
    assert evaluator("dual", [1.0]).inverse_product_check([2, 6]) < 1e-8


def test_homogeneity():
    rng = make_rng(2, STREAM_TESTS)
    for name, params in (("C", [0.6]), ("tri5", [0.2, 0.5]), ("uT5", [0.1, 0.2, 0.3, 0.4])):
        ev = evaluator(name, params)
        a = ev.algebra
        s = a.unity + 0.1 * sample_ball(rng, a.dim)
        base = ev.evaluate(s)
        for alpha in (0.5, 0.9, 1.1, 2.0):
            val = ev.evaluate(alpha * s)
            assert abs(val - alpha * base) / val < 1e-8


def test_path_policies_agree_inside_units():
    rng = make_rng(3, STREAM_TESTS)
    for name, params in (("C", [0.8]), ("dual", [0.5]), ("RplusR", [0.3]),
                         ("uT3", [0.4, 0.2]), ("M2", [])):
        a = alg.lookup(name)
        L = norms.params_to_matrix(name, params)
        seg = norms.UnitalNormEvaluator(a, L, path_policy="segment")
        axis = norms.UnitalNormEvaluator(a, L, path_policy="axis_polyline")
        for _ in range(5):
            s = a.unity + 0.1 * sample_ball(rng, a.dim)
            assert abs(seg.evaluate(s) - axis.evaluate(s)) < 1e-8


def test_path_class_sensitivity_on_complex_plane():
    beta = 0.7
    ev = evaluator("C", [beta])
    upper = ev.log_integral_along([[1, 0], [1, 1], [-1, 1], [-1, 0.01]])
    lower = ev.log_integral_along([[1, 0], [1, -1], [-1, -1], [-1, 0.01]])
    assert abs((upper - lower) - beta * 2.0 * np.pi) < 1e-4


def test_path_crossing_non_units_raises():
    ev = evaluator("RplusR", [0.0])
    with pytest.raises(PathCrossesNonUnits):
        ev.evaluate([-1.0, 1.0])
    ev = evaluator("splitC", [0.0])
    with pytest.raises(PathCrossesNonUnits):
        ev.evaluate([1.0, 1.5])  # leaves the |y| < x wedge


def test_quadrature_budget_exhaustion():
    a = alg.lookup("dual")
    ev = norms.UnitalNormEvaluator(a, norms.params_to_matrix("dual", [1.0]),
                                   max_subdivisions=0)
    with pytest.raises(QuadratureNonConvergent):
        ev.evaluate([1e-4, 1.0])


def test_closed_form_examples():
    assert abs(norms.closed_form("C", [1.0], [1, 1]) - np.sqrt(2) * np.exp(np.pi / 4)) < 1e-12
    assert abs(norms.closed_form("C", [1.0], [1, 1]) - 3.1017664) < 1e-7
    assert norms.closed_form("splitC", [0.0], [5, 3]) == 4.0
    assert abs(norms.closed_form("ipsg(3,0)", [], [2, 1, 0, 0]) - np.sqrt(3)) < 1e-12


def test_closed_form_domains():
    with pytest.raises(OutOfDomain):
        norms.closed_form("C", [0.5], [-1.0, 0.5])
    with pytest.raises(OutOfDomain):
        norms.closed_form("splitC", [0.0], [1.0, 2.0])
    with pytest.raises(OutOfDomain):
        norms.closed_form("RplusR", [0.0], [-1.0, 2.0])


def test_params_round_trip_and_span_membership():
    rng = make_rng(4, STREAM_TESTS)
    cases = (
        ("C", [0.37]), ("splitC", [-0.6]), ("RplusR", [0.8]), ("dual", [1.3]),
        ("H", []), ("M2", []), ("tri3", [0.5]), ("tri4", [0.1, -0.2, 0.7]),
        ("tri5", [0.4, -0.9]), ("uT5", [0.3, -0.1, 0.2, 0.6]),
        ("oplusR3", [1.5, 1.0, 0.5]), ("ipsg(2,1)", []),
    )
    for name, params in cases:
        L = norms.params_to_matrix(name, params)
        back = norms.params_from_matrix(name, L)
        assert np.allclose(back, params, atol=1e-12)
        fam = pn.solve_family(alg.lookup(name), seed=0)
        assert fam.projection_residual(L) < 1e-7
        # and the normalization constraint holds at a fresh unit
        a = alg.lookup(name)
        s = a.unity + 0.1 * sample_ball(rng, a.dim)
        assert abs(float(s @ (L @ a.inverse(s))) - a.one_norm_sq()) < 1e-9


def test_closed_form_tri5_depends_on_z_not_v():
    # the repeated eigenvalue couples through z; v and w leave the norm alone
    params = [0.3, 0.8]
    base = np.array([1.05, 0.95, 0.04, 0.02, -0.03])
    ev = evaluator("tri5", params)
    bumped_v = base + np.array([0, 0, 0.05, 0, 0])
    bumped_z = base + np.array([0, 0, 0, 0.05, 0])
    ref = norms.closed_form("tri5", params, base)
    assert abs(ev.evaluate(base) - ref) < 1e-10
    assert abs(ev.evaluate(bumped_v) - norms.closed_form("tri5", params, bumped_v)) < 1e-10
    assert abs(norms.closed_form("tri5", params, bumped_v) - ref) < 1e-12
    assert abs(norms.closed_form("tri5", params, bumped_z) - ref) > 1e-3


def test_decomposition_residuals_on_nonsingular_members():
    rng = make_rng(5, STREAM_TESTS)
    cases = (
        ("C", [0.3]), ("splitC", [0.2]), ("RplusR", [0.3]), ("dual", [0.7]),
        ("H", []), ("M2", []), ("uT3", [0.4, 0.8]), ("tri4", [0.3, 0.2, 0.5]),
    )
    for name, params in cases:
        L = norms.params_to_matrix(name, params)
        assert abs(np.linalg.det(L)) > 1e-6
        a = alg.lookup(name)
        ev = norms.UnitalNormEvaluator(a, L, quad_rel_tol=1e-12)
        for _ in range(3):
            s = a.unity + 0.1 * sample_ball(rng, a.dim)
            mag, sphere, resid = ev.unital_decomposition(s)
            assert resid < 1e-6
            assert abs(ev.evaluate(sphere) - 1.0) < 1e-6
