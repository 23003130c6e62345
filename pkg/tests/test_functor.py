import numpy as np
import pytest

from unitalnorm import algebra as alg
from unitalnorm import functor as fu
from unitalnorm import protonorm as pn
from unitalnorm.errors import DimensionMismatch, IdealContainsUnity, NotAnIdeal
from unitalnorm.rng import STREAM_TESTS, make_rng


def fam(name, seed=0):
    return pn.solve_family(alg.lookup(name), seed=seed)


def test_ideal_validation():
    RR = alg.lookup("RplusR")
    fu.IdealSpec(RR, [np.array([0.0, 1.0])]).validate()
    with pytest.raises(NotAnIdeal):
        # the diagonal of R+R is a subalgebra but not an ideal
        fu.IdealSpec(RR, [np.array([1.0, 1.0])]).validate()
    t4 = alg.lookup("tri4")
    fu.IdealSpec(t4, [np.array([0.0, 1.0, 0.0, 0.0]), np.array([0.0, 0.0, 0.0, 1.0])]).validate()
    with pytest.raises(NotAnIdeal):
        fu.IdealSpec(t4, [np.array([0.0, 0.0, 1.0, 0.0])]).validate()


def test_quotient_examples():
    RR = alg.lookup("RplusR")
    q, k = fu.quotient_algebra(RR, fu.IdealSpec(RR, [np.array([0.0, 1.0])]))
    assert q.dim == 1 and np.allclose(k, [[1.0, 0.0]])
    assert np.allclose(q.structure_constants, np.ones((1, 1, 1)))

    t3 = alg.lookup("tri3")
    q3, k3 = fu.quotient_algebra(t3, fu.IdealSpec(t3, [np.array([0.0, 0.0, 1.0])]))
    assert q3.dim == 2
    # quotient multiplies component-wise, like R + R
    assert np.allclose(q3.multiply([2.0, 3.0], [4.0, 5.0]), [8.0, 15.0])

    C = alg.lookup("C")
    same, k_id = fu.quotient_algebra(C, fu.IdealSpec(C, []))
    assert same is C and np.array_equal(k_id, np.eye(2))


def test_quotient_rejects_unity():
    C = alg.lookup("C")
    with pytest.raises(IdealContainsUnity):
        fu.quotient_algebra(C, fu.IdealSpec(C, [np.array([1.0, 0.0]), np.array([0.0, 1.0])]))


def test_quotient_satisfies_algebra_invariants():
    t5 = alg.lookup("tri5")
    ideal = fu.IdealSpec(t5, [np.zeros(5), ])
    ideal.basis = [np.array([0.0, 0.0, 1.0, 0.0, 0.0]),
                   np.array([0.0, 0.0, 0.0, 1.0, 0.0]),
                   np.array([0.0, 0.0, 0.0, 0.0, 1.0])]
    q, k = fu.quotient_algebra(t5, ideal)
    # construction runs the AlgebraDef checks; also confirm associativity
    rng = make_rng(0, STREAM_TESTS)
    for _ in range(20):
        x, y, z = (rng.standard_normal(q.dim) for _ in range(3))
        lhs = q.multiply(q.multiply(x, y), z)
        rhs = q.multiply(x, q.multiply(y, z))
        assert np.linalg.norm(lhs - rhs) < 1e-12 * max(1.0, np.linalg.norm(rhs))


def test_pullback_examples():
    L = np.array([[0.7]])
    k = np.array([[1.0, 0.0]])
    assert np.allclose(fu.pullback_protonorm(k, L), [[0.7, 0.0], [0.0, 0.0]])
    assert np.allclose(fu.pullback_protonorm(np.eye(3), np.diag([1.0, 2.0, 3.0])),
                       np.diag([1.0, 2.0, 3.0]))
    k2 = np.array([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]])
    assert np.allclose(fu.pullback_protonorm(k2, np.diag([2.0, 0.5])),
                       np.diag([2.0, 0.5, 0.0]))
    with pytest.raises(DimensionMismatch):
        fu.pullback_protonorm(k2, np.eye(3))


def test_pullback_of_normalized_member_is_curl_free():
    t3 = alg.lookup("tri3")
    q, k = fu.quotient_algebra(t3, fu.IdealSpec(t3, [np.array([0.0, 0.0, 1.0])]))
    nf = pn.normalize_family(pn.solve_family(q, seed=0), seed=0)
    pulled = fu.pullback_protonorm(k, nf.normalized_point)
    rng = make_rng(1, STREAM_TESTS)
    for _ in range(10):
        s = pn.sample_unit(t3, rng)
        assert np.max(np.abs(pn.curl_residual(t3, pulled, s))) < 1e-6


def test_morphism_examples():
    RR, R = fam("RplusR"), fam("R")
    q, k = fu.quotient_algebra(alg.lookup("RplusR"),
                               fu.IdealSpec(alg.lookup("RplusR"), [np.array([0.0, 1.0])]))
    assert fu.morphism_exists(RR, pn.solve_family(q, seed=0), k).exists

    C = fam("C")
    assert not fu.morphism_exists(C, R, np.array([[1.0, 0.0]])).exists
    identity = fu.morphism_exists(C, C, np.eye(2))
    assert identity.exists and identity.witness[1] < 1e-8


def test_morphism_verdict_diagnostics():
    C, R = fam("C"), fam("R")
    verdict = fu.morphism_exists(C, R, np.array([[1.0, 0.0]]))
    assert len(verdict.diagnostics) == 1
    assert verdict.diagnostics[0] > 0.5
    assert verdict.witness is None


def test_exclusion_examples():
    assert fu.epimorphism_excluded(alg.lookup("H"), alg.lookup("C"),
                                   source_family=fam("H"), target_family=fam("C"), seed=0)
    assert fu.epimorphism_excluded(alg.lookup("A13"), alg.lookup("A12"),
                                   source_family=fam("A13"), target_family=fam("A12"), seed=0)
    assert not fu.epimorphism_excluded(alg.lookup("C"), alg.lookup("C"),
                                       candidates=[np.eye(2)],
                                       source_family=fam("C"), target_family=fam("C"), seed=0)
    assert not fu.epimorphism_excluded(alg.lookup("dual"), alg.lookup("dual"),
                                       source_family=fam("dual"), target_family=fam("dual"),
                                       seed=0)


def test_worked_example_table():
    from unitalnorm.verification import functor_suite

    rows = functor_suite(seed=0)
    assert len(rows) == 9
    assert all(r["status"] == "ok" for r in rows)
