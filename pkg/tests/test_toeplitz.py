import numpy as np
import pytest

from unitalnorm import algebra as alg
from unitalnorm import norms, toeplitz
from unitalnorm.errors import NonPositiveLeading, NotAUnit
from unitalnorm.rng import STREAM_TESTS, make_rng


def test_inverse_examples():
    assert np.allclose(toeplitz.toeplitz_inverse([2.0, 6.0]), [0.5, -1.5], atol=1e-15)
    assert np.allclose(toeplitz.toeplitz_inverse([1.0, 1.0, 1.0]), [1.0, -1.0, 0.0], atol=1e-15)
    e = np.zeros(5)
    e[0] = 1.0
    assert np.allclose(toeplitz.toeplitz_inverse(e), e, atol=1e-15)


def test_inverse_matches_dense_lu():
    rng = make_rng(0, STREAM_TESTS)
    for n in range(2, 7):
        for _ in range(25):
            coeffs = rng.standard_normal(n)
            coeffs[0] = 1.0 + 0.5 * rng.random()
            fast = toeplitz.toeplitz_inverse(coeffs)
            dense = np.linalg.solve(toeplitz.toeplitz_matrix(coeffs), np.eye(n))[:, -1]
            # last column of the inverse holds all diagonal values bottom-up
            assert np.max(np.abs(fast - dense[::-1])) < 1e-12
            a = alg.lookup(f"uT{n}")
            assert np.max(np.abs(fast - a.inverse(coeffs))) < 1e-12


def test_not_a_unit():
    with pytest.raises(NotAUnit):
        toeplitz.toeplitz_inverse([0.0, 1.0, 2.0])


def test_hankel_examples():
    assert np.allclose(toeplitz.hankel_protonorm([1.0, 0.5]), [[1.0, 0.5], [0.5, 0.0]])
    got = toeplitz.hankel_protonorm([1.0, 2.0, 3.0])
    assert np.allclose(got, [[1.0, 2.0, 3.0], [2.0, 3.0, 0.0], [3.0, 0.0, 0.0]])
    assert np.all(toeplitz.hankel_protonorm(np.zeros(4)) == 0.0)


def test_hankel_is_curl_free():
    from unitalnorm import protonorm as pn

    rng = make_rng(1, STREAM_TESTS)
    for n in (3, 5):
        a = alg.lookup(f"uT{n}")
        h = toeplitz.hankel_protonorm(rng.standard_normal(n))
        for _ in range(10):
            s = pn.sample_unit(a, rng)
            assert np.max(np.abs(pn.curl_residual(a, h, s))) < 1e-8


def test_log_series_closed_forms():
    # n = 2: x e^{beta y / x}
    for beta in (0.0, 0.5, -1.2):
        val = toeplitz.log_series_norm([1.0, beta], [2.0, 0.6])
        assert abs(val - 2.0 * np.exp(beta * 0.3)) < 1e-14
    # n = 3: x e^{beta z/x + gamma (w/x - (z/x)^2 / 2)}
    beta, gamma = 0.7, -0.4
    x, z, w = 1.5, 0.3, 0.2
    val = toeplitz.log_series_norm([1.0, beta, gamma], [x, z, w])
    want = x * np.exp(beta * z / x + gamma * (w / x - 0.5 * (z / x) ** 2))
    assert abs(val - want) < 1e-14
    # n = 4 with trailing zeros keeps only x1
    assert toeplitz.log_series_norm([1.0, 0.0, 0.0, 0.0], [2.0, 0.4, -0.3, 0.9]) == 2.0


def test_log_series_requires_positive_leading():
    with pytest.raises(NonPositiveLeading):
        toeplitz.log_series_norm([1.0, 0.5], [-2.0, 1.0])


def test_log_series_agrees_with_path_integral():
    rng = make_rng(2, STREAM_TESTS)
    for n in range(2, 7):
        a = alg.lookup(f"uT{n}")
        for _ in range(10):
            gammas = np.concatenate([[1.0], 0.7 * rng.standard_normal(n - 1)])
            ev = norms.UnitalNormEvaluator(a, toeplitz.hankel_protonorm(gammas))
            s = a.unity + 0.1 * rng.standard_normal(n)
            want = ev.evaluate(s)
            got = toeplitz.log_series_norm(gammas, s)
            assert abs(got - want) / abs(want) < 1e-10


def test_algebraic_norm_contrast():
    # determinant is x1^n exactly; the log-series norm sees the other coords
    rng = make_rng(3, STREAM_TESTS)
    for n in (3, 5):
        coeffs = np.concatenate([[1.3], rng.standard_normal(n - 1)])
        det = np.linalg.det(toeplitz.toeplitz_matrix(coeffs))
        assert abs(det - 1.3**n) < 1e-12
        gammas = np.concatenate([[1.0], 0.5 * np.ones(n - 1)])
        other = coeffs.copy()
        other[1] += 0.25
        v1 = toeplitz.log_series_norm(gammas, coeffs)
        v2 = toeplitz.log_series_norm(gammas, other)
        assert abs(v1 - v2) > 1e-6


def test_inverse_partial_derivative_shift_identity():
    # d(s^-1)_k / dx_j equals d(s^-1)_{k-j+1} / dx_1  (finite differences)
    rng = make_rng(4, STREAM_TESTS)
    h = 1e-6
    for n in range(2, 7):
        coeffs = np.concatenate([[1.2], 0.4 * rng.standard_normal(n - 1)])

        def partial(k, j):
            e = np.zeros(n)
            e[j] = h
            plus = toeplitz.toeplitz_inverse(coeffs + e)[k]
            minus = toeplitz.toeplitz_inverse(coeffs - e)[k]
            return (plus - minus) / (2.0 * h)

        for k in range(n):
            for j in range(1, k + 1):
                assert abs(partial(k, j) - partial(k - j, 0)) < 1e-6
