"""Fast exact machinery for upper triangular Toeplitz algebras.

An element of uT_n is identified with the vector (x_1, ..., x_n) of its
successive diagonals; it is a unit iff x_1 != 0.  The inverse follows a short
recursion on the series coefficients, every proto-norm of the algebra is an
anti-triangular Hankel matrix built from a coefficient vector (gamma_1, ...,
gamma_n), and the associated norm has the closed polynomial-exponent form

    x_1 * exp(sum_k gamma_{k+1} c_k),

where c_k is the degree-k coefficient of log(1 + x_2/x_1 u + ... ) truncated
at degree n-1.  The last form is a computational shortcut; it is validated
against numeric path integration in the test suite before anything relies on
it.
"""

import numpy as np

from .errors import NonPositiveLeading, NotAUnit

UNIT_RTOL = 1e-12


def toeplitz_matrix(coeffs):
    """Dense upper triangular Toeplitz matrix for diagonal values coeffs."""
    coeffs = np.asarray(coeffs, dtype=float)
    n = coeffs.size
    m = np.zeros((n, n))
    for k, c in enumerate(coeffs):
        m += c * np.eye(n, k=k)
    return m


def toeplitz_inverse(coeffs):
    """Inverse diagonals (1/x1, y1/x1, ..., y_{n-1}/x1) by the recursion."""
    coeffs = np.asarray(coeffs, dtype=float)
    x1 = coeffs[0]
    if abs(x1) <= UNIT_RTOL * np.linalg.norm(coeffs):
        raise NotAUnit("leading diagonal value vanishes", diagnostic=float(x1))
    n = coeffs.size
    w = coeffs / x1
    y = np.zeros(n)
    y[0] = 1.0
    for k in range(1, n):
        y[k] = -np.dot(w[1 : k + 1], y[k - 1 :: -1])
    return y / x1


def hankel_protonorm(gammas):
    """Anti-triangular Hankel matrix H[i, j] = gamma_{i+j+1} (zero past n)."""
    gammas = np.asarray(gammas, dtype=float)
    n = gammas.size
    h = np.zeros((n, n))
    for i in range(n):
        for j in range(n - i):
            h[i, j] = gammas[i + j]
    return h


def log_series_coefficients(w, order):
    """Coefficients c_1..c_order of log(1 + w_1 u + w_2 u^2 + ...).

    Uses the standard recurrence c_k = w_k - (1/k) sum_{j<k} j c_j w_{k-j},
    with w_k = 0 past the end of w.
    """
    w = np.asarray(w, dtype=float)

    def wk(k):
        return w[k - 1] if 1 <= k <= w.size else 0.0

    c = np.zeros(order)
    for k in range(1, order + 1):
        acc = wk(k)
        for j in range(1, k):
            acc -= (j / k) * c[j - 1] * wk(k - j)
        c[k - 1] = acc
    return c


def log_series_norm(gammas, coeffs):
    """Closed form x1 * exp(sum gamma_{k+1} c_k) for a normalized Hankel L.

    Requires gamma_1 = 1 (the normalized slice) and x_1 > 0 (principal
    branch).
    """
    gammas = np.asarray(gammas, dtype=float)
    coeffs = np.asarray(coeffs, dtype=float)
    if abs(gammas[0] - 1.0) > 1e-10:
        raise ValueError("log-series form needs gamma_1 = 1")
    x1 = coeffs[0]
    if abs(x1) <= UNIT_RTOL * np.linalg.norm(coeffs):
        raise NotAUnit("leading diagonal value vanishes", diagnostic=float(x1))
    if x1 <= 0.0:
        raise NonPositiveLeading(f"leading value {x1} must be positive")
    n = coeffs.size
    c = log_series_coefficients(coeffs[1:] / x1, n - 1)
    return float(x1 * np.exp(np.dot(gammas[1:], c)))
