"""Regularization of ill-conditioned linear inverse problems.

Three estimators for y = F x + noise are provided on top of a singular
system {u_i, sigma_i, v_i}: zero-order Tikhonov with the discrepancy
principle (bisection on the monotone residual), truncated SVD, and the
geometric-mean fixed point

    p = 1/2 sum_{|u_i'y| > 2 eps} (u_i'y + sgn(u_i'y) sqrt((u_i'y)^2 - 4 eps^2)) v_i / sigma_i,

which is the stationary point of iterating

    A_eps[w] = sum_i sigma_i (u_i'y) / (sigma_i^2 + eps^2 / (v_i'w)^2) v_i,

with the convention that a zero component stays zero.  The fixed point is a
critical point of the geometric mean of coordinate absolute values on the
truncated discrepancy ellipsoid; ``critical_point_check`` verifies that
tangency directly.  The SVD itself is computed by one-sided Jacobi rotations,
deterministic at desk scale.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateCoordinate, DeltaOutOfRange
from .rng import STREAM_REG_NOISE, make_rng

JACOBI_TOL = 1e-14
MAX_DESK_SIZE = 512


def jacobi_svd(a, tol=JACOBI_TOL, max_sweeps=60):
    """Economy SVD by one-sided Jacobi column orthogonalization.

    Returns (U, s, V) with descending singular values, F = U diag(s) V'.
    """
    a = np.asarray(a, dtype=float)
    n, m = a.shape
    if max(n, m) > MAX_DESK_SIZE:
        raise ValueError(f"jacobi_svd supports sizes up to {MAX_DESK_SIZE}")
    if n < m:
        u, s, v = jacobi_svd(a.T, tol=tol, max_sweeps=max_sweeps)
        return v, s, u

    w = a.copy()
    v = np.eye(m)
    for _ in range(max_sweeps):
        rotated = False
        for p in range(m - 1):
            for q in range(p + 1, m):
                app = w[:, p] @ w[:, p]
                aqq = w[:, q] @ w[:, q]
                apq = w[:, p] @ w[:, q]
                if abs(apq) <= tol * np.sqrt(app * aqq) or apq == 0.0:
                    continue
                rotated = True
                tau = (aqq - app) / (2.0 * apq)
                t = np.sign(tau) / (abs(tau) + np.sqrt(1.0 + tau * tau)) if tau != 0 else 1.0
                c = 1.0 / np.sqrt(1.0 + t * t)
                s_ = c * t
                wp = w[:, p].copy()
                w[:, p] = c * wp - s_ * w[:, q]
                w[:, q] = s_ * wp + c * w[:, q]
                vp = v[:, p].copy()
                v[:, p] = c * vp - s_ * v[:, q]
                v[:, q] = s_ * vp + c * v[:, q]
        if not rotated:
            break

    sv = np.linalg.norm(w, axis=0)
    order = np.argsort(-sv)
    sv = sv[order]
    w = w[:, order]
    v = v[:, order]
    u = np.zeros((n, m))
    tiny = np.max(sv) * 1e-15 if sv.size and np.max(sv) > 0 else 0.0
    for j in range(m):
        if sv[j] > tiny:
            u[:, j] = w[:, j] / sv[j]
        else:
            sv[j] = 0.0
    # complete U columns for vanished singular values
    for j in range(m):
        if np.linalg.norm(u[:, j]) > 0.5:
            continue
        for cand in range(n):
            e = np.zeros(n)
            e[cand] = 1.0
            e -= u @ (u.T @ e)
            nrm = np.linalg.norm(e)
            if nrm > 1e-8:
                u[:, j] = e / nrm
                break
    return u, sv, v


@dataclass
class SvdProblem:
    """Transfer matrix with its singular system, data, and noise scales."""

    f: np.ndarray
    u: np.ndarray
    s: np.ndarray
    v: np.ndarray
    y: np.ndarray
    delta: float = 0.0
    epsilon: float = 0.0

    @classmethod
    def from_matrix(cls, f, y, delta=0.0, epsilon=0.0):
        f = np.asarray(f, dtype=float)
        u, s, v = jacobi_svd(f)
        problem = cls(f, u, s, v, np.asarray(y, dtype=float), float(delta), float(epsilon))
        problem.validate()
        return problem

    @classmethod
    def from_spectrum(cls, sigmas, y, delta=0.0, epsilon=0.0):
        """Diagonal problem with known singular system (u_i = v_i = e_i)."""
        sigmas = np.asarray(sigmas, dtype=float)
        n = sigmas.size
        if np.any(sigmas < 0):
            raise ValueError("singular values must be nonnegative")
        return cls(np.diag(sigmas), np.eye(n), sigmas, np.eye(n),
                   np.asarray(y, dtype=float), float(delta), float(epsilon))

    def __post_init__(self):
        self.f = np.asarray(self.f, dtype=float)
        self.y = np.asarray(self.y, dtype=float)
        if np.any(np.diff(self.s) > 0):
            raise ValueError("singular values must be nonincreasing")

    def validate(self):
        recon = self.u @ (self.s[:, None] * self.v.T)
        scale = max(np.linalg.norm(self.f), 1e-300)
        assert np.linalg.norm(recon - self.f) < 1e-10 * scale
        assert np.linalg.norm(self.u.T @ self.u - np.eye(self.u.shape[1])) < 1e-10
        assert np.linalg.norm(self.v.T @ self.v - np.eye(self.v.shape[1])) < 1e-10

    @property
    def data_coefficients(self):
        return self.u.T @ self.y

    def rank(self):
        if self.s.size == 0 or self.s[0] == 0.0:
            return 0
        return int(np.sum(self.s > 1e-12 * self.s[0]))


@dataclass
class RegularizedSolution:
    x: np.ndarray
    method: str
    gamma_or_epsilon: float
    retained_indices: list = field(default_factory=list)
    discrepancy: float = 0.0


def _finish(problem, x, method, param, retained):
    disc = float(np.linalg.norm(problem.f @ x - problem.y))
    return RegularizedSolution(x=x, method=method, gamma_or_epsilon=param,
                               retained_indices=list(retained), discrepancy=disc)


def tikhonov_discrepancy(problem, rtol=1e-10, max_iter=400):
    """x = (F'F + gamma I)^{-1} F' y with gamma from the discrepancy principle."""
    z = problem.data_coefficients
    ynorm = float(np.linalg.norm(problem.y))
    rank = problem.rank()
    sig = problem.s[:rank]
    zr = z[:rank]
    floor_sq = max(ynorm**2 - float(zr @ zr), 0.0)
    tol = rtol * max(ynorm, 1e-300)
    delta = problem.delta

    def x_of(gamma):
        coef = sig * zr / (sig**2 + gamma)
        return problem.v[:, :rank] @ coef

    def disc(gamma):
        resid_sq = float(np.sum((gamma / (sig**2 + gamma)) ** 2 * zr**2)) + floor_sq
        return np.sqrt(resid_sq)

    if np.linalg.norm(zr) <= 1e-14 * max(1.0, ynorm):
        # data orthogonal to the range: every gamma gives the same residual
        if abs(delta - ynorm) <= max(tol, 1e-12):
            return _finish(problem, np.zeros(problem.v.shape[0]), "tikhonov", np.inf, [])
        raise DeltaOutOfRange(f"target {delta} unreachable; residual is fixed at {ynorm}")
    if delta >= ynorm:
        raise DeltaOutOfRange(f"target {delta} is not below the zero-solution residual {ynorm}")
    if delta < np.sqrt(floor_sq) - tol:
        raise DeltaOutOfRange(
            f"target {delta} is below the attainable floor {np.sqrt(floor_sq)}"
        )

    lo, hi = 0.0, max(sig[0] ** 2, 1.0)
    d_lo = disc(lo)
    if delta <= d_lo + tol and delta >= d_lo - tol:
        gamma = lo
    else:
        while disc(hi) < delta:
            hi *= 10.0
            if hi > 1e300:
                raise DeltaOutOfRange(f"target {delta} unreachable by finite gamma")
        gamma = None
        for _ in range(max_iter):
            mid = 0.5 * (lo + hi)
            d_mid = disc(mid)
            assert disc(lo) - tol <= d_mid <= disc(hi) + tol  # monotone bracket
            if abs(d_mid - delta) <= tol:
                gamma = mid
                break
            if d_mid < delta:
                lo = mid
            else:
                hi = mid
        if gamma is None:
            gamma = 0.5 * (lo + hi)
    x = x_of(gamma) if np.isfinite(gamma) else np.zeros(problem.v.shape[0])
    return _finish(problem, x, "tikhonov", float(gamma), list(range(rank)))


def tsvd(problem, k):
    """Truncated SVD estimate from the k largest singular components."""
    rank = problem.rank()
    if not 0 <= k <= rank:
        raise ValueError(f"k must be in 0..rank={rank}")
    z = problem.data_coefficients
    x = np.zeros(problem.v.shape[0])
    for i in range(k):
        x += (z[i] / problem.s[i]) * problem.v[:, i]
    return _finish(problem, x, "tsvd", float(k), list(range(k)))


def geometric_fixed_point(problem):
    """Largest fixed point of the geometric-mean iteration, in closed form."""
    eps = problem.epsilon
    z = problem.data_coefficients
    rank = problem.rank()
    retained = [i for i in range(rank) if abs(z[i]) > 2.0 * eps]
    x = np.zeros(problem.v.shape[0])
    for i in retained:
        coef = 0.5 * (z[i] + np.sign(z[i]) * np.sqrt(z[i] ** 2 - 4.0 * eps**2))
        x += (coef / problem.s[i]) * problem.v[:, i]
    return _finish(problem, x, "geomfp", float(eps), retained)


def apply_iteration(problem, w):
    """One application of the covariance-update operator A_eps."""
    eps = problem.epsilon
    z = problem.data_coefficients
    t = problem.v.T @ w
    sig = problem.s
    coef = np.zeros_like(t)
    nz = t != 0.0
    if eps == 0.0:
        pos = nz & (sig > 0)
        coef[pos] = z[pos] / sig[pos]
    else:
        coef[nz] = sig[nz] * z[nz] * t[nz] ** 2 / (sig[nz] ** 2 * t[nz] ** 2 + eps**2)
    return problem.v @ coef


@dataclass
class IterationResult:
    iterates: list
    final_distance: float
    attracting_indices: list


def iterate_A(problem, w0, n_iter):
    """Iterate A_eps from w0, reporting convergence toward the fixed point.

    The final distance is measured on the subspace of components with
    |u_i'y| > 4 eps, where the fixed point is provably attracting.
    """
    w = np.asarray(w0, dtype=float).copy()
    iterates = [w.copy()]
    for _ in range(n_iter):
        w = apply_iteration(problem, w)
        iterates.append(w.copy())
    z = problem.data_coefficients
    attracting = [i for i in range(problem.rank()) if abs(z[i]) > 4.0 * problem.epsilon]
    p = geometric_fixed_point(problem).x
    basis = problem.v[:, attracting]
    dist = float(np.linalg.norm(basis.T @ (w - p))) if attracting else 0.0
    return IterationResult(iterates=iterates, final_distance=dist, attracting_indices=attracting)


def critical_point_check(problem, solution):
    """Sine of the angle between the geometric-mean gradient and the
    discrepancy-constraint gradient at the fixed point, on the retained
    subspace.  Zero means exact tangency."""
    retained = solution.retained_indices
    if not retained:
        raise DegenerateCoordinate("no retained components")
    z = problem.data_coefficients
    p_hat = problem.v[:, retained].T @ solution.x
    if np.any(np.abs(p_hat) < 1e-300):
        raise DegenerateCoordinate("a retained coordinate vanished")
    g_mean_dir = 1.0 / p_hat
    constraint = 2.0 * problem.s[retained] * (problem.s[retained] * p_hat - z[retained])
    u = g_mean_dir / np.linalg.norm(g_mean_dir)
    nv = np.linalg.norm(constraint)
    if nv == 0.0:
        raise DegenerateCoordinate("constraint gradient vanished")
    vhat = constraint / nv
    return float(np.linalg.norm(u - (u @ vhat) * vhat))


def attraction_certificate(problem, solution):
    """Per-component derivative factors of A_eps at the fixed point.

    Values below 1 certify local attraction; guaranteed for components with
    |u_i'y| > 4 eps.
    """
    eps = problem.epsilon
    z = problem.data_coefficients
    out = {}
    for i in solution.retained_indices:
        t = problem.s[i] * float(problem.v[:, i] @ solution.x)
        out[i] = 2.0 * eps**2 * abs(t * z[i]) / (t**2 + eps**2) ** 2
    return out


def map_identity_residual(problem, solution):
    """Residual of p = (F'F + eps^2 C_p^{-1})^{-1} F' y on the retained span."""
    eps = problem.epsilon
    z = problem.data_coefficients
    worst = 0.0
    for i in solution.retained_indices:
        p_i = float(problem.v[:, i] @ solution.x)
        pred = problem.s[i] * z[i] / (problem.s[i] ** 2 + eps**2 / p_i**2)
        worst = max(worst, abs(pred - p_i))
    return worst


def sign_rule_margin(problem, solution):
    """Smallest margin of |sigma_i v_i'p| over |u_i'y| / 2 on retained components."""
    z = problem.data_coefficients
    margin = np.inf
    for i in solution.retained_indices:
        t = abs(problem.s[i] * float(problem.v[:, i] @ solution.x))
        margin = min(margin, t - 0.5 * abs(z[i]))
    return margin


def spectrum_from_law(law, n):
    """Singular values from a decay-law spec like 'i^-2' or a callable."""
    idx = np.arange(1, n + 1, dtype=float)
    if callable(law):
        return np.array([float(law(i)) for i in idx])
    law = law.strip()
    if law.startswith("i^"):
        return idx ** float(law[2:])
    raise ValueError(f"unknown spectrum law {law!r}")


def convergence_experiment(spectrum="i^-2", x_true=None, deltas=(1e-1, 1e-2, 1e-3, 1e-4, 1e-5),
                           seed=0, n=200, gaussian=False):
    """Error of the geometric-mean estimate as noise shrinks, with eps = delta.

    The transfer operator is diagonal with the given spectrum; the noise is a
    seeded direction scaled to exactly delta (or Gaussian with matching power
    when ``gaussian``).  Returns a list of result rows.
    """
    sig = spectrum_from_law(spectrum, n)
    if x_true is None:
        x_true = np.arange(1, n + 1, dtype=float) ** -3.0
    x_true = np.asarray(x_true, dtype=float)
    x_dag = x_true.copy()
    if np.any(sig == 0.0):
        x_dag = np.where(sig > 0, x_true, 0.0)
    y_exact = sig * x_true
    rng = make_rng(seed, STREAM_REG_NOISE)
    rows = []
    for delta in deltas:
        g = rng.standard_normal(n)
        if gaussian:
            noise = g * (delta / np.sqrt(n))
        else:
            noise = g * (delta / np.linalg.norm(g))
        problem = SvdProblem.from_spectrum(sig, y_exact + noise, delta=delta, epsilon=delta)
        sol = geometric_fixed_point(problem)
        err = float(np.linalg.norm(x_dag - sol.x))
        rows.append({
            "method": "geomfp",
            "delta": float(delta),
            "epsilon": float(delta),
            "gamma": float("nan"),
            "retained_count": len(sol.retained_indices),
            "discrepancy": sol.discrepancy,
            "error": err,
        })
    return rows
