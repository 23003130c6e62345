"""Incomplete unital norms by path integration, and their closed forms.

Given a symmetric proto-norm L of an algebra with normalization constant
``|1|^2``, the norm of a unit s is

    U(s) = exp( (1 / |1|^2) * integral_1^s (L t^{-1}) . dt ),

integrated along a path from the identity that passes only through units.
Path independence holds inside a simply connected neighborhood of valid
units, so the default straight segment and the coordinate-by-coordinate
polyline agree whenever both stay in the unit set; paths in different
homotopy classes (around non-units) may differ, which is observable for the
complex plane with an asymmetric family member.
"""

from dataclasses import dataclass

import numpy as np

from . import toeplitz
from .algebra import ROW_ALIASES
from .errors import (
    DecompositionCheckFailed,
    KernelComponent,
    OutOfDomain,
    PathCrossesNonUnits,
    QuadratureNonConvergent,
)

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(15)
PINV_RTOL = 1e-10
KERNEL_RTOL = 1e-8
GRAD_STEP_SCALE = 1e-6
SPHERE_NORM_TOL = 1e-6


@dataclass(frozen=True)
class UnitalNormEvaluator:
    """A fixed proto-norm matrix plus quadrature and path configuration.

    Immutable after construction; evaluations at distinct points can run
    concurrently.
    """

    algebra: object
    L: np.ndarray
    quad_rel_tol: float = 1e-10
    max_subdivisions: int = 2000
    path_policy: str = "segment"

    def __post_init__(self):
        L = np.ascontiguousarray(np.asarray(self.L, dtype=float))
        if L.shape != (self.algebra.dim,) * 2:
            raise ValueError("L must be dim x dim")
        if np.max(np.abs(L - L.T)) > 1e-12 * max(1.0, np.max(np.abs(L))):
            raise ValueError("L must be symmetric")
        if self.path_policy not in ("segment", "axis_polyline"):
            raise ValueError(f"unknown path policy {self.path_policy!r}")
        L.setflags(write=False)
        object.__setattr__(self, "L", L)

    # -- batched inverse field --------------------------------------------

    def _inverses(self, points):
        """Inverses of a batch of points plus their worst condition number.

        Raises PathCrossesNonUnits if any point fails the unit test.  The
        condition number bounds the relative noise of the inverse values and
        feeds the quadrature roundoff floor.
        """
        a = self.algebra
        if a.inverse_rule == "associative_solve":
            m = np.einsum("pi,ijk->pkj", points, a.structure_constants)
            sv = np.linalg.svd(m, compute_uv=False)
            if np.any(sv[:, -1] <= 1e-10 * sv[:, 0]):
                raise PathCrossesNonUnits(f"{a.name}: quadrature node failed the unit test")
            rhs = np.broadcast_to(a.unity, (points.shape[0], a.dim))
            return np.linalg.solve(m, rhs[..., None])[..., 0], float(np.max(sv[:, 0] / sv[:, -1]))
        if a.inverse_rule == "ipsg":
            q = np.concatenate([np.ones(a.signature[0]), -np.ones(a.signature[1])])
            sigma = points[:, 0]
            vec = points[:, 1:]
            denom = sigma**2 - np.einsum("pi,i,pi->p", vec, q, vec)
            scale = np.maximum(1.0, np.einsum("pi,pi->p", points, points))
            if np.any(np.abs(denom) <= 1e-10 * scale):
                raise PathCrossesNonUnits(f"{a.name}: quadrature node failed the unit test")
            kappa = float(np.max(scale / np.abs(denom)))
            return np.concatenate([sigma[:, None], -vec], axis=1) / denom[:, None], max(kappa, 1.0)
        out = np.empty_like(points)
        kappa = 1.0
        for k, p in enumerate(points):
            if not a.is_unit(p):
                raise PathCrossesNonUnits(f"{a.name}: quadrature node failed the unit test")
            out[k] = a.inverse(p)
            kappa = max(kappa, float(p @ p) / max(abs(a._star_norm(p)), 1e-300))
        return out, kappa

    # -- adaptive panel integration ----------------------------------------

    def _leg_integral(self, start, end, budget):
        """Integral of (L t^{-1}) . dt along the segment start -> end.

        Returns (value, subdivisions used).  The leg is parametrized on
        [0, 1]; panels are bisected until the 15-point Gauss-Legendre value
        is stable to the relative tolerance, apportioned by panel width.
        """
        direction = end - start
        ldir = self.L @ direction

        def gl15(u0, u1):
            mid = 0.5 * (u0 + u1)
            half = 0.5 * (u1 - u0)
            u = mid + half * _GL_NODES
            pts = start[None, :] + u[:, None] * direction[None, :]
            inv, kappa = self._inverses(pts)
            return half * float((inv @ ldir) @ _GL_WEIGHTS), kappa

        whole, _ = gl15(0.0, 1.0)
        scale = max(1.0, abs(whole))
        used = 0
        total = 0.0
        stack = [(0.0, 1.0, whole)]
        eps = np.finfo(float).eps
        while stack:
            u0, u1, est = stack.pop()
            mid = 0.5 * (u0 + u1)
            left, kappa_l = gl15(u0, mid)
            right, kappa_r = gl15(mid, u1)
            diff = abs(left + right - est)
            # attainable accuracy is limited by the conditioning of the
            # inverse at the nodes; anything below that floor is noise
            floor = 64.0 * eps * max(kappa_l, kappa_r) * (abs(left) + abs(right) + abs(est))
            if diff <= max(self.quad_rel_tol * scale * (u1 - u0), floor):
                total += left + right
                continue
            # refinement is driven either by a rough integrand or by a unit-set
            # crossing; test the split point so crossings surface as such
            self._inverses((start + mid * direction)[None, :])
            used += 1
            if used > budget:
                raise QuadratureNonConvergent(
                    f"{self.algebra.name}: quadrature used more than {budget} subdivisions"
                )
            stack.append((u0, mid, left))
            stack.append((mid, u1, right))
        return total, used

    def _waypoints(self, s):
        a = self.algebra
        if self.path_policy == "segment":
            return [a.unity, s]
        pts = [a.unity.copy()]
        cur = a.unity.copy()
        for k in range(a.dim):
            cur = cur.copy()
            cur[k] = s[k]
            pts.append(cur)
        return pts

    def log_integral_along(self, waypoints):
        """Raw path integral of (L t^{-1}) . dt over a polyline of units."""
        waypoints = [self.algebra.coerce(w) for w in waypoints]
        total = 0.0
        budget = self.max_subdivisions
        for a, b in zip(waypoints[:-1], waypoints[1:]):
            if np.linalg.norm(b - a) == 0.0:
                continue
            val, used = self._leg_integral(a, b, budget)
            total += val
            budget -= used
        return total

    def evaluate_along(self, waypoints):
        """Norm value with an explicit polyline path from the identity."""
        return float(np.exp(self.log_integral_along(waypoints) / self.algebra.one_norm_sq()))

    def evaluate(self, s):
        """U(s) along the configured path policy."""
        s = self.algebra.coerce(s)
        if np.array_equal(s, self.algebra.unity):
            return 1.0
        return self.evaluate_along(self._waypoints(s))

    # -- derived quantities --------------------------------------------------

    def gradient(self, s):
        """Central finite-difference gradient of the norm at a unit."""
        s = self.algebra.coerce(s)
        h = GRAD_STEP_SCALE * max(1.0, float(np.linalg.norm(s)))
        g = np.zeros(self.algebra.dim)
        for j in range(self.algebra.dim):
            e = self.algebra.basis_vector(j)
            g[j] = (self.evaluate(s + h * e) - self.evaluate(s - h * e)) / (2.0 * h)
        return g

    def inverse_product_check(self, s):
        """|U(s) U(s^{-1}) - 1|."""
        s = self.algebra.coerce(s)
        return abs(self.evaluate(s) * self.evaluate(self.algebra.inverse(s)) - 1.0)

    def unital_decomposition(self, s):
        """Factor a unit as magnitude times a point on the unit sphere.

        Returns (magnitude, sphere_point, residual) with
        sphere_point = |1|^2 L^+ grad U(s^{-1}) and residual the relative
        error of s = magnitude * sphere_point.  The element must have no
        component in the kernel of L.
        """
        a = self.algebra
        s = a.coerce(s)
        evals, evecs = np.linalg.eigh(self.L)
        cutoff = PINV_RTOL * max(np.max(np.abs(evals)), 1e-300)
        kernel = evecs[:, np.abs(evals) <= cutoff]
        if kernel.size and np.linalg.norm(kernel.T @ s) > KERNEL_RTOL * np.linalg.norm(s):
            raise KernelComponent(
                f"{a.name}: element has a kernel component of relative size "
                f"{np.linalg.norm(kernel.T @ s) / np.linalg.norm(s):.3e}"
            )
        keep = np.abs(evals) > cutoff
        pinv = (evecs[:, keep] / evals[keep]) @ evecs[:, keep].T
        magnitude = self.evaluate(s)
        grad_at_inv = self.gradient(a.inverse(s))
        sphere = a.one_norm_sq() * (pinv @ grad_at_inv)
        residual = float(np.linalg.norm(s - magnitude * sphere) / np.linalg.norm(s))
        sphere_norm = self.evaluate(sphere)
        if abs(sphere_norm - 1.0) > SPHERE_NORM_TOL:
            raise DecompositionCheckFailed(
                f"{a.name}: sphere point norm {sphere_norm} deviates from 1"
            )
        return magnitude, sphere, residual


# ---------------------------------------------------------------------------
# Closed forms for the catalog rows
# ---------------------------------------------------------------------------


def _need(cond, msg):
    if not cond:
        raise OutOfDomain(msg)


def closed_form(name, params, s):
    """Catalog closed-form norm value, exactly as tabulated.

    ``params`` are the free coefficients of the normalized family member the
    formula corresponds to (see ``params_from_matrix``).
    """
    name = ROW_ALIASES.get(name, name)
    s = np.asarray(s, dtype=float)
    params = np.asarray(params, dtype=float)

    if name == "R":
        _need(s[0] > 0, "requires s > 0")
        return float(s[0])
    if name == "C":
        (beta,) = params
        x, y = s
        _need(x > 0, "valid in the right half-plane only")
        return float(np.hypot(x, y) * np.exp(beta * np.arctan(y / x)))
    if name == "splitC":
        (beta,) = params
        x, y = s
        _need(x > abs(y), "requires x > |y|")
        return float(np.sqrt(x * x - y * y) * np.exp(beta * np.arctanh(y / x)))
    if name in ("RplusR", "tri3"):
        (sigma,) = params
        x, y = s[0], s[1]
        _need(x > 0 and y > 0, "requires positive diagonal values")
        return float(np.sqrt(x * y) * (x / y) ** (sigma / 2.0))
    if name == "dual":
        (beta,) = params
        x, y = s
        _need(x > 0, "requires x > 0")
        return float(x * np.exp(beta * y / x))
    if name == "H":
        return float(np.linalg.norm(s))
    if name in ("M2", "M3"):
        n = 2 if name == "M2" else 3
        det = float(np.linalg.det(s.reshape(n, n, order="F")))
        _need(det > 0, "requires positive determinant near the identity")
        return det ** (1.0 / n)
    if name.startswith("oplusR"):
        n = s.size
        _need(np.all(s > 0), "requires positive components")
        sigmas = params
        return float(np.prod(s**sigmas) ** (1.0 / n))
    if name.startswith("uT"):
        return toeplitz.log_series_norm(np.concatenate([[1.0], params]), s)
    if name == "tri4":
        beta, gamma, delta = params
        x, v, z, w = s
        _need(x > 0, "requires x > 0")
        expo = beta * v / x + gamma * z / x + delta * w / x - 0.5 * delta * z * v / x**2
        return float(x * np.exp(expo))
    if name == "tri5":
        sigma, beta = params
        x, y, _, z, _ = s
        _need(x > 0 and y > 0, "requires positive diagonal values")
        return float(np.sqrt(x * y) * (x / y) ** (sigma / 2.0) * np.exp(0.5 * beta * z / x))
    if name.startswith("ipsg"):
        inner = name[name.index("(") + 1 : name.index(")")]
        m, n = (int(t) for t in inner.split(","))
        q = np.concatenate([np.ones(m), -np.ones(n)])
        sigma, vec = s[0], s[1:]
        val = sigma**2 - float(vec @ (q * vec))
        _need(abs(val) > 0, "element is not a unit")
        return float(np.sqrt(abs(val)))
    raise KeyError(f"no closed form registered for algebra {name!r}")


def params_to_matrix(name, params):
    """Normalized family member with the given closed-form coefficients."""
    name = ROW_ALIASES.get(name, name)
    params = np.asarray(params, dtype=float)

    if name == "R":
        return np.eye(1)
    if name == "C":
        (beta,) = params
        return np.array([[1.0, beta], [beta, -1.0]])
    if name == "splitC":
        (beta,) = params
        return np.array([[1.0, beta], [beta, 1.0]])
    if name == "RplusR":
        (sigma,) = params
        return np.diag([1.0 + sigma, 1.0 - sigma])
    if name == "tri3":
        (sigma,) = params
        return np.diag([1.0 + sigma, 1.0 - sigma, 0.0])
    if name == "dual":
        (beta,) = params
        return np.array([[1.0, beta], [beta, 0.0]])
    if name == "H":
        return np.diag([1.0, -1.0, -1.0, -1.0])
    if name in ("M2", "M3"):
        n = 2 if name == "M2" else 3
        t = np.zeros((n * n, n * n))
        for i in range(n):
            for j in range(n):
                t[i * n + j, j * n + i] = 1.0  # appended-columns transpose permutation
        return t
    if name.startswith("oplusR"):
        if abs(np.sum(params) - params.size) > 1e-10:
            raise OutOfDomain("diagonal weights must sum to the dimension")
        return np.diag(params)
    if name.startswith("uT"):
        return toeplitz.hankel_protonorm(np.concatenate([[1.0], params]))
    if name == "tri4":
        beta, gamma, delta = params
        return np.array([
            [1.0, beta, gamma, delta],
            [beta, 0.0, 0.5 * delta, 0.0],
            [gamma, 0.5 * delta, 0.0, 0.0],
            [delta, 0.0, 0.0, 0.0],
        ])
    if name == "tri5":
        sigma, beta = params
        m = np.zeros((5, 5))
        m[0, 0] = 1.0 + sigma
        m[1, 1] = 1.0 - sigma
        m[0, 3] = m[3, 0] = beta
        return m
    if name.startswith("ipsg"):
        inner = name[name.index("(") + 1 : name.index(")")]
        m, n = (int(t) for t in inner.split(","))
        return np.diag(np.concatenate([[1.0], np.ones(m), -np.ones(n)]))
    raise KeyError(f"no parametrization registered for algebra {name!r}")


def params_from_matrix(name, L):
    """Free closed-form coefficients of a normalized family member."""
    name = ROW_ALIASES.get(name, name)
    L = np.asarray(L, dtype=float)
    if name == "R":
        return np.array([])
    if name in ("C", "splitC", "dual"):
        return np.array([L[0, 1]])
    if name in ("RplusR", "tri3"):
        return np.array([L[0, 0] - 1.0])
    if name in ("H", "M2", "M3") or name.startswith("ipsg"):
        return np.array([])
    if name.startswith("oplusR"):
        return np.diagonal(L).copy()
    if name.startswith("uT"):
        return L[0, 1:].copy()
    if name == "tri4":
        return np.array([L[0, 1], L[0, 2], L[0, 3]])
    if name == "tri5":
        return np.array([L[0, 0] - 1.0, L[0, 3]])
    raise KeyError(f"no parameter extraction registered for algebra {name!r}")
