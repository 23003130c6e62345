"""Numerical discovery of proto-norm families.

A proto-norm of an algebra is a symmetric matrix L making the vector field
``L s^{-1}`` curl-free in a neighborhood of the identity.  The family of all
such L is a linear space; it is found here by stacking the curl conditions at
seeded sample units near 1 and extracting the nullspace of the resulting
constraint matrix.  The normalized slice adds the single affine condition
``1' L 1^{-1} = |1|^2``.

For associative inverse rules the derivative of the inverse is exact,
``d(s^{-1})/ds_j = -s^{-1} e_j s^{-1}``; otherwise central differences on the
inverse map are used.  The choice is per algebra, never per sample.
"""

from dataclasses import dataclass

import numpy as np

from .errors import (
    FamilyVerificationError,
    MissingRepresentation,
    NoNormalizedSlice,
    NotSymmetric,
    SamplingFailure,
)
from .rng import STREAM_FAMILY_SOLVE, STREAM_FAMILY_VERIFY, make_rng, sample_ball

SAMPLING_RADIUS = 0.1
RANK_RTOL = 1e-8
FD_STEP_SCALE = 1e-5
MAX_RESAMPLE = 100


def symmetric_basis(dim):
    """Frobenius-orthonormal basis of symmetric dim x dim matrices."""
    basis = []
    for i in range(dim):
        for j in range(i, dim):
            m = np.zeros((dim, dim))
            if i == j:
                m[i, i] = 1.0
            else:
                m[i, j] = m[j, i] = 1.0 / np.sqrt(2.0)
            basis.append(m)
    return basis


def inverse_jacobian(algebra, s):
    """Jacobian J[:, j] = d(s^{-1})/ds_j at a unit s."""
    s = algebra.coerce(s)
    if algebra.inverse_rule == "associative_solve":
        sinv = algebra.inverse(s)
        return -algebra.right_mult_matrix(sinv) @ algebra.left_mult_matrix(sinv)
    h = FD_STEP_SCALE * max(1.0, float(np.linalg.norm(s)))
    cols = []
    for j in range(algebra.dim):
        e = algebra.basis_vector(j)
        cols.append((algebra.inverse(s + h * e) - algebra.inverse(s - h * e)) / (2.0 * h))
    return np.stack(cols, axis=1)


def curl_residual(algebra, L, s):
    """Antisymmetric matrix of curl entries of the field L s^{-1} at s.

    Entry (i, j) is d_i (L s^{-1})_j - d_j (L s^{-1})_i.
    """
    L = np.asarray(L, dtype=float)
    jac = inverse_jacobian(algebra, s)
    g = L @ jac
    return g.T - g


def sample_unit(algebra, rng, radius=SAMPLING_RADIUS):
    """One seeded unit of the form 1 + radius * (ball draw)."""
    for _ in range(MAX_RESAMPLE):
        s = algebra.unity + radius * sample_ball(rng, algebra.dim)
        if algebra.is_unit(s):
            return s
    raise SamplingFailure(f"{algebra.name}: no unit found in {MAX_RESAMPLE} consecutive draws")


@dataclass
class ProtoNormFamily:
    """Solved family: orthonormal basis plus optional normalized slice."""

    algebra: object
    basis: list
    normalized_point: np.ndarray = None
    normalized_directions: list = None

    @property
    def dimension(self):
        return len(self.basis)

    def span_coefficients(self, M):
        """Frobenius coefficients of M against the orthonormal basis."""
        return np.array([float(np.sum(b * M)) for b in self.basis])

    def projection_residual(self, M):
        """Relative Frobenius distance from M to the family span."""
        M = np.asarray(M, dtype=float)
        coeffs = self.span_coefficients(M)
        proj = sum(c * b for c, b in zip(coeffs, self.basis)) if self.basis else np.zeros_like(M)
        scale = max(float(np.linalg.norm(M)), 1e-300)
        return float(np.linalg.norm(M - proj)) / scale

    def member(self, coefficients):
        return sum(c * b for c, b in zip(coefficients, self.basis))

    def slice_member(self, t):
        """Point on the normalized slice at offsets t along the directions."""
        if self.normalized_point is None:
            raise NoNormalizedSlice(f"{self.algebra.name}: family was not normalized")
        m = self.normalized_point.copy()
        for ti, d in zip(np.atleast_1d(t), self.normalized_directions):
            m = m + ti * d
        return m

    def to_json_dict(self):
        out = {
            "algebra": self.algebra.name,
            "basis": [b.tolist() for b in self.basis],
        }
        if self.normalized_point is not None:
            out["normalized_point"] = self.normalized_point.tolist()
            out["normalized_directions"] = [d.tolist() for d in self.normalized_directions]
        return out


def solve_family(algebra, n_samples=None, seed=0):
    """Nullspace of the sampled curl constraints over symmetric matrices."""
    dim = algebra.dim
    if n_samples is None:
        n_samples = 3 * dim * dim
    if n_samples < 3 * dim * dim:
        raise ValueError(f"need at least {3 * dim * dim} samples for dim {dim}")
    basis = symmetric_basis(dim)
    q = len(basis)
    rng = make_rng(seed, STREAM_FAMILY_SOLVE)

    pairs = [(i, j) for i in range(dim) for j in range(i + 1, dim)]
    if not pairs:  # one-dimensional algebra: every symmetric L works
        return ProtoNormFamily(algebra, [np.ones((1, 1))])

    rows = np.empty((n_samples * len(pairs), q))
    stacked = np.stack(basis)  # (q, dim, dim)
    for k in range(n_samples):
        s = sample_unit(algebra, rng)
        jac = inverse_jacobian(algebra, s)
        g = stacked @ jac  # (q, dim, dim), g[m] = E_m @ J
        curl = np.swapaxes(g, 1, 2) - g
        block = np.stack([curl[:, i, j] for i, j in pairs], axis=0)  # (pairs, q)
        rows[k * len(pairs) : (k + 1) * len(pairs)] = block

    _, sv, vt = np.linalg.svd(rows, full_matrices=True)
    if sv.size == 0 or sv[0] == 0.0:
        rank = 0
    else:
        rank = int(np.sum(sv > RANK_RTOL * sv[0]))
    null = vt[rank:]
    members = []
    for vec in null:
        members.append(sum(c * e for c, e in zip(vec, basis)))
    return ProtoNormFamily(algebra, members)


def normalize_family(family, seed=0, n_check=50):
    """Impose 1' L 1^{-1} = |1|^2 and verify constancy of s' L s^{-1}."""
    algebra = family.algebra
    if family.dimension == 0:
        raise NoNormalizedSlice(f"{algebra.name}: empty family")
    one = algebra.unity
    one_inv = algebra.inverse(one)
    target = algebra.one_norm_sq()
    c = np.array([float(one @ (b @ one_inv)) for b in family.basis])
    cn = np.linalg.norm(c)
    if cn < 1e-12:
        raise NoNormalizedSlice(f"{algebra.name}: all family members give 1'L1 = 0")
    point = family.member(target * c / cn**2)
    # directions span the c-orthogonal complement of the coefficient space
    _, sv, vt = np.linalg.svd(c[None, :], full_matrices=True)
    directions = [family.member(v) for v in vt[1:]]

    rng = make_rng(seed, STREAM_FAMILY_VERIFY)
    worst = 0.0
    for _ in range(n_check):
        s = sample_unit(algebra, rng)
        val = float(s @ (point @ algebra.inverse(s)))
        worst = max(worst, abs(val - target))
    if worst > 1e-8 * max(1.0, target):
        raise FamilyVerificationError(
            f"{algebra.name}: s'Ls^-1 deviates from |1|^2 by {worst:.3e} at fresh units"
        )
    return ProtoNormFamily(algebra, list(family.basis), point, directions)


def verify_family(family, seed=0, n_units=50):
    """Max per-entry curl residual of every basis member at fresh seeded units."""
    algebra = family.algebra
    rng = make_rng(seed, STREAM_FAMILY_VERIFY)
    worst = 0.0
    units = [sample_unit(algebra, rng) for _ in range(n_units)]
    for s in units:
        jac = inverse_jacobian(algebra, s)
        for b in family.basis:
            g = b @ jac
            worst = max(worst, float(np.max(np.abs(g.T - g))))
    return worst


def transpose_induced(algebra):
    """Coordinate matrix of the transpose-induced proto-norm.

    Projects the transpose of the represented element back onto the
    representation span (Frobenius-orthogonally) and pulls the resulting map
    through the coordinate identification.
    """
    if algebra.matrix_rep is None:
        raise MissingRepresentation(f"{algebra.name}: transpose-induced map needs matrix_rep")
    rep = algebra.matrix_rep
    gram = np.array([[float(np.sum(a * b)) for b in rep] for a in rep])
    h = np.array([[float(np.trace(bj @ bi)) for bj in rep] for bi in rep])
    sv = np.linalg.svd(gram, compute_uv=False)
    if sv[-1] <= 1e-12 * sv[0]:
        raise MissingRepresentation(f"{algebra.name}: representation basis is degenerate")
    tbar = np.linalg.solve(gram, h)
    if np.max(np.abs(tbar - tbar.T)) > 1e-10:
        raise NotSymmetric(
            f"{algebra.name}: transpose-induced map asymmetric "
            f"(max deviation {np.max(np.abs(tbar - tbar.T)):.3e}); "
            "coordinates and representation are not Frobenius-compatible"
        )
    return 0.5 * (tbar + tbar.T)
