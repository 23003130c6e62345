"""Quotients, pullback proto-norms, and the family-morphism test.

An algebra epimorphism K pulls a proto-norm L of the target back to K'LK on
the source, so the zero-padded block form of the target family must embed in
the source family.  The morphism test here quantifies over supplied basis
alignments only, with K coming from an ideal-driven quotient (or the
identity).  A failed alignment is merely "not established"; exclusion is
certified separately by an eigenvalue-multiset obstruction: similarity
preserves spectra, so if some member of the target family (zero-padded) has
no spectrum-matching member anywhere in the source family's span, no
alignment can exist.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from .algebra import AlgebraDef
from .errors import DimensionMismatch, IdealContainsUnity, NotAnIdeal
from .protonorm import solve_family
from .rng import STREAM_FUNCTOR, make_rng

IDEAL_TOL = 1e-10
MORPHISM_TOL = 1e-8
OBSTRUCTION_GAP = 0.05  # relative spectral gap required to certify exclusion


@dataclass
class IdealSpec:
    """A candidate two-sided ideal given by spanning coordinate vectors."""

    algebra: AlgebraDef
    basis: list

    def __post_init__(self):
        self.basis = [self.algebra.coerce(v) for v in self.basis]

    def orthonormal_basis(self):
        if not self.basis:
            return np.zeros((self.algebra.dim, 0))
        w = np.stack(self.basis, axis=1)
        q, r = np.linalg.qr(w)
        keep = np.abs(np.diagonal(r)) > 1e-12 * max(1.0, np.max(np.abs(r)))
        return q[:, keep]

    def validate(self):
        """Raise NotAnIdeal unless a v and v a stay in the span for all basis a."""
        a = self.algebra
        q = self.orthonormal_basis()
        proj = q @ q.T
        worst = 0.0
        for i in range(a.dim):
            e = a.basis_vector(i)
            for v in self.basis:
                for prod in (a.multiply(e, v), a.multiply(v, e)):
                    scale = max(1.0, float(np.linalg.norm(prod)))
                    worst = max(worst, float(np.linalg.norm(prod - proj @ prod)) / scale)
        if worst > IDEAL_TOL:
            raise NotAnIdeal(f"{a.name}: closure residual {worst:.3e} exceeds {IDEAL_TOL}")
        return worst


@dataclass
class MorphismVerdict:
    exists: bool
    witness: tuple = None            # (K, worst residual) when exists
    diagnostics: list = field(default_factory=list)  # per-member residuals


def quotient_algebra(algebra, ideal):
    """Quotient by a two-sided ideal, with the coordinate projection K.

    The ideal basis is completed to a basis of the algebra by standard basis
    vectors; in the completed basis the projection is the identity block, so
    in the original coordinates K = [I 0] P^{-1} with P the change of basis.
    """
    ideal.validate()
    q = ideal.orthonormal_basis()
    r = q.shape[1]
    dim = algebra.dim
    one = algebra.unity
    if np.linalg.norm(one - q @ (q.T @ one)) <= 1e-10 * np.linalg.norm(one):
        raise IdealContainsUnity(f"{algebra.name}: unity lies in the span of the ideal")
    if r == 0:
        return algebra, np.eye(dim)

    # greedy completion by standard basis vectors with largest residual
    chosen = []
    span = q
    for _ in range(dim - r):
        residuals = []
        for i in range(dim):
            e = algebra.basis_vector(i)
            residuals.append(float(np.linalg.norm(e - span @ (span.T @ e))))
        best = int(np.argmax(residuals))
        chosen.append(best)
        e = algebra.basis_vector(best)
        v = e - span @ (span.T @ e)
        span = np.concatenate([span, (v / np.linalg.norm(v))[:, None]], axis=1)
    chosen.sort()

    n = dim - r
    p = np.zeros((dim, dim))
    for col, i in enumerate(chosen):
        p[i, col] = 1.0
    p[:, n:] = np.stack(ideal.basis, axis=1) if len(ideal.basis) == r else q
    if np.linalg.matrix_rank(p) < dim:
        p[:, n:] = q  # supplied spanning set was redundant; use the orthonormal one
    p_inv = np.linalg.inv(p)
    k = p_inv[:n, :]

    c_q = np.zeros((n, n, n))
    for i in range(n):
        for j in range(n):
            prod = algebra.multiply(algebra.basis_vector(chosen[i]), algebra.basis_vector(chosen[j]))
            c_q[i, j] = (p_inv @ prod)[:n]
    # the left regular representation is faithful on a unital associative
    # algebra and supplies the diagonal count behind |1|^2
    left_reg = tuple(c_q[i].T.copy() for i in range(n))
    quotient = AlgebraDef(
        name=f"{algebra.name}/ideal",
        dim=n,
        structure_constants=c_q,
        unity=k @ one,
        matrix_rep=left_reg,
        inverse_rule="associative_solve",
        description=f"quotient of {algebra.name} by a {r}-dimensional ideal",
    )
    return quotient, k


def pullback_protonorm(k, L):
    """K' L K, the source-algebra proto-norm induced by a projection map."""
    k = np.asarray(k, dtype=float)
    L = np.asarray(L, dtype=float)
    if L.shape != (k.shape[0], k.shape[0]):
        raise DimensionMismatch(f"L of shape {L.shape} does not conform to K of shape {k.shape}")
    return k.T @ L @ k


def morphism_exists(source_family, target_family, k):
    """Check that every target family member pulls back into the source span."""
    residuals = []
    for b in target_family.basis:
        pb = pullback_protonorm(k, b)
        residuals.append(source_family.projection_residual(pb))
    ok = bool(all(r < MORPHISM_TOL for r in residuals))
    witness = (np.asarray(k, dtype=float), max(residuals) if residuals else 0.0) if ok else None
    return MorphismVerdict(exists=ok, witness=witness, diagnostics=residuals)


# -- eigenvalue-multiset exclusion certificate -------------------------------


def _padded_spectrum(L, size):
    lam = np.linalg.eigvalsh(L)
    return np.sort(np.concatenate([lam, np.zeros(size - lam.size)]))


def _span_spectrum_gap(family, target_spectrum, seed, n_starts=64):
    """Smallest spectral mismatch between the span and a target spectrum.

    The family is a linear space, so matching spectra can be sought on the
    coefficient unit sphere with the scale fixed by Frobenius norms.  Local
    searches from many seeded starts estimate the global minimum.
    """
    lam = np.sort(target_spectrum)
    lam_norm = float(np.linalg.norm(lam))
    if lam_norm == 0.0:
        return 0.0
    q = family.dimension
    basis = np.stack(family.basis)

    def mismatch(t):
        nrm = np.linalg.norm(t)
        if nrm == 0.0:
            return lam_norm
        m = np.tensordot(t / nrm, basis, axes=1)
        ev = np.linalg.eigvalsh(m)
        scale = np.linalg.norm(ev)
        if scale == 0.0:
            return lam_norm
        return float(np.linalg.norm(np.sort(ev * (lam_norm / scale)) - lam))

    rng = make_rng(seed, STREAM_FUNCTOR)
    best = np.inf
    for _ in range(n_starts):
        t0 = rng.standard_normal(q)
        res = optimize.minimize(mismatch, t0, method="Nelder-Mead",
                                options={"xatol": 1e-10, "fatol": 1e-12, "maxiter": 400})
        best = min(best, float(res.fun))
        if best <= 1e-8 * lam_norm:
            break
    return best


def epimorphism_excluded(source_algebra, target_algebra, candidates=None, seed=0,
                         source_family=None, target_family=None, n_targets=5):
    """Sound exclusion certificate for an algebra epimorphism.

    Returns True only when a sampled member of the target family, zero-padded
    to source size, has no spectrum-matching member anywhere in the source
    family span (similarity invariance of eigenvalues then forbids the
    category morphism, hence the epimorphism).  False means "not excluded by
    this test", never "an epimorphism exists".  Any supplied candidate
    alignment that already produces a morphism short-circuits to False.
    """
    f1 = source_family if source_family is not None else solve_family(source_algebra, seed=seed)
    f2 = target_family if target_family is not None else solve_family(target_algebra, seed=seed)
    for k in candidates or []:
        if morphism_exists(f1, f2, k).exists:
            return False
    if f1.dimension == 0:
        return any(np.linalg.norm(b) > 0 for b in f2.basis)
    rng = make_rng(seed, STREAM_FUNCTOR)
    for trial in range(n_targets):
        coeffs = rng.standard_normal(f2.dimension)
        member = f2.member(coeffs)
        lam = _padded_spectrum(member, source_algebra.dim)
        gap = _span_spectrum_gap(f1, lam, seed=seed + 1000 + trial)
        if gap > OBSTRUCTION_GAP * float(np.linalg.norm(lam)):
            return True
    return False
