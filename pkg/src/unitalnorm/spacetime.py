"""Minkowski 4-vectors, wedge bivectors, and the anti-wedge product.

Conventions: basis (g0, g1, g2, g3) with g0^2 = 1, gi^2 = -1, and g1 fixed
as the boost direction.  Components are written (a_tau, a_x, a_y, a_z).  The
wedge of two 4-vectors carries six determinant components on the basis pairs
(01, 02, 03, 12, 13, 23), with the sign convention that the determinant sum
equals minus the wedge.  The anti-wedge of the paravectors a g0, b g0 is the
spatial vector of the three time-row determinants; swapping the time and
boost components of both arguments (the time-boost reflection) negates its
boost-parallel part and, wedged perpendicular parts against each other,
reproduces the product of the two plane area factors.  All of this is boost
invariant and checked to machine precision by ``verify_theorem``.
"""

from dataclasses import dataclass

import numpy as np

from .errors import SpeedOutOfRange

BIVECTOR_KEYS = ("01", "02", "03", "12", "13", "23")


def _vec4(a):
    a = np.asarray(a, dtype=float)
    if a.shape != (4,):
        raise ValueError("expected a 4-vector")
    return a


@dataclass(frozen=True)
class Bivector:
    """Six wedge components keyed by basis index pairs."""

    components: tuple

    def __getitem__(self, key):
        return self.components[BIVECTOR_KEYS.index(key)]

    def as_array(self):
        return np.array(self.components)


def minkowski_inner(a, b):
    a = _vec4(a)
    b = _vec4(b)
    return float(a[0] * b[0] - a[1] * b[1] - a[2] * b[2] - a[3] * b[3])


def _det2(a, b, i, j):
    """det [[b_i, b_j], [a_i, a_j]]."""
    return b[i] * a[j] - b[j] * a[i]


def wedge(a, b):
    """Bivector a ^ b; component on g_i ^ g_j is minus the printed determinant."""
    a = _vec4(a)
    b = _vec4(b)
    comps = tuple(
        -_det2(a, b, i, j) for (i, j) in ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))
    )
    return Bivector(comps)


def anti_wedge(a, b):
    """Spatial vector (a g0) v (b g0) on (g1, g2, g3)."""
    a = _vec4(a)
    b = _vec4(b)
    return np.array([_det2(a, b, 0, 1), _det2(a, b, 0, 2), _det2(a, b, 0, 3)])


def time_boost_reflection(a):
    """Swap the time and boost-direction components."""
    a = _vec4(a).copy()
    a[0], a[1] = a[1], a[0]
    return a


def boost(a, v):
    """Pure boost of speed v along g1."""
    a = _vec4(a)
    if not abs(v) < 1.0:
        raise SpeedOutOfRange(f"|v| = {abs(v)} is not below 1")
    g = 1.0 / np.sqrt(1.0 - v * v)
    return np.array([g * (a[0] - v * a[1]), g * (a[1] - v * a[0]), a[2], a[3]])


def area01(a, b):
    """Signed area factor of the (g0 x g1)-plane projection."""
    return _det2(a, b, 0, 1)


def area23(a, b):
    """Signed area factor of the (g2 x g3)-plane projection."""
    return _det2(a, b, 2, 3)


def wedge_square_residual(a, b):
    """The scalar bracket of (a^b)^(a^b), identically zero.

    Expanding the wedge square collapses to
    D01 D23 - D02 D13 + D03 D12 on the volume element.
    """
    a = _vec4(a)
    b = _vec4(b)
    return float(
        _det2(a, b, 0, 1) * _det2(a, b, 2, 3)
        - _det2(a, b, 0, 2) * _det2(a, b, 1, 3)
        + _det2(a, b, 0, 3) * _det2(a, b, 1, 2)
    )


@dataclass
class TheoremReport:
    """Residuals of the time-boost symmetry identities for one (a, b, v)."""

    parallel_match: float        # [a v b]_par = -[ahat v bhat]_par = A01 g1
    parallel_boost_invariance: float
    perp_wedge_identity: float   # perp wedge product = A01 * A23 on g2 ^ g3
    perp_wedge_boost_invariance: float

    @property
    def max_residual(self):
        return max(
            self.parallel_match,
            self.parallel_boost_invariance,
            self.perp_wedge_identity,
            self.perp_wedge_boost_invariance,
        )


def _perp_wedge_scalar(a, b):
    """g2 ^ g3 coefficient of [a v b]_perp wedged with [ahat v bhat]_perp."""
    va = anti_wedge(a, b)
    vb = anti_wedge(time_boost_reflection(a), time_boost_reflection(b))
    return va[1] * vb[2] - va[2] * vb[1]


def verify_theorem(a, b, v):
    """Check the boost-symmetry identities for one input triple."""
    a = _vec4(a)
    b = _vec4(b)
    ah = time_boost_reflection(a)
    bh = time_boost_reflection(b)
    w = anti_wedge(a, b)
    wh = anti_wedge(ah, bh)
    a01 = area01(a, b)

    parallel_match = max(abs(w[0] - a01), abs(wh[0] + a01))

    ab, bb = boost(a, v), boost(b, v)
    parallel_boost = abs(abs(anti_wedge(ab, bb)[0]) - abs(a01))

    target = a01 * area23(a, b)
    perp_identity = abs(_perp_wedge_scalar(a, b) - target)
    perp_boost = abs(_perp_wedge_scalar(ab, bb) - target)

    return TheoremReport(
        parallel_match=parallel_match,
        parallel_boost_invariance=parallel_boost,
        perp_wedge_identity=perp_identity,
        perp_wedge_boost_invariance=perp_boost,
    )
