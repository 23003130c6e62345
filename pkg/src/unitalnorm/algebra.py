"""Real finite-dimensional unital algebras given by structure constants.

An algebra lives on R^dim with a bilinear product encoded by a rank-3 tensor
``c``: the product of basis vectors is ``e_i e_j = sum_k c[i, j, k] e_k``.
Elements are plain 1-D float arrays of coordinates in that basis.  Three
inverse rules are supported:

* ``associative_solve``: solve ``left_mult_matrix(s) x = 1`` by dense LU,
* ``ipsg(m, n)``: the favored inverse ``(sigma - s) / (sigma^2 - s'Qs)`` of
  the commutative algebra generated by an inner product space of signature
  ``(m, n)``,
* ``star_algebra``: ``s* / N(s)`` with the conjugation that fixes the unity
  axis and negates its orthogonal complement.

The quantity ``one_norm_sq`` (written ``|1|^2`` in reports) is the number of
independently assignable main-diagonal entries of a faithful matrix
representation, computed as the rank of the map from coordinates to the
diagonal of the represented matrix.
"""

from dataclasses import dataclass
import json

import numpy as np

from .errors import (
    DimensionMismatch,
    MissingRepresentation,
    NotAUnit,
)

UNIT_SV_RTOL = 1e-10          # smallest/largest singular value ratio for unit test
INVERSE_COND_MAX = 1e12       # condition number ceiling when actually inverting
MAX_DIM = 64                  # dense structure constants are the supported envelope


def _freeze(a):
    a = np.ascontiguousarray(np.asarray(a, dtype=float))
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class AlgebraDef:
    """Immutable algebra definition.

    ``structure_constants`` has shape (dim, dim, dim) with the convention
    above.  ``matrix_rep`` is an optional tuple of dim square matrices B_i
    such that coordinates map to ``sum_i s_i B_i`` faithfully.
    ``signature`` is (m, n) for the ipsg rule and None otherwise.
    """

    name: str
    dim: int
    structure_constants: np.ndarray
    unity: np.ndarray
    matrix_rep: tuple = None
    inverse_rule: str = "associative_solve"
    signature: tuple = None
    one_norm_sq_override: float = None
    description: str = ""

    def __post_init__(self):
        if not (0 < self.dim <= MAX_DIM):
            raise DimensionMismatch(f"dim {self.dim} outside supported range 1..{MAX_DIM}")
        object.__setattr__(self, "structure_constants", _freeze(self.structure_constants))
        object.__setattr__(self, "unity", _freeze(self.unity))
        if self.structure_constants.shape != (self.dim,) * 3:
            raise DimensionMismatch("structure constants tensor must be dim x dim x dim")
        if self.unity.shape != (self.dim,):
            raise DimensionMismatch("unity vector has wrong length")
        if self.matrix_rep is not None:
            object.__setattr__(self, "matrix_rep", tuple(_freeze(b) for b in self.matrix_rep))
        self._check_unity()
        if self.matrix_rep is not None:
            self._check_representation()
        if self.one_norm_sq_override is not None and self.one_norm_sq_override <= 0:
            raise ValueError("one_norm_sq must be positive")

    # -- construction-time invariants ------------------------------------

    def _check_unity(self):
        for i in range(self.dim):
            e = np.zeros(self.dim)
            e[i] = 1.0
            left = self.multiply(self.unity, e)
            right = self.multiply(e, self.unity)
            if np.max(np.abs(left - e)) >= 1e-12 or np.max(np.abs(right - e)) >= 1e-12:
                raise ValueError(f"{self.name}: unity is not a two-sided identity")

    def _check_representation(self):
        if len(self.matrix_rep) != self.dim:
            raise DimensionMismatch("matrix_rep must supply one matrix per basis vector")
        rng = np.random.Generator(np.random.Philox(key=0xA1))
        for _ in range(8):
            a = rng.standard_normal(self.dim)
            b = rng.standard_normal(self.dim)
            lhs = self.represent(a) @ self.represent(b)
            rhs = self.represent(self.multiply(a, b))
            scale = max(1.0, np.max(np.abs(lhs)))
            if np.max(np.abs(lhs - rhs)) >= 1e-12 * scale:
                raise ValueError(f"{self.name}: matrix_rep is not multiplicative")

    # -- element helpers ---------------------------------------------------

    def coerce(self, s):
        s = np.asarray(s, dtype=float)
        if s.shape != (self.dim,):
            raise DimensionMismatch(
                f"{self.name}: expected coordinate vector of length {self.dim}, got shape {s.shape}"
            )
        return s

    def basis_vector(self, i):
        e = np.zeros(self.dim)
        e[i] = 1.0
        return e

    def represent(self, s):
        if self.matrix_rep is None:
            raise MissingRepresentation(f"{self.name} has no matrix representation")
        s = self.coerce(s)
        return sum(si * Bi for si, Bi in zip(s, self.matrix_rep))

    # -- products ----------------------------------------------------------

    def multiply(self, a, b):
        a = self.coerce(a)
        b = self.coerce(b)
        return np.einsum("i,j,ijk->k", a, b, self.structure_constants)

    def left_mult_matrix(self, s):
        """Matrix M with M b = multiply(s, b)."""
        s = self.coerce(s)
        return np.einsum("i,ijk->kj", s, self.structure_constants)

    def right_mult_matrix(self, s):
        """Matrix N with N a = multiply(a, s)."""
        s = self.coerce(s)
        return np.einsum("j,ijk->ki", s, self.structure_constants)

    # -- inverses ----------------------------------------------------------

    def _q_diagonal(self):
        m, n = self.signature
        return np.concatenate([np.ones(m), -np.ones(n)])

    def conjugate(self, s):
        """Reflection through the unity axis (star rule involution)."""
        s = self.coerce(s)
        sigma = float(s @ self.unity) / float(self.unity @ self.unity)
        return 2.0 * sigma * self.unity - s

    def is_unit(self, s):
        s = self.coerce(s)
        if self.inverse_rule == "ipsg":
            sigma, vec = s[0], s[1:]
            denom = sigma**2 - vec @ (self._q_diagonal() * vec)
            return abs(denom) > UNIT_SV_RTOL * max(1.0, float(s @ s))
        if self.inverse_rule == "star_algebra":
            return abs(self._star_norm(s)) > UNIT_SV_RTOL * max(1.0, float(s @ s))
        sv = np.linalg.svd(self.left_mult_matrix(s), compute_uv=False)
        return sv[-1] > UNIT_SV_RTOL * sv[0]

    def _star_norm(self, s):
        ns = self.multiply(s, self.conjugate(s))
        one2 = float(self.unity @ self.unity)
        n = float(ns @ self.unity) / one2
        if np.max(np.abs(ns - n * self.unity)) > 1e-10 * max(1.0, abs(n)):
            raise NotAUnit(
                f"{self.name}: s s* is not a multiple of unity; star rule inapplicable",
                diagnostic=float(np.max(np.abs(ns - n * self.unity))),
            )
        return n

    def inverse(self, s):
        s = self.coerce(s)
        if self.inverse_rule == "ipsg":
            sigma, vec = s[0], s[1:]
            denom = sigma**2 - vec @ (self._q_diagonal() * vec)
            if abs(denom) <= UNIT_SV_RTOL * max(1.0, float(s @ s)):
                raise NotAUnit(f"{self.name}: sigma^2 - s'Qs vanishes", diagnostic=float(denom))
            return np.concatenate([[sigma], -vec]) / denom
        if self.inverse_rule == "star_algebra":
            n = self._star_norm(s)
            if abs(n) <= UNIT_SV_RTOL * max(1.0, float(s @ s)):
                raise NotAUnit(f"{self.name}: algebraic norm N(s) vanishes", diagnostic=float(n))
            return self.conjugate(s) / n
        m = self.left_mult_matrix(s)
        sv = np.linalg.svd(m, compute_uv=False)
        cond = np.inf if sv[-1] == 0.0 else sv[0] / sv[-1]
        if cond > INVERSE_COND_MAX:
            raise NotAUnit(
                f"{self.name}: left multiplication condition number {cond:.3e} exceeds 1e12",
                diagnostic=float(cond),
            )
        return np.linalg.solve(m, self.unity)

    # -- the |1|^2 quantity -------------------------------------------------

    def one_norm_sq(self):
        if self.inverse_rule == "ipsg":
            return 1.0
        if self.one_norm_sq_override is not None:
            return float(self.one_norm_sq_override)
        if self.matrix_rep is None:
            raise MissingRepresentation(
                f"{self.name}: |1|^2 needs a matrix representation or an explicit override"
            )
        # rank of coordinates -> main diagonal of the represented matrix
        diag_map = np.stack([np.diagonal(b) for b in self.matrix_rep], axis=1)
        sv = np.linalg.svd(diag_map, compute_uv=False)
        rank = int(np.sum(sv > 1e-10 * max(1.0, sv[0])))
        return float(rank)

    # -- serialization -------------------------------------------------------

    def to_json_dict(self):
        rule = self.inverse_rule
        if rule == "ipsg":
            rule = f"ipsg({self.signature[0]},{self.signature[1]})"
        out = {
            "dim": self.dim,
            "structure_constants": [float(v) for v in self.structure_constants.ravel()],
            "unity": [float(v) for v in self.unity],
            "inverse_rule": rule,
        }
        if self.matrix_rep is not None:
            out["matrix_rep"] = [[[float(v) for v in row] for row in b] for b in self.matrix_rep]
        if self.one_norm_sq_override is not None:
            out["one_norm_sq"] = float(self.one_norm_sq_override)
        return out


def algebra_from_json_dict(data, name="user"):
    """Build an AlgebraDef from the documented JSON object."""
    dim = int(data["dim"])
    sc = np.asarray(data["structure_constants"], dtype=float).reshape(dim, dim, dim)
    unity = np.asarray(data["unity"], dtype=float)
    rule = data.get("inverse_rule", "associative_solve")
    signature = None
    if rule.startswith("ipsg"):
        inner = rule[rule.index("(") + 1 : rule.index(")")]
        m, n = (int(t) for t in inner.split(","))
        signature = (m, n)
        rule = "ipsg"
    rep = data.get("matrix_rep")
    if rep is not None:
        rep = tuple(np.asarray(b, dtype=float) for b in rep)
    return AlgebraDef(
        name=name,
        dim=dim,
        structure_constants=sc,
        unity=unity,
        matrix_rep=rep,
        inverse_rule=rule,
        signature=signature,
        one_norm_sq_override=data.get("one_norm_sq"),
    )


def load_algebra(path):
    with open(path, "r", encoding="utf-8") as fh:
        return algebra_from_json_dict(json.load(fh), name=str(path))


# ---------------------------------------------------------------------------
# Built-in catalog
# ---------------------------------------------------------------------------


def _structure_constants_from_rep(rep):
    """Recover c[i,j,k] from a faithful representation by least squares."""
    dim = len(rep)
    flat = np.stack([b.ravel() for b in rep], axis=1)  # (n*n, dim)
    pinv = np.linalg.pinv(flat)
    c = np.zeros((dim, dim, dim))
    for i in range(dim):
        for j in range(dim):
            prod = rep[i] @ rep[j]
            c[i, j] = pinv @ prod.ravel()
    snapped = np.round(c)
    return np.where(np.abs(c - snapped) < 1e-10, snapped, c)


def _from_rep(name, rep, unity_coords, description=""):
    rep = tuple(np.asarray(b, dtype=float) for b in rep)
    c = _structure_constants_from_rep(rep)
    return AlgebraDef(
        name=name,
        dim=len(rep),
        structure_constants=c,
        unity=np.asarray(unity_coords, dtype=float),
        matrix_rep=rep,
        description=description,
    )


def _e(n, i, j):
    m = np.zeros((n, n))
    m[i, j] = 1.0
    return m


def _matrix_units(n):
    """Canonical basis of R^{n x n} in appended-columns order."""
    return [_e(n, i, j) for j in range(n) for i in range(n)]


def _complex_algebra():
    return _from_rep(
        "C",
        [np.eye(2), np.array([[0.0, -1.0], [1.0, 0.0]])],
        [1.0, 0.0],
        "complex numbers, coords (x, y)",
    )


def _split_complex():
    return _from_rep(
        "splitC",
        [np.eye(2), np.array([[0.0, 1.0], [1.0, 0.0]])],
        [1.0, 0.0],
        "split-complex numbers, coords (x, y) with j^2 = 1",
    )


def _sum_of_reals(n):
    rep = [_e(n, i, i) for i in range(n)]
    return _from_rep(
        f"oplusR{n}" if n != 2 else "RplusR",
        rep,
        np.ones(n),
        f"direct sum of {n} copies of R (component-wise product)",
    )


def _dual_numbers():
    return _from_rep(
        "dual",
        [np.eye(2), _e(2, 0, 1)],
        [1.0, 0.0],
        "dual numbers, coords (x, y) with eps^2 = 0",
    )


def _quaternions():
    # left regular representation in the basis (1, i, j, k)
    tbl = {
        (0, 0): (0, 1), (0, 1): (1, 1), (0, 2): (2, 1), (0, 3): (3, 1),
        (1, 0): (1, 1), (1, 1): (0, -1), (1, 2): (3, 1), (1, 3): (2, -1),
        (2, 0): (2, 1), (2, 1): (3, -1), (2, 2): (0, -1), (2, 3): (1, 1),
        (3, 0): (3, 1), (3, 1): (2, 1), (3, 2): (1, -1), (3, 3): (0, -1),
    }
    rep = []
    for i in range(4):
        b = np.zeros((4, 4))
        for j in range(4):
            k, sign = tbl[(i, j)]
            b[k, j] = sign
        rep.append(b)
    return _from_rep("H", rep, [1.0, 0.0, 0.0, 0.0], "quaternions, coords (x, y, z, w)")


def _full_matrix_algebra(n):
    rep = _matrix_units(n)
    return _from_rep(
        f"M{n}",
        rep,
        np.eye(n).ravel(order="F"),
        f"{n}x{n} real matrices, appended-columns coordinates",
    )


def _toeplitz_algebra(n):
    z = _e(n, 0, 1) * 0.0
    for i in range(n - 1):
        z += _e(n, i, i + 1)
    rep = [np.linalg.matrix_power(z, k) if k else np.eye(n) for k in range(n)]
    return _from_rep(
        f"uT{n}",
        rep,
        np.eye(1, n).ravel(),
        f"upper triangular Toeplitz {n}x{n} matrices, coords are the diagonals",
    )


def _triangular3():
    # (x, y, z) <-> [[x, z], [0, y]]
    rep = [_e(2, 0, 0), _e(2, 1, 1), _e(2, 0, 1)]
    return _from_rep("tri3", rep, [1.0, 1.0, 0.0], "full upper triangular 2x2, coords (x, y, z)")


def _triangular4():
    # (x, v, z, w) <-> [[x, z, w], [0, x, v], [0, 0, x]]
    rep = [np.eye(3), _e(3, 1, 2), _e(3, 0, 1), _e(3, 0, 2)]
    return _from_rep(
        "tri4", rep, [1.0, 0.0, 0.0, 0.0], "repeated-diagonal 3x3 triangular, coords (x, v, z, w)"
    )


def _triangular5():
    # (x, y, v, z, w) <-> [[x, z, w], [0, x, v], [0, 0, y]]
    rep = [
        np.diag([1.0, 1.0, 0.0]),
        np.diag([0.0, 0.0, 1.0]),
        _e(3, 1, 2),
        _e(3, 0, 1),
        _e(3, 0, 2),
    ]
    return _from_rep(
        "tri5", rep, [1.0, 1.0, 0.0, 0.0, 0.0],
        "two-eigenvalue 3x3 triangular, coords (x, y, v, z, w)",
    )


def _ipsg(m, n):
    dim = 1 + m + n
    q = np.concatenate([np.ones(m), -np.ones(n)])
    c = np.zeros((dim, dim, dim))
    c[0, 0, 0] = 1.0
    for i in range(1, dim):
        c[0, i, i] = 1.0
        c[i, 0, i] = 1.0
        c[i, i, 0] = q[i - 1]
    return AlgebraDef(
        name=f"ipsg({m},{n})",
        dim=dim,
        structure_constants=c,
        unity=np.eye(1, dim).ravel(),
        inverse_rule="ipsg",
        signature=(m, n),
        description=f"inner-product-space groupoid algebra of signature ({m},{n})",
    )


# Table I row aliases for the worked functor examples.
ROW_ALIASES = {
    "oplusR2": "RplusR",
    "A2": "C",
    "A3": "splitC",
    "A4": "RplusR",
    "A5": "dual",
    "A6": "H",
    "A10": "tri3",
    "A11": "uT3",
    "A12": "tri4",
    "A13": "tri5",
}

_CATALOG_CACHE = {}


def catalog():
    """All built-in algebra definitions, keyed by name."""
    if _CATALOG_CACHE:
        return dict(_CATALOG_CACHE)
    entries = [
        _from_rep("R", [np.eye(1)], [1.0], "the real numbers"),
        _complex_algebra(),
        _split_complex(),
        _dual_numbers(),
        _quaternions(),
        _full_matrix_algebra(2),
        _full_matrix_algebra(3),
        _triangular3(),
        _triangular4(),
        _triangular5(),
    ]
    entries.extend(_sum_of_reals(n) for n in range(2, 7))
    entries.extend(_toeplitz_algebra(n) for n in range(2, 7))
    entries.extend(_ipsg(m, t - m) for t in range(1, 5) for m in range(t + 1))
    for a in entries:
        _CATALOG_CACHE[a.name] = a
    return dict(_CATALOG_CACHE)


def lookup(name):
    """Catalog access accepting row aliases (A4, A13, ...) and exact names."""
    cat = catalog()
    key = ROW_ALIASES.get(name, name)
    if key not in cat:
        raise KeyError(f"unknown algebra {name!r}; known: {sorted(cat)}")
    return cat[key]
