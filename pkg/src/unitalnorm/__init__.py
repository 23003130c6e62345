"""Norm-like invariants of real finite-dimensional unital algebras.

Subsystems: structure-constant algebra arithmetic (``algebra``), proto-norm
family discovery (``protonorm``), path-integrated norms and their closed
forms (``norms``), triangular Toeplitz shortcuts (``toeplitz``), the family
morphism/exclusion machinery (``functor``), geometric-mean regularization of
inverse problems (``regularize``), and the spacetime anti-wedge identities
(``spacetime``).  The ``unorm`` command line front end binds them together.
"""

from .algebra import AlgebraDef, algebra_from_json_dict, catalog, load_algebra, lookup
from .norms import UnitalNormEvaluator, closed_form, params_from_matrix
from .protonorm import (
    ProtoNormFamily,
    curl_residual,
    normalize_family,
    solve_family,
    transpose_induced,
)

__all__ = [
    "AlgebraDef",
    "ProtoNormFamily",
    "UnitalNormEvaluator",
    "algebra_from_json_dict",
    "catalog",
    "closed_form",
    "curl_residual",
    "load_algebra",
    "lookup",
    "normalize_family",
    "params_from_matrix",
    "solve_family",
    "transpose_induced",
]
