"""Verification drivers shared by the command line front end and the tests.

Each driver runs one reproducible check suite at its stated tolerance and
returns plain dict rows ready for CSV or JSON emission.
"""

import numpy as np

from . import algebra as algebra_mod
from . import functor as functor_mod
from . import norms, protonorm, regularize, spacetime, toeplitz
from .rng import STREAM_ANTIWEDGE, STREAM_NORM_VERIFY, make_rng, sample_ball

# Catalog rows of the results table emitted by `unorm verify-table1`; the
# ipsg entries stand in for the spin-factor family at several signatures.
TABLE1_ROWS = (
    "R", "C", "splitC", "RplusR", "dual", "H", "M2", "M3",
    "oplusR2", "oplusR3", "oplusR4", "oplusR5", "oplusR6",
    "tri3", "tri4", "tri5",
    "uT2", "uT3", "uT4", "uT5", "uT6",
    "ipsg(2,0)", "ipsg(3,0)", "ipsg(1,1)",
)

EXPECTED_FAMILY_DIM = {
    "R": 1, "C": 2, "splitC": 2, "RplusR": 2, "dual": 2, "H": 1, "M2": 1, "M3": 1,
    "oplusR2": 2, "oplusR3": 3, "oplusR4": 4, "oplusR5": 5, "oplusR6": 6,
    "tri3": 2, "tri4": 4, "tri5": 3,
    "uT2": 2, "uT3": 3, "uT4": 4, "uT5": 5, "uT6": 6,
    "ipsg(2,0)": 1, "ipsg(3,0)": 1, "ipsg(1,1)": 1,
}

HOMOGENEITY_ALPHAS = (0.5, 0.9, 1.1, 2.0)

_FAMILY_CACHE = {}


def normalized_family(name, seed=0):
    """Solve and normalize a catalog family (memoized per name and seed)."""
    key = (name, seed)
    if key not in _FAMILY_CACHE:
        a = algebra_mod.lookup(name)
        _FAMILY_CACHE[key] = protonorm.normalize_family(
            protonorm.solve_family(a, seed=seed), seed=seed
        )
    return _FAMILY_CACHE[key]


def _slice_draw(family, rng, scale=0.5):
    k = len(family.normalized_directions)
    t = scale * rng.uniform(-1.0, 1.0, size=k) if k else np.zeros(0)
    return family.slice_member(t)


def verify_row(name, seed=0, trials=100):
    """Closed-form agreement, inverse-product, and homogeneity for one row."""
    a = algebra_mod.lookup(name)
    family = normalized_family(name, seed=seed)
    rng = make_rng(seed, STREAM_NORM_VERIFY)
    max_rel = 0.0
    max_inv = 0.0
    max_hom = 0.0
    for _ in range(trials):
        L = _slice_draw(family, rng)
        ev = norms.UnitalNormEvaluator(a, L)
        s = a.unity + 0.1 * sample_ball(rng, a.dim)
        numeric = ev.evaluate(s)
        reference = norms.closed_form(name, norms.params_from_matrix(name, L), s)
        max_rel = max(max_rel, abs(numeric - reference) / abs(reference))
        max_inv = max(max_inv, ev.inverse_product_check(s))
        for alpha in HOMOGENEITY_ALPHAS:
            val = ev.evaluate(alpha * s)
            max_hom = max(max_hom, abs(val - alpha * numeric) / val)
    return {
        "algebra": name,
        "family_dim": family.dimension,
        "expected_dim": EXPECTED_FAMILY_DIM[name],
        "trials": trials,
        "max_rel_err": max_rel,
        "max_inv_product": max_inv,
        "max_homogeneity": max_hom,
    }


def verify_table1(rows=None, seed=0, trials=100, tol=1e-6):
    """Per-row verification table; row status checks dimension and closed form."""
    rows = list(rows) if rows else list(TABLE1_ROWS)
    out = []
    for name in rows:
        r = verify_row(name, seed=seed, trials=trials)
        r["status"] = (
            "ok"
            if r["family_dim"] == r["expected_dim"] and r["max_rel_err"] < tol
            else "FAIL"
        )
        out.append(r)
    return out


def toeplitz_suite(n_max=6, trials=100, seed=0, tol=1e-8):
    """Log-series norm against path integration, and inverses against LU."""
    out = []
    for n in range(2, n_max + 1):
        name = f"uT{n}"
        a = algebra_mod.lookup(name)
        family = normalized_family(name, seed=seed)
        rng = make_rng(seed, STREAM_NORM_VERIFY)
        max_rel = 0.0
        max_inv = 0.0
        for _ in range(trials):
            L = _slice_draw(family, rng)
            gammas = np.concatenate([[1.0], norms.params_from_matrix(name, L)])
            ev = norms.UnitalNormEvaluator(a, toeplitz.hankel_protonorm(gammas))
            s = a.unity + 0.1 * sample_ball(rng, a.dim)
            numeric = ev.evaluate(s)
            shortcut = toeplitz.log_series_norm(gammas, s)
            max_rel = max(max_rel, abs(numeric - shortcut) / abs(shortcut))
            max_inv = max(
                max_inv, float(np.max(np.abs(toeplitz.toeplitz_inverse(s) - a.inverse(s))))
            )
        out.append({
            "n": n,
            "trials": trials,
            "max_rel_err": max_rel,
            "max_inverse_diff": max_inv,
            "status": "ok" if max_rel < tol and max_inv < 1e-12 else "FAIL",
        })
    return out


# The worked functor examples: (source, target, ideal coordinate vectors or
# an explicit alignment, expected verdict kind).
FUNCTOR_SUITE = (
    ("RplusR", "R", "ideal", ((0.0, 1.0),), True),
    ("A10", "A4", "ideal", ((0.0, 0.0, 1.0),), True),
    ("A13", "A4", "ideal",
     ((0.0, 0.0, 1.0, 0.0, 0.0), (0.0, 0.0, 0.0, 1.0, 0.0), (0.0, 0.0, 0.0, 0.0, 1.0)), True),
    ("A12", "A5", "ideal", ((0.0, 1.0, 0.0, 0.0), (0.0, 0.0, 0.0, 1.0)), True),
    ("A11", "A5", "ideal", ((0.0, 0.0, 1.0),), True),
    ("splitC", "RplusR", "alignment", ((1.0, 1.0), (1.0, -1.0)), True),
    ("C", "R", "excluded", None, True),
    ("A13", "A12", "excluded", None, True),
    ("H", "C", "excluded", None, True),
)


def functor_suite(seed=0):
    """Run all worked morphism/exclusion examples; returns verdict rows."""
    out = []
    for source, target, kind, payload, expected in FUNCTOR_SUITE:
        a_src = algebra_mod.lookup(source)
        a_tgt = algebra_mod.lookup(target)
        f_src = protonorm.solve_family(a_src, seed=seed)
        if kind == "ideal":
            ideal = functor_mod.IdealSpec(a_src, [np.asarray(v) for v in payload])
            quotient, k = functor_mod.quotient_algebra(a_src, ideal)
            f_q = protonorm.solve_family(quotient, seed=seed)
            verdict = functor_mod.morphism_exists(f_src, f_q, k).exists
        elif kind == "alignment":
            f_tgt = protonorm.solve_family(a_tgt, seed=seed)
            verdict = functor_mod.morphism_exists(
                f_src, f_tgt, np.asarray(payload, dtype=float)
            ).exists
        else:
            f_tgt = protonorm.solve_family(a_tgt, seed=seed)
            candidates = []
            if a_src.dim >= a_tgt.dim:
                canonical = np.zeros((a_tgt.dim, a_src.dim))
                canonical[:, : a_tgt.dim] = np.eye(a_tgt.dim)
                candidates.append(canonical)
            verdict = functor_mod.epimorphism_excluded(
                a_src, a_tgt, candidates=candidates, seed=seed,
                source_family=f_src, target_family=f_tgt,
            )
        out.append({
            "source": source,
            "target": target,
            "check": kind,
            "verdict": bool(verdict),
            "expected": bool(expected),
            "status": "ok" if bool(verdict) == bool(expected) else "FAIL",
        })
    return out


def antiwedge_suite(trials=1000, seed=0, vmax=0.99, tol=1e-12):
    """Theorem residuals over seeded triples, plus the wedge-square identity."""
    rng = make_rng(seed, STREAM_ANTIWEDGE)
    worst = 0.0
    worst_sq = 0.0
    for _ in range(trials):
        a = rng.uniform(-1.0, 1.0, 4)
        b = rng.uniform(-1.0, 1.0, 4)
        v = rng.uniform(-vmax, vmax)
        report = spacetime.verify_theorem(a, b, v)
        worst = max(worst, report.max_residual)
        worst_sq = max(worst_sq, abs(spacetime.wedge_square_residual(a, b)))
    return {
        "trials": trials,
        "vmax": vmax,
        "max_theorem_residual": worst,
        "max_wedge_square": worst_sq,
        "status": "ok" if worst < tol and worst_sq < tol else "FAIL",
    }


def regression_suite(seed=0):
    """Convergence experiment rows at the canonical settings."""
    return regularize.convergence_experiment(seed=seed)
