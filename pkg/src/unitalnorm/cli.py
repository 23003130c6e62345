"""Batch command line front end (installed as ``unorm``).

Subcommand groups bind the library modules: ``algebra`` (catalog browsing),
``protonorm`` (family solving), ``unorm`` (norm evaluation and the closed
form table check), ``toeplitz``, ``functor``, ``reg`` (regularization runs
and the convergence experiment), and ``antiwedge``.  Output is CSV (comma
delimited, '.' decimal, 17 significant digits, header row) or JSON with the
same fields.  All randomness is derived from one 64-bit seed, so identical
invocations produce byte-identical output.

Exit codes: 0 success, 2 at least one verification check beyond tolerance,
1 usage or I/O error.
"""

import argparse
import csv
import io
import json
import sys

import numpy as np

from . import algebra as algebra_mod
from . import functor as functor_mod
from . import norms, protonorm, regularize, verification
from .errors import UnitalNormError, UsageError
from .rng import STREAM_REG_NOISE, make_rng


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _fmt(value):
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return f"{value:.17g}"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return str(value)


def _emit(rows, fieldnames, fmt, out_path):
    if fmt == "json":
        text = json.dumps(
            [{k: row.get(k) for k in fieldnames} for row in rows],
            indent=2, default=float,
        ) + "\n"
    else:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(fieldnames)
        for row in rows:
            writer.writerow([_fmt(row.get(k, "")) for k in fieldnames])
        text = buf.getvalue()
    if out_path:
        with open(out_path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _emit_json_obj(obj, out_path):
    text = json.dumps(obj, indent=2, default=float) + "\n"
    if out_path:
        with open(out_path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _get_algebra(spec):
    try:
        return algebra_mod.lookup(spec)
    except KeyError:
        pass
    return algebra_mod.load_algebra(spec)


def _floats(text):
    return np.array([float(t) for t in text.split(",") if t != ""])


def _split_rows(text):
    """Split a row list on commas outside parentheses (ipsg(m,n) is one id)."""
    out, depth, cur = [], 0, []
    for ch in text:
        if ch == "," and depth == 0:
            out.append("".join(cur).strip())
            cur = []
            continue
        depth += ch == "("
        depth -= ch == ")"
        cur.append(ch)
    if cur:
        out.append("".join(cur).strip())
    return [t for t in out if t]


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--out", default=None)
    common.add_argument("--tol", type=float, default=None,
                        help="verification tolerance override")

    p = _Parser(prog="unorm", description=__doc__.splitlines()[0])
    groups = p.add_subparsers(dest="group", required=True)

    def leaf(group, name):
        return group.add_parser(name, parents=[common])

    g = groups.add_parser("algebra").add_subparsers(dest="command", required=True)
    leaf(g, "list")
    show = leaf(g, "show")
    show.add_argument("--algebra", required=True)

    g = groups.add_parser("protonorm").add_subparsers(dest="command", required=True)
    solve = leaf(g, "solve")
    solve.add_argument("--algebra", required=True)
    solve.add_argument("--samples", type=int, default=None)
    ti = leaf(g, "transpose-induced")
    ti.add_argument("--algebra", required=True)

    g = groups.add_parser("unorm").add_subparsers(dest="command", required=True)
    ev = leaf(g, "eval")
    ev.add_argument("--algebra", required=True)
    ev.add_argument("--point", required=True, help="comma separated coordinates")
    ev.add_argument("--params", default="", help="closed-form family coefficients")
    ev.add_argument("--policy", choices=("segment", "axis_polyline"), default="segment")
    vt = leaf(g, "verify-table1")
    vt.add_argument("--rows", default="all", help="'all' or comma separated catalog ids")
    vt.add_argument("--trials", type=int, default=100)

    g = groups.add_parser("toeplitz").add_subparsers(dest="command", required=True)
    tv = leaf(g, "verify")
    tv.add_argument("--n-max", type=int, default=6)
    tv.add_argument("--trials", type=int, default=100)

    g = groups.add_parser("functor").add_subparsers(dest="command", required=True)
    fc = leaf(g, "check")
    fc.add_argument("--suite", action="store_true", help="run the worked example table")
    fc.add_argument("--source")
    fc.add_argument("--target")
    fc.add_argument("--ideal", help="JSON file with a list of ideal coordinate vectors")

    g = groups.add_parser("reg").add_subparsers(dest="command", required=True)
    rr = leaf(g, "run")
    rr.add_argument("--problem", default="none", help="JSON problem file or 'none'")
    rr.add_argument("--spectrum", default="i^-2")
    rr.add_argument("--n", type=int, default=200)
    rr.add_argument("--delta", type=float, default=1e-3)
    rr.add_argument("--epsilon", type=float, default=None)
    rr.add_argument("--method", choices=("tikhonov", "tsvd", "geomfp"), default="geomfp")
    rr.add_argument("--k", type=int, default=None, help="retained count for tsvd")
    rc = leaf(g, "converge")
    rc.add_argument("--spectrum", default="i^-2")
    rc.add_argument("--n", type=int, default=200)
    rc.add_argument("--deltas", default="1e-1,1e-2,1e-3,1e-4,1e-5")
    rc.add_argument("--gaussian", action="store_true")

    g = groups.add_parser("antiwedge").add_subparsers(dest="command", required=True)
    av = leaf(g, "verify")
    av.add_argument("--trials", type=int, default=1000)
    av.add_argument("--v", type=float, default=0.99, help="largest boost speed")

    return p


# -- subcommand bodies ---------------------------------------------------------


def _cmd_algebra_list(args):
    rows = []
    for name in sorted(algebra_mod.catalog()):
        a = algebra_mod.lookup(name)
        try:
            one2 = a.one_norm_sq()
        except UnitalNormError:
            one2 = float("nan")
        rows.append({
            "name": name, "dim": a.dim, "inverse_rule": a.inverse_rule,
            "one_norm_sq": one2, "description": a.description,
        })
    _emit(rows, ["name", "dim", "inverse_rule", "one_norm_sq", "description"],
          args.format, args.out)
    return 0


def _cmd_algebra_show(args):
    a = _get_algebra(args.algebra)
    obj = {"name": a.name, "description": a.description}
    obj.update(a.to_json_dict())
    _emit_json_obj(obj, args.out)
    return 0


def _cmd_protonorm_solve(args):
    a = _get_algebra(args.algebra)
    family = protonorm.solve_family(a, n_samples=args.samples, seed=args.seed)
    worst_curl = protonorm.verify_family(family, seed=args.seed)
    try:
        family = protonorm.normalize_family(family, seed=args.seed)
    except UnitalNormError:
        pass
    if args.format == "json":
        obj = family.to_json_dict()
        obj["max_curl_residual"] = worst_curl
        _emit_json_obj(obj, args.out)
    else:
        rows = [{
            "algebra": a.name,
            "family_dim": family.dimension,
            "normalized_dim": len(family.normalized_directions or []) + 1
            if family.normalized_point is not None else 0,
            "max_curl_residual": worst_curl,
        }]
        _emit(rows, ["algebra", "family_dim", "normalized_dim", "max_curl_residual"],
              args.format, args.out)
    tol = args.tol if args.tol is not None else 1e-6
    return 0 if worst_curl < tol else 2


def _cmd_protonorm_transpose(args):
    a = _get_algebra(args.algebra)
    tbar = protonorm.transpose_induced(a)
    family = protonorm.solve_family(a, seed=args.seed)
    resid = family.projection_residual(tbar)
    obj = {
        "algebra": a.name,
        "transpose_induced": tbar.tolist(),
        "family_projection_residual": resid,
    }
    _emit_json_obj(obj, args.out)
    tol = args.tol if args.tol is not None else 1e-8
    return 0 if resid < tol else 2


def _cmd_unorm_eval(args):
    a = _get_algebra(args.algebra)
    point = _floats(args.point)
    params = _floats(args.params)
    L = norms.params_to_matrix(a.name, params)
    ev = norms.UnitalNormEvaluator(a, L, path_policy=args.policy)
    numeric = ev.evaluate(point)
    try:
        reference = norms.closed_form(a.name, params, point)
        rel = abs(numeric - reference) / abs(reference)
    except (UnitalNormError, KeyError):
        reference, rel = float("nan"), float("nan")
    rows = [{
        "algebra": a.name,
        "params": ";".join(_fmt(x) for x in params),
        "point": ";".join(_fmt(x) for x in point),
        "numeric": numeric,
        "closed_form": reference,
        "rel_err": rel,
    }]
    _emit(rows, ["algebra", "params", "point", "numeric", "closed_form", "rel_err"],
          args.format, args.out)
    return 0


def _cmd_unorm_verify(args):
    rows = None if args.rows == "all" else _split_rows(args.rows)
    tol = args.tol if args.tol is not None else 1e-6
    table = verification.verify_table1(rows=rows, seed=args.seed, trials=args.trials, tol=tol)
    _emit(table, ["algebra", "family_dim", "expected_dim", "trials",
                  "max_rel_err", "max_inv_product", "max_homogeneity", "status"],
          args.format, args.out)
    return 0 if all(r["status"] == "ok" for r in table) else 2


def _cmd_toeplitz_verify(args):
    tol = args.tol if args.tol is not None else 1e-8
    table = verification.toeplitz_suite(
        n_max=args.n_max, trials=args.trials, seed=args.seed, tol=tol
    )
    _emit(table, ["n", "trials", "max_rel_err", "max_inverse_diff", "status"],
          args.format, args.out)
    return 0 if all(r["status"] == "ok" for r in table) else 2


def _cmd_functor_check(args):
    if args.suite:
        table = verification.functor_suite(seed=args.seed)
        _emit(table, ["source", "target", "check", "verdict", "expected", "status"],
              args.format, args.out)
        return 0 if all(r["status"] == "ok" for r in table) else 2
    if not args.source or not args.target:
        raise UsageError("functor check needs --suite or --source/--target")
    a_src = _get_algebra(args.source)
    a_tgt = _get_algebra(args.target)
    f_src = protonorm.solve_family(a_src, seed=args.seed)
    if args.ideal:
        with open(args.ideal, "r", encoding="utf-8") as fh:
            vectors = json.load(fh)
        ideal = functor_mod.IdealSpec(a_src, [np.asarray(v, dtype=float) for v in vectors])
        quotient, k = functor_mod.quotient_algebra(a_src, ideal)
        f_tgt = protonorm.solve_family(quotient, seed=args.seed)
        verdict = functor_mod.morphism_exists(f_src, f_tgt, k)
        row = {
            "source": a_src.name, "target": f"{a_tgt.name} (via quotient)",
            "check": "ideal", "verdict": verdict.exists,
            "max_residual": max(verdict.diagnostics) if verdict.diagnostics else 0.0,
        }
    else:
        f_tgt = protonorm.solve_family(a_tgt, seed=args.seed)
        candidates = []
        if a_src.dim >= a_tgt.dim:
            canonical = np.zeros((a_tgt.dim, a_src.dim))
            canonical[:, : a_tgt.dim] = np.eye(a_tgt.dim)
            candidates.append(canonical)
        excluded = functor_mod.epimorphism_excluded(
            a_src, a_tgt, candidates=candidates, seed=args.seed,
            source_family=f_src, target_family=f_tgt)
        row = {
            "source": a_src.name, "target": a_tgt.name,
            "check": "excluded", "verdict": excluded, "max_residual": float("nan"),
        }
    _emit([row], ["source", "target", "check", "verdict", "max_residual"],
          args.format, args.out)
    return 0


def _load_problem(args):
    if args.problem != "none":
        with open(args.problem, "r", encoding="utf-8") as fh:
            spec = json.load(fh)
        delta = float(spec.get("delta", 0.0))
        epsilon = float(spec.get("epsilon", delta))
        seed = int(spec.get("seed", args.seed))
        if "F" in spec:
            f = np.asarray(spec["F"], dtype=float)
        else:
            f = np.diag(regularize.spectrum_from_law(spec["spectrum"], int(spec["n"])))
        if "y" in spec:
            y = np.asarray(spec["y"], dtype=float)
            x_true = np.asarray(spec["x_true"], dtype=float) if "x_true" in spec else None
        else:
            x_true = np.asarray(spec["x_true"], dtype=float)
            rng = make_rng(seed, STREAM_REG_NOISE)
            g = rng.standard_normal(f.shape[0])
            y = f @ x_true + delta * g / np.linalg.norm(g)
        return regularize.SvdProblem.from_matrix(f, y, delta=delta, epsilon=epsilon), x_true
    sig = regularize.spectrum_from_law(args.spectrum, args.n)
    x_true = np.arange(1, args.n + 1, dtype=float) ** -3.0
    delta = args.delta
    epsilon = args.epsilon if args.epsilon is not None else delta
    rng = make_rng(args.seed, STREAM_REG_NOISE)
    g = rng.standard_normal(args.n)
    y = sig * x_true + delta * g / np.linalg.norm(g)
    return regularize.SvdProblem.from_spectrum(sig, y, delta=delta, epsilon=epsilon), x_true


def _cmd_reg_run(args):
    problem, x_true = _load_problem(args)
    if args.method == "tikhonov":
        sol = regularize.tikhonov_discrepancy(problem)
        gamma = sol.gamma_or_epsilon
    elif args.method == "tsvd":
        k = args.k if args.k is not None else problem.rank()
        sol = regularize.tsvd(problem, k)
        gamma = float("nan")
    else:
        sol = regularize.geometric_fixed_point(problem)
        gamma = float("nan")
    if x_true is not None:
        mask = (problem.s > 0).astype(float)
        x_dag = problem.v @ (mask * (problem.v.T @ x_true))
        err = float(np.linalg.norm(x_dag - sol.x))
    else:
        err = float("nan")
    rows = [{
        "method": sol.method,
        "delta": problem.delta,
        "epsilon": problem.epsilon,
        "gamma": gamma,
        "retained_count": len(sol.retained_indices),
        "discrepancy": sol.discrepancy,
        "error": err,
    }]
    _emit(rows, ["method", "delta", "epsilon", "gamma", "retained_count",
                 "discrepancy", "error"], args.format, args.out)
    return 0


def _cmd_reg_converge(args):
    deltas = [float(t) for t in args.deltas.split(",")]
    rows = regularize.convergence_experiment(
        spectrum=args.spectrum, deltas=deltas, seed=args.seed, n=args.n,
        gaussian=args.gaussian,
    )
    _emit(rows, ["method", "delta", "epsilon", "gamma", "retained_count",
                 "discrepancy", "error"], args.format, args.out)
    return 0


def _cmd_antiwedge_verify(args):
    tol = args.tol if args.tol is not None else 1e-12
    row = verification.antiwedge_suite(trials=args.trials, seed=args.seed,
                                       vmax=args.v, tol=tol)
    _emit([row], ["trials", "vmax", "max_theorem_residual", "max_wedge_square", "status"],
          args.format, args.out)
    return 0 if row["status"] == "ok" else 2


_DISPATCH = {
    ("algebra", "list"): _cmd_algebra_list,
    ("algebra", "show"): _cmd_algebra_show,
    ("protonorm", "solve"): _cmd_protonorm_solve,
    ("protonorm", "transpose-induced"): _cmd_protonorm_transpose,
    ("unorm", "eval"): _cmd_unorm_eval,
    ("unorm", "verify-table1"): _cmd_unorm_verify,
    ("toeplitz", "verify"): _cmd_toeplitz_verify,
    ("functor", "check"): _cmd_functor_check,
    ("reg", "run"): _cmd_reg_run,
    ("reg", "converge"): _cmd_reg_converge,
    ("antiwedge", "verify"): _cmd_antiwedge_verify,
}


def run(argv):
    """Execute one command line; returns the process exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        command = getattr(args, "command", None)
        return _DISPATCH[(args.group, command)](args)
    except UsageError as exc:
        sys.stderr.write(parser.format_usage())
        sys.stderr.write(f"unorm: error: {exc}\n")
        return 1
    except (OSError, json.JSONDecodeError, KeyError, ValueError, UnitalNormError) as exc:
        sys.stderr.write(f"unorm: error: {exc}\n")
        return 1


def main():
    sys.exit(run(sys.argv[1:]))
