"""Command-line front end: analyze inclusions, compose, towers, oracle, DOT.

Input is JSON: {"D": [[...]]} for a bare dimension matrix, plus "beta" and
"alpha" vectors for a Bratteli diagram.  Reports are emitted on stdout
(JSON by default, text with --format text) with every float rounded to 15
significant digits so reports are byte-stable; diagnostics go to stderr.
Exit codes: 0 success, 2 input/validation error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import calculus, core, multimatrix, oracle, spectral

SCHEMA = "minindex-report/1"


class ParseError(ValueError):
    def __init__(self, line: int, col: int, msg: str):
        self.line, self.col = line, col
        super().__init__(f"parse error at line {line} column {col}: {msg}")


def _round15(obj):
    """Round floats to 15 significant digits, recursively; numpy to builtins."""
    if isinstance(obj, dict):
        return {k: _round15(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round15(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _round15(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(f"{float(obj):.15g}")
    return obj


def _render_text(obj, indent=0, key=None):
    pad = "  " * indent
    head = f"{pad}{key}: " if key is not None else pad
    if isinstance(obj, dict):
        lines = [f"{pad}{key}:"] if key is not None else []
        for k, v in obj.items():
            lines.extend(_render_text(v, indent + (key is not None), k))
        return lines
    if isinstance(obj, list) and obj and isinstance(obj[0], (dict, list)):
        lines = [f"{pad}{key}:"] if key is not None else []
        for i, v in enumerate(obj):
            lines.extend(_render_text(v, indent + (key is not None), f"[{i}]"))
        return lines
    return [head + json.dumps(obj)]


def _emit(report: dict, fmt: str) -> None:
    report = _round15(report)
    if fmt == "json":
        print(json.dumps(report, indent=2))
    else:
        print("\n".join(_render_text(report)))


def _load(path: str) -> dict:
    text = sys.stdin.read() if path == "-" else open(path, encoding="utf-8").read()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.lineno, exc.colno, exc.msg) from exc
    if not isinstance(data, dict) or "D" not in data:
        raise core.ValidationError('input must be a JSON object with a "D" matrix')
    return data


def _block_report(D: core.DimensionMatrix, tol: float, class_tol: float) -> dict:
    pf = spectral.pf_data(D, tol=tol)
    index = pf.d * pf.d
    cls = spectral.classify_index(index, tol=class_tol)
    exp = spectral.minimal_expectation(D, pf)
    states = spectral.canonical_states(D, pf)
    std = spectral.standard_solution_weights(D, pf)

    S = D.entries > 0
    factor_resid = float(
        np.abs(D.entries[S] ** 2 - index * (exp.weights * exp.dual_weights.T)[S]).max()
    )
    marg = max(
        float(np.abs(states.spherical.sum(axis=1) - states.right).max()),
        float(np.abs(states.spherical.sum(axis=0) - states.left).max()),
        abs(float(states.spherical.sum()) - 1.0),
    )
    return {
        "shape": [D.m, D.n],
        "entries": D.entries,
        "pf": {
            "scalar_dimension": pf.d,
            "nu_sqrt": pf.nu_sqrt,
            "mu_sqrt": pf.mu_sqrt,
            "residual": pf.residual,
            "iterations": pf.iterations,
            "tol": tol,
        },
        "minimal_index": index,
        "classification": {"kind": cls.kind, "k": cls.k, "tol": class_tol},
        "expectation": {
            "weights": exp.weights,
            "dual_weights": exp.dual_weights,
            "column_sum_residual": float(np.abs(exp.weights.sum(axis=0) - 1.0).max()),
            "dual_column_sum_residual": float(
                np.abs(exp.dual_weights.sum(axis=0) - 1.0).max()
            ),
            "factorization_residual": factor_resid,
        },
        "states": {
            "left": states.left,
            "right": states.right,
            "spherical": states.spherical,
            "marginal_residual": marg,
        },
        "standard_solution": std,
        "weighted_additivity_residual": spectral.weighted_additivity_check(D, pf),
        "norm_diagnostics": core.norm_diagnostics(D),
    }


def cmd_analyze(args) -> int:
    data = _load(args.path)
    D = core.validate_dimension_matrix(
        data["D"], quantization_floor=not args.no_quantization_floor
    )
    is_bratteli = "beta" in data or "alpha" in data
    diag = None
    if is_bratteli:
        if not ("beta" in data and "alpha" in data):
            raise core.ValidationError('Bratteli input needs both "beta" and "alpha"')
        diag = multimatrix.validate_bratteli(D, data["beta"], data["alpha"])

    report = {"schema": SCHEMA, "input": data, "connected": core.is_connected(D)}
    warnings = []
    if report["connected"]:
        analysis = _block_report(D, args.tol, args.class_tol)
        if diag is not None:
            pf = spectral.pf_data(D, tol=args.tol)
            trace = multimatrix.markov_trace(diag, pf)
            analysis["markov_trace"] = {
                "upper": trace.upper,
                "lower": trace.lower,
                "modulus": trace.modulus,
                "restriction_residual": multimatrix.restriction_residual(diag, trace),
                "convention": "values are trace(central summand identity); "
                "divide by alpha/beta for the trace of a minimal projection",
            }
            analysis["extremality"] = multimatrix.extremality_report(diag, pf)
            analysis["super_extremality"] = multimatrix.super_extremality(diag)
        report["analysis"] = analysis
    else:
        warnings.append("input not connected; analyzed per connected block")
        if diag is not None:
            warnings.append(
                "Markov trace and extremality need a connected diagram; skipped"
            )
        deco = core.decompose_connected(D)
        report["vector_dimension"] = list(deco.vector_dimension)
        report["scalar_dimension"] = deco.scalar_dimension
        report["blocks"] = [
            {
                "rows": list(block.rows),
                "cols": list(block.cols),
                **_block_report(block.matrix, args.tol, args.class_tol),
            }
            for block in deco.blocks
        ]
    report["warnings"] = warnings
    _emit(report, args.format)
    return 0


def cmd_compose(args) -> int:
    upper = core.validate_dimension_matrix(_load(args.upper)["D"])
    lower = core.validate_dimension_matrix(_load(args.lower)["D"])
    rep = calculus.compose(upper, lower)
    product = calculus.compose_expectations(upper, lower)
    composed_exp = spectral.minimal_expectation(
        rep.composed, spectral.pf_data(rep.composed)
    ).weights
    out = {
        "schema": SCHEMA,
        "composed": rep.composed.entries,
        "upper_index": rep.upper_index,
        "lower_index": rep.lower_index,
        "composed_index": rep.composed_index,
        "multiplicative": rep.multiplicative,
        "sufficient_condition_holds": rep.sufficient_condition_holds,
        "cos2_angle": rep.cos2_angle,
        "expectation_multiplicativity_residual": float(
            np.abs(product - composed_exp).max()
        ),
    }
    _emit(out, args.format)
    return 0


def cmd_tower(args) -> int:
    D = core.validate_dimension_matrix(_load(args.path)["D"])
    tower = calculus.jones_tower(D, args.levels)
    out = {
        "schema": SCHEMA,
        "levels": args.levels,
        "matrices": [M.entries for M in tower.matrices],
        "level_indices": list(tower.level_indices),
        "cumulative_indices": list(tower.cumulative_indices),
        "cross_check_residuals": list(tower.cross_check_residuals),
    }
    _emit(out, args.format)
    return 0


def cmd_oracle(args) -> int:
    D = core.validate_dimension_matrix(_load(args.path)["D"])
    cfg = oracle.OracleConfig(
        tol=args.tol,
        restarts=args.restarts,
        seed=args.seed,
        jobs=args.jobs,
        track_trajectories=args.verbose,
    )
    result = oracle.minimize_index(D, cfg)
    out = {
        "schema": SCHEMA,
        "min_value": result.min_value,
        "argmin": result.argmin,
        "kkt_residual": result.kkt_residual,
        "restarts": result.restarts,
        "converged": result.converged,
        "seed": args.seed,
        "tol": args.tol,
    }
    if args.verbose:
        out["trajectories"] = result.trajectories
    _emit(out, args.format)
    return 0


def cmd_export_dot(args) -> int:
    data = _load(args.path)
    if "beta" not in data or "alpha" not in data:
        raise core.ValidationError(
            'DOT export needs a Bratteli diagram with "beta" and "alpha"'
        )
    diag = multimatrix.validate_bratteli(data["D"], data["beta"], data["alpha"])
    sys.stdout.write(multimatrix.to_dot(diag))
    return 0


def _default_tol() -> float:
    env = os.environ.get("MININDEX_TOL")
    if env:
        try:
            return float(env)
        except ValueError:
            print(f"ignoring invalid MININDEX_TOL={env!r}", file=sys.stderr)
    return spectral.DEFAULT_TOL


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "text"), default="json")
    common.add_argument(
        "--tol", type=float, default=_default_tol(),
        help="numerical tolerance (default from MININDEX_TOL or 1e-12)",
    )

    parser = argparse.ArgumentParser(
        prog="minindex",
        description="minimal-index and matrix-dimension calculus for inclusions",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", parents=[common],
                       help="full report for a matrix or Bratteli diagram")
    p.add_argument("path", help="input JSON file, or - for stdin")
    p.add_argument("--class-tol", type=float, default=1e-6,
                   help="tolerance for the discrete-series classification")
    p.add_argument("--no-quantization-floor", action="store_true",
                   help="accept entries in (0,1) for exploratory matrices")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("compose", parents=[common],
                       help="compose two inclusions (upper then lower)")
    p.add_argument("upper")
    p.add_argument("lower")
    p.set_defaults(func=cmd_compose)

    p = sub.add_parser("tower", parents=[common], help="Jones tower index ladder")
    p.add_argument("path")
    p.add_argument("--levels", type=int, default=2)
    p.set_defaults(func=cmd_tower)

    p = sub.add_parser("oracle", parents=[common],
                       help="convex-optimization check of the minimal index")
    p.add_argument("path")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--restarts", type=int, default=5)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--verbose", action="store_true",
                   help="include per-restart trajectories")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("export-dot", parents=[common],
                       help="Graphviz DOT of a Bratteli diagram")
    p.add_argument("path")
    p.set_defaults(func=cmd_export_dot)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ParseError, core.ValidationError, core.ShapeMismatch, core.NotConnected,
            multimatrix.DimensionMismatch, multimatrix.BetaAlphaViolation,
            multimatrix.NonIntegerEntry, oracle.SupportMismatch,
            oracle.NotStochastic, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except core.NoConvergence as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
