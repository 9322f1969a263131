"""Batch command-line front end.

Every command writes one JSON document to stdout.  Exit codes: 0 pass or
allowed, 2 obstructed or failed check, 1 usage or evaluation error.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass

import numpy as np

from . import topology, zoo
from .errors import ToolkitError
from .invariants import SAMPLE_MARGIN, QuadratureSpec, invariant_report, sample_points
from .soliton import PotentialField, SolitonCandidate, identity_suite, normalize, residual, sufficient_report

EXIT_OK, EXIT_ERROR, EXIT_FAILED = 0, 1, 2


@dataclass(frozen=True)
class CommandResult:
    exit_code: int
    report: dict

    def dumps(self) -> str:
        return json.dumps(self.report, indent=2, allow_nan=True) + "\n"


class UsageError(Exception):
    def __init__(self, message: str, usage: str):
        super().__init__(message)
        self.usage = usage


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message, self.format_usage())


def _param(text: str):
    key, sep, value = text.partition("=")
    if not sep or not key:
        raise argparse.ArgumentTypeError(f"expected key=value, got {text!r}")
    try:
        return key.strip(), float(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"parameter {key!r} is not a number: {value!r}") from None


def _numeric_flags(p: argparse.ArgumentParser, tol: float):
    p.add_argument("--nodes", type=int, default=24, help="Gauss-Legendre nodes per axis (default 24)")
    p.add_argument("--tol", type=float, default=tol, help=f"pass tolerance (default {tol:g})")
    p.add_argument("--workers", type=int, default=1, help="quadrature threads (result is independent of this)")
    p.add_argument("--json", action="store_true", help="emit JSON (always on; accepted for scripts)")


def _metric_flags(p: argparse.ArgumentParser):
    p.add_argument("--metric", required=True, help="zoo entry name (see `zoo list`)")
    p.add_argument("--param", type=_param, action="append", default=[], metavar="KEY=VALUE")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="shrinker4", description="Four-dimensional shrinking soliton verification toolkit.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    z = sub.add_parser("zoo", help="closed-form example metrics")
    z.add_argument("action", choices=["list"])
    z.add_argument("--json", action="store_true")

    inv = sub.add_parser("invariants", help="curvature integrals, chi and tau of a zoo metric")
    _metric_flags(inv)
    _numeric_flags(inv, 1e-6)

    sol = sub.add_parser("soliton-check", help="soliton equation, identities and sufficient conditions")
    _metric_flags(sol)
    sol.add_argument("--rho", type=float, default=None, help="soliton constant (default: zoo value)")
    sol.add_argument("--samples", type=int, default=100, help="random points for residual and identities")
    sol.add_argument("--seed", type=int, default=0)
    _numeric_flags(sol, 1e-9)

    ht = sub.add_parser("ht", help="Hitchin-Thorpe quantities of a connected sum")
    ht.add_argument("--sum", required=True, dest="expr", metavar="EXPR")
    ht.add_argument("--json", action="store_true")

    ob = sub.add_parser("obstruct", help="topological obstruction rules")
    ob.add_argument("--sum", required=True, dest="expr", metavar="EXPR")
    ob.add_argument("--structure", required=True, choices=topology.STRUCTURES)
    ob.add_argument("--json", action="store_true")

    fr = sub.add_parser("freedman", help="homeomorphism test for simply connected classes")
    fr.add_argument("--a", required=True, metavar="EXPR")
    fr.add_argument("--b", required=True, metavar="EXPR")
    fr.add_argument("--json", action="store_true")
    return parser


def _params(args) -> dict:
    out = {}
    for key, value in args.param:
        out[key] = value
    return dict(sorted(out.items()))


def _spec(args) -> QuadratureSpec:
    return QuadratureSpec(nodes=args.nodes, atol=args.tol, workers=args.workers)


def _cmd_zoo(args) -> CommandResult:
    return CommandResult(EXIT_OK, {"command": "zoo list", "metrics": zoo.listing()})


def _cmd_invariants(args) -> CommandResult:
    params = _params(args)
    atlas, _ = zoo.build(args.metric, **params)
    spec = _spec(args)
    rep = invariant_report(atlas, spec)
    ref = zoo.reference(args.metric, **params)
    chi_ok = rep.chi.integer_distance <= max(10 * rep.chi.error, args.tol)
    tau_ok = rep.tau.integer_distance <= max(10 * rep.tau.error, args.tol)
    matches = rep.chi_snapped == ref.chi and rep.tau_snapped == ref.tau
    passed = chi_ok and tau_ok and matches
    report = {
        "command": "invariants",
        "metric": args.metric,
        "params": params,
        "nodes": spec.nodes,
        "tol": args.tol,
        "chi": rep.chi.value,
        "tau": rep.tau.value,
        "report": rep.as_dict(),
        "reference": {"chi": ref.chi, "tau": ref.tau},
        "matches_reference": matches,
        "verdict": "pass" if passed else "fail",
    }
    return CommandResult(EXIT_OK if passed else EXIT_FAILED, report)


def _cmd_soliton(args) -> CommandResult:
    params = _params(args)
    atlas, cand = zoo.build(args.metric, **params)
    if cand is None:
        if args.rho is None:
            raise UsageError(f"{args.metric} has no soliton data; pass --rho", "")
        cand = SolitonCandidate(atlas, PotentialField.constant(0.0), args.rho)
    elif args.rho is not None:
        cand = SolitonCandidate(atlas, cand.f, args.rho)

    groups = sample_points(atlas, args.samples, np.random.default_rng(args.seed), margin=SAMPLE_MARGIN)
    worst = 0.0
    for chart, x in groups:
        _, norms = residual(cand, x, chart)
        worst = max(worst, float(np.max(norms)))
    ident = identity_suite(cand, groups)
    residual_ok = worst < args.tol
    identities_ok = ident.passed()

    sufficient = None
    note = None
    if not cand.shrinking:
        note = "rho <= 0: not a shrinker, sufficient conditions skipped"
    elif not atlas.compact:
        note = "non-compact atlas: integral conditions skipped"
    elif not residual_ok:
        note = "soliton equation fails: integral conditions skipped"
    else:
        sufficient = sufficient_report(normalize(cand), _spec(args), seed=args.seed).as_dict()

    passed = residual_ok and identities_ok
    report = {
        "command": "soliton-check",
        "metric": args.metric,
        "params": params,
        "rho": cand.rho,
        "potential": cand.f.label,
        "samples": ident.samples,
        "seed": args.seed,
        "residual_max": worst,
        "residual_ok": residual_ok,
        "identities": {
            "trace": ident.trace,
            "gradient": ident.gradient,
            "conserved_spread": ident.conserved_spread,
            "passed": identities_ok,
        },
        "sufficient": sufficient,
        "note": note,
        "verdict": "pass" if passed else "fail",
    }
    return CommandResult(EXIT_OK if passed else EXIT_FAILED, report)


def _cmd_ht(args) -> CommandResult:
    c = topology.parse_sum(args.expr)
    pred = topology.ht_predicate(c)
    failed = any(v["verdict"] == "fail" for v in pred.values())
    report = {"command": "ht", "manifold": c.as_dict(), "hitchin_thorpe": pred, "verdict": "fail" if failed else "pass"}
    return CommandResult(EXIT_FAILED if failed else EXIT_OK, report)


def _cmd_obstruct(args) -> CommandResult:
    rep = topology.obstruction_report(topology.parse_sum(args.expr), args.structure)
    return CommandResult(EXIT_FAILED if rep.obstructed else EXIT_OK, {"command": "obstruct", **rep.as_dict()})


def _cmd_freedman(args) -> CommandResult:
    a, b = topology.parse_sum(args.a), topology.parse_sum(args.b)
    eq = topology.freedman_equivalent(a, b)
    report = {"command": "freedman", "a": a.as_dict(), "b": b.as_dict(), "equivalent": eq}
    return CommandResult(EXIT_OK if eq else EXIT_FAILED, report)


_COMMANDS = {
    "zoo": _cmd_zoo,
    "invariants": _cmd_invariants,
    "soliton-check": _cmd_soliton,
    "ht": _cmd_ht,
    "obstruct": _cmd_obstruct,
    "freedman": _cmd_freedman,
}


def run(argv=None) -> CommandResult:
    """Parse ``argv`` and execute; never raises for user-facing errors."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return _COMMANDS[args.command](args)
    except UsageError as exc:
        return CommandResult(EXIT_ERROR, {"error": "usage", "message": str(exc), "usage": exc.usage})
    except (ToolkitError, ValueError) as exc:
        return CommandResult(EXIT_ERROR, {"error": type(exc).__name__, "message": str(exc)})


def main(argv=None) -> int:
    result = run(argv)
    if result.report.get("error") == "usage":
        sys.stderr.write(result.report["usage"] or build_parser().format_usage())
        sys.stderr.write(f"error: {result.report['message']}\n")
        return result.exit_code
    if "error" in result.report:
        sys.stderr.write(f"error: {result.report['message']}\n")
    sys.stdout.write(result.dumps())
    return result.exit_code


if __name__ == "__main__":
    sys.exit(main())
