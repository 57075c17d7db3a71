"""Command-line front-end.

    ctk check MODEL --system NAME [--properties FILE] [options]
    ctk detect BASELINE CANDIDATE [--threshold T] [options]
    ctk classify MODEL [--pathways LEFT RIGHT] [options]

MODEL is a `.ctk` file path or the name of a shipped fixture. Exit codes:
0 success, 2 parse/property errors, 3 state-space cap exceeded, 4 solver
non-convergence, 5 missing role annotations, 1 anything else.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from .algebra import flatten
from .ast_nodes import Model, NamedComposition
from .checker import CheckSettings, check_property
from .crosstalk import (
    DEFAULT_DETECTION_THRESHOLD,
    classify,
    detect,
)
from .ctmc import DEFAULT_STATE_CAP, Ctmc, build, export_tables
from .errors import (
    CheckError,
    CtkError,
    MissingAnnotationError,
    ModelError,
    ParseError,
    SolverError,
    StateCapError,
)
from .parser import parse_model
from .properties import parse_property_file
from .serialize import serialize_property
from .stdlib import FIXTURE_NAMES, load_fixture


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format(value, ".6g")
    return str(value)


def _load_model(spec: str) -> tuple[Model, str, Path | None]:
    path = Path(spec)
    if path.exists():
        return parse_model(path.read_text(encoding="utf-8")), str(path), None
    if spec in FIXTURE_NAMES:
        fixture = load_fixture(spec)
        return fixture.model, str(fixture.model_path), fixture.property_path
    raise CtkError(f"'{spec}' is neither a file nor a shipped fixture")


def _pick_system(model: Model, name: str | None) -> NamedComposition:
    if name is not None:
        return model.composition(name)
    systems = model.systems()
    if len(systems) == 1:
        return systems[0]
    if not systems:
        raise ModelError("the model declares no system; use --system")
    names = ", ".join(c.name for c in systems)
    raise ModelError(f"the model declares several systems ({names}); "
                     f"use --system to pick one")


def _build(model: Model, composition: NamedComposition,
           args) -> tuple[Ctmc, dict]:
    start = time.perf_counter()
    flat = flatten(composition.expr, model)
    ctmc = build(flat, state_cap=args.state_cap)
    elapsed = time.perf_counter() - start
    info = {
        "composition": composition.name,
        "components": [c.name for c in flat.components],
        "states": ctmc.num_states,
        "transitions": len(ctmc.transitions),
        "blocked_labels": sorted(ctmc.blocked_labels),
    }
    if args.export_ctmc:
        export_tables(ctmc, args.export_ctmc)
        info["exported_to"] = args.export_ctmc
    return ctmc, {"build": info, "wall_time_s": elapsed}


def _settings(args) -> CheckSettings:
    return CheckSettings(
        poisson_epsilon=args.time_bound_epsilon,
        solver=args.solver,
        iteration_cap=args.iteration_cap,
    )


# ---------------------------------------------------------------------------
# report rendering

def _render(report: dict, diagnostics: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps({**report, "diagnostics": diagnostics}, indent=2)
    if fmt == "csv":
        lines = ["name,kind,value"]
        for row in report["results"]:
            lines.append(f"{row['name']},{row['kind']},{row['value']}")
        return "\n".join(lines)
    width = max((len(r["name"]) for r in report["results"]), default=4)
    lines = [f"model: {report['model']}  composition: {report.get('composition', '-')}"]
    if "states" in report:
        lines.append(f"states: {report['states']}  transitions: {report['transitions']}")
    lines.append("")
    lines.append(f"{'property'.ljust(width)}  {'kind':12s}  value")
    for row in report["results"]:
        lines.append(f"{row['name'].ljust(width)}  {row['kind']:12s}  {row['value']}")
        for warning in row.get("warnings", ()):
            lines.append(f"{''.ljust(width)}  warning: {warning}")
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# subcommands

def cmd_check(args) -> int:
    model, model_name, default_props = _load_model(args.model)
    composition = _pick_system(model, args.system)
    prop_path = args.properties or default_props
    if prop_path is None:
        raise CtkError("no property file given and the model is not a "
                       "fixture with a default suite; use --properties")
    properties = parse_property_file(
        Path(prop_path).read_text(encoding="utf-8"))
    ctmc, diagnostics = _build(model, composition, args)
    settings = _settings(args)
    results = []
    solver_diag: dict = {}
    for name, formula in properties.items():
        result = check_property(ctmc, formula, settings)
        solver_diag.update(result.diagnostics)
        results.append({
            "name": name,
            "formula": serialize_property(formula),
            "kind": result.kind,
            "value": _fmt(result.value),
            "warnings": result.warnings,
        })
    report = {
        "command": "check",
        "model": model_name,
        "composition": composition.name,
        "states": ctmc.num_states,
        "transitions": len(ctmc.transitions),
        "results": results,
    }
    diagnostics["solver"] = solver_diag
    print(_render(report, diagnostics, args.format))
    return 0


def cmd_detect(args) -> int:
    baseline_model, baseline_name, _ = _load_model(args.baseline)
    candidate_model, candidate_name, _ = _load_model(args.candidate)
    baseline_sys = _pick_system(baseline_model, args.baseline_system)
    candidate_sys = _pick_system(candidate_model, args.candidate_system)
    baseline_ctmc, diag1 = _build(baseline_model, baseline_sys, args)
    candidate_ctmc, diag2 = _build(candidate_model, candidate_sys, args)
    report_obj = detect(baseline_ctmc, candidate_ctmc,
                        threshold=args.threshold, settings=_settings(args))
    results = [{
        "name": row.name,
        "kind": "delta",
        "value": _fmt(row.delta),
        "baseline": _fmt(row.baseline),
        "model": _fmt(row.model),
    } for row in report_obj.rows]
    report = {
        "command": "detect",
        "model": candidate_name,
        "baseline": baseline_name,
        "composition": candidate_sys.name,
        "threshold": _fmt(report_obj.threshold),
        "detected": report_obj.detected,
        "results": results,
    }
    diagnostics = {"baseline": diag1, "candidate": diag2}
    if args.format == "table":
        width = max(len(r["name"]) for r in results)
        lines = [f"baseline: {baseline_name} ({baseline_sys.name})",
                 f"model:    {candidate_name} ({candidate_sys.name})", ""]
        lines.append(f"{'property'.ljust(width)}  {'baseline':>10s}  "
                     f"{'model':>10s}  {'delta':>11s}")
        for row in results:
            lines.append(f"{row['name'].ljust(width)}  {row['baseline']:>10s}  "
                         f"{row['model']:>10s}  {row['value']:>11s}")
        lines.append("")
        verdict = "detected" if report_obj.detected else "not detected"
        lines.append(f"cross-talk {verdict} at threshold {_fmt(args.threshold)}")
        print("\n".join(lines))
    else:
        print(_render(report, diagnostics, args.format))
    return 0


def cmd_classify(args) -> int:
    model, model_name, _ = _load_model(args.model)
    if args.pathways:
        left = model.composition(args.pathways[0]).expr
        right = model.composition(args.pathways[1]).expr
    else:
        system = _pick_system(model, args.system)
        expr = system.expr
        if not hasattr(expr, "left"):
            raise ModelError(
                "the system is not a parallel composition of two pathways; "
                "use --pathways to name them")
        left, right = expr.left, expr.right
    result = classify(left, right, model)
    report = {
        "command": "classify",
        "model": model_name,
        "category": result.category.value,
        "shared_labels": sorted(result.shared_labels),
        "results": [{
            "name": "category",
            "kind": "category",
            "value": result.category.value,
        }],
    }
    if args.format == "table":
        labels = ", ".join(sorted(result.shared_labels)) or "(none)"
        print(f"model: {model_name}\ncategory: {result.category.value}\n"
              f"shared labels: {labels}")
    else:
        print(_render(report, {}, args.format))
    return 0


# ---------------------------------------------------------------------------
# argument parsing

def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--format", choices=("table", "csv", "json"),
                        default="table", help="output format")
    parser.add_argument("--state-cap", type=int, default=DEFAULT_STATE_CAP,
                        help="maximum number of reachable states")
    parser.add_argument("--solver", choices=("auto", "iterative", "direct"),
                        default="auto", help="linear solver for unbounded until")
    parser.add_argument("--iteration-cap", type=int, default=10**6,
                        help="Gauss-Seidel sweep cap")
    parser.add_argument("--time-bound-epsilon", type=float, default=1e-9,
                        help="Poisson truncation mass for bounded until")
    parser.add_argument("--export-ctmc", metavar="DIR", default=None,
                        help="write state/transition tables to DIR")


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ctk",
        description="compositional CTMC model checking of signalling "
                    "pathways and their cross-talk")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    check = sub.add_parser("check", help="check properties of a composition")
    check.add_argument("model", help=".ctk file or fixture name")
    check.add_argument("--system", default=None,
                       help="composition to build (default: sole system)")
    check.add_argument("--properties", default=None,
                       help=".csl property file (default: fixture suite)")
    _add_common(check)
    check.set_defaults(func=cmd_check)

    det = sub.add_parser("detect",
                         help="compare a model against a baseline")
    det.add_argument("baseline", help=".ctk file or fixture name")
    det.add_argument("candidate", help=".ctk file or fixture name")
    det.add_argument("--baseline-system", default=None)
    det.add_argument("--candidate-system", default=None)
    det.add_argument("--threshold", type=float,
                     default=DEFAULT_DETECTION_THRESHOLD,
                     help="probability delta that counts as detection")
    _add_common(det)
    det.set_defaults(func=cmd_detect)

    cls = sub.add_parser("classify",
                         help="classify the cross-talk of a composition")
    cls.add_argument("model", help=".ctk file or fixture name")
    cls.add_argument("--system", default=None)
    cls.add_argument("--pathways", nargs=2, metavar=("LEFT", "RIGHT"),
                     default=None, help="explicit pathway names")
    _add_common(cls)
    cls.set_defaults(func=cmd_classify)
    return parser


_EXIT_CODES = (
    (StateCapError, 3),
    (SolverError, 4),
    (MissingAnnotationError, 5),
    (ParseError, 2),
    (ModelError, 2),
    (CheckError, 2),
)


def main(argv: list[str] | None = None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CtkError as exc:
        print(f"error: {exc}", file=sys.stderr)
        for cls, code in _EXIT_CODES:
            if isinstance(exc, cls):
                return code
        return 1


if __name__ == "__main__":
    sys.exit(main())
