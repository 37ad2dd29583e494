"""Command-line interface: the whole pipeline plus the evaluation harness.

Exit codes form a contract orchestrators can branch on:

* 0 - success
* 1 - usage error
* 2 - validation or processing failure
* 3 - processing succeeded but the new loads exceed the previous envelope
* 4 - infrastructure failure (missing files, I/O trouble)

Errors are emitted as one JSON object on stderr. Every subcommand that
writes content files also writes an NDJSON trace sidecar (argv, input and
output checksums, timestamps) so runs stay auditable without contaminating
the reproducible content.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import compare as compare_mod
from . import docserver, export, ingest, transform
from .analysis import Tolerance, check_equilibrium_all, envelope_select
from .errors import LoadsmithError
from .evalkit import load_scenario, min_k_for, run_scenario
from .model import Component, UnitSystem
from .trace import write_cli_trace

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_PROCESSING = 2
EXIT_EXCEEDANCE = 3
EXIT_INFRASTRUCTURE = 4

OUT_DIR_ENV = "LOADSMITH_OUT_DIR"


class _UsageExit(Exception):
    def __init__(self, message: str):
        super().__init__(message)


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on bad usage; the contract reserves 2 for processing
    # failures, so route usage problems through our own handler.
    def error(self, message):
        raise _UsageExit(message)


def _emit_error(code: str, message: str, location: str | None = None) -> None:
    error = LoadsmithError(message, code=code, location=location)
    sys.stderr.write(json.dumps({"error": error.to_dict()}, ensure_ascii=False) + "\n")


def _print_json(data) -> None:
    sys.stdout.write(json.dumps(data, indent=2, ensure_ascii=False) + "\n")


def _load_config(path: str | None) -> dict:
    if path is None:
        return {}
    try:
        config = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise LoadsmithError(f"config file is not valid JSON: {exc.msg}", code="CONFIG_ERROR")
    if not isinstance(config, dict):
        raise LoadsmithError("config file must hold a JSON object", code="CONFIG_ERROR")
    return config


def _default_out_dir(explicit: str | None) -> Path:
    if explicit is not None:
        return Path(explicit)
    env = os.environ.get(OUT_DIR_ENV)
    if env:
        return Path(env)
    raise _UsageExit(f"--out-dir is required (or set {OUT_DIR_ENV})")


def _parse_units(token: str) -> UnitSystem:
    parts = token.split(",")
    if len(parts) != 2:
        raise _UsageExit("--units expects FORCE,MOMENT (for example N,N·m)")
    return UnitSystem(parts[0].strip(), parts[1].strip())


def _parse_component(token: str) -> Component:
    try:
        return Component[token.strip().upper()]
    except KeyError:
        raise _UsageExit(f"unknown component {token!r}; expected one of FX FY FZ MX MY MZ")


def _write_text(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8", newline="\n")


# --- subcommand implementations -----------------------------------------


def _cmd_convert(args) -> int:
    delivery = ingest.load_delivery(args.input)
    out = Path(args.out)
    if args.to == "json":
        _write_text(out, ingest.write_delivery_json(delivery))
    else:
        _write_text(out, ingest.write_delivery_yaml(delivery))
    write_cli_trace(str(out) + ".trace.ndjson", sys.argv, [args.input], [out])
    _print_json({"written": str(out), "format": args.to})
    return EXIT_OK


def _cmd_validate(args) -> int:
    raw = Path(args.input).read_bytes()
    delivery = ingest.parse_delivery(raw)
    report = ingest.validate_delivery(delivery)
    _print_json(report.to_dict())
    return EXIT_OK if report.ok else EXIT_PROCESSING


def _cmd_transform(args) -> int:
    delivery = ingest.load_delivery(args.input)
    summary: dict = {}

    renames = {}
    for spec in args.rename or []:
        if "=" not in spec:
            raise _UsageExit(f"--rename expects old=new, got {spec!r}")
        old, new = spec.split("=", 1)
        renames[old] = new
    if renames:
        delivery, count = transform.rename_points(delivery, renames)
        summary["rename_count"] = count

    for spec in args.scale or []:
        if "=" not in spec:
            raise _UsageExit(f"--scale expects COMP=factor, got {spec!r}")
        comp_token, factor_token = spec.split("=", 1)
        component = _parse_component(comp_token)
        try:
            factor = float(factor_token)
        except ValueError:
            raise _UsageExit(f"--scale factor must be a number, got {factor_token!r}")
        delivery = transform.scale_component(delivery, component, factor)
        summary.setdefault("scaled", []).append({"component": component.name, "factor": factor})

    if args.units is not None:
        target = _parse_units(args.units)
        delivery = transform.convert_units(delivery, target)
        summary["units"] = {"force": target.force_unit, "moment": target.moment_unit}

    if args.ultimate_factor is not None:
        delivery = transform.apply_ultimate_factor(delivery, args.ultimate_factor)
        summary["ultimate_factor"] = args.ultimate_factor

    out = Path(args.out)
    if args.to == "yaml" or (args.to is None and out.suffix in (".yaml", ".yml")):
        _write_text(out, ingest.write_delivery_yaml(delivery))
    else:
        _write_text(out, ingest.write_delivery_json(delivery))
    write_cli_trace(str(out) + ".trace.ndjson", sys.argv, [args.input], [out])
    summary["written"] = str(out)
    _print_json(summary)
    return EXIT_OK


def _cmd_equilibrium(args) -> int:
    config = _load_config(args.config)
    tol_defaults = config.get("tolerances", {})
    tol = Tolerance(
        abs=args.abs_tol if args.abs_tol is not None else tol_defaults.get("abs", 1e-9),
        rel=args.rel_tol if args.rel_tol is not None else tol_defaults.get("rel", 1e-3),
    )
    delivery = ingest.load_delivery(args.input)
    coords = None
    if args.coords is not None:
        raw = json.loads(Path(args.coords).read_text(encoding="utf-8"))
        if not isinstance(raw, dict):
            raise LoadsmithError("coords file must map point names to [x, y, z]", code="SCHEMA_ERROR")
        coords = {}
        for point, xyz in raw.items():
            if not isinstance(xyz, list) or len(xyz) != 3:
                raise LoadsmithError(
                    f"coordinates for {point!r} must be [x, y, z]",
                    code="SCHEMA_ERROR", location=point,
                )
            coords[point] = tuple(float(v) for v in xyz)
    survey = check_equilibrium_all(delivery, tol=tol, coords=coords)
    _print_json(survey.to_dict())
    return EXIT_OK if survey.all_balanced else EXIT_PROCESSING


def _cmd_envelope(args) -> int:
    delivery = ingest.load_delivery(args.input)
    selection = envelope_select(delivery)
    out_dir = _default_out_dir(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    md_path = out_dir / "envelope.md"
    json_path = out_dir / "envelope_extremes.json"
    _write_text(md_path, export.envelope_to_markdown(selection.extremes))
    _write_text(json_path, export.write_envelope_json(selection.extremes))
    write_cli_trace(out_dir / "trace.ndjson", sys.argv, [args.input], [md_path, json_path])
    _print_json(
        {
            "selected_case_ids": list(selection.selected_case_ids),
            "written": [str(md_path), str(json_path)],
        }
    )
    return EXIT_OK


def _cmd_export_ansys(args) -> int:
    config = _load_config(args.config)
    delivery = ingest.load_delivery(args.input)
    if args.node_map is not None:
        nodes = export.load_node_map(args.node_map)
    elif "node_map" in config:
        nodes = {str(k): v for k, v in config["node_map"].items()}
    else:
        raise _UsageExit("--node-map is required (or provide node_map in --config)")
    selected = []
    for token in args.select.split(","):
        token = token.strip()
        if token:
            try:
                selected.append(int(token))
            except ValueError:
                raise _UsageExit(f"--select expects integers, got {token!r}")
    exclude = frozenset(
        token.strip() for token in (args.exclude or "").split(",") if token.strip()
    )
    out_dir = _default_out_dir(args.out_dir)
    paths = export.export_all_inp(delivery, selected, nodes, exclude, out_dir)
    inputs = [args.input] + ([args.node_map] if args.node_map else [])
    write_cli_trace(out_dir / "trace.ndjson", sys.argv, inputs, paths)
    _print_json({"written": [str(p) for p in paths]})
    return EXIT_OK


def _cmd_compare(args) -> int:
    new_text = Path(args.new).read_text(encoding="utf-8")
    old_text = Path(args.old).read_text(encoding="utf-8")
    report = compare_mod.compare_envelope_files(new_text, old_text, widen_tol=args.widen_tol)
    if args.out is not None:
        out = Path(args.out)
    else:
        out = Path("comparison_report") / compare_mod.suggested_report_filename(report)
    _write_text(out, compare_mod.write_comparison_report(report))
    md_path = out.with_suffix(".md")
    _write_text(md_path, compare_mod.comparison_to_markdown(report))
    write_cli_trace(str(out) + ".trace.ndjson", sys.argv, [args.new, args.old], [out, md_path])
    _print_json({"new_exceeds_old": report.new_exceeds_old, "written": [str(out), str(md_path)]})
    return EXIT_EXCEEDANCE if report.new_exceeds_old else EXIT_OK


def _cmd_eval_run(args) -> int:
    out_dir = Path(args.out_dir) if args.out_dir else Path(os.environ.get(OUT_DIR_ENV, "eval_runs"))
    all_pass = True
    any_infra = False
    summaries = []
    for scenario_path in args.scenarios:
        scenario = load_scenario(scenario_path)
        report = run_scenario(scenario, out_dir / scenario.id, k=args.k)
        all_pass = all_pass and report.pass_hat_k
        any_infra = any_infra or report.infrastructure_failures > 0
        summaries.append(
            {
                "scenario": report.scenario_id,
                "k": report.k,
                "passes": report.passes,
                "pass_hat_k": report.pass_hat_k,
                "lower_bound": report.lower_bound,
                "infrastructure_failures": report.infrastructure_failures,
                "report": str(out_dir / scenario.id / "report.json"),
            }
        )
    _print_json(summaries)
    if all_pass:
        return EXIT_OK
    return EXIT_INFRASTRUCTURE if any_infra else EXIT_PROCESSING


def _cmd_eval_passk(args) -> int:
    sys.stdout.write(f"{min_k_for(args.p, args.alpha)}\n")
    return EXIT_OK


def _cmd_docserve(args) -> int:
    docserver.serve(args.catalog_dir, verify_checksums=args.verify_checksums)
    return EXIT_OK


# --- parser wiring --------------------------------------------------------


def build_parser() -> _Parser:
    parser = _Parser(prog="loadsmith", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("convert", help="convert a delivery between JSON and YAML")
    p.add_argument("input")
    p.add_argument("--to", choices=("json", "yaml"), required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_convert)

    p = sub.add_parser("validate", help="validate a delivery and print the findings")
    p.add_argument("input")
    p.set_defaults(func=_cmd_validate)

    p = sub.add_parser(
        "transform",
        help="rename points, apply correction factors, convert units (in that order)",
    )
    p.add_argument("input")
    p.add_argument("--rename", action="append", metavar="OLD=NEW")
    p.add_argument("--scale", action="append", metavar="COMP=FACTOR")
    p.add_argument("--units", metavar="FORCE,MOMENT")
    p.add_argument("--ultimate-factor", type=float, dest="ultimate_factor")
    p.add_argument("--out", required=True)
    p.add_argument("--to", choices=("json", "yaml"))
    p.set_defaults(func=_cmd_transform)

    p = sub.add_parser("equilibrium", help="verify force (and moment) equilibrium per case")
    p.add_argument("input")
    p.add_argument("--coords", help="JSON file {point: [x, y, z]} in meters")
    p.add_argument("--abs-tol", type=float, dest="abs_tol")
    p.add_argument("--rel-tol", type=float, dest="rel_tol")
    p.add_argument("--config")
    p.set_defaults(func=_cmd_equilibrium)

    p = sub.add_parser("envelope", help="downselect critical cases and write the envelope")
    p.add_argument("input")
    p.add_argument("--out-dir", dest="out_dir")
    p.set_defaults(func=_cmd_envelope)

    p = sub.add_parser("export-ansys", help="write one nodal-force .inp deck per selected case")
    p.add_argument("input")
    p.add_argument("--select", required=True, metavar="ID,ID,...")
    p.add_argument("--node-map", dest="node_map", help="JSON file {point: node id}")
    p.add_argument("--exclude", metavar="POINT,POINT,...")
    p.add_argument("--out-dir", dest="out_dir")
    p.add_argument("--config")
    p.set_defaults(func=_cmd_export_ansys)

    p = sub.add_parser("compare", help="exceedance comparison of new extremes vs old")
    p.add_argument("new")
    p.add_argument("old")
    p.add_argument("--out")
    p.add_argument("--widen-tol", type=float, default=0.0, dest="widen_tol")
    p.set_defaults(func=_cmd_compare)

    p = sub.add_parser("eval", help="evaluation harness")
    eval_sub = p.add_subparsers(dest="eval_command", required=True)

    run_p = eval_sub.add_parser("run", help="run scenario repetitions and report pass^k")
    run_p.add_argument("scenarios", nargs="+")
    run_p.add_argument("-k", type=int, default=None)
    run_p.add_argument("--out-dir", dest="out_dir")
    run_p.set_defaults(func=_cmd_eval_run)

    passk_p = eval_sub.add_parser("passk", help="minimum k for a target pass probability")
    passk_p.add_argument("--p", type=float, required=True)
    passk_p.add_argument("--alpha", type=float, default=0.05)
    passk_p.set_defaults(func=_cmd_eval_passk)

    p = sub.add_parser("docserve", help="serve a document catalog over stdio JSON-RPC")
    p.add_argument("catalog_dir")
    p.add_argument("--verify-checksums", action="store_true", dest="verify_checksums")
    p.set_defaults(func=_cmd_docserve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageExit as exc:
        _emit_error("USAGE", str(exc))
        return EXIT_USAGE

    try:
        return args.func(args)
    except _UsageExit as exc:
        _emit_error("USAGE", str(exc))
        return EXIT_USAGE
    except LoadsmithError as exc:
        sys.stderr.write(json.dumps({"error": exc.to_dict()}, ensure_ascii=False) + "\n")
        return EXIT_PROCESSING
    except FileNotFoundError as exc:
        _emit_error("FILE_NOT_FOUND", str(exc))
        return EXIT_INFRASTRUCTURE
    except OSError as exc:
        _emit_error("IO_ERROR", str(exc))
        return EXIT_INFRASTRUCTURE
    except json.JSONDecodeError as exc:
        _emit_error("SYNTAX_ERROR", f"invalid JSON: {exc.msg}", f"line {exc.lineno}")
        return EXIT_PROCESSING
    except ValueError as exc:
        _emit_error("VALUE_ERROR", str(exc))
        return EXIT_PROCESSING


if __name__ == "__main__":
    sys.exit(main())
