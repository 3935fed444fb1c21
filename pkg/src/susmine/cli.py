"""Command-line interface.

Subcommands wire the pipeline end to end:

    validate   check a log against its structural invariants
    assess     full analysis -> report.json, CSVs, ledger, DOT
    inventory  flow inventory CSV only
    allocate   run through allocation, emit the transfer ledger
    dfg        directly-follows graph as DOT (impact-annotated if
               annotations are given)
    audit      pattern-coverage matrix for a bundle, or the shipped
               literature matrix with --literature
    generate   seeded synthetic bundle with ground truth

Exit codes: 0 success; 1 analysis/data error; 2 I/O, syntax or usage
error. Configuration comes from flags only; ``--config FILE`` may supply
the same keys as JSON, with flags winning on conflict.
"""

from __future__ import annotations

import argparse
import json
import sys
from decimal import Decimal, InvalidOperation
from pathlib import Path

from .errors import SusmineError
from .model import Quantity, validate_log
from .annotations import parse_annotations, parse_scope_set, empty_bundle
from .audit import CapabilityMatrix, load_literature_matrix
from .dfg import build_dfg, emit_dot
from .generator import generate_bundle
from .impact import Mode
from .inventory import FunctionalUnit, inventory_to_csv
from .ocel import parse_ocel
from .pipeline import run_pipeline
from .report import ledger_csv, write_outputs

_CONFIG_KEYS = ("log", "annotations", "out", "mode", "scopes", "fu", "seed", "size")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="susmine",
        description="Sustainability analysis of business processes from object-centric event logs.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser, *, log=False, annotations=False, out=False, fu=False):
        if log:
            p.add_argument("--log", help="event log (OCEL 2.0 JSON subset)")
        if annotations:
            p.add_argument("--annotations", help="annotation bundle (susmine/1 JSON)")
            p.add_argument("--scopes", help="scope set override: ghg, lca, or a JSON file")
        if out:
            p.add_argument("--out", help="output directory")
        if fu:
            p.add_argument("--fu", help="functional unit as <object_type>:<amount>")
        p.add_argument("--mode", choices=["strict", "lenient"], help="ingest/analysis mode (default strict)")
        p.add_argument("--config", help="JSON file supplying the same keys as flags; flags win")

    p = sub.add_parser("validate", help="validate a log")
    common(p, log=True)

    p = sub.add_parser("assess", help="run the full analysis and write all artifacts")
    common(p, log=True, annotations=True, out=True, fu=True)

    p = sub.add_parser("inventory", help="emit the flow inventory CSV")
    common(p, log=True, annotations=True, out=True, fu=True)

    p = sub.add_parser("allocate", help="run allocation and emit the transfer ledger CSV")
    common(p, log=True, annotations=True, out=True)

    p = sub.add_parser("dfg", help="emit the directly-follows graph as DOT")
    common(p, log=True, annotations=True, out=True)

    p = sub.add_parser("audit", help="pattern-coverage capability matrix")
    common(p, log=True, annotations=True, out=True)
    p.add_argument("--literature", action="store_true",
                   help="print the shipped literature matrix instead of auditing a bundle")

    p = sub.add_parser("generate", help="generate a seeded synthetic bundle")
    common(p, out=True)
    p.add_argument("--seed", help="64-bit unsigned generator seed (required)")
    p.add_argument("--size", help="number of events (default 40)")

    return parser


def _apply_config(args: argparse.Namespace) -> argparse.Namespace:
    if getattr(args, "config", None):
        with open(args.config, "r", encoding="utf-8") as fh:
            config = json.load(fh)
        if not isinstance(config, dict):
            raise ValueError("--config file must contain a JSON object")
        for key in _CONFIG_KEYS:
            if key in config and getattr(args, key, None) is None and hasattr(args, key):
                setattr(args, key, config[key])
    return args


def _parse_fu(raw: str) -> FunctionalUnit:
    parts = raw.split(":")
    if len(parts) != 2 or not parts[0]:
        raise ValueError(f"--fu expects <object_type>:<amount>, got '{raw}'")
    try:
        amount = Decimal(parts[1])
    except InvalidOperation:
        raise ValueError(f"--fu amount '{parts[1]}' is not a number") from None
    return FunctionalUnit(parts[0], Quantity(amount, "count"))


def _load_scopes_override(raw: str):
    if raw in ("ghg", "lca"):
        return parse_scope_set(raw)
    with open(raw, "r", encoding="utf-8") as fh:
        return parse_scope_set(json.load(fh))


def _read(path: str | None, what: str) -> bytes:
    if not path:
        raise FileNotFoundError(f"--{what} is required")
    return Path(path).read_bytes()


def _mode(args) -> Mode:
    return Mode(args.mode or "strict")


def _load_log(args, mode: Mode):
    return parse_ocel(_read(args.log, "log"), strict=(mode is Mode.STRICT))


def _load_annotations(args):
    if not getattr(args, "annotations", None):
        return empty_bundle()
    override = None
    if getattr(args, "scopes", None):
        override = _load_scopes_override(args.scopes)
    return parse_annotations(_read(args.annotations, "annotations"), scopes_override=override)


def _load_bundle(args, mode: Mode):
    return _load_log(args, mode), _load_annotations(args)


def _emit(text: str, out_dir: str | None, filename: str) -> None:
    """Write to <out>/<filename> when an output directory is given,
    otherwise print to standard output."""
    if out_dir:
        path = Path(out_dir)
        path.mkdir(parents=True, exist_ok=True)
        (path / filename).write_text(text, encoding="utf-8")
        print(f"wrote {path / filename}")
    else:
        sys.stdout.write(text)


def _cmd_validate(args) -> int:
    mode = _mode(args)
    log = parse_ocel(_read(args.log, "log"), strict=False)
    violations = validate_log(log)
    if not violations:
        print(f"ok: {len(log.events)} events, {len(log.objects)} objects, no violations")
        return 0
    for v in violations:
        prefix = "warning" if mode is Mode.LENIENT else "violation"
        print(f"{prefix}: {v}")
    if mode is Mode.LENIENT:
        print(f"ok (lenient): {len(violations)} violation(s) demoted to warnings")
        return 0
    return 1


def _cmd_assess(args) -> int:
    stage = "load-log"
    try:
        mode = _mode(args)
        fu = _parse_fu(args.fu) if getattr(args, "fu", None) else None
        log = _load_log(args, mode)
        stage = "parse-annotations"
        bundle = _load_annotations(args)
        stage = "pipeline"
        result = run_pipeline(log, bundle, mode, fu)
        stage = "write-outputs"
        written = write_outputs(result, args.out or ".")
        for name in sorted(written):
            print(f"wrote {written[name]}")
        return 0
    except SusmineError as exc:
        print(f"error [{stage}]: {exc}", file=sys.stderr)
        return 1


def _cmd_inventory(args) -> int:
    mode = _mode(args)
    fu = _parse_fu(args.fu) if getattr(args, "fu", None) else None
    log, bundle = _load_bundle(args, mode)
    result = run_pipeline(log, bundle, mode, fu)
    # with a functional unit, the per-FU process inventory is the artifact
    text = inventory_to_csv(result.fu_inventory if fu else result.inventory)
    _emit(text, args.out, "inventory.csv")
    return 0


def _cmd_allocate(args) -> int:
    mode = _mode(args)
    log, bundle = _load_bundle(args, mode)
    result = run_pipeline(log, bundle, mode)
    _emit(ledger_csv(result), args.out, "ledger.csv")
    for warning in result.ledger.warnings:
        print(f"warning: {warning}", file=sys.stderr)
    return 0


def _cmd_dfg(args) -> int:
    mode = _mode(args)
    if getattr(args, "annotations", None):
        log, bundle = _load_bundle(args, mode)
        result = run_pipeline(log, bundle, mode)
        dot = emit_dot(result.dfg)
    else:
        dot = emit_dot(build_dfg(_load_log(args, mode)))
    _emit(dot, args.out, "dfg.dot")
    return 0


def _cmd_audit(args) -> int:
    if args.literature:
        matrix = load_literature_matrix()
    else:
        mode = _mode(args)
        log, bundle = _load_bundle(args, mode)
        result = run_pipeline(log, bundle, mode)
        name = Path(args.annotations).stem if args.annotations else "bundle"
        matrix = CapabilityMatrix([(name, result.audit_row)])
    sys.stdout.write(matrix.render_text())
    if args.out:
        _emit(matrix.to_json() + "\n", args.out, "audit.json")
    return 0


def _cmd_generate(args) -> int:
    if args.seed is None:
        raise ValueError("generate requires --seed")
    try:
        seed = int(args.seed)
    except ValueError:
        raise ValueError(f"--seed must be an integer, got '{args.seed}'") from None
    size = int(args.size) if args.size is not None else 40
    bundle = generate_bundle(seed, size)
    outdir = Path(args.out or ".")
    outdir.mkdir(parents=True, exist_ok=True)
    (outdir / "log.json").write_text(bundle.log_json, encoding="utf-8")
    (outdir / "annotations.json").write_text(bundle.annotations_json, encoding="utf-8")
    (outdir / "ground_truth.json").write_text(bundle.ground_truth_json(), encoding="utf-8")
    for name in ("log.json", "annotations.json", "ground_truth.json"):
        print(f"wrote {outdir / name}")
    return 0


_COMMANDS = {
    "validate": _cmd_validate,
    "assess": _cmd_assess,
    "inventory": _cmd_inventory,
    "allocate": _cmd_allocate,
    "dfg": _cmd_dfg,
    "audit": _cmd_audit,
    "generate": _cmd_generate,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args = _apply_config(args)
        return _COMMANDS[args.command](args)
    except json.JSONDecodeError as exc:
        print(f"error: malformed JSON: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except SusmineError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
