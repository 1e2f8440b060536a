"""Command line entry point: verify, suite, generate, explain."""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .errors import NCMoritaError, ValidationError
from .linalg import Tolerance
from .runner import (Report, builtin_suite, default_tolerance, generate_document, run_suite,
                     run_verification, specs_from_config, summarize)
from .hilbert import DEFAULT_SEED
from .spec_io import dump_json, load_example

EXIT_OK, EXIT_MISMATCH, EXIT_INPUT = 0, 1, 2


def _tolerance(value: float | None) -> Tolerance:
    if value is None:
        return default_tolerance()
    try:
        return Tolerance.from_scale(value)
    except ValueError as exc:
        raise ValidationError(f"bad --tol: {exc}") from None


def _write_report(report: Report, path: str | None) -> None:
    text = dump_json(report.to_dict())
    if path:
        Path(path).write_text(text, encoding="utf-8")


def _print_records(records) -> None:
    for rec in records:
        verdict = rec.get("verdict") or rec["status"]
        mark = "ok" if rec["matched"] else "MISMATCH"
        extra = f"  ({rec['message']})" if rec.get("message") else ""
        print(f"{rec['name']:<32} {verdict:<9} {mark}{extra}")


def cmd_verify(args) -> int:
    tol = _tolerance(args.tol)
    spec = load_example(args.file)
    rec = run_verification(spec, tol, args.seed)
    report = Report([rec], summarize([rec]), args.seed, tol.to_dict())
    _print_records([rec])
    _write_report(report, args.report)
    return report.exit_code()


def _collect(args) -> list:
    specs = []
    if args.builtin:
        specs.extend(builtin_suite())
    if args.dir:
        root = Path(args.dir)
        if not root.is_dir():
            raise ValidationError("not a directory", "--dir", str(root))
        specs.extend(load_example(p) for p in sorted(root.glob("*.json")))
    if args.config:
        path = Path(args.config)
        try:
            doc = json.loads(path.read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise ValidationError(f"cannot read config: {exc}", "", str(path)) from None
        specs.extend(specs_from_config(doc, str(path)))
    return specs


def cmd_suite(args) -> int:
    tol = _tolerance(args.tol)
    report = run_suite(_collect(args), tol, args.seed, jobs=args.jobs)
    _print_records(report.examples)
    s = report.summary
    print(f"{s['matched']}/{s['total']} matched, {s['passed']} pass, {s['failed']} fail, "
          f"{s['errors']} rejected or errored")
    _write_report(report, args.report)
    return report.exit_code()


def cmd_generate(args) -> int:
    try:
        doc = generate_document(args.kind, args.group, args.size)
    except NCMoritaError as exc:
        raise ValidationError(str(exc), "--size") from None
    Path(args.out).write_text(dump_json(doc), encoding="utf-8")
    print(f"wrote {args.out}: {doc['name']} expected={doc['expected']}")
    return EXIT_OK


def _flatten(prefix: str, obj, rows: list) -> None:
    if isinstance(obj, dict):
        for k, v in obj.items():
            _flatten(f"{prefix}.{k}" if prefix else k, v, rows)
    elif isinstance(obj, (int, float)) and not isinstance(obj, bool):
        rows.append((prefix, obj))
    elif isinstance(obj, bool) or isinstance(obj, str) or obj is None:
        rows.append((prefix, obj))


def cmd_explain(args) -> int:
    try:
        doc = json.loads(Path(args.report).read_text(encoding="utf-8"))
        report = Report.from_dict(doc)
    except (OSError, json.JSONDecodeError, KeyError) as exc:
        raise ValidationError(f"cannot read report: {exc}", "", args.report) from None
    matches = [e for e in report.examples if e["name"] == args.example]
    if not matches:
        names = ", ".join(e["name"] for e in report.examples)
        raise ValidationError(f"no example {args.example!r}; have: {names}", "--example", args.report)
    rec = matches[0]
    print(f"{rec['name']}  kind={rec['kind']}  group={rec['group']}  status={rec['status']}  "
          f"verdict={rec.get('verdict')}  matched={rec['matched']}")
    if rec.get("message"):
        print(f"message: {rec['message']}")
    rows: list = []
    for section in ("certificate", "crossed_product_contract", "dims", "expected", "metadata"):
        if rec.get(section) is not None:
            _flatten(section, rec[section], rows)
    width = max((len(k) for k, _ in rows), default=10)
    for key, val in rows:
        shown = f"{val:.3e}" if isinstance(val, float) else str(val)
        print(f"  {key:<{width}}  {shown}")
    cert = rec.get("certificate") or {}
    for reason in cert.get("reasons", []):
        print(f"  reason: {reason}")
    for note in cert.get("notes", []):
        print(f"  note: {note}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ncmorita", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="verify one example file")
    v.add_argument("file")
    v.add_argument("--tol", type=float, default=None)
    v.add_argument("--seed", type=int, default=DEFAULT_SEED)
    v.add_argument("--report")
    v.set_defaults(func=cmd_verify)

    s = sub.add_parser("suite", help="verify many examples")
    s.add_argument("--builtin", action="store_true")
    s.add_argument("--dir")
    s.add_argument("--config", help="JSON suite config with examples and generation ranges")
    s.add_argument("--jobs", type=int, default=1)
    s.add_argument("--tol", type=float, default=None)
    s.add_argument("--seed", type=int, default=DEFAULT_SEED)
    s.add_argument("--report")
    s.set_defaults(func=cmd_suite)

    g = sub.add_parser("generate", help="write a generated example with known ground truth")
    g.add_argument("--kind", required=True, choices=["set-action", "inner-matrix"])
    g.add_argument("--group", required=True, choices=["C2", "C3", "C4", "V4", "S3"])
    g.add_argument("--size", required=True, type=int)
    g.add_argument("--out", required=True)
    g.set_defaults(func=cmd_generate)

    e = sub.add_parser("explain", help="print the residual table of one example in a report")
    e.add_argument("report")
    e.add_argument("--example", required=True)
    e.set_defaults(func=cmd_explain)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except NCMoritaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
