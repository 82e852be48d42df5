"""Batch command-line front-end: validate, physical, sql, fmt.

Standard output carries only the requested artifact (JSON, SQL, or DSL);
diagnostics go to standard error. Exit codes: 0 success, 1 validation or
content failure, 2 usage error, 3 I/O failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .dsl import DslParseError, DslSource, emit_dsl, parse_dsl
from .er_model import Diagram, validate
from .model_io import ProjectDocument, ProjectParseError, emit_project, parse_project
from .sql_emit import Dialect, EmitError, emit_sql
from .transform import GenerationMode, model_to_obj, transform


class _UsageError(Exception):
    pass


class _IoError(Exception):
    pass


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="onda",
        description="Validate ER diagrams, lower them to relational models, and generate SQL.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p: argparse.ArgumentParser) -> None:
        p.add_argument("input", help="input file (.erd or .json), or - for standard input")
        p.add_argument(
            "--mode",
            choices=[m.value for m in GenerationMode],
            default=GenerationMode.NORMAL.value,
            help="generation mode (default: normal)",
        )
        p.add_argument("--format", choices=["dsl", "json"], help="override input format detection")
        p.add_argument("--out", metavar="PATH", help="write the artifact to PATH instead of stdout")

    add_common(sub.add_parser("validate", help="report modeling problems"))
    add_common(sub.add_parser("physical", help="print the lowered physical model as JSON"))
    sql = sub.add_parser("sql", help="print generated DDL")
    add_common(sql)
    sql.add_argument(
        "--dialect",
        choices=[d.value for d in Dialect],
        required=True,
        help="target database engine",
    )
    sql.add_argument(
        "--drop-preamble",
        action="store_true",
        help="prepend DROP TABLE IF EXISTS statements where the dialect supports it",
    )
    add_common(sub.add_parser("fmt", help="print the diagram as canonical DSL"))
    return parser


def _detect_format(args: argparse.Namespace) -> str:
    if args.format:
        return args.format
    if args.input == "-":
        raise _UsageError("reading from standard input requires --format")
    suffix = Path(args.input).suffix.lower()
    if suffix == ".erd":
        return "dsl"
    if suffix == ".json":
        return "json"
    raise _UsageError(f"cannot infer format from {args.input!r}; pass --format dsl|json")


def _read_input(args: argparse.Namespace) -> bytes:
    if args.input == "-":
        return sys.stdin.buffer.read()
    path = Path(args.input)
    if not path.is_file():
        raise _UsageError(f"no such file: {args.input}")
    try:
        return path.read_bytes()
    except OSError as exc:
        raise _IoError(f"cannot read {args.input}: {exc}") from None


def _load_diagram(args: argparse.Namespace) -> Diagram:
    raw = _read_input(args)
    if _detect_format(args) == "dsl":
        return parse_dsl(DslSource(text=raw.decode("utf-8"), origin=args.input))
    return parse_project(raw).diagram


def _write_artifact(args: argparse.Namespace, text: str) -> None:
    if args.out:
        try:
            Path(args.out).write_text(text, encoding="utf-8")
        except OSError as exc:
            raise _IoError(f"cannot write {args.out}: {exc}") from None
    else:
        sys.stdout.write(text)


def _report_findings(report) -> None:
    for finding in report.findings:
        path = "/".join(finding.element_path)
        print(f"{finding.severity.value} {finding.code} {path}: {finding.message}", file=sys.stderr)


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    mode = GenerationMode(args.mode)

    try:
        diagram = _load_diagram(args)
    except _UsageError as exc:
        print(f"onda: {exc}", file=sys.stderr)
        return 2
    except _IoError as exc:
        print(f"onda: {exc}", file=sys.stderr)
        return 3
    except (DslParseError, ProjectParseError, UnicodeDecodeError) as exc:
        print(f"ERROR PARSE -: {exc}", file=sys.stderr)
        return 1

    try:
        if args.command == "validate":
            report = validate(diagram, mode)
            _report_findings(report)
            return 0 if report.is_valid else 1

        if args.command == "fmt":
            _write_artifact(args, emit_dsl(diagram).text)
            return 0

        report = validate(diagram, mode)
        if not report.is_valid:
            _report_findings(report)
            return 1

        model = transform(diagram, mode)
        if args.command == "physical":
            _write_artifact(args, json.dumps(model_to_obj(model), indent=2) + "\n")
            return 0

        # sql
        try:
            script = emit_sql(model, Dialect(args.dialect), drop_preamble=args.drop_preamble)
        except EmitError as exc:
            print(f"ERROR {exc.code} -: {exc}", file=sys.stderr)
            return 1
        for warning in script.warnings:
            print(f"WARNING TRUNCATED -: {warning}", file=sys.stderr)
        _write_artifact(args, script.rendered)
        return 0
    except _IoError as exc:
        print(f"onda: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
