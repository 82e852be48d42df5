"""Command-line front-end behavior: artifacts on stdout, diagnostics on stderr."""

from __future__ import annotations

import json
import subprocess
import sys
from pathlib import Path

import pytest

from onda.cli import main

from conftest import DATA_DIR


def run_cli(args, stdin: bytes = b"") -> subprocess.CompletedProcess:
    return subprocess.run(
        [sys.executable, "-m", "onda.cli", *args],
        input=stdin,
        capture_output=True,
        cwd=str(Path(__file__).parent.parent),
    )


UNIVERSITY = str(DATA_DIR / "university.erd")
UNIVERSITY_JSON = str(DATA_DIR / "university.json")


def test_validate_university_exits_zero():
    result = run_cli(["validate", UNIVERSITY])
    assert result.returncode == 0
    assert result.stderr == b""
    assert result.stdout == b""


def test_sql_contains_association_table():
    result = run_cli(["sql", UNIVERSITY, "--dialect", "postgresql", "--mode", "normal"])
    assert result.returncode == 0
    assert b"CREATE TABLE professor_course" in result.stdout
    assert result.stderr == b""


def test_unknown_dialect_is_usage_error():
    result = run_cli(["sql", UNIVERSITY, "--dialect", "db2"])
    assert result.returncode == 2
    message = result.stderr.decode()
    for dialect in ("postgresql", "oracle", "mysql", "mariadb", "sqlite"):
        assert dialect in message


def test_validation_failure_reports_findings(tmp_path):
    bad = tmp_path / "bad.erd"
    bad.write_text("entity Course { title: varchar(10) }\n")
    result = run_cli(["validate", str(bad)])
    assert result.returncode == 1
    assert b"ERROR MISSING_IDENTIFIER course:" in result.stderr
    assert result.stdout == b""


def test_physical_outputs_model_json():
    result = run_cli(["physical", UNIVERSITY])
    assert result.returncode == 0
    model = json.loads(result.stdout)
    assert any(t["name"] == "professor_course" for t in model["tables"])


def test_simplified_mode_flag():
    result = run_cli(["physical", UNIVERSITY, "--mode", "simplified"])
    model = json.loads(result.stdout)
    assert not any(t["name"] == "professor_course" for t in model["tables"])


def test_fmt_is_canonical_fixpoint():
    once = run_cli(["fmt", UNIVERSITY])
    assert once.returncode == 0
    assert once.stdout.decode() == Path(UNIVERSITY).read_text()


def test_fmt_converts_json_to_dsl():
    result = run_cli(["fmt", UNIVERSITY_JSON])
    assert result.returncode == 0
    assert result.stdout.decode() == Path(UNIVERSITY).read_text()


def test_stdin_requires_format():
    result = run_cli(["validate", "-"], stdin=b"entity A { id: integer pk }")
    assert result.returncode == 2
    result = run_cli(["validate", "-", "--format", "dsl"], stdin=b"entity A { id: integer pk }")
    assert result.returncode == 0


def test_missing_file_is_usage_error():
    result = run_cli(["validate", "nope.erd"])
    assert result.returncode == 2
    assert b"no such file" in result.stderr


def test_unknown_extension_needs_format(tmp_path):
    path = tmp_path / "diagram.txt"
    path.write_text("entity A { id: integer pk }")
    assert run_cli(["validate", str(path)]).returncode == 2
    assert run_cli(["validate", str(path), "--format", "dsl"]).returncode == 0


def test_parse_error_exits_one(tmp_path):
    path = tmp_path / "broken.erd"
    path.write_text("entity A {")
    result = run_cli(["validate", str(path)])
    assert result.returncode == 1
    assert b"PARSE" in result.stderr


def test_out_writes_file(tmp_path):
    target = tmp_path / "schema.sql"
    result = run_cli(["sql", UNIVERSITY, "--dialect", "sqlite", "--out", str(target)])
    assert result.returncode == 0
    assert result.stdout == b""
    assert "CREATE TABLE" in target.read_text()


def test_drop_preamble_flag():
    result = run_cli(["sql", UNIVERSITY, "--dialect", "postgresql", "--drop-preamble"])
    assert result.stdout.decode().startswith("DROP TABLE IF EXISTS")


def test_identical_invocations_identical_bytes():
    first = run_cli(["sql", UNIVERSITY, "--dialect", "oracle"])
    second = run_cli(["sql", UNIVERSITY, "--dialect", "oracle"])
    assert first.stdout == second.stdout
    assert first.returncode == second.returncode == 0


def test_main_callable_directly(capsys):
    code = main(["validate", UNIVERSITY])
    assert code == 0
    captured = capsys.readouterr()
    assert captured.out == "" and captured.err == ""
