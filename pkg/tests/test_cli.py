"""Tests for the command-line interface."""

import json

import pytest
from click.testing import CliRunner

from cubex import dsl
from cubex.cli import main

from .conftest import FIXTURES


@pytest.fixture
def runner():
    return CliRunner()


def _fixture(name: str) -> str:
    return str(FIXTURES / name)


def _records(output: str) -> list[dict]:
    return [json.loads(line) for line in output.splitlines() if line.strip()]


def test_check_cube_reports_the_failing_subset(runner):
    result = runner.invoke(main, ["--report", "structured", "check-cube", _fixture("square-bad.cx")])
    assert result.exit_code == 1
    (record,) = _records(result.stdout)
    assert record["theorem"] == "check-cube"
    assert record["instance"] == "S"
    assert record["verdict"] == "violated"
    assert record["witness"] == {"failing": ["{0,1}"]}
    assert record["detail"]["inductive"] is False
    assert "wall_time" not in record


def test_check_cube_accepts_extensions(runner):
    result = runner.invoke(main, ["check-cube", _fixture("square-pullback.cx")])
    assert result.exit_code == 0
    assert result.stdout.startswith("holds")


def test_check_cube_with_another_class(runner):
    result = runner.invoke(main, ["check-cube", "--class", "all", _fixture("square-bad.cx")])
    assert result.exit_code == 0


def test_check_cube_unknown_name(runner):
    result = runner.invoke(main, ["check-cube", "--name", "nope", _fixture("square-bad.cx")])
    assert result.exit_code == 2
    assert json.loads(result.stderr)["error"] == "no cubes named 'nope'"


def test_parse_errors_exit_with_status_two(runner):
    result = runner.invoke(main, ["check-cube", str(FIXTURES / "invalid" / "unknown-reference.cx")])
    assert result.exit_code == 2
    error = json.loads(result.stderr)
    assert error["type"] == "CubexParseError"
    assert error["reason"] == "reference"
    assert error["line"] == 3


@pytest.mark.parametrize("name", ["bad-escape.cx", "not-utf8.cx"])
def test_unreadable_text_exits_with_status_two(runner, name):
    result = runner.invoke(main, ["parse", str(FIXTURES / "invalid" / name)])
    assert result.exit_code == 2
    error = json.loads(result.stderr)
    assert error["type"] == "CubexParseError"
    assert error["reason"] == "syntax"
    assert error["line"] == 2


def test_missing_file(runner):
    result = runner.invoke(main, ["parse", "does-not-exist.cx"])
    assert result.exit_code == 2
    assert "error" in json.loads(result.stderr)


def test_tv_generate_then_check_resolution(runner, tmp_path):
    out = tmp_path / "tv.cx"
    result = runner.invoke(main, ["tv-generate", _fixture("three.cx"), "--level", "2", "-o", str(out)])
    assert result.exit_code == 0
    doc = dsl.load(out)
    assert list(doc.simplicials) == ["tv_X"]
    result = runner.invoke(main, ["--report", "structured", "check-resolution", str(out)])
    assert result.exit_code == 0
    (record,) = _records(result.stdout)
    assert record["verdict"] == "holds"
    assert record["detail"]["exact"] == [True, True, True]


def test_tv_generate_to_stdout(runner):
    result = runner.invoke(main, ["tv-generate", _fixture("z2.cx"), "--level", "1", "--chooser", "base-square"])
    assert result.exit_code == 0
    assert result.stdout.startswith("cubex-format 1\n")
    assert "chooser=base-square" in result.stdout


def test_check_resolution_finds_the_inexact_level(runner):
    result = runner.invoke(main, ["--report", "structured", "check-resolution", _fixture("mutated-resolution.cx")])
    assert result.exit_code == 1
    (record,) = _records(result.stdout)
    assert record["witness"] == {"first_inexact_level": 1}


def test_check_resolution_skips_unaugmented_objects(runner):
    result = runner.invoke(main, ["check-resolution", _fixture("nerve-ordinal2.cx")])
    assert result.exit_code == 0
    assert result.stdout.startswith("skipped")


def test_check_kan(runner):
    result = runner.invoke(main, ["--report", "structured", "check-kan", _fixture("nerve-ordinal2.cx")])
    assert result.exit_code == 1
    (record,) = _records(result.stdout)
    assert record["witness"] == {"horns": [[2, 0], [2, 2]]}
    result = runner.invoke(main, ["check-kan", "--level", "1", _fixture("nerve-ordinal2.cx")])
    assert result.exit_code == 0


def test_audit_class(runner):
    result = runner.invoke(main, ["--report", "structured", "audit-class", "--max-size", "2", "--axiom", "E1", "--axiom", "E4"])
    assert result.exit_code == 0
    records = _records(result.stdout)
    assert [r["instance"] for r in records] == ["sets<=2/surjections/E1", "sets<=2/surjections/E4"]
    assert all(r["verdict"] == "holds" for r in records)


def test_audit_class_reports_violations(runner):
    result = runner.invoke(main, ["audit-class", "--class", "isomorphisms", "--axiom", "E4"])
    assert result.exit_code == 1
    assert "witness" in result.stdout


def test_verify_quick(runner):
    result = runner.invoke(main, ["--report", "structured", "verify", "--id", "codomain-agreement", "--seed", "7", "--quick"])
    assert result.exit_code == 0
    records = _records(result.stdout)
    assert {r["theorem"] for r in records} == {"codomain-agreement"}
    assert all("wall_time" not in r for r in records)


def test_seeded_verify_is_byte_identical(runner):
    args = ["--report", "structured", "verify", "--id", "codomain-agreement", "--id", "kernel-pair-lemma", "--seed", "11", "--quick"]
    first = runner.invoke(main, args)
    second = runner.invoke(main, args)
    assert first.exit_code == second.exit_code == 0
    assert first.stdout
    assert first.stdout == second.stdout


def test_verify_with_timing(runner):
    result = runner.invoke(
        main, ["--timing", "--report", "structured", "verify", "--id", "truncation-square", "--quick"]
    )
    assert result.exit_code == 0
    assert all("wall_time" in r for r in _records(result.stdout))


@pytest.mark.slow
def test_verify_dip_equivalence(runner):
    result = runner.invoke(main, ["verify", "--id", "dip-equivalence", "--seed", "7", "--quick"])
    assert result.exit_code == 0


def test_search_counterexample(runner):
    result = runner.invoke(main, ["--report", "structured", "--pretty", "search-counterexample", "--max-size", "3"])
    assert result.exit_code == 1
    record = json.loads(result.stdout)
    assert record["verdict"] == "violated"
    assert record["witness"]["comparison_image"] == 3


def test_search_counterexample_in_groups(runner):
    result = runner.invoke(main, ["search-counterexample", "--kind", "groups", "--max-size", "2"])
    assert result.exit_code == 0
    assert result.stdout.startswith("none-found-in-bounds")
    result = runner.invoke(main, ["search-counterexample", "--kind", "groups", "--max-size", "9"])
    assert result.exit_code == 2


def test_parse_prints_the_canonical_form(runner):
    result = runner.invoke(main, ["parse", _fixture("comments.cx")])
    assert result.exit_code == 0
    assert result.stdout == 'cubex-format 1\nobject X = {"0", "1"}\nmorphism swap : X -> X = [1, 0]\n'


def test_list_theorems(runner):
    result = runner.invoke(main, ["list-theorems"])
    assert result.exit_code == 0
    assert len(result.stdout.splitlines()) == 14
    result = runner.invoke(main, ["--report", "structured", "list-theorems"])
    ids = [r["id"] for r in _records(result.stdout)]
    assert "maltsev-search" in ids


def test_caps_option(runner):
    result = runner.invoke(main, ["--caps", "cube_dim_cap=1", "check-cube", _fixture("square-bad.cx")])
    assert result.exit_code == 2
    assert "cube_dim_cap=1" in json.loads(result.stderr)["error"]


def test_bad_caps_option(runner):
    result = runner.invoke(main, ["--caps", "nope=1", "list-theorems"])
    assert result.exit_code == 2
    assert "Unknown cap setting" in json.loads(result.stderr)["error"]
