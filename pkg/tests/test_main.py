"""Test the command-line interface."""
import json
import math
import pathlib

import pytest

import carverify.__main__ as cli
import carverify.algebra as algebra
import carverify.suites as suites
from carverify.space import ConjSpace


def test_run_json(capsys: pytest.CaptureFixture) -> None:
    status = cli.main(["run", "--dim-in", "2", "--trials", "2", "--suite", "proposition,remark2"])
    assert status == 0
    document = json.loads(capsys.readouterr().out)
    assert document["summary"]["failed"] == 0
    assert {check["suite"] for check in document["checks"]} == {"proposition", "remark2"}


def test_run_text(capsys: pytest.CaptureFixture) -> None:
    status = cli.main(["run", "--dim-in", "1", "--trials", "2", "--suite", "remark3", "--format", "text", "-v"])
    assert status == 0
    lines = capsys.readouterr().out.strip().split("\n")
    assert lines and all(line.startswith("PASS remark3/") for line in lines)


def test_run_zero_tolerance(capsys: pytest.CaptureFixture) -> None:
    assert cli.main(["run", "--dim-in", "2", "--trials", "2", "--suite", "proposition", "--tol", "0"]) == 1
    assert json.loads(capsys.readouterr().out)["summary"]["failed"] > 0


def test_run_out(tmp_path: pathlib.Path, capsys: pytest.CaptureFixture) -> None:
    out = tmp_path / "report.json"
    assert cli.main(["run", "--dim-in", "1", "--trials", "1", "--suite", "oracle", "--out", str(out)]) == 0
    assert capsys.readouterr().out == ""
    assert json.loads(out.read_text())["summary"]["total"] > 0


@pytest.mark.parametrize(
    "argv",
    [
        ["run", "--dim-in", "13"],
        ["run", "--suite", "remark5"],
        ["run", "--trials", "0"],
        ["run", "--dim-in", "two"],
        ["bench", "--dim", "17", "--density", "0.5", "--reps", "1"],
        ["bench", "--dim", "4", "--density", "0", "--reps", "1"],
        ["bench", "--dim", "4"],
        [],
    ],
)
def test_usage_errors(argv: list, capsys: pytest.CaptureFixture) -> None:
    assert cli.main(argv) == cli.EXIT_USAGE
    assert capsys.readouterr().err


def test_large_dim_without_matrix_suites(capsys: pytest.CaptureFixture) -> None:
    # the symbolic suites alone are not bound by the matrix cap
    assert cli.main(["run", "--dim-in", "13", "--trials", "1", "--suite", "remark3"]) == 0
    assert json.loads(capsys.readouterr().out)["summary"]["failed"] == 0


def test_bench(capsys: pytest.CaptureFixture) -> None:
    assert cli.main(["bench", "--dim", "4", "--density", "0.5", "--reps", "3", "--format", "text"]) == 0
    (line,) = capsys.readouterr().out.strip().split("\n")
    assert line.startswith("PASS bench/multiply (auto kernel) dim=4")
    assert "median_ns=" in line


def test_run_failure_with_non_finite_result(monkeypatch: pytest.MonkeyPatch, capsys: pytest.CaptureFixture) -> None:
    def overflow(m: int, seed: int, trial: int) -> suites.TrialResult:
        return math.inf, algebra.AlgElement(ConjSpace(m), {0: math.inf})

    spec = suites.CheckSpec("oracle", "overflow", overflow, suites.sweep(1, 1))
    monkeypatch.setitem(suites.CHECKS, "oracle", [spec])
    assert cli.main(["run", "--dim-in", "1", "--trials", "1", "--suite", "oracle"]) == 1
    (check,) = json.loads(capsys.readouterr().out)["checks"]
    assert check["name"] == "overflow"
    assert not check["passed"]
    assert check["max_error"] is None
