"""Test the verification suites and their runner."""
import math
import time

import pytest

import carverify.algebra as algebra
import carverify.report as report
import carverify.schemas as schemas
import carverify.suites as suites
from carverify import config
from carverify.space import ConjSpace

import helpers


def load_config(**kwargs: object) -> dict:
    return dict(schemas.SuiteConfig().load(kwargs))


def test_every_suite_has_checks() -> None:
    for name in config.SUITE_NAMES:
        assert suites.CHECKS[name]
        names = [spec.name for spec in suites.CHECKS[name]]
        assert len(names) == len(set(names))


def test_lookup_check() -> None:
    spec = suites.lookup_check("proposition", "sigma image = even subalgebra")
    assert spec.suite == "proposition"
    with pytest.raises(KeyError, match=r"No check `missing` in suite `oracle`"):
        suites.lookup_check("oracle", "missing")


def test_sweeps() -> None:
    assert suites.sweep(1, 6)(4) == [1, 2, 3, 4]
    assert suites.sweep(1, 6)(8) == [1, 2, 3, 4, 5, 6]
    assert suites.even_sweep(6)(1) == []
    assert suites.even_sweep(6)(2) == [2]
    assert suites.even_sweep(6)(5) == [2, 4]
    assert suites.even_sweep(6)(12) == [2, 4, 6]


def test_plan_order() -> None:
    tasks = suites.plan(load_config(dim_in=2, suites=["remark3", "proposition"]))
    assert tasks[0] == ("proposition", suites.CHECKS["proposition"][0].name, 1)
    assert [task[0] for task in tasks] == sorted((task[0] for task in tasks), key=config.SUITE_NAMES.index)
    assert ("proposition", "sigma image = even subalgebra", 2) in tasks
    assert all(task[2] <= 2 for task in tasks)


def test_sigma_image_dim_one() -> None:
    result = suites.run_suite(load_config(dim_in=1, trials=5, suites=["proposition"]))
    (check,) = [check for check in result["checks"] if check["name"] == "sigma image = even subalgebra"]
    assert check["passed"]
    assert check["dim"] == 1
    assert check["max_error"] <= 1e-12


@pytest.mark.parametrize("suite", config.SUITE_NAMES)
def test_suite_passes(suite: str) -> None:
    result = suites.run_suite(load_config(dim_in=3, trials=4, seed=7, suites=[suite]))
    failed = [check for check in result["checks"] if not check["passed"]]
    assert not failed
    assert result["summary"]["total"] == len(result["checks"]) > 0
    assert report.exit_status(result) == 0
    for check in result["checks"]:
        assert check["max_error"] <= 1e-10
        assert "witness" not in check and "error" not in check


def test_zero_tolerance_fails() -> None:
    result = suites.run_suite(load_config(dim_in=2, trials=3, tol=0.0, suites=["proposition"]))
    failed = [check for check in result["checks"] if not check["passed"]]
    assert failed
    assert all(check["max_error"] > 0 for check in failed)
    assert result["summary"]["failed"] == len(failed)
    assert report.exit_status(result) == 1


def test_failed_check_carries_witness() -> None:
    result = suites.run_suite(load_config(dim_in=2, trials=2, tol=0.0, suites=["proposition"]))
    (check,) = [
        check
        for check in result["checks"]
        if check["name"] == "sigma is a unital *-homomorphism" and check["dim"] == 2
    ]
    assert not check["passed"]
    witness = algebra.element_from_json(check["witness"])
    assert witness.dim == 3
    assert algebra.distance(witness, algebra.zero(witness.space)) == pytest.approx(check["max_error"])


def test_run_is_deterministic() -> None:
    cfg = load_config(dim_in=2, trials=3, seed=123, suites=["remark1", "remark3"])
    first, second = suites.run_suite(cfg), suites.run_suite(cfg)
    assert helpers.strip_timings(first) == helpers.strip_timings(second)


def test_parallel_run_matches_serial() -> None:
    cfg = load_config(dim_in=2, trials=2, suites=["proposition", "oracle"])
    serial = suites.run_suite(cfg)
    parallel = suites.run_suite(dict(cfg, jobs=2))
    assert helpers.strip_timings(serial) == helpers.strip_timings(parallel)


def test_trial_independence() -> None:
    # results of a trial depend only on its own derived seed
    spec = suites.lookup_check("remark3", "phi_V is a left inverse of sigma_V")
    seed = 99

    def run(t: int) -> float:
        return spec.trial(2, suites.seeds.derive_seed(seed, "remark3", spec.name, 2, t), t)[0]

    forward = [run(t) for t in range(4)]
    backward = [run(t) for t in reversed(range(4))]
    assert forward == backward[::-1]


def test_exception_in_trial(monkeypatch: pytest.MonkeyPatch) -> None:
    def explode(m: int, seed: int, trial: int) -> suites.TrialResult:
        raise RuntimeError("boom")

    broken = suites.CheckSpec("remark1", "explodes", explode, suites.sweep(1, 1))
    monkeypatch.setitem(suites.CHECKS, "remark1", [broken])
    result = suites.run_suite(load_config(dim_in=3, trials=2, suites=["remark1"]))
    (check,) = result["checks"]
    assert not check["passed"]
    assert check["max_error"] is None
    assert "boom" in check["error"]
    assert report.exit_status(result) == 1


def test_non_finite_error(monkeypatch: pytest.MonkeyPatch) -> None:
    def not_a_number(m: int, seed: int, trial: int) -> suites.TrialResult:
        return (math.nan if trial == 1 else 0.0), algebra.one(ConjSpace(m))

    spec = suites.CheckSpec("oracle", "nan", not_a_number, suites.sweep(1, 1))
    monkeypatch.setitem(suites.CHECKS, "oracle", [spec])
    (check,) = suites.run_suite(load_config(dim_in=1, trials=3, suites=["oracle"]))["checks"]
    assert not check["passed"]
    assert check["max_error"] is None
    assert check["witness"] == {"dim": 1, "terms": [{"mask": 0, "re": 1.0, "im": 0.0}]}


def test_infinite_coefficient_in_trial(monkeypatch: pytest.MonkeyPatch) -> None:
    def overflow(m: int, seed: int, trial: int) -> suites.TrialResult:
        return math.inf, algebra.AlgElement(ConjSpace(m), {0: math.inf})

    spec = suites.CheckSpec("oracle", "overflow", overflow, suites.sweep(1, 1))
    monkeypatch.setitem(suites.CHECKS, "oracle", [spec])
    result = suites.run_suite(load_config(dim_in=1, trials=2, suites=["oracle"]))
    (check,) = result["checks"]
    assert not check["passed"]
    assert check["max_error"] is None
    assert "not finite" in check["error"]
    assert "witness" not in check
    assert report.exit_status(result) == 1


def test_remark2_needs_even_dimension() -> None:
    assert suites.plan(load_config(dim_in=1, suites=["remark2"])) == []


@pytest.mark.slow
def test_default_configuration_passes() -> None:
    result = suites.run_suite(load_config())
    assert result["summary"]["failed"] == 0


@pytest.mark.slow
def test_acceptance_dimensions_pass() -> None:
    result = suites.run_suite(load_config(dim_in=8, trials=10, jobs=4))
    assert [check for check in result["checks"] if not check["passed"]] == []


@pytest.mark.slow
def test_proposition_suite_runtime() -> None:
    start = time.perf_counter()
    result = suites.run_suite(load_config(dim_in=8, trials=100, suites=["proposition"]))
    elapsed = time.perf_counter() - start
    assert result["summary"]["failed"] == 0
    assert elapsed <= 30
