"""Test Schema validation."""
import pytest
from marshmallow.exceptions import ValidationError

import carverify.schemas as schemas
from carverify import config


def test_suite_config_defaults() -> None:
    cfg = schemas.SuiteConfig().load({})
    assert cfg["dim_in"] == 4
    assert cfg["trials"] == 100
    assert cfg["seed"] == 42
    assert cfg["tol"] == 1e-10
    assert cfg["format"] == "json"
    assert cfg["suites"] == list(config.SUITE_NAMES)
    assert cfg["jobs"] == 1
    assert cfg["out"] is None


@pytest.mark.parametrize(
    "payload",
    [
        {"dim_in": 0},
        {"trials": 0},
        {"seed": -1},
        {"seed": 2**64},
        {"tol": -1e-3},
        {"format": "yaml"},
        {"suites": []},
        {"suites": ["proposition", "remark5"]},
        {"jobs": 0},
        {"dim_in": 4, "unknown": 1},
    ],
)
def test_suite_config_invalid(payload: dict) -> None:
    with pytest.raises(ValidationError):
        schemas.SuiteConfig().load(payload)


def test_suite_config_matrix_cap() -> None:
    with pytest.raises(ValidationError, match=r"need dim_in <= 12"):
        schemas.SuiteConfig().load({"dim_in": 13})
    with pytest.raises(ValidationError):
        schemas.SuiteConfig().load({"dim_in": 13, "suites": ["proposition", "oracle"]})
    cfg = schemas.SuiteConfig().load({"dim_in": 13, "suites": ["proposition", "remark3"]})
    assert cfg["dim_in"] == 13


def test_element_schema() -> None:
    payload = {"dim": 2, "terms": [{"mask": 3, "re": 0.0, "im": 1.0}]}
    assert schemas.Element().load(payload) == payload


@pytest.mark.parametrize(
    "payload",
    [
        {"dim": 2, "terms": [{"mask": 4, "re": 1.0, "im": 0.0}]},
        {"dim": 0, "terms": []},
        {"dim": 2, "terms": [{"mask": 1, "re": 1.0}]},
        {"dim": 2},
    ],
)
def test_element_schema_invalid(payload: dict) -> None:
    with pytest.raises(ValidationError):
        schemas.Element().load(payload)


def test_check_schema() -> None:
    record = {
        "suite": "oracle",
        "name": "product matches matrix product",
        "dim": 3,
        "seed": 42,
        "passed": False,
        "max_error": None,
        "elapsed_ms": 1.5,
        "error": "Exception in trial 0",
    }
    assert schemas.Check().load(record) == record
    with pytest.raises(ValidationError):
        schemas.Check().load({key: value for key, value in record.items() if key != "passed"})


def test_summary_schema_invalid_counts() -> None:
    with pytest.raises(ValidationError, match=r"total - passed"):
        schemas.Summary().load({"total": 3, "passed": 1, "failed": 1})


def test_report_schema_mismatch() -> None:
    payload = {"checks": [], "summary": {"total": 1, "passed": 1, "failed": 0}}
    with pytest.raises(ValidationError, match=r"Summary does not match"):
        schemas.Report().load(payload)
