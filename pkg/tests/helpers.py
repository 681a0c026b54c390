"""Helper functions for tests."""
import json
import pathlib
import typing

import hypothesis.strategies as strat

import carverify.algebra as algebra
import carverify.space as space
from carverify.algebra import AlgElement
from carverify.space import ConjSpace, Isometry

GOLDEN_DIR = pathlib.Path(__file__).parent / "golden"
SEEDS = strat.integers(min_value=0, max_value=2**32 - 1)


def load_golden(name: str) -> typing.Any:
    """Load a JSON document from ``tests/golden``."""
    return json.loads((GOLDEN_DIR / name).read_text())


def strip_timings(report: dict) -> dict:
    """Return a copy of a report without wall-clock fields.

    Arguments:
        report: report as returned by ``run_suite``

    Returns:
        Report with ``elapsed_ms`` and ``median_ns`` removed from every check.

    """
    checks = [
        {key: value for key, value in check.items() if key not in {"elapsed_ms", "median_ns"}}
        for check in report["checks"]
    ]
    return {"checks": checks, "summary": dict(report["summary"])}


def assert_close(actual: AlgElement, expected: AlgElement, tol: float = 1e-12) -> None:
    distance = algebra.distance(actual, expected)
    assert distance <= tol, f"{actual!r} != {expected!r} (distance {distance:.3e})"


def elements(dim: int, max_degree: typing.Optional[int] = None) -> strat.SearchStrategy:
    """Random elements of ``C(K_dim)`` drawn from seeded normal coefficients."""
    degree = dim if max_degree is None else max_degree
    return SEEDS.map(lambda seed: algebra.random_element(ConjSpace(dim), degree, seed))


def element_triples(max_dim: int = 4) -> strat.SearchStrategy:
    return strat.integers(1, max_dim).flatmap(lambda m: strat.tuples(elements(m), elements(m), elements(m)))


def index_minus_one(max_dim: int = 4) -> strat.SearchStrategy:
    """Random isometries ``K_m -> K_{m+1}``."""
    return strat.tuples(strat.integers(1, max_dim), SEEDS).map(lambda pair: space.random_index_minus_one(*pair))


def isometries_with_elements(max_dim: int = 4) -> strat.SearchStrategy:
    """Pairs ``(V, a)`` with ``ind V = -1`` and ``a`` in ``C(K_in)``."""

    def with_element(V: Isometry) -> strat.SearchStrategy:
        return strat.tuples(strat.just(V), elements(V.domain.dim))

    return index_minus_one(max_dim).flatmap(with_element)
