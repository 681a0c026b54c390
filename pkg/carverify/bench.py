"""Benchmark of the multiplication kernel."""
import logging
import time
from typing import List, Optional

import numpy as np

import carverify.algebra as algebra
import carverify.report as report
import carverify.representation as representation
import carverify.seeds as seeds
from carverify.algebra import AlgElement
from carverify.config import BENCH_DIM_CAP, BENCH_ORACLE_DIM, DERIVED_TOL
from carverify.space import ConjSpace

logger = logging.getLogger("carverify")

SPOT_CHECK_MASKS = 4


def _coefficient(a: AlgElement, b: AlgElement, mask: int) -> complex:
    """Return the coefficient of ``c_mask`` in ``a b`` by summing over the terms of ``a``."""
    total = 0j
    for s, coeff in a.terms.items():
        t = s ^ mask
        if t in b.terms:
            total += algebra.reorder_sign(s, t) * coeff * b.terms[t]
    return total


def spot_check(a: AlgElement, b: AlgElement, product: AlgElement, seed: int) -> float:
    """Return the deviation of ``product`` from ``a b`` computed independently.

    Up to ``BENCH_ORACLE_DIM`` generators the Jordan-Wigner matrices are compared; above,
    a few coefficients (always including the scalar one) are recomputed term by term.
    """
    if a.dim <= BENCH_ORACLE_DIM:
        expected = representation.represent(a) @ representation.represent(b)
        return float(np.max(np.abs(representation.represent(product) - expected)))
    rng = np.random.default_rng(seeds.derive_seed(seed, "spot check"))
    masks: List[int] = [0] + [int(mask) for mask in rng.integers(0, 1 << a.dim, size=SPOT_CHECK_MASKS)]
    return max(abs(product.terms.get(mask, 0j) - _coefficient(a, b, mask)) for mask in masks)


def bench_multiply(
    dim: int, density: float, reps: int, seed: int, kernel: Optional[str] = None, tol: float = DERIVED_TOL
) -> dict:
    """Time ``reps`` products of two random elements and return a one-record ``Report``.

    Elements have every monomial kept with probability ``density``. The record carries
    the median wall-clock time per product in ``median_ns`` and passes if the spot check
    of the product is within ``tol``.

    Raises:
        ValueError: ``dim`` outside ``1..BENCH_DIM_CAP``, ``density`` outside ``(0, 1]`` or
            ``reps < 1``.

    """
    if not 1 <= dim <= BENCH_DIM_CAP:
        raise ValueError(f"Benchmark dimension `{dim}` out of range 1..{BENCH_DIM_CAP}.")
    if not 0 < density <= 1:
        raise ValueError(f"Density must be in (0, 1], got `{density}`.")
    if reps < 1:
        raise ValueError(f"Number of repetitions must be positive, got `{reps}`.")
    space = ConjSpace(dim)
    a = algebra.random_element(space, dim, seeds.derive_seed(seed, "bench", "a"), density=density)
    b = algebra.random_element(space, dim, seeds.derive_seed(seed, "bench", "b"), density=density)
    logger.info(f"Benchmarking products of elements with `{len(a)}` and `{len(b)}` terms on {dim} generators.")

    start = time.perf_counter()
    timings = []
    for _ in range(reps):
        tic = time.perf_counter_ns()
        product = algebra.mul(a, b, kernel=kernel)
        timings.append(time.perf_counter_ns() - tic)
    elapsed_ms = (time.perf_counter() - start) * 1e3

    max_error = spot_check(a, b, product, seed)
    passed = max_error <= tol
    if not passed:
        logger.warning(f"Product spot check failed at dim {dim} (error `{max_error:.3e}`).")
    record = {
        "suite": "bench",
        "name": f"multiply ({kernel or 'auto'} kernel)",
        "dim": dim,
        "seed": seed,
        "passed": passed,
        "max_error": max_error,
        "elapsed_ms": elapsed_ms,
        "median_ns": float(np.median(timings)),
    }
    return report.make_report([record])
