"""Verification suites.

A check is a function ``(m, seed, trial) -> (error, residual)`` registered under a suite
with the ``check`` decorator. The runner calls it once per trial for every dimension of
the suite's sweep, keeps the largest error (and the residual element of that trial, if
any) and marks the check passed when the error is at most the configured tolerance.

Each trial receives its own seed derived from the run seed and the trial's position
(see ``carverify.seeds``), so results do not depend on execution order.
"""
import concurrent.futures
import dataclasses
import functools
import logging
import math
import multiprocessing as mp
import signal
import time
from typing import Callable, Dict, Iterable, List, Optional, Tuple

import numpy as np

import carverify.algebra as algebra
import carverify.morphisms as morphisms
import carverify.report as report
import carverify.representation as representation
import carverify.schemas as schemas
import carverify.seeds as seeds
import carverify.space as space
from carverify import config
from carverify.algebra import AlgElement
from carverify.space import ConjSpace, Isometry

logger = logging.getLogger("carverify")

TrialResult = Tuple[float, Optional[AlgElement]]
TrialFunction = Callable[[int, int, int], TrialResult]


@dataclasses.dataclass(frozen=True)
class CheckSpec:
    suite: str
    name: str
    trial: TrialFunction
    dims: Callable[[int], List[int]]


CHECKS: Dict[str, List[CheckSpec]] = {name: [] for name in config.SUITE_NAMES}


def check(suite: str, name: str, dims: Callable[[int], List[int]]) -> Callable[[TrialFunction], TrialFunction]:
    """Register a trial function as check ``name`` of ``suite``."""

    def register(trial: TrialFunction) -> TrialFunction:
        CHECKS[suite].append(CheckSpec(suite, name, trial, dims))
        return trial

    return register


def lookup_check(suite: str, name: str) -> CheckSpec:
    try:
        return next(spec for spec in CHECKS[suite] if spec.name == name)
    except StopIteration:
        raise KeyError(f"No check `{name}` in suite `{suite}`.")


def sweep(low: int, high: int) -> Callable[[int], List[int]]:
    """Dimensions ``low..min(dim_in, high)``."""
    return lambda dim_in: list(range(low, min(dim_in, high) + 1))


def even_sweep(high: int) -> Callable[[int], List[int]]:
    """Even dimensions ``2..min(dim_in, high)``; empty when ``dim_in < 2``."""
    return lambda dim_in: list(range(2, min(dim_in, high) + 1, 2))


################################################################################
# trial inputs
################################################################################


def _isometry(m: int, seed: int, trial: int, label: str = "V") -> Isometry:
    """The shift on trial 0, a random index -1 isometry otherwise."""
    if trial == 0:
        return space.shift_isometry(m)
    return space.random_index_minus_one(m, seeds.derive_seed(seed, label))


def _element(space_: ConjSpace, seed: int, label: str, max_degree: Optional[int] = None) -> AlgElement:
    degree = space_.dim if max_degree is None else min(max_degree, space_.dim)
    return algebra.random_element(space_, degree, seeds.derive_seed(seed, label))


def _worst(pairs: Iterable[Tuple[AlgElement, AlgElement]]) -> TrialResult:
    """Return the largest distance among ``(actual, expected)`` pairs and its residual."""
    error, residual = 0.0, None
    for actual, expected in pairs:
        distance = algebra.distance(actual, expected)
        if residual is None or distance > error:
            error, residual = distance, actual - expected
    return error, residual


def _matrix_error(actual: np.ndarray, expected: np.ndarray) -> float:
    return float(np.max(np.abs(actual - expected), initial=0.0))


################################################################################
# proposition: sigma_V is a *-isomorphism onto the even subalgebra
################################################################################


@check("proposition", "sigma is a unital *-homomorphism", sweep(1, config.PROPOSITION_MAX_DIM))
def _sigma_homomorphism(m: int, seed: int, trial: int) -> TrialResult:
    V = _isometry(m, seed, trial)
    a, b = _element(V.domain, seed, "a"), _element(V.domain, seed, "b")
    sigma_a, sigma_b = morphisms.sigma(V, a), morphisms.sigma(V, b)
    return _worst(
        [
            (morphisms.sigma(V, a * b), sigma_a * sigma_b),
            (morphisms.sigma(V, algebra.adjoint(a)), algebra.adjoint(sigma_a)),
            (morphisms.sigma(V, algebra.one(V.domain)), algebra.one(V.codomain)),
        ]
    )


@check("proposition", "k_V is a skew-adjoint unitary", sweep(1, config.PROPOSITION_MAX_DIM))
def _k_unitary(m: int, seed: int, trial: int) -> TrialResult:
    V = _isometry(m, seed, trial)
    k = morphisms.k_element(V).element
    k_star = algebra.adjoint(k)
    one = algebra.one(V.codomain)
    return _worst([(k * k_star, one), (k_star * k, one), (k_star, -k), (k * k, -one)])


@check("proposition", "u_V is unitary and squares to k_V", sweep(1, config.PROPOSITION_MAX_DIM))
def _u_unitary(m: int, seed: int, trial: int) -> TrialResult:
    V = _isometry(m, seed, trial)
    u = morphisms.u_element(V).element
    u_star = algebra.adjoint(u)
    one = algebra.one(V.codomain)
    return _worst([(u * u_star, one), (u_star * u, one), (u * u, morphisms.k_element(V).element)])


@check("proposition", "sigma image = even subalgebra", sweep(1, config.PROPOSITION_MAX_DIM))
def _sigma_image(m: int, seed: int, trial: int) -> TrialResult:
    V = _isometry(m, seed, trial)
    even, odd = morphisms.even_image_matrix(V)
    if int(np.linalg.matrix_rank(even)) != 1 << m or even.shape[0] != 1 << m:
        return math.inf, None
    # images of the orthonormal monomial basis are orthonormal for the trace inner product
    gram = even.conj().T @ even
    return max(_matrix_error(gram, np.eye(1 << m)), _matrix_error(odd, np.zeros_like(odd))), None


@check("proposition", "sigma preserves the trace", sweep(1, config.PROPOSITION_MAX_DIM))
def _sigma_trace(m: int, seed: int, trial: int) -> TrialResult:
    V = _isometry(m, seed, trial)
    a = _element(V.domain, seed, "a")
    sigma_a = morphisms.sigma(V, a)
    norm_error = abs(
        algebra.trace(algebra.adjoint(sigma_a) * sigma_a) - algebra.trace(algebra.adjoint(a) * a)
    )
    return max(norm_error, abs(algebra.trace(sigma_a) - algebra.trace(a))), None


@check("proposition", "sigma matches k_V B(Vk) on K", sweep(1, config.PROPOSITION_MAX_DIM))
def _sigma_closed_form(m: int, seed: int, trial: int) -> TrialResult:
    V = _isometry(m, seed, trial)
    k = space.random_vec(V.domain, seeds.derive_seed(seed, "k"))
    expected = morphisms.k_element(V).element * algebra.b_of(space.apply(V, k))
    return _worst([(morphisms.sigma(V, algebra.b_of(k)), expected)])


@check("proposition", "u_V fixes C(ran V)_0 and twists C(ran V)_1 by k_V", sweep(1, config.PROPOSITION_MAX_DIM))
def _twist_action(m: int, seed: int, trial: int) -> TrialResult:
    V = _isometry(m, seed, trial)
    return morphisms.twist_action_error(V, _element(V.domain, seed, "a")), None


@check("proposition", "even subalgebra = C(ran V)_0 + k_V C(ran V)_1", sweep(1, config.PROPOSITION_ORACLE_MAX_DIM))
def _range_split(m: int, seed: int, trial: int) -> TrialResult:
    if trial >= config.BASIS_TRIALS:
        return 0.0, None
    return morphisms.range_split_error(_isometry(m, seed, trial)), None


@check("proposition", "sigma image commutes with the grading unitary", sweep(1, config.PROPOSITION_ORACLE_MAX_DIM))
def _sigma_image_matrix(m: int, seed: int, trial: int) -> TrialResult:
    V = _isometry(m, seed, trial)
    image = representation.represent(morphisms.sigma(V, _element(V.domain, seed, "a")))
    grading = representation.grading_unitary(V.codomain.dim)
    return _matrix_error(grading @ image @ grading.conj().T, image), None


@check("proposition", "statistical dimension", sweep(1, config.PROPOSITION_MAX_DIM))
def _statistical_dimension(m: int, seed: int, trial: int) -> TrialResult:
    error = 0.0
    for defect in range(4):
        V = space.random_isometry(m, m + defect, seeds.derive_seed(seed, "V", defect))
        ratio = morphisms.image_dimension_ratio(V)
        if space.kernel_dimension(V) != defect or ratio != 2.0**defect:
            return math.inf, None
        stat = morphisms.stat_dimension(V)
        if defect == 1 and not math.isclose(stat, math.sqrt(2), rel_tol=1e-15):
            return math.inf, None
        error = max(error, abs(stat**2 - ratio) / ratio)
    return error, None


################################################################################
# remark 1: sign freedom of k_V and transitivity of Bogoliubov automorphisms
################################################################################


def _isometry_pair(m: int, seed: int, trial: int) -> Tuple[Isometry, Isometry]:
    V = _isometry(m, seed, trial)
    V_prime = space.random_index_minus_one(m, seeds.derive_seed(seed, "V'"))
    return V, V_prime


@check("remark1", "transport unitary is orthogonal", sweep(1, config.REMARK1_MAX_DIM))
def _transport_orthogonal(m: int, seed: int, trial: int) -> TrialResult:
    U = morphisms.transport_unitary(*_isometry_pair(m, seed, trial))
    if space.fredholm_index(U) != 0:  # pragma: no cover
        return math.inf, None
    identity = np.eye(U.domain.dim)
    return max(_matrix_error(U.matrix.T @ U.matrix, identity), _matrix_error(U.matrix @ U.matrix.T, identity)), None


@check("remark1", "transport unitary carries sigma_V to sigma_V'", sweep(1, config.REMARK1_MAX_DIM))
def _transport_intertwines(m: int, seed: int, trial: int) -> TrialResult:
    V, V_prime = _isometry_pair(m, seed, trial)
    U = morphisms.transport_unitary(V, V_prime)
    generators = [algebra.generator(V.domain, j) for j in range(1, m + 1)]
    return _worst(
        (morphisms.rho(U, morphisms.sigma(V, c)), morphisms.sigma(V_prime, c)) for c in generators
    )


@check("remark1", "flipping k_V composes sigma with the grading", sweep(1, config.REMARK1_MAX_DIM))
def _sign_covariance(m: int, seed: int, trial: int) -> TrialResult:
    V = _isometry(m, seed, trial)
    k = space.random_vec(V.domain, seeds.derive_seed(seed, "k"))
    elements = [algebra.generator(V.domain, j) for j in range(1, m + 1)] + [algebra.b_of(k)]
    return _worst((morphisms.sigma(V, a, sign=-1), morphisms.sigma(V, algebra.gamma(a))) for a in elements)


################################################################################
# remark 2: CAR relations and Fock vacuum of a polarization
################################################################################


@check("remark2", "CAR relations", even_sweep(config.REMARK2_MAX_DIM))
def _car_relations(m: int, seed: int, trial: int) -> TrialResult:
    f = space.random_polarized_vec(m, seeds.derive_seed(seed, "f"))
    g = space.random_polarized_vec(m, seeds.derive_seed(seed, "g"))
    a_f, a_g = algebra.car_annihilator(f), algebra.car_annihilator(g)
    a_f_star, a_g_star = algebra.car_creator(f), algebra.car_creator(g)
    zero = algebra.zero(f.space)
    return _worst(
        [
            (algebra.anticommutator(a_f, a_g), zero),
            (algebra.anticommutator(a_f_star, a_g_star), zero),
            (algebra.anticommutator(a_f, a_g_star), algebra.scalar(f.space, space.inner(g, f))),
        ]
    )


@check("remark2", "annihilators kill the vacuum", even_sweep(config.REMARK2_MAX_DIM))
def _vacuum(m: int, seed: int, trial: int) -> TrialResult:
    omega = representation.vacuum(m)
    vectors = space.polarization_basis(m) + [space.random_polarized_vec(m, seeds.derive_seed(seed, "f"))]
    residuals = [
        float(np.linalg.norm(representation.represent(algebra.car_annihilator(f)) @ omega)) for f in vectors
    ]
    return max(max(residuals), abs(np.vdot(omega, omega) - 1)), None


@check("remark2", "one-particle states are orthonormal", even_sweep(config.REMARK2_MAX_DIM))
def _one_particle(m: int, seed: int, trial: int) -> TrialResult:
    states = np.stack([representation.fock_state(m, [a]) for a in range(1, m // 2 + 1)], axis=1)
    return _matrix_error(states.conj().T @ states, np.eye(m // 2)), None


@check("remark2", "polarization splits K into H and H*", even_sweep(config.REMARK2_MAX_DIM))
def _polarization(m: int, seed: int, trial: int) -> TrialResult:
    basis = space.polarization_basis(m)
    conjugates = [space.conjugate(f) for f in basis]
    columns = np.stack([v.coords for v in basis + conjugates], axis=1)
    if int(np.linalg.matrix_rank(columns)) != m:
        return math.inf, None
    error = max(abs(space.inner(f, g)) for f in basis for g in conjugates)
    gram = np.array([[space.inner(f, g) for g in basis] for f in basis])
    return max(error, _matrix_error(gram, np.eye(m // 2))), None


################################################################################
# remark 3: left inverses and the conditional expectation
################################################################################


@check("remark3", "phi_V is a left inverse of sigma_V", sweep(1, config.REMARK3_MAX_DIM))
def _phi_left_inverse(m: int, seed: int, trial: int) -> TrialResult:
    V = _isometry(m, seed, trial)
    a = _element(V.domain, seed, "a")
    return _worst([(morphisms.phi(V, morphisms.sigma(V, a)), a)])


@check("remark3", "Phi_V is a left inverse of rho_V", sweep(1, config.REMARK3_MAX_DIM))
def _Phi_left_inverse(m: int, seed: int, trial: int) -> TrialResult:
    V = _isometry(m, seed, trial)
    a = _element(V.domain, seed, "a")
    return _worst([(morphisms.Phi(V, morphisms.rho(V, a)), a)])


@check("remark3", "sigma_V phi_V is the mean over Z2", sweep(1, config.REMARK3_MAX_DIM))
def _mean_over_grading(m: int, seed: int, trial: int) -> TrialResult:
    V = _isometry(m, seed, trial)
    if trial < config.BASIS_TRIALS:
        # identity of linear maps, checked on the whole monomial basis
        elements = [AlgElement(V.codomain, {mask: 1}) for mask in range(1 << V.codomain.dim)]
    else:
        elements = [_element(V.codomain, seed, "a")]
    return _worst((morphisms.cond_expect(V, a), (a + algebra.gamma(a)) / 2) for a in elements)


@check("remark3", "decomposition a = a0 + k_V a1 + b1", sweep(1, config.REMARK3_MAX_DIM))
def _decomposition(m: int, seed: int, trial: int) -> TrialResult:
    V = _isometry(m, seed, trial)
    a = _element(V.codomain, seed, "a")
    a0, a1, b1 = morphisms.decompose(V, a)
    if not (algebra.is_pure_grade(a0, 0) and algebra.is_pure_grade(a1, 1) and algebra.is_pure_grade(b1, 1)):
        return math.inf, None
    k = morphisms.k_element(V).element
    # a0 + a1 lies in the range of rho_V exactly when rho_V phi_V recovers it
    return _worst([(a0 + k * a1 + b1, a), (morphisms.rho(V, morphisms.phi(V, a)), a0 + a1)])


@check("remark3", "conditional expectation is an idempotent positive projection", sweep(1, config.REMARK3_MAX_DIM))
def _expectation_properties(m: int, seed: int, trial: int) -> TrialResult:
    V = _isometry(m, seed, trial)
    a = _element(V.codomain, seed, "a")
    expectation = morphisms.cond_expect(V, a)
    positive = algebra.trace(morphisms.cond_expect(V, algebra.adjoint(a) * a))
    even = algebra.grade_project(a, 0)
    error, residual = _worst(
        [(morphisms.cond_expect(V, expectation), expectation), (morphisms.cond_expect(V, even), even)]
    )
    return max(error, abs(positive.imag), max(0.0, -positive.real)), residual


################################################################################
# remark 4: restriction of rho_W to the even subalgebra
################################################################################


def _remark4_pair(m: int, seed: int, trial: int) -> Tuple[Isometry, Isometry]:
    """Return ``(W, V)`` with ``ind V = -1`` and total codomain within the matrix cap."""
    if trial == 0:
        return space.identity_isometry(m + 1), space.shift_isometry(m)
    defect = min(trial % 3, config.REMARK4_MAX_CODOMAIN - m - 1)
    W = space.random_isometry(m + 1, m + 1 + defect, seeds.derive_seed(seed, "W"))
    return W, _isometry(m, seed, trial)


def _remark4_dims(dim_in: int) -> List[int]:
    return sweep(1, config.REMARK4_MAX_CODOMAIN - 1)(dim_in)


@check("remark4", "rho_W sigma_V = Ad(rho_W(u_V)) rho_WV", _remark4_dims)
def _intertwine_symbolic(m: int, seed: int, trial: int) -> TrialResult:
    W, V = _remark4_pair(m, seed, trial)
    samples = [_element(V.domain, seed, "a", max_degree=2)]
    return morphisms.remark4_intertwine_error(W, V, samples), None


@check("remark4", "rho_W(u_V) intertwines the matrix representations", _remark4_dims)
def _intertwine_matrix(m: int, seed: int, trial: int) -> TrialResult:
    W, V = _remark4_pair(m, seed, trial)
    return representation.remark4_matrix_error(W, V), None


@check("remark4", "ind WV = ind W - 1", _remark4_dims)
def _index_bookkeeping(m: int, seed: int, trial: int) -> TrialResult:
    W, V = _remark4_pair(m, seed, trial)
    W_prime = morphisms.remark4_partner(W, V)
    ok = (
        space.fredholm_index(W_prime) == space.fredholm_index(W) - 1
        and space.kernel_dimension(W_prime) == space.kernel_dimension(W) + 1
    )
    return (0.0 if ok else math.inf), None


################################################################################
# oracle: the symbolic kernel against the Jordan-Wigner matrices
################################################################################


@check("oracle", "product matches matrix product", sweep(1, config.ORACLE_MAX_DIM))
def _oracle_product(m: int, seed: int, trial: int) -> TrialResult:
    a, b = _element(ConjSpace(m), seed, "a"), _element(ConjSpace(m), seed, "b")
    represent = representation.represent
    return _matrix_error(represent(a * b), represent(a) @ represent(b)), None


@check("oracle", "adjoint matches conjugate transpose", sweep(1, config.ORACLE_MAX_DIM))
def _oracle_adjoint(m: int, seed: int, trial: int) -> TrialResult:
    a = _element(ConjSpace(m), seed, "a")
    return _matrix_error(representation.represent(algebra.adjoint(a)), representation.represent(a).conj().T), None


@check("oracle", "trace matches normalized matrix trace", sweep(1, config.ORACLE_MAX_DIM))
def _oracle_trace(m: int, seed: int, trial: int) -> TrialResult:
    a = _element(ConjSpace(m), seed, "a")
    return abs(representation.normalized_trace(representation.represent(a)) - algebra.trace(a)), None


@check("oracle", "grading is conjugation by the chirality unitary", sweep(1, config.ORACLE_MAX_DIM))
def _oracle_grading(m: int, seed: int, trial: int) -> TrialResult:
    a = _element(ConjSpace(m), seed, "a")
    grading = representation.grading_unitary(m)
    conjugated = grading @ representation.represent(a) @ grading.conj().T
    return _matrix_error(conjugated, representation.represent(algebra.gamma(a))), None


@check("oracle", "sigma is isometric in the C*-norm", sweep(1, config.ORACLE_MAX_DIM))
def _oracle_sigma_norm(m: int, seed: int, trial: int) -> TrialResult:
    V = _isometry(m, seed, trial)
    a = _element(V.domain, seed, "a")
    return abs(representation.operator_norm(morphisms.sigma(V, a)) - representation.operator_norm(a)), None


@check("oracle", "C*-norm of K vectors", sweep(1, config.ORACLE_MAX_DIM))
def _oracle_vector_norm(m: int, seed: int, trial: int) -> TrialResult:
    rng = np.random.default_rng(seeds.derive_seed(seed, "k"))
    k = space.Vec(ConjSpace(m), rng.standard_normal(m))
    # self-adjoint B(k) with B(k)^2 = ||k||^2 / 2
    error = abs(representation.norm_ratio(k) - 1 / math.sqrt(2))
    if m % 2 == 0:
        f = space.random_polarized_vec(m, seeds.derive_seed(seed, "f"))
        error = max(error, abs(representation.norm_ratio(f) - 1))
    return error, None


################################################################################
# runner
################################################################################


def run_check(suite: str, name: str, dim: int, trials: int, seed: int, tol: float) -> dict:
    """Run all trials of one check at one dimension and return its ``Check`` record."""
    spec = lookup_check(suite, name)
    start = time.perf_counter()
    max_error: float = 0.0
    witness: Optional[AlgElement] = None
    error_message = None
    for trial in range(trials):
        trial_seed = seeds.derive_seed(seed, suite, name, dim, trial)
        try:
            error, residual = spec.trial(dim, trial_seed, trial)
        except Exception as exc:
            error_message = f"Exception in trial {trial} of `{suite}/{name}` (dim {dim}): `{repr(exc)}`"
            logger.critical(error_message)
            max_error, witness = math.inf, None
            break
        if math.isnan(error):
            error = math.inf
        logger.debug(f"`{suite}/{name}` dim {dim} trial {trial}: error `{error:.3e}`.")
        if not error <= max_error:
            max_error, witness = error, residual
    passed = math.isfinite(max_error) and max_error <= tol
    record: dict = {
        "suite": suite,
        "name": name,
        "dim": dim,
        "seed": seed,
        "passed": passed,
        "max_error": max_error if math.isfinite(max_error) else None,
        "elapsed_ms": (time.perf_counter() - start) * 1e3,
    }
    if error_message is not None:
        record["error"] = error_message
    if not passed:
        logger.warning(f"Check `{suite}/{name}` failed at dim {dim} (max error `{max_error:.3e}`, tol `{tol:.1e}`).")
        if witness is not None:
            record["witness"] = algebra.element_to_json(witness)
    return dict(schemas.Check().load(record))


def _run_task(task: Tuple[str, str, int], trials: int, seed: int, tol: float) -> dict:
    suite, name, dim = task
    return run_check(suite, name, dim, trials, seed, tol)


def init_worker() -> None:
    signal.signal(signal.SIGINT, signal.SIG_IGN)  # ignore KeyboardInterrupt


def plan(cfg: dict) -> List[Tuple[str, str, int]]:
    """Return the ``(suite, check, dim)`` tasks of a run in canonical order."""
    return [
        (spec.suite, spec.name, dim)
        for suite in config.SUITE_NAMES
        if suite in cfg["suites"]
        for spec in CHECKS[suite]
        for dim in spec.dims(cfg["dim_in"])
    ]


def run_suite(cfg: dict) -> dict:
    """Run the suites selected by a loaded ``SuiteConfig`` and return a ``Report``.

    Tasks are independent; with ``jobs > 1`` they run in worker processes. Records keep
    the canonical task order either way.
    """
    tasks = plan(cfg)
    logger.info(f"Running {len(tasks)} checks with {cfg['trials']} trials each (seed {cfg['seed']}).")
    worker = functools.partial(_run_task, trials=cfg["trials"], seed=cfg["seed"], tol=cfg["tol"])
    if cfg["jobs"] > 1:
        with concurrent.futures.ProcessPoolExecutor(
            max_workers=cfg["jobs"], mp_context=mp.get_context("fork"), initializer=init_worker
        ) as executor:
            checks = list(executor.map(worker, tasks))
    else:
        checks = [worker(task) for task in tasks]
    result = report.make_report(checks)
    logger.info(f"Finished: {result['summary']['passed']} of {result['summary']['total']} checks passed.")
    return result
