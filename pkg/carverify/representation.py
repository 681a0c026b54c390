"""Jordan-Wigner matrix representation of ``C(K_m)``.

The Majorana generators act on ``n = ceil(m / 2)`` qubits:

    pi(c_{2a-1}) = Z x ... x Z x X x I x ... x I
    pi(c_{2a})   = Z x ... x Z x Y x I x ... x I

with ``a - 1`` factors ``Z`` on the left. For odd ``m`` the algebra is represented inside
the algebra on ``m + 1`` generators, which keeps the representation faithful. The
representation serves as an independent numerical check of the symbolic kernel.
"""
import functools
import logging
from typing import Iterable

import numpy as np

import carverify.algebra as algebra
import carverify.morphisms as morphisms
import carverify.space as space
from carverify.algebra import AlgElement
from carverify.config import DERIVED_TOL, REPR_GENERATOR_CAP, REPR_HARD_CAP, STRUCTURAL_TOL
from carverify.space import Isometry, Vec

logger = logging.getLogger("carverify")

IDENTITY = np.eye(2, dtype=complex)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)


def qubit_count(m: int) -> int:
    return (m + 1) // 2


def _check_cap(m: int, cap: int) -> None:
    if cap > REPR_HARD_CAP:
        raise ValueError(f"Generator cap `{cap}` exceeds the hard cap of {REPR_HARD_CAP}.")
    if m > cap:
        raise ValueError(f"Matrix representation of {m} generators exceeds the cap of {cap}.")


@functools.lru_cache(maxsize=None)
def jw_generator(j: int, m: int) -> np.ndarray:
    """Return ``pi(c_j)`` for the algebra on ``m`` generators."""
    if not 1 <= j <= m:
        raise ValueError(f"Generator index `{j}` out of range 1..{m}.")
    _check_cap(m, REPR_HARD_CAP)
    site = (j - 1) // 2
    factors = [PAULI_Z] * site + [PAULI_X if j % 2 else PAULI_Y] + [IDENTITY] * (qubit_count(m) - site - 1)
    matrix = functools.reduce(np.kron, factors, np.ones((1, 1), dtype=complex))
    matrix.setflags(write=False)
    return matrix


def _padded_generators(m: int) -> int:
    return 2 * qubit_count(m)


def represent(a: AlgElement, cap: int = REPR_GENERATOR_CAP) -> np.ndarray:
    """Return the ``2**n x 2**n`` matrix ``pi(a)``."""
    m = a.dim
    _check_cap(m, cap)
    size = 1 << qubit_count(m)
    generators = [jw_generator(j, _padded_generators(m)) for j in range(1, m + 1)]
    cache = {0: np.eye(size, dtype=complex)}

    def monomial(mask: int) -> np.ndarray:
        if mask not in cache:
            top = mask.bit_length() - 1
            cache[mask] = monomial(mask ^ (1 << top)) @ generators[top]
        return cache[mask]

    matrix = np.zeros((size, size), dtype=complex)
    for mask, coeff in a.terms.items():
        matrix += coeff * monomial(mask)
    return matrix


def normalized_trace(matrix: np.ndarray) -> complex:
    return complex(np.trace(matrix) / matrix.shape[0])


def operator_norm(a: AlgElement, cap: int = REPR_GENERATOR_CAP) -> float:
    """Return the C*-norm of ``a``, the largest singular value of ``pi(a)``."""
    return float(np.linalg.norm(represent(a, cap=cap), 2))


def norm_ratio(k: Vec) -> float:
    """Return ``||B(k)||_{C*} / ||k||``."""
    return operator_norm(algebra.b_of(k)) / k.norm()


def grading_unitary(m: int) -> np.ndarray:
    """Return ``pi(c_1 ... c_{2n})``, which anticommutes with every generator.

    Conjugation by this unitary implements the grading automorphism on ``pi(C(K_m))``.
    """
    padded = _padded_generators(m)
    return represent(algebra.monomial(space.ConjSpace(padded), range(1, padded + 1)), cap=REPR_HARD_CAP)


################################################################################
# Fock vacuum of the polarization
################################################################################


def vacuum(m: int, tol: float = STRUCTURAL_TOL) -> np.ndarray:
    """Return the state annihilated by ``pi(a(f_a))`` for every polarization basis vector.

    With the Jordan-Wigner conventions above ``pi(a(f_a))`` lowers qubit ``a``, so the vacuum
    is the all-zeros computational basis state; this is verified before returning.

    Raises:
        ValueError: ``m`` is odd.
        RuntimeError: some annihilator does not kill the candidate vacuum.

    """
    basis = space.polarization_basis(m)
    omega = np.zeros(1 << qubit_count(m), dtype=complex)
    omega[0] = 1
    for a, f in enumerate(basis, start=1):
        residual = np.linalg.norm(represent(algebra.car_annihilator(f)) @ omega)
        if residual > tol:  # pragma: no cover
            raise RuntimeError(f"Annihilator a(f_{a}) does not kill the vacuum (residual `{residual:.3e}`).")
    return omega


def fock_state(m: int, occupied: Iterable[int]) -> np.ndarray:
    """Return ``pi(a(f_{a_1})* ... a(f_{a_k})*) Omega`` for 1-based modes ``a_1, ..., a_k``."""
    basis = space.polarization_basis(m)
    state = vacuum(m)
    for a in reversed(list(occupied)):
        if not 1 <= a <= len(basis):
            raise ValueError(f"Mode `{a}` out of range 1..{len(basis)}.")
        state = represent(algebra.car_creator(basis[a - 1])) @ state
    return state


################################################################################
# restriction of pi rho_W to the even subalgebra
################################################################################


def remark4_matrix_error(
    W: Isometry, V: Isometry, sign: int = 1, cap: int = REPR_GENERATOR_CAP
) -> float:
    """Return the deviation from ``pi(rho_W sigma_V(c_j)) = M pi(rho_{WV}(c_j)) M^dagger``.

    ``M = pi(rho_W(u_V))`` is the explicit intertwiner of the two representations of
    ``C(K_in)``; its deviation from unitarity is included in the returned error.
    """
    _check_cap(W.codomain.dim, cap)
    W_prime = morphisms.remark4_partner(W, V)
    intertwiner = represent(morphisms.rho(W, morphisms.u_element(V, sign=sign).element), cap=cap)
    identity = np.eye(intertwiner.shape[0])
    error = float(np.max(np.abs(intertwiner @ intertwiner.conj().T - identity)))
    for j in range(1, V.domain.dim + 1):
        c = algebra.generator(V.domain, j)
        lhs = represent(morphisms.rho(W, morphisms.sigma(V, c, sign=sign)), cap=cap)
        rhs = intertwiner @ represent(morphisms.rho(W_prime, c), cap=cap) @ intertwiner.conj().T
        error = max(error, float(np.max(np.abs(lhs - rhs))))
    logger.debug(f"Matrix intertwining error for W {W.codomain.dim}x{W.domain.dim}: `{error:.3e}`.")
    return error


def remark4_matrix_check(W: Isometry, V: Isometry, tol: float = DERIVED_TOL) -> bool:
    return remark4_matrix_error(W, V) <= tol
