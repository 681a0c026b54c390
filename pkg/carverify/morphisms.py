"""Bogoliubov endomorphisms and the isomorphisms onto the even subalgebra.

For a conjugation-commuting isometry ``V`` the Bogoliubov endomorphism ``rho_V`` sends
``B(k)`` to ``B(Vk)``. When ``ind V = -1`` the kernel of ``V*`` is spanned by a real unit
vector ``e``; ``k_V = B(i sqrt(2) e)`` is an odd skew-adjoint unitary and
``u_V = (1 + k_V) / sqrt(2)`` is unitary. Conjugating ``rho_V`` by ``u_V`` gives

    sigma_V(a) = u_V rho_V(a) u_V*,

a unital *-isomorphism of ``C(K_in)`` onto the even part of ``C(K_out)``.

Decompositions relative to ``ker V* + ran V`` are computed in a rotated frame: the
orthogonal map ``R = [e, V]^T`` sends ``e`` to ``e_1`` and ``V e_j`` to ``e_{j+1}``, so after
applying ``rho_R`` the kernel direction is the generator ``c_1`` and ``rho_V`` is a
relabeling of generators.

Every function taking ``sign`` uses ``sign * k_V`` in place of ``k_V``; ``k_V`` is only
determined by ``V`` up to this sign.
"""
import collections
import dataclasses
import functools
import logging
import math
from typing import Dict, Iterable, List, Sequence, Set, Tuple

import numpy as np

import carverify.algebra as algebra
import carverify.space as space
from carverify.algebra import AlgElement
from carverify.config import DERIVED_TOL
from carverify.space import Isometry, Vec

logger = logging.getLogger("carverify")


@dataclasses.dataclass(frozen=True)
class OddUnitary:
    """``k_V``: ``vector = sign * i sqrt(2) e`` and ``element = B(vector) = sign * i c_e``."""

    vector: Vec
    element: AlgElement


@dataclasses.dataclass(frozen=True)
class TwistUnitary:
    """``u_V = (1 + k_V) / sqrt(2)``."""

    element: AlgElement


def _check_index_minus_one(V: Isometry) -> None:
    if space.fredholm_index(V) != -1:
        raise ValueError(f"Expected an isometry with index -1, got index `{space.fredholm_index(V)}`.")


def _check_sign(sign: int) -> None:
    if sign not in (1, -1):
        raise ValueError(f"Sign of k_V must be 1 or -1, not `{sign}`.")


def _check_domain(V: Isometry, a: AlgElement) -> None:
    if a.space != V.domain:
        raise ValueError(f"Element has {a.dim} generators; isometry domain has dimension {V.domain.dim}.")


def _check_codomain(V: Isometry, a: AlgElement) -> None:
    if a.space != V.codomain:
        raise ValueError(f"Element has {a.dim} generators; isometry codomain has dimension {V.codomain.dim}.")


################################################################################
# Bogoliubov endomorphisms
################################################################################


def generator_images(V: Isometry) -> List[AlgElement]:
    """Return ``rho_V(c_j) = sum_i V_ij c_i`` for ``j = 1..dim domain``."""
    return [
        AlgElement(V.codomain, {1 << i: V.matrix[i, j] for i in range(V.codomain.dim)})
        for j in range(V.domain.dim)
    ]


def _extend_multiplicatively(images: Sequence[AlgElement], masks: Iterable[int], n_out: int) -> Dict[int, np.ndarray]:
    """Return dense coefficients of ``prod_{j in S, ascending} images[j]`` for each mask ``S``.

    Each monomial image is the image of the monomial without its highest generator,
    multiplied on the right by one generator image. Monomials are processed one highest
    generator at a time, so all monomials sharing it are multiplied in one batch.
    """
    masks = list(masks)
    pending: Set[int] = set()
    for mask in masks:
        while mask and mask not in pending:
            pending.add(mask)
            mask ^= 1 << (mask.bit_length() - 1)
    levels: Dict[int, List[int]] = collections.defaultdict(list)
    for mask in sorted(pending):
        levels[mask.bit_length() - 1].append(mask)

    unit = np.zeros(1 << n_out, dtype=complex)
    unit[0] = 1
    table: Dict[int, np.ndarray] = {0: unit}
    for top in sorted(levels):
        level = levels[top]
        prefixes = np.stack([table[mask ^ (1 << top)] for mask in level])
        table.update(zip(level, algebra.dense_right_product(prefixes, images[top])))
    return {mask: table[mask] for mask in masks}


def _apply_multiplicative(images: Sequence[AlgElement], a: AlgElement, codomain: space.ConjSpace) -> AlgElement:
    if not a.terms:
        return algebra.zero(codomain)
    monomials = _extend_multiplicatively(images, a.terms, codomain.dim)
    coeffs = np.array(list(a.terms.values()))
    total = coeffs @ np.stack([monomials[mask] for mask in a.terms])
    return algebra.from_dense(codomain, total)


def rho(V: Isometry, a: AlgElement) -> AlgElement:
    """Apply the Bogoliubov endomorphism ``rho_V`` (``B(k) -> B(Vk)``) to ``a``."""
    _check_domain(V, a)
    return _apply_multiplicative(generator_images(V), a, V.codomain)


################################################################################
# k_V, u_V and sigma_V
################################################################################


def k_element(V: Isometry, sign: int = 1) -> OddUnitary:
    """Return ``k_V = B(i sqrt(2) e)`` for the canonical kernel vector ``e`` of ``V*``."""
    _check_index_minus_one(V)
    _check_sign(sign)
    e = space.kernel_selfconjugate_unit(V)
    vector = complex(sign * 1j * math.sqrt(2)) * e
    return OddUnitary(vector=vector, element=algebra.b_of(vector))


def u_element(V: Isometry, sign: int = 1) -> TwistUnitary:
    """Return ``u_V = (1 + k_V) / sqrt(2)``."""
    k = k_element(V, sign=sign).element
    return TwistUnitary(element=(algebra.one(V.codomain) + k) / math.sqrt(2))


def sigma(V: Isometry, a: AlgElement, sign: int = 1) -> AlgElement:
    """Return ``sigma_V(a) = u_V rho_V(a) u_V*``."""
    _check_index_minus_one(V)
    _check_domain(V, a)
    u = u_element(V, sign=sign).element
    return u * rho(V, a) * algebra.adjoint(u)


@functools.lru_cache(maxsize=256)
def sigma_generator_images(V: Isometry, sign: int = 1) -> Tuple[AlgElement, ...]:
    """Return ``sigma_V(c_j)`` for every generator of the domain.

    Results are cached per isometry (isometries compare by value).
    """
    _check_index_minus_one(V)
    u = u_element(V, sign=sign).element
    u_star = algebra.adjoint(u)
    return tuple(u * image * u_star for image in generator_images(V))


def even_image_matrix(V: Isometry, sign: int = 1) -> Tuple[np.ndarray, np.ndarray]:
    """Return the coefficient columns of ``sigma_V(c_S)`` for all ``2**m`` monomials ``c_S``.

    Returns:
        (even, odd): rows of the even and of the odd codomain monomials, one column per
        domain monomial in ascending mask order.

    """
    images = sigma_generator_images(V, sign=sign)
    masks = range(1 << V.domain.dim)
    columns = _extend_multiplicatively(images, masks, V.codomain.dim)
    matrix = np.stack([columns[mask] for mask in masks], axis=1)
    even_rows = np.array([algebra.popcount(mask) % 2 == 0 for mask in range(1 << V.codomain.dim)])
    return matrix[even_rows], matrix[~even_rows]


def image_is_even_subalgebra(V: Isometry, tol: float = DERIVED_TOL, sign: int = 1) -> bool:
    """Check that ``sigma_V`` maps the monomial basis onto a basis of the even subalgebra.

    The images must have no odd component and their even coefficient columns must have
    full rank ``2**m``, the dimension of the even part of ``C(K_{m+1})``.
    """
    _check_index_minus_one(V)
    even, odd = even_image_matrix(V, sign=sign)
    leak = float(np.max(np.abs(odd), initial=0.0))
    rank = int(np.linalg.matrix_rank(even))
    logger.debug(f"sigma image: rank `{rank}` of `{even.shape[0]}`, odd leakage `{leak:.3e}`.")
    return leak <= tol and rank == even.shape[0] == 1 << V.domain.dim


################################################################################
# decompositions and left inverses
################################################################################


def _rotation(V: Isometry) -> Isometry:
    """Return ``R`` with ``R e = e_1`` and ``R V e_j = e_{j+1}``."""
    e = space.kernel_selfconjugate_unit(V).coords.real
    matrix = np.vstack([e[np.newaxis, :], V.matrix.T])
    return Isometry(V.codomain, V.codomain, matrix)


def _transpose(R: Isometry) -> Isometry:
    return Isometry(R.codomain, R.domain, R.matrix.T)


def _rotated_split(V: Isometry, a: AlgElement) -> Tuple[AlgElement, AlgElement]:
    """Return ``(x, y)`` with ``rho_R(a) = x + c_1 y``, ``x`` and ``y`` free of ``c_1``."""
    _check_index_minus_one(V)
    _check_codomain(V, a)
    return algebra.split_off_generator(rho(_rotation(V), a), 1)


def decompose(V: Isometry, a: AlgElement, sign: int = 1) -> Tuple[AlgElement, AlgElement, AlgElement]:
    """Return the unique ``(a0, a1, b1)`` with ``a = a0 + k_V a1 + b1``.

    ``a0`` is even and ``a1`` odd, both in the subalgebra generated by ``ran V``; ``b1`` is
    odd. In the rotated frame ``k_V = sign * i c_1``; with ``rho_R(a) = x + c_1 y`` the even
    part is ``x_0 + c_1 y_1``, so ``a0 = x_0``, ``a1 = -sign * i y_1`` and
    ``b1 = x_1 + c_1 y_0``.
    """
    _check_sign(sign)
    x, y = _rotated_split(V, a)
    c1 = algebra.generator(V.codomain, 1)
    rotated = (
        algebra.grade_project(x, 0),
        -sign * 1j * algebra.grade_project(y, 1),
        algebra.grade_project(x, 1) + c1 * algebra.grade_project(y, 0),
    )
    back = _transpose(_rotation(V))
    a0, a1, b1 = (rho(back, part) for part in rotated)
    return a0, a1, b1


def _unshift(z: AlgElement, target: space.ConjSpace) -> AlgElement:
    """Relabel ``c_{j+1} -> c_j``; inverse of the shift endomorphism on its range."""
    terms = {}
    for mask, coeff in z.terms.items():
        if mask & 1:  # pragma: no cover
            raise ValueError("Element is not in the range of the shift endomorphism.")
        terms[mask >> 1] = coeff
    return AlgElement(target, terms)


def phi(V: Isometry, a: AlgElement, sign: int = 1) -> AlgElement:
    """Left inverse of ``sigma_V``: ``phi_V(a) = rho_V^{-1}(a0 + a1)``.

    In the rotated frame ``rho_R rho_V`` is the shift ``c_j -> c_{j+1}``, so the inverse of
    ``rho_V`` on its range is a relabeling of ``x_0 + a1``.
    """
    _check_sign(sign)
    x, y = _rotated_split(V, a)
    z = algebra.grade_project(x, 0) + -sign * 1j * algebra.grade_project(y, 1)
    return _unshift(z, V.domain)


def Phi(V: Isometry, a: AlgElement, sign: int = 1) -> AlgElement:
    """Left inverse of ``rho_V``: ``Phi_V(a) = phi_V(u_V a u_V*)``."""
    _check_index_minus_one(V)
    _check_codomain(V, a)
    u = u_element(V, sign=sign).element
    return phi(V, u * a * algebra.adjoint(u), sign=sign)


def cond_expect(V: Isometry, a: AlgElement, sign: int = 1) -> AlgElement:
    """Return ``sigma_V(phi_V(a))``, the conditional expectation onto the even subalgebra."""
    return sigma(V, phi(V, a, sign=sign), sign=sign)


def twist_action_error(V: Isometry, a: AlgElement, sign: int = 1) -> float:
    """Return the deviation from ``u b u* = b`` on ``C(ran V)_0`` and ``u b u* = k_V b`` on ``C(ran V)_1``.

    ``b`` ranges over the even and odd parts of ``rho_V(a)``.
    """
    image = rho(V, a)
    u = u_element(V, sign=sign).element
    u_star = algebra.adjoint(u)
    k = k_element(V, sign=sign).element
    even, odd = algebra.grade_project(image, 0), algebra.grade_project(image, 1)
    return max(algebra.distance(u * even * u_star, even), algebra.distance(u * odd * u_star, k * odd))


def range_split_error(V: Isometry, sign: int = 1) -> float:
    """Check ``C(K)_0 = C(ran V)_0 + C k_V C(ran V)_1`` on the even monomials of the codomain.

    Every even monomial must decompose with ``b1 = 0`` and reassemble exactly.
    """
    k = k_element(V, sign=sign).element
    error = 0.0
    for mask in range(1 << V.codomain.dim):
        if algebra.popcount(mask) & 1:
            continue
        c = AlgElement(V.codomain, {mask: 1})
        a0, a1, b1 = decompose(V, c, sign=sign)
        error = max(error, algebra.distance(b1, algebra.zero(V.codomain)), algebra.distance(a0 + k * a1, c))
    return error


################################################################################
# index arithmetic
################################################################################


def stat_dimension(V: Isometry) -> float:
    """Return the statistical dimension ``2**(-ind V / 2)`` of ``rho_V``."""
    return 2.0 ** (-space.fredholm_index(V) / 2)


def image_dimension_ratio(V: Isometry) -> float:
    """Return ``dim C(K_out) / dim rho_V(C(K_in))``, the finite-dimensional inclusion index."""
    return float(2 ** V.codomain.dim) / float(2 ** V.domain.dim)


################################################################################
# transitivity and the restriction of rho_W to the even subalgebra
################################################################################


def transport_unitary(V: Isometry, V_prime: Isometry) -> Isometry:
    """Return the orthogonal ``U`` with ``rho_U sigma_V = sigma_{V'}``.

    ``U = V' V* + e' <e, .>`` maps ``ran V`` to ``ran V'`` along ``V' V*`` and the kernel
    vector ``e`` of ``V*`` to the kernel vector ``e'`` of ``V'*``.
    """
    _check_index_minus_one(V)
    _check_index_minus_one(V_prime)
    if V.domain != V_prime.domain or V.codomain != V_prime.codomain:
        raise ValueError("Isometries must share domain and codomain.")
    e = space.kernel_selfconjugate_unit(V).coords.real
    e_prime = space.kernel_selfconjugate_unit(V_prime).coords.real
    matrix = V_prime.matrix @ V.matrix.T + np.outer(e_prime, e)
    return Isometry(V.codomain, V.codomain, matrix)


def remark4_partner(W: Isometry, V: Isometry) -> Isometry:
    """Return ``W' = W V``, whose index is ``ind W - 1`` when ``ind V = -1``."""
    _check_index_minus_one(V)
    return space.compose(W, V)


def remark4_intertwine_error(
    W: Isometry, V: Isometry, samples: Sequence[AlgElement] = (), sign: int = 1
) -> float:
    """Return the deviation from ``rho_W sigma_V(a) = rho_W(u_V) rho_{WV}(a) rho_W(u_V)*``.

    ``a`` runs over the generators of ``C(K_in)`` and ``samples``. Returns ``inf`` if the
    index bookkeeping ``ind WV = ind W - 1`` fails.
    """
    W_prime = remark4_partner(W, V)
    if space.fredholm_index(W_prime) != space.fredholm_index(W) - 1:  # pragma: no cover
        return math.inf
    intertwiner = rho(W, u_element(V, sign=sign).element)
    intertwiner_star = algebra.adjoint(intertwiner)
    elements = [algebra.generator(V.domain, j) for j in range(1, V.domain.dim + 1)] + list(samples)
    error = 0.0
    for a in elements:
        lhs = rho(W, sigma(V, a, sign=sign))
        rhs = intertwiner * rho(W_prime, a) * intertwiner_star
        error = max(error, algebra.distance(lhs, rhs))
    return error


def remark4_intertwine_check(
    W: Isometry, V: Isometry, samples: Sequence[AlgElement] = (), tol: float = DERIVED_TOL
) -> bool:
    return remark4_intertwine_error(W, V, samples) <= tol
