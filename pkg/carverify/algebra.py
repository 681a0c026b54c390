"""The selfdual CAR algebra ``C(K)`` over a finite-dimensional ``K``.

Elements are sparse tables mapping a monomial bitmask to a complex coefficient. Bit
``j - 1`` of the mask stands for the Majorana generator ``c_j = sqrt(2) B(e_j)``; a mask
denotes the product of its generators in ascending order. Generators are self-adjoint,
square to one and pairwise anticommute, so the product of two monomials is a signed
monomial:

    c_S c_T = (-1)^N c_{S xor T},  N = #{(s, t) : s in S, t in T, s > t}.

Products of small elements loop over pairs of terms. Products of larger elements use a
vectorized kernel over the dense coefficient array: for a fixed left monomial ``s`` the
sign of ``c_s c_T`` is the parity of ``T & L(s)`` for a mask ``L(s)`` depending on ``s``
only, so one left term multiplies all of ``T`` in a handful of numpy operations.
"""
import cmath
import collections
import functools
import logging
import numbers
import types
from typing import Dict, Iterable, List, Literal, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from carverify import schemas
from carverify.config import (
    ALGEBRA_GENERATOR_CAP,
    DENSE_SHIFT,
    DERIVED_TOL,
    PRUNE_TOL,
    SPARSE_TERM_LIMIT,
    STRUCTURAL_TOL,
)
from carverify.space import ConjSpace, Vec, polarization_residual

logger = logging.getLogger("carverify")

Grade = Literal[0, 1]
Scalar = Union[complex, float, int]


def popcount(mask: int) -> int:
    return bin(mask).count("1")


def mask_indices(mask: int) -> List[int]:
    """Return the generator indices (1-based, ascending) of a monomial mask."""
    indices = []
    j = 1
    while mask:
        if mask & 1:
            indices.append(j)
        mask >>= 1
        j += 1
    return indices


def reorder_sign(s: int, t: int) -> int:
    """Return the sign in ``c_s c_t = sign * c_{s xor t}``."""
    # counts pairs (a, b), a in s, b in t, a > b, one offset at a time
    s >>= 1
    swaps = 0
    while s:
        swaps += popcount(s & t)
        s >>= 1
    return -1 if swaps & 1 else 1


class AlgElement:
    """Element of ``C(K_m)`` in canonical form.

    ``terms`` maps monomial masks to nonzero coefficients; coefficients of magnitude at
    most ``PRUNE_TOL`` are dropped on construction and non-finite coefficients are
    rejected. Instances are immutable.
    """

    __slots__ = ("_space", "_terms")
    # numpy scalars defer to __rmul__ instead of broadcasting
    __array_ufunc__ = None

    def __init__(self, space: ConjSpace, terms: Optional[Mapping[int, Scalar]] = None) -> None:
        if space.dim > ALGEBRA_GENERATOR_CAP:
            raise ValueError(f"At most {ALGEBRA_GENERATOR_CAP} generators are supported, got `{space.dim}`.")
        limit = 1 << space.dim
        pruned: Dict[int, complex] = {}
        for mask, coeff in sorted((terms or {}).items()):
            if not 0 <= mask < limit:
                raise ValueError(f"Monomial mask `{mask}` out of range for {space.dim} generators.")
            coeff = complex(coeff)
            if not cmath.isfinite(coeff):
                raise ValueError(f"Coefficient of monomial `{mask}` is not finite: `{coeff}`.")
            if abs(coeff) > PRUNE_TOL:
                pruned[mask] = coeff
        self._space = space
        self._terms = types.MappingProxyType(pruned)

    @property
    def space(self) -> ConjSpace:
        return self._space

    @property
    def dim(self) -> int:
        return self._space.dim

    @property
    def terms(self) -> Mapping[int, complex]:
        return self._terms

    def __len__(self) -> int:
        return len(self._terms)

    def __add__(self, other: "AlgElement") -> "AlgElement":
        return linear_combine([(1, self), (1, other)])

    def __sub__(self, other: "AlgElement") -> "AlgElement":
        return linear_combine([(1, self), (-1, other)])

    def __neg__(self) -> "AlgElement":
        return scale(self, -1)

    def __mul__(self, other: Union["AlgElement", Scalar]) -> "AlgElement":
        if isinstance(other, AlgElement):
            return mul(self, other)
        if isinstance(other, numbers.Number):
            return scale(self, complex(other))  # type: ignore
        return NotImplemented

    def __rmul__(self, other: Scalar) -> "AlgElement":
        if isinstance(other, numbers.Number):
            return scale(self, complex(other))  # type: ignore
        return NotImplemented

    def __truediv__(self, other: Scalar) -> "AlgElement":
        return scale(self, 1 / complex(other))

    def __repr__(self) -> str:
        def term(mask: int, coeff: complex) -> str:
            name = "".join(f"c{j}" for j in mask_indices(mask)) or "1"
            return f"({coeff:.6g})*{name}"

        body = " + ".join(term(mask, coeff) for mask, coeff in self._terms.items()) or "0"
        return f"AlgElement(dim={self.dim}, {body})"


def _check_same_space(a: AlgElement, b: AlgElement) -> None:
    if a.space != b.space:
        raise ValueError(f"Elements live on different spaces: `{a.dim}` and `{b.dim}` generators.")


def zero(space: ConjSpace) -> AlgElement:
    return AlgElement(space)


def scalar(space: ConjSpace, value: Scalar) -> AlgElement:
    return AlgElement(space, {0: value})


def one(space: ConjSpace) -> AlgElement:
    return scalar(space, 1)


def monomial(space: ConjSpace, indices: Iterable[int], coeff: Scalar = 1) -> AlgElement:
    """Return ``coeff * c_{j_1} ... c_{j_k}`` for the given (1-based) indices, in any order."""
    mask = 0
    sign = 1
    for j in indices:
        if not 1 <= j <= space.dim:
            raise ValueError(f"Generator index `{j}` out of range 1..{space.dim}.")
        bit = 1 << (j - 1)
        sign *= reorder_sign(mask, bit)
        mask ^= bit
    return AlgElement(space, {mask: sign * complex(coeff)})


def generator(space: ConjSpace, j: int) -> AlgElement:
    """Return the Majorana generator ``c_j``."""
    return monomial(space, [j])


def scale(a: AlgElement, factor: complex) -> AlgElement:
    return AlgElement(a.space, {mask: factor * coeff for mask, coeff in a.terms.items()})


def b_of(k: Vec) -> AlgElement:
    """Return ``B(k) = sum_j k_j c_j / sqrt(2)``, the image of ``k`` under ``K -> C(K)``."""
    terms = {1 << j: coeff / np.sqrt(2) for j, coeff in enumerate(k.coords)}
    return AlgElement(k.space, terms)


def linear_combine(pairs: Sequence[Tuple[Scalar, AlgElement]]) -> AlgElement:
    """Return ``sum_i lambda_i a_i`` for pairs ``(lambda_i, a_i)``."""
    if not pairs:
        raise ValueError("Cannot combine an empty list of elements; the space is unknown.")
    space = pairs[0][1].space
    total: Dict[int, complex] = collections.defaultdict(complex)
    for factor, element in pairs:
        if element.space != space:
            raise ValueError(f"Elements live on different spaces: `{space.dim}` and `{element.dim}` generators.")
        for mask, coeff in element.terms.items():
            total[mask] += factor * coeff
    return AlgElement(space, total)


################################################################################
# dense coefficient arrays
################################################################################


@functools.lru_cache(maxsize=None)
def _popcount_table(n: int) -> np.ndarray:
    table = np.zeros(1 << n, dtype=np.int64)
    for bit in range(n):
        table[1 << bit : 1 << (bit + 1)] = table[: 1 << bit] + 1
    table.setflags(write=False)
    return table


@functools.lru_cache(maxsize=None)
def _parity_table(n: int) -> np.ndarray:
    parity = (_popcount_table(n) & 1).astype(np.int64)
    parity.setflags(write=False)
    return parity


@functools.lru_cache(maxsize=None)
def _masks(n: int) -> np.ndarray:
    masks = np.arange(1 << n, dtype=np.int64)
    masks.setflags(write=False)
    return masks


@functools.lru_cache(maxsize=1 << 16)
def _left_sign_mask(s: int, n: int) -> int:
    """Bits ``t`` for which ``s`` has an odd number of bits above ``t``."""
    return sum(1 << t for t in range(n) if popcount(s >> (t + 1)) & 1)


@functools.lru_cache(maxsize=1 << 16)
def _right_sign_mask(u: int, n: int) -> int:
    """Bits ``x`` for which ``u`` has an odd number of bits below ``x``."""
    return sum(1 << x for x in range(n) if popcount(u & ((1 << x) - 1)) & 1)


def to_dense(a: AlgElement) -> np.ndarray:
    vec = np.zeros(1 << a.dim, dtype=complex)
    for mask, coeff in a.terms.items():
        vec[mask] = coeff
    return vec


def from_dense(space: ConjSpace, vec: np.ndarray) -> AlgElement:
    if not np.isfinite(vec).all():
        raise ValueError("Dense coefficients contain non-finite values.")
    support = np.flatnonzero(np.abs(vec) > PRUNE_TOL)
    return AlgElement(space, {int(mask): complex(vec[mask]) for mask in support})


def dense_left_product(a: AlgElement, vec: np.ndarray) -> np.ndarray:
    """Return the coefficients of ``a * x`` where ``x`` has dense coefficients ``vec``.

    ``vec`` may hold one element per row; the product is taken along the last axis.
    """
    n = a.dim
    masks, parity = _masks(n), _parity_table(n)
    out = np.zeros(vec.shape, dtype=complex)
    for s, coeff in a.terms.items():
        # output monomial x receives input monomial x ^ s
        source = masks ^ s
        signs = 1 - 2 * parity[source & _left_sign_mask(s, n)]
        out += (coeff * signs) * vec[..., source]
    return out


def dense_right_product(vec: np.ndarray, b: AlgElement) -> np.ndarray:
    """Return the coefficients of ``x * b`` where ``x`` has dense coefficients ``vec``.

    ``vec`` may hold one element per row; the product is taken along the last axis.
    """
    n = b.dim
    masks, parity = _masks(n), _parity_table(n)
    out = np.zeros(vec.shape, dtype=complex)
    for u, coeff in b.terms.items():
        source = masks ^ u
        signs = 1 - 2 * parity[source & _right_sign_mask(u, n)]
        out += (coeff * signs) * vec[..., source]
    return out


def _sparse_product(a: AlgElement, b: AlgElement) -> AlgElement:
    out: Dict[int, complex] = collections.defaultdict(complex)
    for s, x in a.terms.items():
        for t, y in b.terms.items():
            out[s ^ t] += reorder_sign(s, t) * x * y
    return AlgElement(a.space, out)


def mul(a: AlgElement, b: AlgElement, kernel: Optional[str] = None) -> AlgElement:
    """Return the product ``a b``.

    ``kernel`` forces the pairwise loop (``"sparse"``) or the vectorized kernel
    (``"dense"``). By default the vectorized kernel is used once the larger operand has
    more than ``max(SPARSE_TERM_LIMIT, 2**m >> DENSE_SHIFT)`` terms.
    """
    _check_same_space(a, b)
    if kernel is None:
        limit = max(SPARSE_TERM_LIMIT, (1 << a.dim) >> DENSE_SHIFT)
        kernel = "sparse" if max(len(a), len(b)) <= limit else "dense"
    if kernel == "sparse":
        return _sparse_product(a, b)
    if kernel != "dense":
        raise ValueError(f"Unknown multiplication kernel `{kernel}`.")
    # iterate over the operand with fewer terms
    if len(a) <= len(b):
        return from_dense(a.space, dense_left_product(a, to_dense(b)))
    return from_dense(a.space, dense_right_product(to_dense(a), b))


def anticommutator(a: AlgElement, b: AlgElement) -> AlgElement:
    return mul(a, b) + mul(b, a)


################################################################################
# *-structure, grading, trace
################################################################################


def _reversal_sign(mask: int) -> int:
    degree = popcount(mask)
    return -1 if (degree * (degree - 1) // 2) & 1 else 1


def adjoint(a: AlgElement) -> AlgElement:
    """Return ``a*``: conjugate coefficients, reverse every monomial."""
    return AlgElement(a.space, {mask: _reversal_sign(mask) * coeff.conjugate() for mask, coeff in a.terms.items()})


def gamma(a: AlgElement) -> AlgElement:
    """Return the grading automorphism applied to ``a``: odd monomials change sign."""
    return AlgElement(a.space, {mask: -coeff if popcount(mask) & 1 else coeff for mask, coeff in a.terms.items()})


def _check_grade(g: int) -> None:
    if g not in (0, 1):
        raise ValueError(f"Grade must be 0 or 1, not `{g}`.")


def grade_project(a: AlgElement, g: Grade) -> AlgElement:
    """Return the grade-``g`` part of ``a``, i.e. ``(a + (-1)^g gamma(a)) / 2``."""
    _check_grade(g)
    return AlgElement(a.space, {mask: coeff for mask, coeff in a.terms.items() if popcount(mask) % 2 == g})


def is_pure_grade(a: AlgElement, g: Grade) -> bool:
    _check_grade(g)
    return all(popcount(mask) % 2 == g for mask in a.terms)


def trace(a: AlgElement) -> complex:
    """Return the normalized trace: the coefficient of the unit monomial."""
    return a.terms.get(0, 0j)


def distance(a: AlgElement, b: AlgElement) -> float:
    """Return the largest coefficient difference between ``a`` and ``b``."""
    _check_same_space(a, b)
    masks = set(a.terms) | set(b.terms)
    return max((abs(a.terms.get(mask, 0j) - b.terms.get(mask, 0j)) for mask in masks), default=0.0)


def approx_eq(a: AlgElement, b: AlgElement, tol: float = STRUCTURAL_TOL) -> bool:
    return distance(a, b) <= tol


def random_element(space: ConjSpace, max_degree: int, seed: int, density: float = 1.0) -> AlgElement:
    """Return an element with seeded complex normal coefficients.

    Every monomial of degree at most ``max_degree`` receives a coefficient; with
    ``density < 1`` each monomial is kept with that probability.
    """
    if not 0 <= max_degree <= space.dim:
        raise ValueError(f"Degree `{max_degree}` out of range 0..{space.dim}.")
    if not 0 < density <= 1:
        raise ValueError(f"Density must be in (0, 1], got `{density}`.")
    masks = np.flatnonzero(_popcount_table(space.dim) <= max_degree)
    rng = np.random.default_rng(seed)
    coeffs = rng.standard_normal(len(masks)) + 1j * rng.standard_normal(len(masks))
    if density < 1:
        keep = rng.random(len(masks)) < density
        masks, coeffs = masks[keep], coeffs[keep]
    return AlgElement(space, {int(mask): complex(coeff) for mask, coeff in zip(masks, coeffs)})


def split_off_generator(a: AlgElement, j: int) -> Tuple[AlgElement, AlgElement]:
    """Return ``(x, y)`` free of ``c_j`` with ``a = x + c_j y``."""
    if not 1 <= j <= a.dim:
        raise ValueError(f"Generator index `{j}` out of range 1..{a.dim}.")
    bit = 1 << (j - 1)
    x: Dict[int, complex] = {}
    y: Dict[int, complex] = {}
    for mask, coeff in a.terms.items():
        if mask & bit:
            # moving c_j to the front passes the generators with smaller index
            sign = -1 if popcount(mask & (bit - 1)) & 1 else 1
            y[mask ^ bit] = sign * coeff
        else:
            x[mask] = coeff
    return AlgElement(a.space, x), AlgElement(a.space, y)


################################################################################
# CAR operations over the polarization spanned by (e_{2a-1} + i e_{2a}) / sqrt(2)
################################################################################


def car_annihilator(f: Vec, tol: float = DERIVED_TOL) -> AlgElement:
    """Return ``a(f) = B(f)`` for ``f`` in the polarization ``H``; ``a(f)`` is linear in ``f``.

    Raises:
        ValueError: ``f`` has a component outside ``H`` larger than ``tol``.

    """
    residual = polarization_residual(f)
    if residual > tol:
        raise ValueError(f"Vector is not in the polarization subspace (residual `{residual:.3e}`).")
    return b_of(f)


def car_creator(f: Vec, tol: float = DERIVED_TOL) -> AlgElement:
    """Return ``a(f)* = B(f*)``."""
    return adjoint(car_annihilator(f, tol=tol))


################################################################################
# serialization
################################################################################


def element_to_json(a: AlgElement) -> dict:
    """Return the JSON object ``{"dim": m, "terms": [{"mask", "re", "im"}, ...]}``."""
    payload = {
        "dim": a.dim,
        "terms": [{"mask": mask, "re": coeff.real, "im": coeff.imag} for mask, coeff in a.terms.items()],
    }
    return dict(schemas.Element().dump(payload))


def element_from_json(payload: dict) -> AlgElement:
    """Load an element from its JSON object.

    Raises:
        marshmallow.ValidationError: malformed payload.

    """
    data = schemas.Element().load(payload)
    terms = {term["mask"]: complex(term["re"], term["im"]) for term in data["terms"]}
    return AlgElement(ConjSpace(data["dim"]), terms)
