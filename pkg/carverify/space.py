"""Finite-dimensional Hilbert spaces with a complex conjugation and their isometries.

A ``ConjSpace`` of dimension ``m`` is ``C^m`` with the self-conjugate orthonormal basis
``e_1, ..., e_m``; conjugation acts componentwise. An isometry commutes with
conjugation exactly when its matrix in these bases is real, so ``Isometry`` stores a real
matrix and rejects complex input.

Inner products are conjugate-linear in the first argument.
"""
import dataclasses
import functools
import logging
from typing import List

import numpy as np
import scipy.linalg

from carverify.config import DERIVED_TOL, STRUCTURAL_TOL

logger = logging.getLogger("carverify")


@dataclasses.dataclass(frozen=True)
class ConjSpace:
    """``C^dim`` with componentwise complex conjugation."""

    dim: int

    def __post_init__(self) -> None:
        if int(self.dim) != self.dim or self.dim < 1:
            raise ValueError(f"Dimension must be a positive integer, not `{self.dim}`.")


def _frozen(array: np.ndarray) -> np.ndarray:
    array = np.array(array)
    array.setflags(write=False)
    return array


@dataclasses.dataclass(frozen=True, eq=False)
class Vec:
    """Vector in a ``ConjSpace``. Coordinates are stored as a read-only complex array."""

    space: ConjSpace
    coords: np.ndarray

    def __post_init__(self) -> None:
        coords = np.asarray(self.coords, dtype=complex)
        if coords.shape != (self.space.dim,):
            raise ValueError(f"Expected {self.space.dim} coordinates, got shape `{coords.shape}`.")
        object.__setattr__(self, "coords", _frozen(coords))

    def __add__(self, other: "Vec") -> "Vec":
        _check_same_space(self.space, other.space)
        return Vec(self.space, self.coords + other.coords)

    def __sub__(self, other: "Vec") -> "Vec":
        _check_same_space(self.space, other.space)
        return Vec(self.space, self.coords - other.coords)

    def __mul__(self, scalar: complex) -> "Vec":
        return Vec(self.space, scalar * self.coords)

    __rmul__ = __mul__

    def norm(self) -> float:
        return float(np.linalg.norm(self.coords))


@dataclasses.dataclass(frozen=True, eq=False)
class Isometry:
    """Conjugation-commuting isometry ``domain -> codomain``.

    ``matrix`` has shape ``(codomain.dim, domain.dim)``, real entries and orthonormal
    columns.
    """

    domain: ConjSpace
    codomain: ConjSpace
    matrix: np.ndarray

    def __post_init__(self) -> None:
        matrix = np.asarray(self.matrix)
        if np.iscomplexobj(matrix):
            # conjugation-commuting maps are real in the self-conjugate bases
            raise ValueError("Isometry matrix must be real; complex matrices do not commute with conjugation.")
        matrix = matrix.astype(float)
        expected = (self.codomain.dim, self.domain.dim)
        if matrix.shape != expected:
            raise ValueError(f"Isometry matrix has shape `{matrix.shape}`, expected `{expected}`.")
        if not np.isfinite(matrix).all():
            raise ValueError("Isometry matrix has non-finite entries.")
        error = np.max(np.abs(matrix.T @ matrix - np.eye(self.domain.dim)))
        if not error <= STRUCTURAL_TOL:
            raise ValueError(f"Isometry matrix columns are not orthonormal (error `{error:.3e}`).")
        object.__setattr__(self, "matrix", _frozen(matrix))

    @property
    def index(self) -> int:
        return fredholm_index(self)

    @property
    def key(self) -> bytes:
        """Identity of the isometry: its dimensions and the bytes of its matrix."""
        return bytes(f"{self.codomain.dim}x{self.domain.dim}:", "ascii") + self.matrix.tobytes()

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Isometry):
            return NotImplemented
        return self.key == other.key

    def __hash__(self) -> int:
        return hash(self.key)


def _check_same_space(first: ConjSpace, second: ConjSpace) -> None:
    if first != second:
        raise ValueError(f"Dimension mismatch: `{first.dim}` != `{second.dim}`.")


def basis_vector(space: ConjSpace, j: int) -> Vec:
    """Return the self-conjugate basis vector ``e_j`` (1-based)."""
    if not 1 <= j <= space.dim:
        raise ValueError(f"Basis index `{j}` out of range 1..{space.dim}.")
    coords = np.zeros(space.dim, dtype=complex)
    coords[j - 1] = 1
    return Vec(space, coords)


def conjugate(k: Vec) -> Vec:
    return Vec(k.space, np.conj(k.coords))


def inner(k: Vec, k_prime: Vec) -> complex:
    """Inner product, conjugate-linear in ``k`` and linear in ``k_prime``."""
    _check_same_space(k.space, k_prime.space)
    return complex(np.vdot(k.coords, k_prime.coords))


def random_vec(space: ConjSpace, seed: int) -> Vec:
    """Complex vector with standard normal real and imaginary parts."""
    rng = np.random.default_rng(seed)
    return Vec(space, rng.standard_normal(space.dim) + 1j * rng.standard_normal(space.dim))


def identity_isometry(m: int) -> Isometry:
    space = ConjSpace(m)
    return Isometry(space, space, np.eye(m))


def negation_isometry(m: int) -> Isometry:
    """Return ``-1`` on ``K_m``; its Bogoliubov automorphism is the grading."""
    space = ConjSpace(m)
    return Isometry(space, space, -np.eye(m))


def shift_isometry(m: int) -> Isometry:
    """Return ``V: K_m -> K_{m+1}``, ``V e_j = e_{j+1}``. ``ker V*`` is spanned by ``e_1``."""
    if m < 1:
        raise ValueError(f"Shift isometry needs m >= 1, got `{m}`.")
    matrix = np.zeros((m + 1, m))
    matrix[1:, :] = np.eye(m)
    return Isometry(ConjSpace(m), ConjSpace(m + 1), matrix)


def random_isometry(m_in: int, m_out: int, seed: int) -> Isometry:
    """Return a seeded real isometry ``K_{m_in} -> K_{m_out}``.

    A standard normal ``m_out x m_in`` matrix is orthonormalized by QR. The signs of the
    columns are fixed so that the diagonal of ``R`` is positive, which makes the result
    independent of the LAPACK sign convention.
    """
    if not 1 <= m_in <= m_out:
        raise ValueError(f"Random isometry needs 1 <= m_in <= m_out, got `{m_in}` and `{m_out}`.")
    rng = np.random.default_rng(seed)
    gaussian = rng.standard_normal((m_out, m_in))
    q, r = np.linalg.qr(gaussian)
    signs = np.where(np.diag(r) < 0, -1.0, 1.0)
    return Isometry(ConjSpace(m_in), ConjSpace(m_out), q * signs)


def random_index_minus_one(m: int, seed: int) -> Isometry:
    """Random isometry ``K_m -> K_{m+1}``, i.e. with Fredholm index -1."""
    return random_isometry(m, m + 1, seed)


def compose(W: Isometry, V: Isometry) -> Isometry:
    """Return ``W V``."""
    if V.codomain != W.domain:
        raise ValueError(f"Cannot compose: codomain of V (`{V.codomain.dim}`) != domain of W (`{W.domain.dim}`).")
    return Isometry(V.domain, W.codomain, W.matrix @ V.matrix)


def fredholm_index(V: Isometry) -> int:
    """Return ``ind V = -dim ker V*``, which for an isometry is ``dim domain - dim codomain``."""
    return V.domain.dim - V.codomain.dim


def kernel_dimension(V: Isometry) -> int:
    """Return ``dim ker V*`` computed from the rank of the matrix."""
    return V.codomain.dim - int(np.linalg.matrix_rank(V.matrix))


def apply(V: Isometry, k: Vec) -> Vec:
    _check_same_space(V.domain, k.space)
    return Vec(V.codomain, V.matrix @ k.coords)


def adjoint_apply(V: Isometry, k: Vec) -> Vec:
    """Return ``V* k``."""
    _check_same_space(V.codomain, k.space)
    return Vec(V.domain, V.matrix.T @ k.coords)


@functools.lru_cache(maxsize=256)
def kernel_selfconjugate_unit(V: Isometry) -> Vec:
    """Return the self-conjugate unit vector spanning ``ker V*``.

    The kernel of ``V*`` is invariant under conjugation and, for ``ind V = -1``, one
    dimensional, so it is spanned by a real unit vector which is unique up to sign. The
    sign is fixed by making the first nonzero coordinate positive. Results are cached per
    isometry.

    Raises:
        ValueError: ``ind V != -1``.

    """
    if fredholm_index(V) != -1:
        raise ValueError(f"Kernel of V* must be one-dimensional; `ind V` is `{fredholm_index(V)}`, not -1.")
    null_space = scipy.linalg.null_space(V.matrix.T)
    if null_space.shape[1] != 1:  # pragma: no cover
        raise ValueError(f"Numerical kernel of V* has dimension `{null_space.shape[1]}`.")
    e = null_space[:, 0]
    e = e / np.linalg.norm(e)
    pivot = np.flatnonzero(np.abs(e) > DERIVED_TOL)[0]
    if e[pivot] < 0:
        e = -e
    # entries below tolerance are exactly zero for axis-aligned kernels
    e = np.where(np.abs(e) > 1e-15, e, 0.0)
    residual = np.linalg.norm(V.matrix.T @ e)
    if residual > DERIVED_TOL:  # pragma: no cover
        raise ValueError(f"Kernel vector residual `{residual:.3e}` exceeds tolerance.")
    logger.debug(f"Kernel of V* for a {V.codomain.dim}x{V.domain.dim} isometry spanned by `{e}`.")
    return Vec(V.codomain, e)


def polarization_basis(m: int) -> List[Vec]:
    """Return ``f_a = (e_{2a-1} + i e_{2a}) / sqrt(2)``, ``a = 1..m/2``.

    The ``f_a`` span a polarization ``H``: ``K = H + H*`` with ``H`` orthogonal to ``H*``.
    """
    if m < 2 or m % 2:
        raise ValueError(f"A polarization needs an even positive dimension, got `{m}`.")
    space = ConjSpace(m)
    basis = []
    for a in range(m // 2):
        coords = np.zeros(m, dtype=complex)
        coords[2 * a] = 1 / np.sqrt(2)
        coords[2 * a + 1] = 1j / np.sqrt(2)
        basis.append(Vec(space, coords))
    return basis


def polarization_residual(k: Vec) -> float:
    """Return the norm of the component of ``k`` orthogonal to the polarization ``H``."""
    basis = polarization_basis(k.space.dim)
    projection = sum((inner(f, k) * f for f in basis), Vec(k.space, np.zeros(k.space.dim)))
    return (k - projection).norm()


def random_polarized_vec(m: int, seed: int) -> Vec:
    """Random vector of ``H``: a complex normal combination of the polarization basis."""
    basis = polarization_basis(m)
    rng = np.random.default_rng(seed)
    weights = rng.standard_normal(len(basis)) + 1j * rng.standard_normal(len(basis))
    return sum((complex(w) * f for w, f in zip(weights, basis)), Vec(ConjSpace(m), np.zeros(m)))
