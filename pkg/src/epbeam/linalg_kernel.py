"""Dense complex linear algebra for small square matrices.

Matrices and vectors are immutable wrappers over numpy arrays. The matrix
exponential is scipy's Pade scaling-and-squaring applied after removing the
scalar part of the matrix. Eigendecompositions come in two
precisions: LAPACK in double precision with a first-order error estimate,
and mpmath's Hessenberg reduction followed by shifted QR in extended
precision, rounded to double once at the end. Neither refers to any
closed-form eigenvalue expression.
"""

from __future__ import annotations

import cmath
import logging
import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from typing import Any, Union

import mpmath
import numpy as np
from numpy.typing import NDArray
from scipy import linalg as sla

from .config import DEFAULT_TOLERANCES, Tolerances

logger = logging.getLogger(__name__)

ComplexArray = NDArray[np.complex128]

# Largest 1-norm handled by the degree-13 Pade approximant without squaring.
PADE13_THETA = 5.371920351148152


class NumericalError(Exception):
    """Base class for numerical failures."""


class MatrixNormError(NumericalError):
    """Raised when a matrix is too large to exponentiate."""


class EigenConvergenceError(NumericalError):
    """Raised when the eigensolver fails to converge."""


class NotTriangularError(NumericalError, ValueError):
    """Raised when nilpotent_expm receives a matrix that is not strictly triangular."""


def _as_array(values: Any, ndim: int) -> ComplexArray:
    array = np.array(values, dtype=np.complex128)
    if array.ndim != ndim:
        raise ValueError(f"expected a {ndim}-dimensional array, got shape {array.shape}")
    if array.size == 0:
        raise ValueError("dimension must be at least 1")
    if not np.all(np.isfinite(array)):
        raise ValueError("entries must be finite")
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class ComplexVector:
    """Amplitude vector of fixed dimension."""

    amplitudes: ComplexArray

    def __post_init__(self) -> None:
        object.__setattr__(self, "amplitudes", _as_array(self.amplitudes, 1))

    @property
    def dim(self) -> int:
        return int(self.amplitudes.shape[0])

    def __len__(self) -> int:
        return self.dim

    def __getitem__(self, index: int) -> complex:
        return complex(self.amplitudes[index])

    def __iter__(self) -> Any:
        return (complex(value) for value in self.amplitudes)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def norm_squared(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)

    def vdot(self, other: ComplexVector) -> complex:
        """Inner product conj(self) . other."""
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def to_list(self) -> list[complex]:
        return [complex(value) for value in self.amplitudes]


@dataclass(frozen=True, eq=False)
class ComplexMatrix:
    """Square complex matrix; entries iterate row-major."""

    entries: ComplexArray

    def __post_init__(self) -> None:
        array = _as_array(self.entries, 2)
        if array.shape[0] != array.shape[1]:
            raise ValueError(f"matrix must be square, got shape {array.shape}")
        object.__setattr__(self, "entries", array)

    @classmethod
    def identity(cls, dim: int) -> ComplexMatrix:
        return cls(np.eye(dim, dtype=np.complex128))

    @classmethod
    def zeros(cls, dim: int) -> ComplexMatrix:
        return cls(np.zeros((dim, dim), dtype=np.complex128))

    @classmethod
    def diag(cls, values: Iterable[complex]) -> ComplexMatrix:
        return cls(np.diag(np.array(list(values), dtype=np.complex128)))

    @classmethod
    def from_columns(cls, columns: Sequence[ComplexVector]) -> ComplexMatrix:
        return cls(np.column_stack([column.amplitudes for column in columns]))

    @property
    def dim(self) -> int:
        return int(self.entries.shape[0])

    def __matmul__(self, other: Any) -> Any:
        if isinstance(other, ComplexMatrix):
            return ComplexMatrix(self.entries @ other.entries)
        if isinstance(other, ComplexVector):
            if other.dim != self.dim:
                raise ValueError(f"dimension mismatch: {self.dim} vs {other.dim}")
            return ComplexVector(self.entries @ other.amplitudes)
        return NotImplemented

    def __add__(self, other: ComplexMatrix) -> ComplexMatrix:
        return ComplexMatrix(self.entries + other.entries)

    def __sub__(self, other: ComplexMatrix) -> ComplexMatrix:
        return ComplexMatrix(self.entries - other.entries)

    def __mul__(self, factor: complex) -> ComplexMatrix:
        return ComplexMatrix(self.entries * factor)

    __rmul__ = __mul__

    def __neg__(self) -> ComplexMatrix:
        return ComplexMatrix(-self.entries)

    def dagger(self) -> ComplexMatrix:
        return ComplexMatrix(self.entries.conj().T)

    def transpose(self) -> ComplexMatrix:
        return ComplexMatrix(self.entries.T)

    def trace(self) -> complex:
        return complex(np.trace(self.entries))

    def column(self, index: int) -> ComplexVector:
        return ComplexVector(self.entries[:, index])

    def max_abs(self) -> float:
        """Largest entry modulus."""
        return float(np.max(np.abs(self.entries)))

    def to_rows(self) -> list[list[complex]]:
        return [[complex(value) for value in row] for row in self.entries]


@dataclass(frozen=True, eq=False)
class EigenDecomposition:
    """Eigenvalues in lexicographic order with matching unit right eigenvectors."""

    eigenvalues: tuple[complex, ...]
    right_eigenvectors: ComplexMatrix
    converged: bool
    residual: float
    error_estimate: float = 0.0


MatrixLike = Union[ComplexMatrix, Any]


def expm(matrix: ComplexMatrix, tol: Tolerances = DEFAULT_TOLERANCES) -> ComplexMatrix:
    """Matrix exponential by Pade scaling-and-squaring.

    The scalar part trace/dim is split off first and restored as an exact
    scalar factor.
    """
    dim = matrix.dim
    shift = matrix.trace() / dim
    centred = matrix.entries - shift * np.eye(dim)

    norm = float(np.linalg.norm(centred, 1))
    squarings = 0 if norm <= PADE13_THETA else math.ceil(math.log2(norm / PADE13_THETA))
    if squarings > tol.expm_max_squarings:
        raise MatrixNormError(
            f"matrix norm out of range: 1-norm {norm:.3e} needs {squarings} squarings"
        )

    try:
        scalar = cmath.exp(shift)
    except OverflowError as exc:
        raise MatrixNormError(f"matrix norm out of range: trace shift {shift}") from exc

    result = scalar * sla.expm(centred)
    if not np.all(np.isfinite(result)):
        raise MatrixNormError("matrix norm out of range: exponential overflowed")
    return ComplexMatrix(result)


def _strictly_triangular(entries: ComplexArray, bandwidth: int) -> bool:
    rows, cols = np.indices(entries.shape)
    lower_ok = not np.any(entries[(rows - cols) < bandwidth])
    upper_ok = not np.any(entries[(cols - rows) < bandwidth])
    return bool(lower_ok or upper_ok)


def nilpotent_expm(matrix: ComplexMatrix, bandwidth: int = 1) -> ComplexMatrix:
    """Exact exponential of a strictly triangular matrix.

    ``bandwidth`` is the offset of the nearest populated diagonal, so every
    power M^k with k * bandwidth >= dim vanishes and the series is finite.
    """
    if bandwidth < 1:
        raise NotTriangularError(f"bandwidth must be >= 1, got {bandwidth}")
    entries = matrix.entries
    if not _strictly_triangular(entries, bandwidth):
        raise NotTriangularError(
            f"matrix is not strictly triangular with bandwidth {bandwidth}"
        )

    dim = matrix.dim
    result = np.eye(dim, dtype=np.complex128)
    term = np.eye(dim, dtype=np.complex128)
    for k in range(1, (dim - 1) // bandwidth + 1):
        term = term @ entries / k
        result = result + term
    return ComplexMatrix(result)


def to_mp_matrix(matrix: MatrixLike) -> Any:
    """Convert to an mpmath matrix; binary entries convert exactly."""
    if not isinstance(matrix, ComplexMatrix):
        return matrix
    return mpmath.matrix(
        [[mpmath.mpc(value.real, value.imag) for value in row] for row in matrix.entries]
    )


def _mp_dim(matrix: Any) -> int:
    if matrix.rows != matrix.cols:
        raise ValueError(f"matrix must be square, got {matrix.rows}x{matrix.cols}")
    return int(matrix.rows)


def _matrix_dim(matrix: MatrixLike) -> int:
    if isinstance(matrix, ComplexMatrix):
        return matrix.dim
    return _mp_dim(matrix)


def _to_complex(value: Any) -> complex:
    value = mpmath.mpc(value)
    return complex(float(value.real), float(value.imag))


def lexicographic_key(value: complex) -> tuple[float, float]:
    return (value.real, value.imag)


def normalize_phase(
    amplitudes: ComplexArray, tol: Tolerances = DEFAULT_TOLERANCES
) -> ComplexVector:
    """Scale to unit norm with the first significant component real and >= 0."""
    norm = np.linalg.norm(amplitudes)
    if norm == 0:
        raise ValueError("cannot normalize the zero vector")
    unit = amplitudes / norm
    magnitudes = np.abs(unit)
    significant = np.flatnonzero(magnitudes > tol.phase_floor * magnitudes.max())
    lead = unit[significant[0]]
    return ComplexVector(unit * (abs(lead) / lead))


def _check_dim(dim: int, tol: Tolerances) -> None:
    if dim > tol.eig_max_dim:
        raise ValueError(f"dimension {dim} exceeds the supported maximum {tol.eig_max_dim}")


def eigvals(matrix: MatrixLike, tol: Tolerances = DEFAULT_TOLERANCES) -> list[complex]:
    """Eigenvalues only, in lexicographic (real, imaginary) order."""
    dim = _matrix_dim(matrix)
    _check_dim(dim, tol)
    with mpmath.workdps(tol.working_dps(dim)):
        try:
            values = mpmath.eig(to_mp_matrix(matrix), left=False, right=False)
        except (RuntimeError, ZeroDivisionError) as exc:
            raise EigenConvergenceError(f"non-convergence: {exc}") from exc
        return sorted((_to_complex(value) for value in values), key=lexicographic_key)


def eig(matrix: MatrixLike, tol: Tolerances = DEFAULT_TOLERANCES) -> EigenDecomposition:
    """Full eigendecomposition of a general complex matrix.

    Accepts a ComplexMatrix or an mpmath matrix built at the working
    precision. Eigenvectors are normalized with the phase convention of
    `normalize_phase`; ``residual`` is the largest ||A v - lambda v||_2,
    evaluated in extended precision before rounding.

    mpmath caps the QR sweep at 4 * dps iterations per deflated eigenvalue,
    i.e. 80 + 40 * dim at the default precision (at least 30 * dim); hitting
    the cap raises EigenConvergenceError.
    """
    dim = _matrix_dim(matrix)
    _check_dim(dim, tol)

    with mpmath.workdps(tol.working_dps(dim)):
        a = to_mp_matrix(matrix)
        try:
            values, vectors = mpmath.eig(a, left=False, right=True)
        except (RuntimeError, ZeroDivisionError) as exc:
            raise EigenConvergenceError(f"non-convergence: {exc}") from exc

        pairs: list[tuple[complex, ComplexVector]] = []
        residual = mpmath.mpf(0)
        for k in range(dim):
            column = vectors.column(k)
            scale = mpmath.norm(column)
            if scale == 0:
                raise EigenConvergenceError(f"non-convergence: zero eigenvector {k}")
            column = column / scale
            residual = max(residual, mpmath.norm(a * column - values[k] * column))
            amplitudes = np.array([_to_complex(column[i]) for i in range(dim)])
            pairs.append((_to_complex(values[k]), normalize_phase(amplitudes, tol)))
        residual_value = float(residual)

    pairs.sort(key=lambda pair: lexicographic_key(pair[0]))
    logger.debug("eig: dim=%d residual=%.3e", dim, residual_value)
    return EigenDecomposition(
        eigenvalues=tuple(value for value, _ in pairs),
        right_eigenvectors=ComplexMatrix.from_columns([vector for _, vector in pairs]),
        converged=True,
        residual=residual_value,
    )


def eig_double(
    matrix: ComplexMatrix, tol: Tolerances = DEFAULT_TOLERANCES
) -> EigenDecomposition:
    """Double-precision eigendecomposition with a first-order error estimate.

    ``error_estimate`` is dim * eps * ||A||_2 times the largest eigenvalue
    condition number 1 / |y^H x| over unit left and right eigenvectors. It is
    infinite when some left and right eigenvector are orthogonal, as they are
    at a defective eigenvalue.
    """
    dim = matrix.dim
    _check_dim(dim, tol)
    a = matrix.entries
    try:
        values, left, right = sla.eig(a, left=True, right=True)
    except (sla.LinAlgError, ValueError) as exc:
        raise EigenConvergenceError(f"non-convergence: {exc}") from exc

    overlaps = np.abs(np.sum(left.conj() * right, axis=0))
    smallest = float(overlaps.min())
    if smallest == 0:
        estimate = math.inf
    else:
        eps = float(np.finfo(np.float64).eps)
        estimate = dim * eps * float(np.linalg.norm(a, 2)) / smallest

    residual = max(
        float(np.linalg.norm(a @ right[:, k] - values[k] * right[:, k])) for k in range(dim)
    )
    pairs = sorted(
        ((complex(values[k]), normalize_phase(right[:, k], tol)) for k in range(dim)),
        key=lambda pair: lexicographic_key(pair[0]),
    )
    logger.debug("eig_double: dim=%d error estimate=%.3e", dim, estimate)
    return EigenDecomposition(
        eigenvalues=tuple(value for value, _ in pairs),
        right_eigenvectors=ComplexMatrix.from_columns([vector for _, vector in pairs]),
        converged=True,
        residual=residual,
        error_estimate=estimate,
    )


def min_singular_value(
    matrix: MatrixLike, tol: Tolerances = DEFAULT_TOLERANCES
) -> float:
    """Smallest singular value from the Hermitian eigenvalues of M^H M."""
    dim = _matrix_dim(matrix)
    _check_dim(dim, tol)
    with mpmath.workdps(tol.working_dps(dim)):
        a = to_mp_matrix(matrix)
        gram = a.H * a
        try:
            values = mpmath.eigh(gram, eigvals_only=True)
        except (RuntimeError, ZeroDivisionError) as exc:
            raise EigenConvergenceError(f"non-convergence: {exc}") from exc
        smallest = max(min(mpmath.re(value) for value in values), mpmath.mpf(0))
        return float(mpmath.sqrt(smallest))


def min_singular_value_double(matrix: ComplexMatrix) -> float:
    """Smallest singular value from LAPACK's SVD in double precision."""
    return float(np.linalg.svd(matrix.entries, compute_uv=False)[-1])


def spread(values: Sequence[complex]) -> float:
    """Largest pairwise distance between the given complex numbers."""
    array = np.asarray(values, dtype=np.complex128)
    return float(np.max(np.abs(array[:, None] - array[None, :])))
