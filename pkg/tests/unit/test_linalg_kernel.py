"""Tests for the dense complex linear algebra kernel."""

import numpy as np
import pytest

from epbeam.config import Tolerances
from epbeam.hamiltonian import j_minus, j_plus
from epbeam.linalg_kernel import (
    ComplexMatrix,
    ComplexVector,
    EigenConvergenceError,
    MatrixNormError,
    NotTriangularError,
    eig,
    eig_double,
    eigvals,
    expm,
    min_singular_value,
    min_singular_value_double,
    nilpotent_expm,
    normalize_phase,
    spread,
)
from tests.oracles import match_sets, polynomial_eigenvalues


def random_matrix(seed, dim=4, norm=None):
    rng = np.random.default_rng(seed)
    a = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    if norm is not None:
        a *= norm / np.linalg.norm(a, 2)
    return ComplexMatrix(a)


class TestComplexMatrix:
    """Test construction and arithmetic of the matrix wrapper."""

    def test_rejects_non_finite_entries(self):
        """Should refuse NaN and infinite entries."""
        with pytest.raises(ValueError, match="finite"):
            ComplexMatrix(np.array([[1.0, np.nan], [0.0, 1.0]]))
        with pytest.raises(ValueError, match="finite"):
            ComplexMatrix(np.array([[np.inf]]))

    def test_rejects_non_square_and_empty(self):
        """Should require a non-empty square array."""
        with pytest.raises(ValueError):
            ComplexMatrix(np.zeros((2, 3)))
        with pytest.raises(ValueError):
            ComplexMatrix(np.zeros((0, 0)))

    def test_entries_are_immutable_copies(self):
        """Should copy the input and freeze the stored array."""
        source = np.eye(2, dtype=complex)
        matrix = ComplexMatrix(source)
        source[0, 0] = 5
        assert matrix.entries[0, 0] == 1
        with pytest.raises(ValueError):
            matrix.entries[0, 0] = 3

    def test_row_major_serialization(self):
        """Should list entries row by row."""
        matrix = ComplexMatrix(np.array([[1, 2], [3, 4j]]))
        assert matrix.to_rows() == [[1, 2], [3, 4j]]

    def test_matrix_vector_product(self):
        """Should multiply vectors of matching dimension only."""
        matrix = ComplexMatrix(np.array([[0, 1], [1, 0]]))
        vector = ComplexVector(np.array([1, 2j]))
        assert (matrix @ vector).to_list() == [2j, 1]
        with pytest.raises(ValueError, match="dimension"):
            matrix @ ComplexVector(np.array([1, 2, 3]))

    def test_vector_rejects_non_finite(self):
        """Should refuse non-finite amplitudes."""
        with pytest.raises(ValueError):
            ComplexVector(np.array([1.0, np.nan]))


class TestExpm:
    """Test the scaling-and-squaring matrix exponential."""

    def test_zero_matrix_gives_identity(self):
        """Should return the identity for the zero matrix."""
        result = expm(ComplexMatrix.zeros(3))
        np.testing.assert_allclose(result.entries, np.eye(3), atol=1e-15)

    def test_diagonal_matrix(self):
        """Should exponentiate a diagonal matrix entrywise."""
        result = expm(ComplexMatrix.diag([1, -2j]))
        expected = np.diag([np.e, np.exp(-2j)])
        np.testing.assert_allclose(result.entries, expected, rtol=1e-12, atol=1e-15)

    def test_nilpotent_two_by_two(self):
        """Should give I + N for a strictly upper triangular N."""
        result = expm(ComplexMatrix(np.array([[0, 1], [0, 0]])))
        np.testing.assert_allclose(result.entries, [[1, 1], [0, 1]], atol=1e-15)

    @pytest.mark.parametrize("seed", range(10))
    def test_inverse_property(self, seed):
        """Should satisfy expm(A) expm(-A) = I for moderate norms."""
        a = random_matrix(seed, norm=5.0)
        product = expm(a) @ expm(-a)
        assert np.max(np.abs(product.entries - np.eye(4))) <= 1e-10

    @pytest.mark.parametrize("seed", range(5))
    def test_skew_hermitian_gives_unitary(self, seed):
        """Should return a unitary matrix for skew-Hermitian input."""
        a = random_matrix(seed, norm=3.0).entries
        skew = ComplexMatrix((a - a.conj().T) / 2)
        u = expm(skew)
        assert np.max(np.abs(u.dagger().entries @ u.entries - np.eye(4))) <= 1e-10

    def test_large_scalar_part_handled_exactly(self):
        """Should exponentiate a large multiple of the identity without squaring."""
        result = expm(ComplexMatrix.identity(2) * (-50j))
        np.testing.assert_allclose(result.entries, np.exp(-50j) * np.eye(2), rtol=1e-12)

    def test_norm_out_of_range(self):
        """Should report matrices needing more than the allowed squarings."""
        huge = ComplexMatrix(np.array([[0, 1e30], [0, 0]]))
        with pytest.raises(MatrixNormError, match="matrix norm out of range"):
            expm(huge)

    def test_squaring_cap_is_configurable(self):
        """Should honour a smaller squaring cap from the tolerances record."""
        matrix = ComplexMatrix(np.array([[0, 100], [0, 0]]))
        with pytest.raises(MatrixNormError):
            expm(matrix, Tolerances(expm_max_squarings=2))


class TestNilpotentExpm:
    """Test the exact exponential of strictly triangular matrices."""

    def test_lower_two_by_two(self):
        """Should add the single off-diagonal entry."""
        result = nilpotent_expm(ComplexMatrix(np.array([[0, 0], [2 - 1j, 0]])))
        np.testing.assert_array_equal(result.entries, [[1, 0], [2 - 1j, 1]])

    def test_raising_operator_series(self):
        """Should equal I + sJ+ + s^2 J+^2 / 2 for N = 2."""
        s = 0.7 - 0.2j
        jp = j_plus(2).entries
        expected = np.eye(3) + s * jp + s * s * (jp @ jp) / 2
        result = nilpotent_expm(j_plus(2) * s)
        np.testing.assert_allclose(result.entries, expected, atol=1e-15)
        assert np.all(np.linalg.matrix_power(jp, 3) == 0)

    @pytest.mark.parametrize("n", [1, 3, 6, 10])
    def test_matches_expm(self, n):
        """Should agree with the Pade exponential on its domain."""
        for matrix in (j_plus(n) * 0.4, j_minus(n) * (0.3 + 0.5j)):
            difference = nilpotent_expm(matrix).entries - expm(matrix).entries
            assert np.max(np.abs(difference)) <= 1e-13

    def test_rejects_non_triangular(self):
        """Should refuse a matrix with entries on both sides of the diagonal."""
        with pytest.raises(NotTriangularError):
            nilpotent_expm(ComplexMatrix(np.array([[0, 1], [1, 0]])))

    def test_rejects_nonzero_diagonal(self):
        """Should refuse a triangular matrix with a nonzero diagonal."""
        with pytest.raises(NotTriangularError):
            nilpotent_expm(ComplexMatrix(np.array([[1, 0], [1, 0]])))

    def test_bandwidth_shortens_series(self):
        """Should accept a matrix supported two diagonals below the main one."""
        matrix = np.zeros((4, 4), dtype=complex)
        matrix[2, 0] = matrix[3, 1] = 1.5
        result = nilpotent_expm(ComplexMatrix(matrix), bandwidth=2)
        np.testing.assert_allclose(result.entries, np.eye(4) + matrix, atol=0)
        with pytest.raises(NotTriangularError):
            nilpotent_expm(ComplexMatrix(matrix), bandwidth=3)

    def test_is_deterministic(self):
        """Should give bit-identical results on repeated calls."""
        matrix = j_plus(5) * (1.3 - 0.1j)
        first = nilpotent_expm(matrix).entries
        second = nilpotent_expm(matrix).entries
        assert np.array_equal(first, second)


class TestEig:
    """Test the extended-precision eigendecomposition."""

    def test_diagonal_matrix(self):
        """Should return the diagonal with unit basis vectors, sorted."""
        result = eig(ComplexMatrix.diag([3, 1 + 1j]))
        assert result.converged is True
        assert result.eigenvalues == pytest.approx((1 + 1j, 3), abs=1e-15)
        magnitudes = np.abs(result.right_eigenvectors.entries)
        np.testing.assert_allclose(magnitudes, [[0, 1], [1, 0]], atol=1e-15)

    def test_swap_matrix(self):
        """Should find eigenvalues -1 and +1 of the swap."""
        result = eig(ComplexMatrix(np.array([[0, 1], [1, 0]])))
        np.testing.assert_allclose(result.eigenvalues, [-1, 1], atol=1e-15)

    @pytest.mark.parametrize("seed", range(5))
    def test_matches_characteristic_polynomial_roots(self, seed):
        """Should match the roots of the characteristic polynomial."""
        matrix = random_matrix(seed)
        roots = polynomial_eigenvalues(matrix.entries)
        assert match_sets(eigvals(matrix), roots) <= 1e-9

    @pytest.mark.parametrize("seed", range(5))
    def test_reconstruction_and_phase_convention(self, seed):
        """Should satisfy M V = V diag(lambda) with normalized, phase-fixed columns."""
        matrix = random_matrix(seed, dim=5)
        result = eig(matrix)
        v = result.right_eigenvectors.entries
        reconstruction = matrix.entries @ v - v @ np.diag(result.eigenvalues)
        assert np.max(np.abs(reconstruction)) <= 1e-8
        assert result.residual <= 1e-12
        for k in range(5):
            column = v[:, k]
            assert abs(np.linalg.norm(column) - 1) <= 1e-12
            lead = column[np.flatnonzero(np.abs(column) > 1e-12)[0]]
            assert lead.real >= 0
            assert abs(lead.imag) <= 1e-15

    def test_eigenvalues_in_lexicographic_order(self):
        """Should order by real part, then imaginary part."""
        result = eig(ComplexMatrix.diag([2, 1 - 1j, 1 + 1j, -3]))
        assert list(result.eigenvalues) == pytest.approx([-3, 1 - 1j, 1 + 1j, 2], abs=1e-15)

    def test_rejects_oversized_matrix(self):
        """Should refuse dimensions beyond the configured maximum."""
        with pytest.raises(ValueError, match="exceeds"):
            eig(ComplexMatrix.identity(3), Tolerances(eig_max_dim=2))

    def test_non_convergence_is_reported(self, mocker):
        """Should translate solver failures into EigenConvergenceError."""
        mocker.patch(
            "epbeam.linalg_kernel.mpmath.eig", side_effect=RuntimeError("no convergence")
        )
        with pytest.raises(EigenConvergenceError, match="non-convergence"):
            eig(ComplexMatrix.identity(2))

    def test_defective_matrix_has_coalesced_vectors(self):
        """Should return nearly parallel eigenvectors for a Jordan block."""
        jordan = ComplexMatrix(np.array([[2, 1], [0, 2]]))
        result = eig(jordan)
        assert spread(result.eigenvalues) <= 1e-12
        assert min_singular_value(result.right_eigenvectors) <= 1e-6


class TestEigDouble:
    """Test the double-precision eigendecomposition and its error estimate."""

    def test_diagonal_matrix(self):
        """Should return the diagonal exactly with a tiny error estimate."""
        result = eig_double(ComplexMatrix.diag([3, 1 + 1j]))
        assert result.eigenvalues == (1 + 1j, 3)
        assert result.residual <= 1e-15
        assert result.error_estimate <= 1e-14

    @pytest.mark.parametrize("seed", range(5))
    def test_agrees_with_extended_precision(self, seed):
        """Should match the extended-precision eigenvalues within its estimate."""
        matrix = random_matrix(seed, dim=5)
        result = eig_double(matrix)
        assert result.error_estimate <= 1e-10
        assert match_sets(result.eigenvalues, eig(matrix).eigenvalues) <= result.error_estimate
        assert result.residual <= 1e-13

    def test_phase_convention(self):
        """Should normalize columns like the extended-precision solver."""
        result = eig_double(random_matrix(11, dim=4))
        for k in range(4):
            column = result.right_eigenvectors.column(k).amplitudes
            assert abs(np.linalg.norm(column) - 1) <= 1e-12
            lead = column[np.flatnonzero(np.abs(column) > 1e-12)[0]]
            assert lead.real >= 0
            assert abs(lead.imag) <= 1e-15

    def test_defective_matrix_has_large_estimate(self):
        """Should flag a Jordan block as beyond double precision."""
        result = eig_double(ComplexMatrix(np.array([[2, 1], [0, 2]])))
        assert result.error_estimate > 1e-6

    def test_rejects_oversized_matrix(self):
        """Should share the dimension limit of the extended-precision solver."""
        with pytest.raises(ValueError, match="exceeds"):
            eig_double(ComplexMatrix.identity(3), Tolerances(eig_max_dim=2))


class TestMinSingularValue:
    """Test the smallest-singular-value diagnostic."""

    def test_identity(self):
        """Should be one for the identity."""
        assert min_singular_value(ComplexMatrix.identity(3)) == pytest.approx(1.0, abs=1e-14)

    def test_repeated_column(self):
        """Should vanish for a rank-deficient matrix."""
        matrix = ComplexMatrix(np.array([[1, 1, 0], [2j, 2j, 1], [3, 3, -1]]))
        assert min_singular_value(matrix) <= 1e-12

    def test_diagonal(self):
        """Should pick the smallest diagonal modulus."""
        assert min_singular_value(ComplexMatrix.diag([2, 0.5])) == pytest.approx(0.5, rel=1e-12)

    @pytest.mark.parametrize("seed", range(3))
    def test_matches_numpy_svd(self, seed):
        """Should agree with a standard SVD for well-conditioned input."""
        matrix = random_matrix(seed)
        expected = np.linalg.svd(matrix.entries, compute_uv=False).min()
        assert min_singular_value(matrix) == pytest.approx(expected, rel=1e-8)

    @pytest.mark.parametrize("seed", range(3))
    def test_double_precision_variant(self, seed):
        """Should agree with the extended-precision value for well-conditioned input."""
        matrix = random_matrix(seed)
        assert min_singular_value_double(matrix) == pytest.approx(min_singular_value(matrix), rel=1e-10)


class TestHelpers:
    """Test phase normalization and spread."""

    def test_normalize_phase(self):
        """Should rotate the first significant component onto the positive axis."""
        vector = normalize_phase(np.array([0, -2j, 1]))
        assert vector.norm() == pytest.approx(1.0)
        assert vector[0] == 0
        assert vector[1].real > 0
        assert vector[1].imag == pytest.approx(0.0, abs=1e-16)

    def test_normalize_zero_vector(self):
        """Should refuse the zero vector."""
        with pytest.raises(ValueError):
            normalize_phase(np.zeros(3))

    def test_spread(self):
        """Should return the largest pairwise distance."""
        assert spread([0, 3, 4j]) == pytest.approx(5.0)
        assert spread([1 + 1j]) == 0.0
