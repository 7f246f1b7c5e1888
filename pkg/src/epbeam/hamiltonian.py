"""Fock-subspace representation of the two-waveguide beam splitter.

Basis states are |N-m>_a |m>_b ordered by ascending m, the number of
photons in the lossy guide b. Spin operators follow the Schwinger mapping
J+ = b^dag a, J- = a^dag b, Jz = (b^dag b - a^dag a) / 2.
"""

from __future__ import annotations

from typing import Any

import mpmath
import numpy as np

from .linalg_kernel import ComplexMatrix, ComplexVector
from .models import Couplings, InvalidParameterError, ModelParams


class BasisIndexError(IndexError):
    """Raised for a Fock index outside [0, N]."""


def _check_photons(n: int) -> None:
    if n < 1:
        raise InvalidParameterError(f"photon number must be >= 1, got {n}")


def ladder_weights(n: int) -> np.ndarray:
    """Matrix elements sqrt((N-m)(m+1)) of J+ from m to m+1."""
    m = np.arange(n, dtype=float)
    return np.sqrt((n - m) * (m + 1.0))


def j_plus(n: int) -> ComplexMatrix:
    _check_photons(n)
    entries = np.zeros((n + 1, n + 1), dtype=np.complex128)
    index = np.arange(n)
    entries[index + 1, index] = ladder_weights(n)
    return ComplexMatrix(entries)


def j_minus(n: int) -> ComplexMatrix:
    return j_plus(n).transpose()


def j_z(n: int) -> ComplexMatrix:
    _check_photons(n)
    return ComplexMatrix.diag(np.arange(n + 1) - n / 2)


def j_x(n: int) -> ComplexMatrix:
    return (j_plus(n) + j_minus(n)) * 0.5


def j_y(n: int) -> ComplexMatrix:
    return (j_plus(n) - j_minus(n)) * (-0.5j)


def casimir(n: int) -> ComplexMatrix:
    """Jx^2 + Jy^2 + Jz^2, which equals (N/2)(N/2 + 1) times the identity."""
    jx, jy, jz = j_x(n), j_y(n), j_z(n)
    return jx @ jx + jy @ jy + jz @ jz


def basis_labels(n: int) -> list[tuple[int, int]]:
    """Occupations (photons in a, photons in b) for each basis index."""
    _check_photons(n)
    return [(n - m, m) for m in range(n + 1)]


def couplings(params: ModelParams) -> Couplings:
    return Couplings(
        nu=params.nu0 * (1 + params.eta),
        nu_prime=params.nu0 * (1 - params.eta),
    )


def hamiltonian(params: ModelParams) -> ComplexMatrix:
    """Tridiagonal Hamiltonian assembled entrywise in the Fock basis."""
    n = params.n_photons
    c = couplings(params)
    m = np.arange(n + 1)
    weights = ladder_weights(n)
    index = np.arange(n)

    entries = np.zeros((n + 1, n + 1), dtype=np.complex128)
    entries[m, m] = params.omega0 * n - 1j * params.gamma * m
    entries[index + 1, index] = c.nu * weights
    entries[index, index + 1] = c.nu_prime * weights
    return ComplexMatrix(entries)


def su2_hamiltonian(params: ModelParams) -> ComplexMatrix:
    """The same Hamiltonian built from the SU(2) generators.

    H = (omega0 - i gamma/2) N + nu J+ + nu' J- - i gamma Jz
    """
    n = params.n_photons
    c = couplings(params)
    scalar = (params.omega0 - 0.5j * params.gamma) * n
    return (
        ComplexMatrix.identity(n + 1) * scalar
        + j_plus(n) * c.nu
        + j_minus(n) * c.nu_prime
        + j_z(n) * (-1j * params.gamma)
    )


def hamiltonian_mp(params: ModelParams) -> Any:
    """Hamiltonian as an mpmath matrix at the current working precision.

    Couplings and square roots are formed in extended precision, so parameter
    sets that sit exactly on an exceptional point stay on it.
    """
    n = params.n_photons
    nu0 = mpmath.mpf(params.nu0)
    eta = mpmath.mpf(params.eta)
    gamma = mpmath.mpf(params.gamma)
    nu = nu0 * (1 + eta)
    nu_prime = nu0 * (1 - eta)

    h = mpmath.matrix(n + 1, n + 1)
    for m in range(n + 1):
        h[m, m] = mpmath.mpc(mpmath.mpf(params.omega0) * n, -gamma * m)
    for m in range(n):
        weight = mpmath.sqrt((n - m) * (m + 1))
        h[m + 1, m] = nu * weight
        h[m, m + 1] = nu_prime * weight
    return h


def fock_state(m: int, n: int) -> ComplexVector:
    _check_photons(n)
    if not 0 <= m <= n:
        raise BasisIndexError(f"Fock index {m} outside [0, {n}]")
    amplitudes = np.zeros(n + 1, dtype=np.complex128)
    amplitudes[m] = 1.0
    return ComplexVector(amplitudes)


def noon_state(n: int) -> ComplexVector:
    """(|N,0> + |0,N>) / sqrt(2)."""
    _check_photons(n)
    amplitudes = np.zeros(n + 1, dtype=np.complex128)
    amplitudes[0] = amplitudes[n] = 1 / np.sqrt(2)
    return ComplexVector(amplitudes)
