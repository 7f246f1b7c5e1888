"""Wei-Norman evolution operator and post-selected dynamics.

G(z) = exp(-i(omega0 - i gamma/2) N z) exp(-i f+ J+) exp(-i fz Jz) exp(-i f- J-)

The disentangling functions are evaluated in the form
u = z dl / 2, D = cos u + gamma sin(u) / dl,
f+ = 2 nu sin(u) / (dl D), f- = 2 nu' sin(u) / (dl D), fz = -2i ln D,
which stays finite where tan(u) has poles and where nu' = 0. Every
occurrence of dl is even, so the branch of the square root does not matter.
"""

from __future__ import annotations

import cmath
import logging
from collections.abc import Sequence

import numpy as np

from .config import DEFAULT_TOLERANCES, Tolerances
from .hamiltonian import couplings, hamiltonian, j_minus, j_plus
from .linalg_kernel import (
    ComplexMatrix,
    ComplexVector,
    NumericalError,
    expm,
    nilpotent_expm,
)
from .models import (
    Backend,
    InvalidParameterError,
    ModelParams,
    Trajectory,
    TrajectoryPoint,
    WeiNormanFactors,
)
from .spectrum import delta_lambda

logger = logging.getLogger(__name__)


class FactorizationSingularError(NumericalError):
    """Raised where D vanishes and the factorized operator is undefined."""


class StateAnnihilatedError(NumericalError):
    """Raised when the post-selection probability underflows."""

    def __init__(self, z: float, survival: float):
        super().__init__(f"state annihilated at z={z!r}: survival {survival:.3e}")
        self.z = z
        self.survival = survival

    def __reduce__(self) -> tuple[type[StateAnnihilatedError], tuple[float, float]]:
        return (type(self), (self.z, self.survival))


class AsymptoticRegimeError(NumericalError, ValueError):
    """Raised when the unidirectional expansion is asked for eta far from 1."""


def _sin_and_cos(z: float, delta: complex, tol: Tolerances) -> tuple[complex, complex]:
    """Return sin(u)/delta and cos(u) for u = z delta / 2."""
    if abs(delta) * abs(z) <= tol.ep_limit_threshold:
        u2 = (z * delta / 2) ** 2
        return (z / 2) * (1 - u2 / 6 + u2 * u2 / 120), 1 - u2 / 2 + u2 * u2 / 24
    u = z * delta / 2
    return cmath.sin(u) / delta, cmath.cos(u)


def factors_for_gap(
    nu: float,
    nu_prime: float,
    gamma: float,
    z: float,
    delta: complex,
    tol: Tolerances,
) -> tuple[complex, complex, complex, complex]:
    """Return (f+, fz, f-, D) for raw couplings and gap delta.

    Only even functions of delta enter, so delta and -delta give the same
    result.
    """
    sine, cosine = _sin_and_cos(z, delta, tol)
    d = cosine + gamma * sine
    # D is real here; a -0.0 imaginary part would pick the -i pi log branch
    d = complex(d.real, d.imag + 0.0)
    if abs(d) <= tol.singular_threshold:
        raise FactorizationSingularError(
            f"factorization singular at z={z!r}: |D| = {abs(d):.3e}"
        )
    return 2 * nu * sine / d, -2j * cmath.log(d), 2 * nu_prime * sine / d, d


def factors_from_couplings(
    nu: float,
    nu_prime: float,
    gamma: float,
    z: float,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> tuple[complex, complex, complex]:
    """(f+, fz, f-) for arbitrary real couplings, without parameter validation."""
    delta = cmath.sqrt(complex(4 * nu * nu_prime - gamma * gamma, 0.0))
    f_plus, f_z, f_minus, _ = factors_for_gap(nu, nu_prime, gamma, z, delta, tol)
    return f_plus, f_z, f_minus


def factors_with_denominator(
    params: ModelParams, z: float, tol: Tolerances = DEFAULT_TOLERANCES
) -> tuple[WeiNormanFactors, complex]:
    """Disentangling functions at z together with the denominator D."""
    if not np.isfinite(z):
        raise InvalidParameterError(f"z must be finite, got {z!r}")
    c = couplings(params)
    f_plus, f_z, f_minus, d = factors_for_gap(
        c.nu, c.nu_prime, params.gamma, z, delta_lambda(params), tol
    )
    return WeiNormanFactors(f_plus=f_plus, f_z=f_z, f_minus=f_minus, z=z), d


def f_factors(
    params: ModelParams, z: float, tol: Tolerances = DEFAULT_TOLERANCES
) -> WeiNormanFactors:
    return factors_with_denominator(params, z, tol)[0]


def f_ode_rhs(
    params: ModelParams, factors: WeiNormanFactors
) -> tuple[complex, complex, complex]:
    """Right-hand sides (df-, df+, dfz) of the disentangling equations."""
    c = couplings(params)
    df_minus = c.nu_prime * cmath.exp(-1j * factors.f_z)
    df_plus = c.nu + c.nu_prime * factors.f_plus**2 - params.gamma * factors.f_plus
    df_z = -1j * params.gamma + 2j * c.nu_prime * factors.f_plus
    return df_minus, df_plus, df_z


def expm_propagator(
    params: ModelParams, z: float, tol: Tolerances = DEFAULT_TOLERANCES
) -> ComplexMatrix:
    return expm(hamiltonian(params) * (-1j * z), tol)


def wei_norman_propagator(params: ModelParams, factors: WeiNormanFactors) -> ComplexMatrix:
    """Ordered product of the disentangled exponentials."""
    n = params.n_photons
    z = factors.z
    scalar = cmath.exp(-1j * (params.omega0 - 0.5j * params.gamma) * n * z)
    raising = nilpotent_expm(j_plus(n) * (-1j * factors.f_plus))
    lowering = nilpotent_expm(j_minus(n) * (-1j * factors.f_minus))
    diagonal = np.exp(-1j * factors.f_z * (np.arange(n + 1) - n / 2))
    # diag(d) @ L scales the rows of L
    product = raising.entries @ (diagonal[:, None] * lowering.entries)
    return ComplexMatrix(scalar * product)


def wei_norman_loss_too_large(
    d: complex, n: int, tol: Tolerances = DEFAULT_TOLERANCES
) -> bool:
    """True when the factorized product would lose too many digits to cancellation."""
    magnitude = abs(d)
    return magnitude <= tol.auto_fallback_threshold or magnitude**n < tol.wn_fallback_loss


def propagator(
    params: ModelParams,
    z: float,
    backend: Backend | str = Backend.AUTO,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> ComplexMatrix:
    """Evolution operator G(z) = exp(-i H z).

    ``auto`` uses the factorized product and falls back to the matrix
    exponential where D is too small for the product to be accurate.
    """
    backend = Backend(backend)
    if not np.isfinite(z) or z < 0:
        raise InvalidParameterError(f"z must be finite and >= 0, got {z!r}")
    if z == 0:
        return ComplexMatrix.identity(params.dim)
    if backend is Backend.EXPM:
        return expm_propagator(params, z, tol)

    try:
        factors, d = factors_with_denominator(params, z, tol)
    except FactorizationSingularError:
        if backend is Backend.WEI_NORMAN:
            raise
        logger.debug("z=%g: factorization singular, using expm", z)
        return expm_propagator(params, z, tol)

    if backend is Backend.AUTO and wei_norman_loss_too_large(d, params.n_photons, tol):
        logger.debug("z=%g: |D|=%.3e, using expm", z, abs(d))
        return expm_propagator(params, z, tol)

    try:
        return wei_norman_propagator(params, factors)
    except ValueError:
        # non-finite product entries
        if backend is Backend.WEI_NORMAN:
            raise
        logger.debug("z=%g: factorized product overflowed, using expm", z)
        return expm_propagator(params, z, tol)


def survival_probability(amplitudes: ComplexVector) -> float:
    """Squared norm of the unnormalized evolved state."""
    return amplitudes.norm_squared()


def occupation(amplitudes: ComplexVector, survival: float) -> tuple[float, ...]:
    """Post-selected occupation P(m) = |amplitude_m|^2 / survival, summing to one."""
    weights = np.abs(amplitudes.amplitudes) ** 2 / survival
    weights = weights / weights.sum()
    return tuple(float(w) for w in weights)


def evolve(
    params: ModelParams,
    initial: ComplexVector,
    z_grid: Sequence[float],
    backend: Backend | str = Backend.AUTO,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> Trajectory:
    """Propagate ``initial`` to every z of the grid and post-select."""
    if initial.dim != params.dim:
        raise InvalidParameterError(
            f"initial state has dimension {initial.dim}, expected {params.dim}"
        )
    if initial.norm() == 0:
        raise InvalidParameterError("initial state must have nonzero norm")
    grid = np.asarray(z_grid, dtype=float)
    if grid.ndim != 1 or grid.size == 0:
        raise InvalidParameterError("z grid must be a non-empty sequence")
    if grid[0] < 0 or np.any(np.diff(grid) <= 0):
        raise InvalidParameterError("z grid must be strictly increasing from z >= 0")

    trajectory = Trajectory(params=params)
    for z in grid:
        z = float(z)
        amplitudes = propagator(params, z, backend, tol) @ initial
        survival = survival_probability(amplitudes)
        if survival < tol.survival_floor:
            raise StateAnnihilatedError(z, survival)
        trajectory.points.append(
            TrajectoryPoint(
                z=z,
                amplitudes=amplitudes,
                survival=survival,
                occupation=occupation(amplitudes, survival),
            )
        )
    return trajectory


def series_factors(
    nu0: float, epsilon: float, gamma: float, z: float
) -> tuple[complex, complex, complex]:
    """First-order expansion of (f+, fz, f-) in epsilon = 1 - eta about eta = 1."""
    decay = np.exp(-gamma * z)
    a = 2 * nu0 / gamma
    f_plus = a * (1 - decay) + nu0 * epsilon * (
        (a * a - 1) * (1 - decay) / gamma
        - 2 * a * a * z * decay
        + a * a * decay * (1 - decay) / gamma
    )
    f_z = -1j * gamma * z + 4j * nu0 * nu0 * epsilon / gamma**2 * (gamma * z - 1 + decay)
    f_minus = nu0 * epsilon / gamma * (1 - decay)
    return complex(f_plus), complex(f_z), complex(f_minus)


def unidirectional_series(
    params: ModelParams, z: float, tol: Tolerances = DEFAULT_TOLERANCES
) -> WeiNormanFactors:
    epsilon = 1 - params.eta
    if epsilon > tol.series_max_epsilon:
        raise AsymptoticRegimeError(
            f"outside asymptotic regime: 1 - eta = {epsilon:.3g} > {tol.series_max_epsilon}"
        )
    if params.gamma <= 0:
        raise InvalidParameterError("unidirectional expansion needs gamma > 0")
    f_plus, f_z, f_minus = series_factors(params.nu0, epsilon, params.gamma, z)
    return WeiNormanFactors(f_plus=f_plus, f_z=f_z, f_minus=f_minus, z=z)
