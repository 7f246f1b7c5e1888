"""Analytic and numeric eigensystems, exceptional points and their diagnostics.

The analytic eigenvectors come from the similarity transform
exp(-i theta J-) exp(-i phi J+), which maps H onto (omega0 - i gamma/2) N
plus a multiple of Jz. Both exponentials are finite nilpotent series. At an
exceptional point phi diverges and the single surviving eigenvector is
exp(-i theta J-)|m=N>.
"""

from __future__ import annotations

import cmath
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Any

import mpmath
import numpy as np

from .config import DEFAULT_TOLERANCES, Tolerances
from .hamiltonian import (
    couplings,
    hamiltonian,
    hamiltonian_mp,
    j_minus,
    j_plus,
    j_x,
    j_y,
    j_z,
)
from .linalg_kernel import (
    ComplexMatrix,
    ComplexVector,
    NumericalError,
    eig,
    eig_double,
    eigvals,
    lexicographic_key,
    min_singular_value,
    min_singular_value_double,
    nilpotent_expm,
    normalize_phase,
    spread,
    to_mp_matrix,
)
from .models import (
    EpReport,
    ExponentFit,
    InvalidParameterError,
    ModelParams,
    SpectrumResult,
    SpinProjection,
)

logger = logging.getLogger(__name__)

FIT_MODES = ("gamma", "generic")
DEFAULT_EPS_GRID: tuple[float, ...] = tuple(float(x) for x in np.logspace(-10, -5, 11))
MIN_FIT_POINTS = 8


class ExceptionalPointError(NumericalError):
    """Raised when the analytic eigenvectors are requested at an exceptional point."""


class GammaOutOfRangeError(NumericalError, ValueError):
    """Raised when no non-reciprocity yields an exceptional point for this gamma."""


class FitUnreliableError(NumericalError):
    """Raised when an exponent fit cannot be trusted."""


def radicand(params: ModelParams) -> float:
    """4 nu0^2 (1 - eta^2) - gamma^2, evaluated exactly and rounded once."""
    nu0 = Fraction(params.nu0)
    eta = Fraction(params.eta)
    gamma = Fraction(params.gamma)
    return float(4 * nu0 * nu0 * (1 - eta * eta) - gamma * gamma)


def delta_lambda(params: ModelParams) -> complex:
    """Adjacent eigenvalue gap; real below the exceptional point, imaginary above."""
    return cmath.sqrt(complex(radicand(params), 0.0))


def critical_gamma(nu0: float, eta: float) -> float:
    if nu0 <= 0:
        raise InvalidParameterError(f"nu0 must be positive, got {nu0}")
    if not 0 <= eta <= 1:
        raise InvalidParameterError(f"eta must lie in [0, 1], got {eta}")
    return 2 * nu0 * math.sqrt(1 - eta * eta)


def critical_eta(nu0: float, gamma: float) -> float:
    if nu0 <= 0:
        raise InvalidParameterError(f"nu0 must be positive, got {nu0}")
    if gamma < 0:
        raise InvalidParameterError(f"gamma must be non-negative, got {gamma}")
    if gamma > 2 * nu0:
        raise GammaOutOfRangeError(
            f"gamma out of range: {gamma} > 2*nu0 = {2 * nu0}, no eta gives an EP"
        )
    return math.sqrt(4 * nu0 * nu0 - gamma * gamma) / (2 * nu0)


def ep_report(params: ModelParams) -> EpReport:
    try:
        eta_c: float | None = critical_eta(params.nu0, params.gamma)
    except GammaOutOfRangeError:
        eta_c = None
    return EpReport(
        gamma_c=critical_gamma(params.nu0, params.eta),
        eta_c=eta_c,
        order=params.dim,
    )


def _mode_labels(n: int) -> list[float]:
    return [m - n / 2 for m in range(n + 1)]


def analytic_eigenvalues(params: ModelParams) -> list[complex]:
    """(omega0 - i gamma/2) N + r * delta_lambda for r = -N/2, ..., N/2, sorted."""
    base = (params.omega0 - 0.5j * params.gamma) * params.n_photons
    gap = delta_lambda(params)
    values = [base + r * gap for r in _mode_labels(params.n_photons)]
    return sorted(values, key=lexicographic_key)


@dataclass(frozen=True, eq=False)
class AnalyticMode:
    """One analytic eigenpair, labelled by its Jz index r in the rotated frame."""

    r: float
    eigenvalue: complex
    vector: ComplexVector


def analytic_modes(
    params: ModelParams, tol: Tolerances = DEFAULT_TOLERANCES
) -> list[AnalyticMode]:
    """Eigenpairs exp(-i theta J-) exp(-i phi J+) e_m, ordered by r."""
    gap = delta_lambda(params)
    if abs(gap) <= tol.degeneracy_threshold:
        raise ExceptionalPointError(
            f"at exceptional point: |delta_lambda| = {abs(gap):.3e}"
        )

    n = params.n_photons
    c = couplings(params)
    gamma = params.gamma
    # root of Gamma^2 - 4 nu nu'; 2 theta nu + Gamma equals it
    root = cmath.sqrt(complex(-radicand(params), 0.0))
    theta = (-gamma + root) / (2 * c.nu)
    phi = c.nu / root

    transform = nilpotent_expm(j_minus(n) * (-1j * theta)) @ nilpotent_expm(
        j_plus(n) * (-1j * phi)
    )
    base = (params.omega0 - 0.5j * gamma) * n
    modes = []
    for m, r in enumerate(_mode_labels(n)):
        vector = normalize_phase(transform.entries[:, m], tol)
        modes.append(AnalyticMode(r=r, eigenvalue=base - 1j * root * r, vector=vector))
    return modes


def analytic_eigenpairs(
    params: ModelParams, tol: Tolerances = DEFAULT_TOLERANCES
) -> list[tuple[complex, ComplexVector]]:
    modes = sorted(analytic_modes(params, tol), key=lambda mode: lexicographic_key(mode.eigenvalue))
    return [(mode.eigenvalue, mode.vector) for mode in modes]


def analytic_eigenvectors(
    params: ModelParams, tol: Tolerances = DEFAULT_TOLERANCES
) -> ComplexMatrix:
    """Unit right eigenvectors as columns, in the order of analytic_eigenpairs."""
    return ComplexMatrix.from_columns([vector for _, vector in analytic_eigenpairs(params, tol)])


def coalesced_eigenvector(
    params: ModelParams, tol: Tolerances = DEFAULT_TOLERANCES
) -> ComplexVector:
    """The single eigenvector left at the exceptional point, exp(-i theta J-)|m=N>."""
    n = params.n_photons
    theta = -params.gamma / (2 * couplings(params).nu)
    transform = nilpotent_expm(j_minus(n) * (-1j * theta))
    return normalize_phase(transform.entries[:, n], tol)


def numeric_spectrum(
    params: ModelParams, tol: Tolerances = DEFAULT_TOLERANCES
) -> SpectrumResult:
    """Eigensystem of the Hamiltonian with coalescence diagnostics.

    The double-precision decomposition is kept when its error estimate is
    within ``fast_eig_max_error`` and its eigenbasis is well conditioned.
    Otherwise, close to an exceptional point, the extended-precision QR
    solver runs instead.
    """
    fast = eig_double(hamiltonian(params), tol)
    fast_min_sv = min_singular_value_double(fast.right_eigenvectors)
    if fast.error_estimate <= tol.fast_eig_max_error and fast_min_sv >= tol.fast_eig_min_sv:
        return SpectrumResult(
            params=params,
            eigenvalues=fast.eigenvalues,
            right_eigenvectors=fast.right_eigenvectors,
            eigenvalue_spread=spread(fast.eigenvalues),
            eigenvector_min_sv=fast_min_sv,
            residual=fast.residual,
        )

    logger.debug(
        "gamma=%g eta=%g: error estimate %.1e, min sv %.1e, extended precision",
        params.gamma,
        params.eta,
        fast.error_estimate,
        fast_min_sv,
    )
    with mpmath.workdps(tol.working_dps(params.dim)):
        decomposition = eig(hamiltonian_mp(params), tol)
    return SpectrumResult(
        params=params,
        eigenvalues=decomposition.eigenvalues,
        right_eigenvectors=decomposition.right_eigenvectors,
        eigenvalue_spread=spread(decomposition.eigenvalues),
        eigenvector_min_sv=min_singular_value(decomposition.right_eigenvectors, tol),
        residual=decomposition.residual,
    )


def is_coalesced(result: SpectrumResult, tol: Tolerances = DEFAULT_TOLERANCES) -> bool:
    """Coalescence metric: tiny eigenvalue spread and a near-singular eigenbasis."""
    return result.is_coalesced(tol.coalescence_spread, tol.coalescence_min_sv)


def _expectation(vector: ComplexVector, operator: ComplexMatrix) -> float:
    return vector.vdot(operator @ vector).real


def spin_projections(
    params: ModelParams, tol: Tolerances = DEFAULT_TOLERANCES
) -> list[SpinProjection]:
    """<Jx>, <Jy>, <Jz> of every unit right eigenvector, ordered by r."""
    n = params.n_photons
    try:
        labelled = [(mode.r, mode.vector) for mode in analytic_modes(params, tol)]
    except ExceptionalPointError:
        logger.info("spin projections at exceptional point, using the coalesced mode")
        vector = coalesced_eigenvector(params, tol)
        labelled = [(r, vector) for r in _mode_labels(n)]

    jx, jy, jz = j_x(n), j_y(n), j_z(n)
    return [
        SpinProjection(
            r=r,
            jx=_expectation(vector, jx),
            jy=_expectation(vector, jy),
            jz=_expectation(vector, jz),
        )
        for r, vector in labelled
    ]


def _eigenvalue_spread(matrix: Any, tol: Tolerances) -> float:
    try:
        return spread(eigvals(matrix, tol))
    except NumericalError as exc:
        raise FitUnreliableError(f"fit unreliable: {exc}") from exc


def _gamma_mode_spreads(
    params: ModelParams, eps_grid: tuple[float, ...], tol: Tolerances
) -> list[float]:
    gamma_c = critical_gamma(params.nu0, params.eta)
    if gamma_c <= 0:
        raise FitUnreliableError("fit unreliable: critical gamma is zero at eta = 1")
    spreads = []
    for eps in eps_grid:
        if eps >= gamma_c:
            raise FitUnreliableError(f"fit unreliable: eps {eps} exceeds gamma_c")
        detuned = params.with_changes(gamma=gamma_c - eps)
        with mpmath.workdps(tol.working_dps(params.dim)):
            spreads.append(_eigenvalue_spread(hamiltonian_mp(detuned), tol))
    return spreads


def _generic_mode_spreads(
    params: ModelParams, eps_grid: tuple[float, ...], seed: int, tol: Tolerances
) -> list[float]:
    dim = params.dim
    rng = np.random.default_rng(seed)
    perturbation = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    perturbation /= np.max(np.abs(perturbation))

    spreads = []
    with mpmath.workdps(tol.working_dps(dim)):
        h = hamiltonian_mp(params)
        b = to_mp_matrix(ComplexMatrix(perturbation))
        for eps in eps_grid:
            spreads.append(_eigenvalue_spread(h + mpmath.mpf(eps) * b, tol))
    return spreads


def ep_exponent_fit(
    params: ModelParams,
    mode: str = "generic",
    seed: int = 0,
    eps_grid: tuple[float, ...] | None = None,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> ExponentFit:
    """Fit log(eigenvalue spread) against log(eps) for perturbations of an EP.

    Mode "gamma" detunes gamma below its critical value (slope 1/2 for this
    model). Mode "generic" adds eps * B for a seeded random complex B with
    unit largest entry (slope 1/(N+1)).
    """
    if mode not in FIT_MODES:
        raise InvalidParameterError(f"unknown fit mode {mode!r}, expected one of {FIT_MODES}")
    gap = abs(delta_lambda(params))
    if gap > tol.ep_fit_gap:
        raise InvalidParameterError(
            f"parameters are not at an exceptional point: |delta_lambda| = {gap:.3e}"
        )

    grid = DEFAULT_EPS_GRID if eps_grid is None else tuple(float(x) for x in eps_grid)
    if len(grid) < MIN_FIT_POINTS or any(x <= 0 for x in grid):
        raise InvalidParameterError(
            f"eps grid needs at least {MIN_FIT_POINTS} positive values"
        )

    if mode == "gamma":
        spreads = _gamma_mode_spreads(params, grid, tol)
    else:
        spreads = _generic_mode_spreads(params, grid, seed, tol)

    if any(value <= 0 for value in spreads):
        raise FitUnreliableError("fit unreliable: eigenvalues did not split")

    x = np.log(np.array(grid))
    y = np.log(np.array(spreads))
    slope, intercept = np.polyfit(x, y, 1)
    residual = float(np.sqrt(np.mean((y - (slope * x + intercept)) ** 2)))
    logger.info("exponent fit (%s): slope=%.6f residual=%.3e", mode, slope, residual)
    if residual > tol.fit_residual_limit:
        raise FitUnreliableError(f"fit unreliable: residual {residual:.3e}")

    return ExponentFit(
        mode=mode,
        slope=float(slope),
        intercept=float(intercept),
        residual=residual,
        eps_grid=grid,
        spreads=tuple(spreads),
    )
