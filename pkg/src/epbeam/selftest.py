"""Built-in invariant suite run by ``epbeam selftest``."""

from __future__ import annotations

import logging
import math
from collections.abc import Callable
from dataclasses import dataclass

import numpy as np

from .config import DEFAULT_TOLERANCES, Tolerances
from .hamiltonian import (
    casimir,
    fock_state,
    hamiltonian,
    j_minus,
    j_plus,
    j_z,
    noon_state,
    su2_hamiltonian,
)
from .linalg_kernel import ComplexMatrix, expm, nilpotent_expm
from .models import Backend, ModelParams, OutputKind, SweepAxis, SweepSpec
from .propagator import (
    FactorizationSingularError,
    evolve,
    factors_with_denominator,
    propagator,
    wei_norman_loss_too_large,
)
from .spectrum import analytic_eigenvalues, critical_eta, critical_gamma, numeric_spectrum
from .sweeps import continuity_violations, match_branches, run_gamma_sweep

logger = logging.getLogger(__name__)

SELFTEST_SEED = 20240601


@dataclass(frozen=True)
class Check:
    name: str
    bound: float
    measure: Callable[[Tolerances], float]


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    value: float
    bound: float
    detail: str = ""


def _max_abs(matrix: ComplexMatrix) -> float:
    return matrix.max_abs()


def _su2_algebra(tol: Tolerances) -> float:
    worst = 0.0
    for n in range(1, 13):
        jp, jm, jz = j_plus(n), j_minus(n), j_z(n)
        worst = max(
            worst,
            _max_abs(jp @ jm - jm @ jp - jz * 2),
            _max_abs(jz @ jp - jp @ jz - jp),
            _max_abs(jz @ jm - jm @ jz + jm),
        )
    return worst


def _casimir(tol: Tolerances) -> float:
    worst = 0.0
    for n in range(1, 13):
        expected = ComplexMatrix.identity(n + 1) * ((n / 2) * (n / 2 + 1))
        worst = max(worst, _max_abs(casimir(n) - expected))
    return worst


def _random_params(rng: np.random.Generator, n: int) -> ModelParams:
    return ModelParams(
        omega0=float(rng.uniform(0.5, 2.0)),
        nu0=float(rng.uniform(0.5, 2.0)),
        eta=float(rng.uniform(0.0, 1.0)),
        gamma=float(rng.uniform(0.0, 4.0)),
        n_photons=n,
    )


def _hamiltonian_forms(tol: Tolerances) -> float:
    rng = np.random.default_rng(SELFTEST_SEED)
    worst = 0.0
    for n in range(1, 11):
        params = _random_params(rng, n)
        h = hamiltonian(params)
        worst = max(worst, _max_abs(h - su2_hamiltonian(params)) / max(1.0, _max_abs(h)))
    return worst


def _analytic_vs_numeric(tol: Tolerances) -> float:
    worst = 0.0
    for n in (1, 2, 3):
        for eta in (0.0, 0.5, 1.0):
            for gamma in (0.0, 1.0, 2.5):
                params = ModelParams(omega0=1.0, nu0=1.0, eta=eta, gamma=gamma, n_photons=n)
                numeric = numeric_spectrum(params, tol).eigenvalues
                analytic = analytic_eigenvalues(params)
                paired = match_branches(analytic, numeric)
                worst = max(worst, max(abs(a - b) for a, b in zip(analytic, paired)))
    return worst


def _nilpotent_vs_expm(tol: Tolerances) -> float:
    worst = 0.0
    for n in (1, 2, 4, 6):
        for scale in (0.3, 1.0 - 0.5j):
            m = j_plus(n) * scale
            worst = max(worst, _max_abs(nilpotent_expm(m) - expm(m, tol)))
    return worst


def _expm_inverse(tol: Tolerances) -> float:
    rng = np.random.default_rng(SELFTEST_SEED)
    worst = 0.0
    for _ in range(10):
        a = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
        a *= 5.0 / np.linalg.norm(a, 2)
        m = ComplexMatrix(a)
        worst = max(worst, _max_abs(expm(m, tol) @ expm(-m, tol) - ComplexMatrix.identity(4)))
    return worst


def _backend_agreement(tol: Tolerances) -> float:
    rng = np.random.default_rng(SELFTEST_SEED)
    worst = 0.0
    checked = 0
    while checked < 25:
        params = _random_params(rng, int(rng.integers(1, 5)))
        z = float(rng.uniform(0.0, 5.0))
        try:
            _, d = factors_with_denominator(params, z, tol)
        except FactorizationSingularError:
            continue
        if wei_norman_loss_too_large(d, params.n_photons, tol):
            continue
        wn = propagator(params, z, Backend.WEI_NORMAN, tol)
        ex = propagator(params, z, Backend.EXPM, tol)
        worst = max(worst, _max_abs(wn - ex) / max(1.0, _max_abs(ex)))
        checked += 1
    return worst


def _semigroup(tol: Tolerances) -> float:
    params = ModelParams(omega0=1.0, nu0=1.0, eta=0.4, gamma=1.3, n_photons=3)
    g1 = propagator(params, 0.7, tol=tol)
    g2 = propagator(params, 1.1, tol=tol)
    g12 = propagator(params, 1.8, tol=tol)
    return _max_abs(g12 - g1 @ g2) / max(1.0, _max_abs(g12))


def _unidirectional_noon(tol: Tolerances) -> float:
    params = ModelParams(omega0=1.0, nu0=1.0, eta=1.0, gamma=0.0, n_photons=2)
    occupation = evolve(params, noon_state(2), [0.5], tol=tol).occupation_at(0)
    return max(abs(p - q) for p, q in zip(occupation, (1 / 3, 2 / 3, 0.0)))


def _hom_null(tol: Tolerances) -> float:
    params = ModelParams(omega0=1.0, nu0=1.0, eta=0.0, gamma=0.0, n_photons=2)
    return evolve(params, fock_state(1, 2), [math.pi / 4], tol=tol).occupation_at(0)[1]


def _branch_continuity(tol: Tolerances) -> float:
    base = ModelParams(omega0=1.0, nu0=1.0, eta=0.8, gamma=0.0, n_photons=4)
    spec = SweepSpec(
        base=base,
        axis=SweepAxis.GAMMA,
        min=0.0,
        max=4.0,
        steps=81,
        outputs=frozenset({OutputKind.EIGENVALUES}),
    )
    table = run_gamma_sweep(spec, tol)
    return float(len(continuity_violations(table, "gamma", critical_gamma(1.0, 0.8))))


def _critical_values(tol: Tolerances) -> float:
    return max(
        abs(critical_gamma(1.0, 0.0) - 2.0),
        abs(critical_gamma(1.0, 1.0)),
        abs(critical_eta(1.0, 1.5) - math.sqrt(1.75) / 2),
    )


CHECKS: tuple[Check, ...] = (
    Check("su2_algebra", 1e-12, _su2_algebra),
    Check("casimir", 1e-12, _casimir),
    Check("hamiltonian_forms_agree", 1e-14, _hamiltonian_forms),
    Check("analytic_vs_numeric_spectrum", 1e-8, _analytic_vs_numeric),
    Check("nilpotent_expm_matches_expm", 1e-13, _nilpotent_vs_expm),
    Check("expm_inverse", 1e-10, _expm_inverse),
    Check("backend_agreement", 1e-8, _backend_agreement),
    Check("semigroup", 1e-9, _semigroup),
    Check("unidirectional_noon_occupation", 1e-9, _unidirectional_noon),
    Check("hom_null", 1e-10, _hom_null),
    Check("critical_values", 1e-12, _critical_values),
    Check("branch_continuity", 0.0, _branch_continuity),
)


def run_selftest(
    tol: Tolerances = DEFAULT_TOLERANCES, checks: tuple[Check, ...] = CHECKS
) -> list[CheckResult]:
    """Run every check; an exception counts as a failure."""
    results = []
    for check in checks:
        try:
            value = float(check.measure(tol))
        except Exception as exc:  # noqa: BLE001
            logger.warning("selftest %s raised %s", check.name, exc)
            results.append(CheckResult(check.name, False, math.nan, check.bound, str(exc)))
            continue
        passed = value <= check.bound
        logger.info("selftest %s: %.3e (bound %.0e)", check.name, value, check.bound)
        results.append(CheckResult(check.name, passed, value, check.bound))
    return results
