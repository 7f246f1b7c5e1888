"""Parameter sweeps behind the eigenvalue-flow, spin and dynamics tables.

Sweep points are independent and may be evaluated by a process pool; the
results are always assembled in grid order, so the emitted tables do not
depend on the number of workers.
"""

from __future__ import annotations

import logging
from collections.abc import Callable, Sequence
from concurrent.futures import ProcessPoolExecutor
from functools import partial
from typing import Any, TypeVar

import numpy as np

from .config import DEFAULT_TOLERANCES, Tolerances
from .csv_table import CsvTable, CsvTableError
from .hamiltonian import fock_state, noon_state
from .linalg_kernel import ComplexVector, NumericalError, lexicographic_key
from .models import (
    InitialKind,
    InvalidParameterError,
    ModelParams,
    OutputKind,
    SweepAxis,
    SweepSpec,
)
from .propagator import evolve
from .spectrum import critical_eta, numeric_spectrum, spin_projections

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")

SPIN_HEADER = ["gamma", "eta", "r", "jx", "jy", "jz"]
DEFAULT_SPIN_RATIOS = (0.75, 1.0, 1.5)

CONTINUITY_FACTOR = 5.0
CONTINUITY_HALF_WINDOW = 4
CONTINUITY_EP_STEPS = 2
CONTINUITY_FLOOR = 1e-8


class SweepPointError(NumericalError):
    """Raised when a sweep point fails; the message names the point."""


def axis_grid(spec: SweepSpec) -> np.ndarray:
    return np.linspace(spec.min, spec.max, spec.steps)


def map_ordered(func: Callable[[T], R], items: Sequence[T], workers: int = 1) -> list[R]:
    """Apply ``func`` to every item, in parallel when workers > 1, keeping order."""
    if workers <= 1 or len(items) < 2:
        return [func(item) for item in items]
    chunksize = max(1, len(items) // (4 * workers))
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, items, chunksize=chunksize))


def match_branches(previous: Sequence[complex], current: Sequence[complex]) -> list[complex]:
    """Assign ``current`` eigenvalues to the branches ending in ``previous``.

    Greedy: the globally closest (branch, candidate) pair is fixed first.
    Candidates are taken in lexicographic order, so equal distances resolve
    by branch index, then candidate index.
    """
    if len(previous) != len(current):
        raise ValueError("branch count changed between steps")
    candidates = sorted(current, key=lexicographic_key)
    pairs = sorted(
        (abs(p - c), i, j) for i, p in enumerate(previous) for j, c in enumerate(candidates)
    )
    assigned: list[complex | None] = [None] * len(previous)
    taken: set[int] = set()
    for _, i, j in pairs:
        if assigned[i] is None and j not in taken:
            assigned[i] = candidates[j]
            taken.add(j)
    return [value for value in assigned if value is not None]


def _spectrum_point(
    item: tuple[str, float, ModelParams], tol: Tolerances
) -> tuple[tuple[complex, ...], float, float]:
    axis_name, value, params = item
    try:
        result = numeric_spectrum(params, tol)
    except NumericalError as exc:
        raise SweepPointError(f"eigensolver failed at {axis_name}={value!r}: {exc}") from exc
    return result.eigenvalues, result.eigenvalue_spread, result.eigenvector_min_sv


def spectrum_header(axis_name: str, n: int, outputs: frozenset[OutputKind]) -> list[str]:
    header = [axis_name]
    if OutputKind.EIGENVALUES in outputs:
        header += [f"re_lambda_{k}" for k in range(n + 1)]
        header += [f"im_lambda_{k}" for k in range(n + 1)]
    if OutputKind.DIAGNOSTICS in outputs:
        header += ["spread", "eigvec_min_sv"]
    return header


def _spectrum_table(spec: SweepSpec, tol: Tolerances) -> CsvTable:
    axis_name = spec.axis.value
    values = [float(v) for v in axis_grid(spec)]
    items = [(axis_name, v, spec.base.with_changes(**{axis_name: v})) for v in values]
    logger.info("%s sweep: %d points, %d worker(s)", axis_name, len(items), spec.workers)
    results = map_ordered(partial(_spectrum_point, tol=tol), items, spec.workers)

    table = CsvTable(spectrum_header(axis_name, spec.base.n_photons, spec.outputs))
    branches: list[complex] | None = None
    earlier: list[complex] | None = None
    for value, (eigenvalues, spread, min_sv) in zip(values, results):
        if branches is None:
            branches = sorted(eigenvalues, key=lexicographic_key)
        else:
            # match against the linear extrapolation of the last two rows
            predicted = branches if earlier is None else [2 * b - e for b, e in zip(branches, earlier)]
            earlier, branches = branches, match_branches(predicted, eigenvalues)
        row = [value]
        if OutputKind.EIGENVALUES in spec.outputs:
            row += [b.real for b in branches] + [b.imag for b in branches]
        if OutputKind.DIAGNOSTICS in spec.outputs:
            row += [spread, min_sv]
        table.append(row)
    return table


def run_gamma_sweep(spec: SweepSpec, tol: Tolerances = DEFAULT_TOLERANCES) -> CsvTable:
    """Continuity-matched eigenvalue flow against gamma."""
    if spec.axis is not SweepAxis.GAMMA:
        raise InvalidParameterError(f"gamma sweep needs axis=gamma, got {spec.axis.value}")
    return _spectrum_table(spec, tol)


def run_eta_sweep(spec: SweepSpec, tol: Tolerances = DEFAULT_TOLERANCES) -> CsvTable:
    """Continuity-matched eigenvalue flow against eta."""
    if spec.axis is not SweepAxis.ETA:
        raise InvalidParameterError(f"eta sweep needs axis=eta, got {spec.axis.value}")
    return _spectrum_table(spec, tol)


def locate_coalescence(
    table: CsvTable, axis_column: str, tol: Tolerances = DEFAULT_TOLERANCES
) -> float:
    """First axis value meeting the coalescence metric.

    Falls back to the value of smallest eigenvalue spread when no grid
    point lands on the exceptional point.
    """
    try:
        values = table.column(axis_column)
        spreads = table.column("spread")
        min_svs = table.column("eigvec_min_sv")
    except ValueError as exc:
        raise CsvTableError(f"table lacks coalescence diagnostics: {exc}") from exc

    for value, spread, min_sv in zip(values, spreads, min_svs):
        if spread <= tol.coalescence_spread and min_sv <= tol.coalescence_min_sv:
            return value
    best = values[int(np.argmin(spreads))]
    logger.info("no grid point on the exceptional point, closest %s=%g", axis_column, best)
    return best


def branch_columns(table: CsvTable) -> list[np.ndarray]:
    """Matched eigenvalue branches of a spectrum table as complex arrays."""
    count = sum(1 for name in table.header if name.startswith("re_lambda_"))
    if count == 0:
        raise CsvTableError("table has no eigenvalue columns")
    return [
        np.array(table.column(f"re_lambda_{k}")) + 1j * np.array(table.column(f"im_lambda_{k}"))
        for k in range(count)
    ]


def continuity_violations(
    table: CsvTable,
    axis_column: str,
    critical: float | None,
    factor: float = CONTINUITY_FACTOR,
    half_window: int = CONTINUITY_HALF_WINDOW,
    ep_window_steps: int = CONTINUITY_EP_STEPS,
    floor: float = CONTINUITY_FLOOR,
) -> list[tuple[int, float]]:
    """Steps where a matched branch jumps against its neighbouring steps.

    Increment i of branch k, |lambda_k(i + 1) - lambda_k(i)|, is compared
    with the median of that branch's increments i - half_window ..
    i + half_window, and flagged when it exceeds ``factor`` times that
    median plus ``floor``. Increments with an end point within
    ``ep_window_steps`` grid steps of ``critical`` are not checked.
    Returns (branch, axis value at the start of the step) pairs.
    """
    values = np.array(table.column(axis_column))
    if values.size < 2:
        return []
    step = abs(values[1] - values[0])
    increments = [np.abs(np.diff(branch)) for branch in branch_columns(table)]

    violations = []
    for i in range(values.size - 1):
        if critical is not None:
            distance = min(abs(values[i] - critical), abs(values[i + 1] - critical))
            if distance <= ep_window_steps * step * (1 + 1e-9):
                continue
        low, high = max(0, i - half_window), i + half_window + 1
        for k, branch in enumerate(increments):
            bound = factor * float(np.median(branch[low:high])) + floor
            if branch[i] > bound:
                violations.append((k, float(values[i])))
    return violations


def default_spin_grid(nu0: float) -> tuple[list[float], list[float]]:
    """Gamma at 0.75, 1 and 1.5 times 2 nu0, against eta = 0, eta_c(0.75 * 2 nu0), 1."""
    gammas = [ratio * 2 * nu0 for ratio in DEFAULT_SPIN_RATIOS]
    etas = [0.0, critical_eta(nu0, DEFAULT_SPIN_RATIOS[0] * 2 * nu0), 1.0]
    return gammas, etas


def _spin_rows(item: tuple[float, float, ModelParams], tol: Tolerances) -> list[list[float]]:
    gamma, eta, params = item
    try:
        projections = spin_projections(params, tol)
    except NumericalError as exc:
        raise SweepPointError(f"spin projections failed at gamma={gamma!r}, eta={eta!r}: {exc}") from exc
    return [[gamma, eta, p.r, p.jx, p.jy, p.jz] for p in projections]


def run_spin_grid(
    gammas: Sequence[float],
    etas: Sequence[float],
    base: ModelParams,
    tol: Tolerances = DEFAULT_TOLERANCES,
    workers: int = 1,
) -> CsvTable:
    """Spin projections of every eigenmode over an (eta, gamma) grid."""
    items = [
        (float(gamma), float(eta), base.with_changes(gamma=float(gamma), eta=float(eta)))
        for eta in etas
        for gamma in gammas
    ]
    table = CsvTable(list(SPIN_HEADER))
    for rows in map_ordered(partial(_spin_rows, tol=tol), items, workers):
        table.extend(rows)
    return table


def resolve_initial(text: str, n: int) -> ComplexVector:
    """Parse ``noon``, ``fock:m`` or ``amplitudes:a0,a1,...`` into a state."""
    kind, _, argument = text.strip().partition(":")
    try:
        initial_kind = InitialKind(kind.strip().lower())
    except ValueError as exc:
        raise InvalidParameterError(f"unknown initial state {text!r}") from exc

    if initial_kind is InitialKind.NOON:
        if argument:
            raise InvalidParameterError("noon takes no argument")
        return noon_state(n)
    if initial_kind is InitialKind.FOCK:
        try:
            return fock_state(int(argument), n)
        except (ValueError, IndexError) as exc:
            raise InvalidParameterError(f"invalid Fock state {text!r}: {exc}") from exc

    try:
        amplitudes = [complex(item.strip().replace(" ", "")) for item in argument.split(",")]
    except ValueError as exc:
        raise InvalidParameterError(f"invalid amplitudes in {text!r}") from exc
    if len(amplitudes) != n + 1:
        raise InvalidParameterError(f"expected {n + 1} amplitudes, got {len(amplitudes)}")
    return ComplexVector(np.array(amplitudes))


def dynamics_header(n: int, outputs: frozenset[OutputKind]) -> list[str]:
    header = ["z"]
    if OutputKind.SURVIVAL in outputs:
        header.append("survival")
    if OutputKind.OCCUPATION in outputs:
        header += [f"p_{m}" for m in range(n + 1)]
    return header


def _dynamics_rows(
    chunk: Sequence[float],
    params: ModelParams,
    initial: ComplexVector,
    spec: SweepSpec,
    tol: Tolerances,
) -> list[list[float]]:
    trajectory = evolve(params, initial, chunk, spec.backend, tol)
    rows = []
    for point in trajectory.points:
        row = [point.z]
        if OutputKind.SURVIVAL in spec.outputs:
            row.append(point.survival)
        if OutputKind.OCCUPATION in spec.outputs:
            row += list(point.occupation)
        rows.append(row)
    return rows


def run_dynamics(
    spec: SweepSpec,
    initial: str | ComplexVector | None = None,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> CsvTable:
    """Post-selected occupation and survival along z."""
    if spec.axis is not SweepAxis.Z:
        raise InvalidParameterError(f"dynamics needs axis=z, got {spec.axis.value}")
    n = spec.base.n_photons
    if initial is None:
        initial = spec.initial
    state = initial if isinstance(initial, ComplexVector) else resolve_initial(initial, n)

    chunks: list[Any] = [
        [float(z) for z in chunk] for chunk in np.array_split(axis_grid(spec), spec.workers)
    ]
    chunks = [chunk for chunk in chunks if chunk]
    worker = partial(_dynamics_rows, params=spec.base, initial=state, spec=spec, tol=tol)
    table = CsvTable(dynamics_header(n, spec.outputs))
    for rows in map_ordered(worker, chunks, spec.workers):
        table.extend(rows)
    return table
