"""Named sweeps that regenerate the data of each figure panel.

Spectrum panels use absolute gamma. Spin and dynamics panels express gamma
as a multiple of 2 nu0, the critical dissipation of the reciprocal coupler.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Callable
from dataclasses import dataclass
from pathlib import Path

from .config import DEFAULT_TOLERANCES, Tolerances
from .csv_table import CsvTable
from .models import ModelParams, OutputKind, SweepAxis, SweepSpec
from .sweeps import default_spin_grid, run_dynamics, run_eta_sweep, run_gamma_sweep, run_spin_grid

logger = logging.getLogger(__name__)

PANEL_LETTERS = "abcdefghi"
DYNAMICS_GAMMA_RATIOS = (0.25, 1.0, 2.0)
DYNAMICS_ETAS = (0.0, 0.5, 1.0)


class UnknownPresetError(KeyError):
    """Raised for a preset name that does not exist."""


@dataclass(frozen=True)
class Panel:
    """One table of a preset, produced on demand."""

    name: str
    build: Callable[[Tolerances, int], CsvTable]


def _base(n: int, eta: float = 0.0, gamma: float = 0.0) -> ModelParams:
    return ModelParams(omega0=1.0, nu0=1.0, eta=eta, gamma=gamma, n_photons=n)


def _spectrum_panel(name: str, axis: SweepAxis, base: ModelParams, high: float) -> Panel:
    def build(tol: Tolerances, workers: int) -> CsvTable:
        spec = SweepSpec(
            base=base,
            axis=axis,
            min=0.0,
            max=high,
            steps=401,
            outputs=frozenset({OutputKind.EIGENVALUES, OutputKind.DIAGNOSTICS}),
            workers=workers,
        )
        runner = run_gamma_sweep if axis is SweepAxis.GAMMA else run_eta_sweep
        return runner(spec, tol)

    return Panel(name, build)


def _dynamics_panel(
    name: str, base: ModelParams, z_max: float, initial: str = "noon", steps: int = 401
) -> Panel:
    def build(tol: Tolerances, workers: int) -> CsvTable:
        spec = SweepSpec(
            base=base,
            axis=SweepAxis.Z,
            min=0.0,
            max=z_max,
            steps=steps,
            outputs=frozenset({OutputKind.SURVIVAL, OutputKind.OCCUPATION}),
            initial=initial,
            workers=workers,
        )
        return run_dynamics(spec, tol=tol)

    return Panel(name, build)


def _spin_panel(name: str, n: int) -> Panel:
    def build(tol: Tolerances, workers: int) -> CsvTable:
        base = _base(n)
        gammas, etas = default_spin_grid(base.nu0)
        return run_spin_grid(gammas, etas, base, tol, workers)

    return Panel(name, build)


def _dynamics_grid(prefix: str, n: int) -> list[Panel]:
    panels = []
    letters = iter(PANEL_LETTERS)
    for eta in DYNAMICS_ETAS:
        for ratio in DYNAMICS_GAMMA_RATIOS:
            base = _base(n, eta=eta, gamma=ratio * 2.0)
            panels.append(_dynamics_panel(f"{prefix}{next(letters)}", base, z_max=10.0))
    return panels


def _build_presets() -> dict[str, list[Panel]]:
    presets: dict[str, list[Panel]] = {}
    for letter, eta in zip("abc", (0.0, 0.8, 1.0)):
        presets[f"fig2{letter}"] = [
            _spectrum_panel(f"fig2{letter}", SweepAxis.GAMMA, _base(4, eta=eta), 4.0)
        ]
    for letter, gamma in zip("abc", (0.0, 1.7, 2.0)):
        presets[f"fig3{letter}"] = [
            _spectrum_panel(f"fig3{letter}", SweepAxis.ETA, _base(4, gamma=gamma), 1.0)
        ]
    presets["fig4"] = [_spin_panel("fig4", 4)]
    presets["fig5"] = _dynamics_grid("fig5", 4)
    presets["fig6"] = _dynamics_grid("fig6", 2)
    presets["fig7"] = [_dynamics_panel("fig7", _base(2, eta=1.0), z_max=2.0)]
    presets["hom"] = [
        _dynamics_panel("hom", _base(2), z_max=math.pi / 2, initial="fock:1", steps=201)
    ]
    return presets


PRESETS = _build_presets()


def preset_names() -> list[str]:
    return sorted(PRESETS)


def get_preset(name: str) -> list[Panel]:
    try:
        return PRESETS[name]
    except KeyError:
        raise UnknownPresetError(
            f"unknown preset {name!r}; available: {', '.join(preset_names())}"
        ) from None


def write_preset(
    name: str,
    out_dir: str | Path,
    tol: Tolerances = DEFAULT_TOLERANCES,
    workers: int = 1,
) -> list[Path]:
    """Write one CSV per panel of the preset into ``out_dir``."""
    directory = Path(out_dir)
    directory.mkdir(parents=True, exist_ok=True)
    written = []
    for panel in get_preset(name):
        logger.info("preset %s: building panel %s", name, panel.name)
        path = directory / f"{panel.name}.csv"
        panel.build(tol, workers).write(path)
        written.append(path)
    return written
