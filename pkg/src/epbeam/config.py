"""Numeric defaults and run-configuration parsing.

`Tolerances` is the single constants record behind every threshold used by
the kernel, spectrum and propagator modules. Run configuration is a flat
``key = value`` text file whose keys mirror the command-line flags.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from .models import InvalidParameterError, SweepAxis, SweepSpec

CONFIG_KEYS: frozenset[str] = frozenset(
    {
        "n",
        "omega0",
        "nu0",
        "eta",
        "gamma",
        "axis",
        "min",
        "max",
        "steps",
        "initial",
        "out",
        "backend",
        "seed",
        "workers",
        "outputs",
    }
)


class ConfigError(ValueError):
    """Raised for malformed or unknown configuration entries."""


@dataclass(frozen=True)
class Tolerances:
    """Thresholds and working precisions shared by the numerical modules."""

    # linalg kernel
    expm_max_squarings: int = 64
    eig_max_dim: int = 64
    eig_base_dps: int = 20
    eig_dps_per_dim: int = 10
    phase_floor: float = 1e-12

    # spectrum
    degeneracy_threshold: float = 1e-8
    coalescence_spread: float = 1e-6
    coalescence_min_sv: float = 1e-3
    fast_eig_max_error: float = 1e-10
    fast_eig_min_sv: float = 1e-2
    ep_fit_gap: float = 1e-7
    fit_residual_limit: float = 0.1

    # propagator
    ep_limit_threshold: float = 1e-6
    singular_threshold: float = 1e-12
    auto_fallback_threshold: float = 1e-6
    wn_fallback_loss: float = 1e-6
    series_max_epsilon: float = 0.1
    survival_floor: float = 1e-300
    occupation_sum_tolerance: float = 1e-12

    def working_dps(self, dim: int) -> int:
        """Decimal digits used by the extended-precision eigensolvers."""
        return self.eig_base_dps + self.eig_dps_per_dim * dim


DEFAULT_TOLERANCES = Tolerances()


def parse_config_values(text: str) -> dict[str, str]:
    """Parse flat ``key = value`` lines into a dictionary of raw strings.

    Blank lines and lines starting with ``#`` are ignored. Keys are
    case-insensitive; a repeated key keeps its last value.
    """
    values: dict[str, str] = {}
    for lineno, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw_line!r}")

        key, value = (part.strip() for part in line.split("=", 1))
        key = key.lower()
        if key not in CONFIG_KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if not value:
            raise ConfigError(f"line {lineno}: empty value for {key!r}")
        values[key] = value
    return values


def load_config_values(path: str | Path) -> dict[str, str]:
    """Read and parse a configuration file (OSError propagates)."""
    with open(path, encoding="utf-8") as f:
        return parse_config_values(f.read())


def parse_config(text: str, default_axis: SweepAxis = SweepAxis.GAMMA) -> SweepSpec:
    """Parse configuration text into a validated SweepSpec."""
    values = parse_config_values(text)
    try:
        return SweepSpec.from_dict(values, default_axis=default_axis)
    except InvalidParameterError as exc:
        raise ConfigError(str(exc)) from exc


def load_config(path: str | Path, default_axis: SweepAxis = SweepAxis.GAMMA) -> SweepSpec:
    """Read a configuration file into a validated SweepSpec."""
    with open(path, encoding="utf-8") as f:
        return parse_config(f.read(), default_axis=default_axis)
