"""Data models for the beam-splitter simulator."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import TYPE_CHECKING, Any

if TYPE_CHECKING:
    from .linalg_kernel import ComplexMatrix, ComplexVector


class InvalidParameterError(ValueError):
    """Raised when physical or sweep parameters violate their bounds."""


class SweepAxis(str, Enum):
    """Parameter swept along the rows of a table."""

    GAMMA = "gamma"
    ETA = "eta"
    Z = "z"


class Backend(str, Enum):
    """Evolution-operator backends."""

    WEI_NORMAN = "wei_norman"
    EXPM = "expm"
    AUTO = "auto"


class OutputKind(str, Enum):
    """Column groups a sweep may emit."""

    EIGENVALUES = "eigenvalues"
    DIAGNOSTICS = "diagnostics"
    SPIN = "spin"
    OCCUPATION = "occupation"
    SURVIVAL = "survival"


class InitialKind(str, Enum):
    """Ways of describing the input state of a dynamics run."""

    NOON = "noon"
    FOCK = "fock"
    AMPLITUDES = "amplitudes"


def _require_finite(name: str, value: float) -> None:
    if not math.isfinite(value):
        raise InvalidParameterError(f"{name} must be finite, got {value!r}")


@dataclass(frozen=True)
class ModelParams:
    """The five physical parameters of one beam-splitter instance."""

    omega0: float
    nu0: float
    eta: float
    gamma: float
    n_photons: int

    def __post_init__(self) -> None:
        for name in ("omega0", "nu0", "eta", "gamma"):
            _require_finite(name, getattr(self, name))
        if isinstance(self.n_photons, bool) or not isinstance(self.n_photons, int):
            raise InvalidParameterError(
                f"n_photons must be an integer, got {self.n_photons!r}"
            )
        if self.n_photons < 1:
            raise InvalidParameterError(f"n_photons must be >= 1, got {self.n_photons}")
        if self.nu0 <= 0:
            raise InvalidParameterError(f"nu0 must be positive, got {self.nu0}")
        if not 0 <= self.eta <= 1:
            raise InvalidParameterError(f"eta must lie in [0, 1], got {self.eta}")
        if self.gamma < 0:
            raise InvalidParameterError(f"gamma must be non-negative, got {self.gamma}")

    @property
    def dim(self) -> int:
        """Dimension N+1 of the fixed-photon-number subspace."""
        return self.n_photons + 1

    def with_changes(self, **changes: Any) -> ModelParams:
        """Return a validated copy with some fields replaced."""
        return replace(self, **changes)

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> ModelParams:
        """Create ModelParams from configuration values (short keys allowed)."""
        try:
            return cls(
                omega0=float(data.get("omega0", 1.0)),
                nu0=float(data.get("nu0", 1.0)),
                eta=float(data.get("eta", 0.0)),
                gamma=float(data.get("gamma", 0.0)),
                n_photons=int(data.get("n_photons", data.get("n", 4))),
            )
        except (TypeError, ValueError) as exc:
            if isinstance(exc, InvalidParameterError):
                raise
            raise InvalidParameterError(f"invalid model parameter: {exc}") from exc


@dataclass(frozen=True)
class Couplings:
    """Directional couplings nu = nu0(1+eta) and nu' = nu0(1-eta)."""

    nu: float
    nu_prime: float


@dataclass(frozen=True)
class SpectrumResult:
    """Numeric eigensystem at one parameter point plus coalescence diagnostics."""

    params: ModelParams
    eigenvalues: tuple[complex, ...]
    right_eigenvectors: ComplexMatrix
    eigenvalue_spread: float
    eigenvector_min_sv: float
    residual: float = 0.0

    def __post_init__(self) -> None:
        if len(self.eigenvalues) != self.params.dim:
            raise InvalidParameterError(
                f"expected {self.params.dim} eigenvalues, got {len(self.eigenvalues)}"
            )

    def is_coalesced(self, max_spread: float, max_min_sv: float) -> bool:
        """Check the coalescence metric against the given thresholds."""
        return (
            self.eigenvalue_spread <= max_spread
            and self.eigenvector_min_sv <= max_min_sv
        )


@dataclass(frozen=True)
class EpReport:
    """Critical values of the exceptional point for one parameter set."""

    gamma_c: float
    eta_c: float | None
    order: int

    def to_lines(self) -> list[str]:
        """Render the report as ``key=value`` lines."""
        eta_text = "none" if self.eta_c is None else format(self.eta_c, ".17g")
        return [
            f"gamma_c={format(self.gamma_c, '.17g')}",
            f"eta_c={eta_text}",
            f"order={self.order}",
        ]


@dataclass(frozen=True)
class SpinProjection:
    """Spin expectation values of one eigenmode, labelled by its index r."""

    r: float
    jx: float
    jy: float
    jz: float

    @property
    def length_squared(self) -> float:
        return self.jx**2 + self.jy**2 + self.jz**2


@dataclass(frozen=True)
class ExponentFit:
    """Log-log fit of eigenvalue splitting against perturbation strength."""

    mode: str
    slope: float
    intercept: float
    residual: float
    eps_grid: tuple[float, ...]
    spreads: tuple[float, ...]


@dataclass(frozen=True)
class WeiNormanFactors:
    """Disentangling functions f+, f_z, f- evaluated at distance z."""

    f_plus: complex
    f_z: complex
    f_minus: complex
    z: float

    def as_tuple(self) -> tuple[complex, complex, complex]:
        return (self.f_plus, self.f_z, self.f_minus)


@dataclass(frozen=True)
class TrajectoryPoint:
    """State of the post-selected evolution at one propagation distance."""

    z: float
    amplitudes: ComplexVector
    survival: float
    occupation: tuple[float, ...]


@dataclass
class Trajectory:
    """Ordered evolution records for one parameter set and input state."""

    params: ModelParams
    points: list[TrajectoryPoint] = field(default_factory=list)

    @property
    def z_values(self) -> list[float]:
        return [point.z for point in self.points]

    def occupation_at(self, index: int) -> tuple[float, ...]:
        return self.points[index].occupation

    def survivals(self) -> list[float]:
        return [point.survival for point in self.points]


_AXIS_DEFAULT_RANGES: dict[SweepAxis, tuple[float, float]] = {
    SweepAxis.GAMMA: (0.0, 4.0),
    SweepAxis.ETA: (0.0, 1.0),
    SweepAxis.Z: (0.0, 10.0),
}

DEFAULT_STEPS = 401


def _parse_outputs(value: Any) -> frozenset[OutputKind]:
    if value is None:
        return frozenset(OutputKind)
    if isinstance(value, str):
        items = [item.strip() for item in value.split(",") if item.strip()]
    else:
        items = list(value)
    try:
        return frozenset(OutputKind(item) for item in items)
    except ValueError as exc:
        raise InvalidParameterError(f"unknown output kind: {exc}") from exc


@dataclass(frozen=True)
class SweepSpec:
    """One sweep: base parameters, swept axis, grid and selected outputs."""

    base: ModelParams
    axis: SweepAxis
    min: float
    max: float
    steps: int
    outputs: frozenset[OutputKind] = frozenset(OutputKind)
    initial: str = InitialKind.NOON.value
    backend: Backend = Backend.AUTO
    seed: int = 0
    out: str | None = None
    workers: int = 1

    def __post_init__(self) -> None:
        _require_finite("min", self.min)
        _require_finite("max", self.max)
        if not self.min < self.max:
            raise InvalidParameterError(
                f"sweep requires min < max, got [{self.min}, {self.max}]"
            )
        if self.steps < 2:
            raise InvalidParameterError(f"steps must be >= 2, got {self.steps}")
        if self.workers < 1:
            raise InvalidParameterError(f"workers must be >= 1, got {self.workers}")
        if self.axis is SweepAxis.ETA and not (0 <= self.min and self.max <= 1):
            raise InvalidParameterError("eta sweep must stay within [0, 1]")
        if self.axis in (SweepAxis.GAMMA, SweepAxis.Z) and self.min < 0:
            raise InvalidParameterError(f"{self.axis.value} sweep must start at >= 0")

    @classmethod
    def from_dict(
        cls, data: dict[str, Any], default_axis: SweepAxis = SweepAxis.GAMMA
    ) -> SweepSpec:
        """Create a SweepSpec from merged configuration values.

        Missing grid bounds fall back to the natural range of the axis.
        """
        try:
            axis = SweepAxis(str(data.get("axis", default_axis.value)).lower())
            backend = Backend(str(data.get("backend", Backend.AUTO.value)).lower())
        except ValueError as exc:
            raise InvalidParameterError(str(exc)) from exc

        low, high = _AXIS_DEFAULT_RANGES[axis]
        try:
            return cls(
                base=ModelParams.from_dict(data),
                axis=axis,
                min=float(data.get("min", low)),
                max=float(data.get("max", high)),
                steps=int(data.get("steps", DEFAULT_STEPS)),
                outputs=_parse_outputs(data.get("outputs")),
                initial=str(data.get("initial", InitialKind.NOON.value)),
                backend=backend,
                seed=int(data.get("seed", 0)),
                out=None if data.get("out") is None else str(data["out"]),
                workers=int(data.get("workers", 1)),
            )
        except InvalidParameterError:
            raise
        except (TypeError, ValueError) as exc:
            raise InvalidParameterError(f"invalid sweep setting: {exc}") from exc
