"""epbeam: spectra, exceptional points and post-selected dynamics of a
non-reciprocal lossy two-waveguide beam splitter.
"""

__version__ = "0.1.0"
__author__ = "epbeam developers"

from .config import DEFAULT_TOLERANCES, ConfigError, Tolerances, parse_config
from .hamiltonian import (
    couplings,
    fock_state,
    hamiltonian,
    j_minus,
    j_plus,
    j_z,
    noon_state,
)
from .linalg_kernel import ComplexMatrix, ComplexVector, NumericalError
from .models import (
    Backend,
    InvalidParameterError,
    ModelParams,
    SpectrumResult,
    SweepAxis,
    SweepSpec,
    Trajectory,
    WeiNormanFactors,
)
from .propagator import evolve, f_factors, propagator
from .spectrum import (
    analytic_eigenvalues,
    critical_eta,
    critical_gamma,
    delta_lambda,
    ep_report,
    numeric_spectrum,
)

__all__ = [
    "DEFAULT_TOLERANCES",
    "Backend",
    "ComplexMatrix",
    "ComplexVector",
    "ConfigError",
    "InvalidParameterError",
    "ModelParams",
    "NumericalError",
    "SpectrumResult",
    "SweepAxis",
    "SweepSpec",
    "Tolerances",
    "Trajectory",
    "WeiNormanFactors",
    "analytic_eigenvalues",
    "couplings",
    "critical_eta",
    "critical_gamma",
    "delta_lambda",
    "ep_report",
    "evolve",
    "f_factors",
    "fock_state",
    "hamiltonian",
    "j_minus",
    "j_plus",
    "j_z",
    "noon_state",
    "numeric_spectrum",
    "parse_config",
    "propagator",
]
