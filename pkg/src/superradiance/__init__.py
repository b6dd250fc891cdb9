"""Mean-field and exact-diagonalization solvers for the superradiance phase
transition of disordered qubit ensembles coupled to a single cavity."""

__version__ = "0.1.0"

from .model import (
    DisorderSpec,
    Ensemble,
    QubitParams,
    ThermalSpec,
    ZERO_TEMPERATURE,
    load_ensemble,
    sample_ensemble,
    save_ensemble,
    uniform_ensemble,
)
from .meanfield import balance_bias, solve
from .phase import classify, critical_coupling_scale, critical_temperature
from .specialfn import f1, f2, gaussian_expect, hyp_u_half

__all__ = [
    "__version__",
    "QubitParams",
    "Ensemble",
    "DisorderSpec",
    "ThermalSpec",
    "ZERO_TEMPERATURE",
    "uniform_ensemble",
    "sample_ensemble",
    "save_ensemble",
    "load_ensemble",
    "solve",
    "balance_bias",
    "classify",
    "critical_temperature",
    "critical_coupling_scale",
    "f1",
    "f2",
    "hyp_u_half",
    "gaussian_expect",
]
