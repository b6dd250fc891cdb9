"""Parameter model for an ensemble of qubits coupled to a single cavity mode.

All energies (qubit gaps, biases, couplings, the cavity frequency and the
temperature expressed as k_B*T) share one energy unit with hbar = 1, e.g.
angular GHz.  Temperature therefore enters every formula only through the
energy ``kT``.
"""
from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import InvalidParameterError, SchemaError

__all__ = [
    "QubitParams",
    "Ensemble",
    "DisorderSpec",
    "ThermalSpec",
    "ZERO_TEMPERATURE",
    "uniform_ensemble",
    "sample_ensemble",
    "save_ensemble",
    "load_ensemble",
]


def _require_finite(name, value):
    value = float(value)
    if not math.isfinite(value):
        raise InvalidParameterError(f"{name} must be finite, got {value!r}")
    return value


@dataclass(frozen=True)
class QubitParams:
    """One qubit: gap ``delta`` (sigma_x term), bias ``epsilon`` (sigma_z term),
    cavity coupling ``g`` multiplying sigma_z (a + a^dag).
    """

    delta: float
    epsilon: float
    g: float

    def __post_init__(self):
        object.__setattr__(self, "delta", _require_finite("delta", self.delta))
        object.__setattr__(self, "epsilon", _require_finite("epsilon", self.epsilon))
        object.__setattr__(self, "g", _require_finite("g", self.g))
        if not self.delta > 0:
            raise InvalidParameterError(f"qubit gap delta must be > 0, got {self.delta}")
        if self.g < 0:
            # A negative g is equivalent to flipping the qubit z-axis; callers
            # should negate epsilon instead of passing g < 0.
            raise InvalidParameterError(f"coupling g must be >= 0, got {self.g}")


@dataclass(frozen=True)
class Ensemble:
    """Cavity frequency ``omega`` plus the ordered list of qubits.

    Immutable; cached numpy views of the per-qubit parameters are exposed for
    the solvers.
    """

    omega: float
    qubits: tuple[QubitParams, ...]

    def __post_init__(self):
        object.__setattr__(self, "omega", _require_finite("omega", self.omega))
        object.__setattr__(self, "qubits", tuple(self.qubits))
        if not self.omega > 0:
            raise InvalidParameterError(f"cavity frequency omega must be > 0, got {self.omega}")
        if len(self.qubits) < 1:
            raise InvalidParameterError("an ensemble needs at least one qubit")
        for q in self.qubits:
            if not isinstance(q, QubitParams):
                raise InvalidParameterError(f"qubits must be QubitParams, got {type(q).__name__}")

    @property
    def n(self) -> int:
        return len(self.qubits)

    @cached_property
    def deltas(self) -> np.ndarray:
        return np.array([q.delta for q in self.qubits])

    @cached_property
    def epsilons(self) -> np.ndarray:
        return np.array([q.epsilon for q in self.qubits])

    @cached_property
    def gs(self) -> np.ndarray:
        return np.array([q.g for q in self.qubits])

    def with_bias_shift(self, shift: float) -> "Ensemble":
        """New ensemble with every epsilon_i shifted by ``shift`` (the global knob)."""
        shift = _require_finite("shift", shift)
        return Ensemble(self.omega, tuple(
            QubitParams(q.delta, q.epsilon + shift, q.g) for q in self.qubits))

    def with_scaled_coupling(self, scale: float) -> "Ensemble":
        """New ensemble with every g_i multiplied by ``scale`` >= 0."""
        scale = _require_finite("scale", scale)
        if scale < 0:
            raise InvalidParameterError(f"coupling scale must be >= 0, got {scale}")
        return Ensemble(self.omega, tuple(
            QubitParams(q.delta, q.epsilon, q.g * scale) for q in self.qubits))


@dataclass(frozen=True)
class DisorderSpec:
    """Independent Gaussian disorder for (delta, epsilon, g), keyed by a seed.

    ``delta`` draws are resampled until positive and ``g`` draws until
    non-negative (truncation by resampling keeps the distributions smooth).
    """

    mean_delta: float
    mean_epsilon: float = 0.0
    mean_g: float = 0.0
    sigma_delta: float = 0.0
    sigma_epsilon: float = 0.0
    sigma_g: float = 0.0
    seed: int = 0

    def __post_init__(self):
        for name in ("mean_delta", "mean_epsilon", "mean_g",
                     "sigma_delta", "sigma_epsilon", "sigma_g"):
            object.__setattr__(self, name, _require_finite(name, getattr(self, name)))
        if not self.mean_delta > 0:
            raise InvalidParameterError(f"mean_delta must be > 0, got {self.mean_delta}")
        if self.mean_g < 0:
            raise InvalidParameterError(f"mean_g must be >= 0, got {self.mean_g}")
        for name in ("sigma_delta", "sigma_epsilon", "sigma_g"):
            if getattr(self, name) < 0:
                raise InvalidParameterError(f"{name} must be >= 0, got {getattr(self, name)}")
        object.__setattr__(self, "seed", int(self.seed))


@dataclass(frozen=True)
class ThermalSpec:
    """Temperature as the energy ``kT``; ``kT = 0`` selects the ground state."""

    kT: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "kT", _require_finite("kT", self.kT))
        if self.kT < 0:
            raise InvalidParameterError(f"kT must be >= 0, got {self.kT}")

    @property
    def is_ground_state(self) -> bool:
        return self.kT == 0.0

    def polarization(self, energies):
        """Equilibrium two-level polarization tanh(E / (2 kT)), elementwise.

        Returns 1 for every entry at kT = 0 (the ground-state limit).
        """
        energies = np.asarray(energies, dtype=float)
        if self.kT == 0.0:
            return np.ones_like(energies)
        return np.tanh(energies / (2.0 * self.kT))


ZERO_TEMPERATURE = ThermalSpec(0.0)


def uniform_ensemble(n: int, omega: float, delta: float, epsilon: float = 0.0,
                     g: float = 0.0) -> Ensemble:
    """Ensemble of ``n`` identical qubits (delta, epsilon, g) with cavity ``omega``."""
    n = int(n)
    if n < 1:
        raise InvalidParameterError(f"n must be >= 1, got {n}")
    qubit = QubitParams(delta, epsilon, g)
    return Ensemble(omega, (qubit,) * n)


def _truncated_normal(rng, mean, sigma, lower_ok):
    # Resample (do not clip) until the constraint holds.
    value = rng.normal(mean, sigma)
    while not lower_ok(value):
        value = rng.normal(mean, sigma)
    return value


def sample_ensemble(spec: DisorderSpec, n: int, omega: float) -> Ensemble:
    """Draw ``n`` qubits with independent Gaussian (delta_i, epsilon_i, g_i).

    Each qubit's draws come from its own child stream of ``spec.seed``, so
    qubit i's parameters depend only on (seed, i): generating a prefix, the
    full ensemble, or chunks in parallel all yield identical qubits.  A zero
    sigma reproduces the corresponding mean exactly.
    """
    n = int(n)
    if n < 1:
        raise InvalidParameterError(f"n must be >= 1, got {n}")
    children = np.random.SeedSequence(spec.seed).spawn(n)
    qubits = []
    for child in children:
        rng = np.random.default_rng(child)
        # Fixed draw order per qubit: delta, epsilon, g.
        if spec.sigma_delta == 0.0:
            delta = spec.mean_delta
        else:
            delta = _truncated_normal(rng, spec.mean_delta, spec.sigma_delta, lambda v: v > 0)
        if spec.sigma_epsilon == 0.0:
            epsilon = spec.mean_epsilon
        else:
            epsilon = rng.normal(spec.mean_epsilon, spec.sigma_epsilon)
        if spec.sigma_g == 0.0:
            g = spec.mean_g
        else:
            g = _truncated_normal(rng, spec.mean_g, spec.sigma_g, lambda v: v >= 0)
        qubits.append(QubitParams(delta, epsilon, g))
    return Ensemble(omega, tuple(qubits))


def ensemble_to_dict(e: Ensemble) -> dict:
    """Plain-dict form of an ensemble (the on-disk document schema)."""
    return {
        "omega": e.omega,
        "qubits": [{"delta": q.delta, "epsilon": q.epsilon, "g": q.g} for q in e.qubits],
    }


def ensemble_from_dict(doc) -> Ensemble:
    """Parse the document schema, naming the offending field on error."""
    if not isinstance(doc, dict):
        raise SchemaError(f"ensemble document must be an object, got {type(doc).__name__}")
    if "omega" not in doc:
        raise SchemaError("ensemble document is missing required field 'omega'")
    if "qubits" not in doc:
        raise SchemaError("ensemble document is missing required field 'qubits'")
    omega = doc["omega"]
    if not isinstance(omega, (int, float)) or isinstance(omega, bool):
        raise SchemaError(f"field 'omega' must be a number, got {omega!r}")
    raw_qubits = doc["qubits"]
    if not isinstance(raw_qubits, list):
        raise SchemaError("field 'qubits' must be an array")
    qubits = []
    for i, q in enumerate(raw_qubits):
        if not isinstance(q, dict):
            raise SchemaError(f"qubits[{i}] must be an object")
        for key in ("delta", "epsilon", "g"):
            if key not in q:
                raise SchemaError(f"qubits[{i}] is missing required field '{key}'")
            if not isinstance(q[key], (int, float)) or isinstance(q[key], bool):
                raise SchemaError(f"qubits[{i}].{key} must be a number, got {q[key]!r}")
        qubits.append(QubitParams(q["delta"], q["epsilon"], q["g"]))
    return Ensemble(omega, tuple(qubits))


def save_ensemble(e: Ensemble, path) -> None:
    """Write the ensemble as JSON; floats round-trip exactly (repr serialization)."""
    doc = ensemble_to_dict(e)
    tmp = f"{path}.tmp.{os.getpid()}"
    with open(tmp, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")
    os.replace(tmp, path)


def load_ensemble(path) -> Ensemble:
    """Load an ensemble document written by :func:`save_ensemble`."""
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"not valid JSON: {exc}") from exc
    return ensemble_from_dict(doc)
