"""Pydantic request/response models for the solver service.

The JSON form of ``EnsembleModel`` is also the on-disk ensemble document
schema, so files written by the CLI can be posted to the service verbatim.
"""
from __future__ import annotations

from pydantic import BaseModel, Field, model_validator

from .. import model

Stability = str
Classification = str


class QubitModel(BaseModel):
    delta: float
    epsilon: float = 0.0
    g: float = 0.0


class EnsembleModel(BaseModel):
    omega: float
    qubits: list[QubitModel] = Field(min_length=1)

    def to_ensemble(self) -> model.Ensemble:
        return model.Ensemble(self.omega, tuple(
            model.QubitParams(q.delta, q.epsilon, q.g) for q in self.qubits))

    @classmethod
    def from_ensemble(cls, e: model.Ensemble) -> "EnsembleModel":
        return cls(omega=e.omega, qubits=[
            QubitModel(delta=q.delta, epsilon=q.epsilon, g=q.g) for q in e.qubits])


class SolveRequest(BaseModel):
    ensemble: EnsembleModel
    kt: float = Field(default=0.0, ge=0.0)
    # None means "include angles for N <= 1000"; explicit bools override.
    include_angles: bool | None = None


class StationaryPointModel(BaseModel):
    x: float
    energy: float
    stability: Stability


class SolveResponse(BaseModel):
    n: int
    kt: float
    x: float
    p: float
    energy: float
    x0: float
    stationary_points: list[StationaryPointModel]
    thetas: list[float] | None = None
    theta_primes: list[float] | None = None
    omegas: list[float] | None = None


class BalanceRequest(BaseModel):
    ensemble: EnsembleModel
    kt: float = Field(default=0.0, ge=0.0)


class BalanceResponse(BaseModel):
    delta_shift: float
    residual_at_zero: float
    ensemble: EnsembleModel


class ClassifyRequest(BaseModel):
    ensemble: EnsembleModel
    kt: float = Field(default=0.0, ge=0.0)
    auto_balance: bool = True


class ClassifyResponse(BaseModel):
    lam: float
    g_over_g0_sq: float
    sigma_over_delta: float
    kt_over_delta: float
    classification: Classification
    order_parameter: float
    bias_shift: float
    lhs_t0: float
    lhs_finite_t: float


class SampleRequest(BaseModel):
    n: int = Field(ge=1)
    omega: float
    mean_delta: float
    mean_epsilon: float = 0.0
    mean_g: float = 0.0
    sigma_delta: float = Field(default=0.0, ge=0.0)
    sigma_epsilon: float = Field(default=0.0, ge=0.0)
    sigma_g: float = Field(default=0.0, ge=0.0)
    seed: int = 0


class GridAxis(BaseModel):
    """A closed interval sampled at ``points`` evenly spaced values."""

    min: float
    max: float
    points: int = Field(ge=2)

    @model_validator(mode="after")
    def _ordered(self):
        if not self.min < self.max:
            raise ValueError(f"grid axis needs min < max, got [{self.min}, {self.max}]")
        return self


class Fig1Request(BaseModel):
    r: GridAxis = GridAxis(min=0.0, max=10.0, points=500)

    @model_validator(mode="after")
    def _nonnegative(self):
        if self.r.min < 0:
            raise ValueError("sigma/delta grid must start at >= 0")
        return self


class Fig1Response(BaseModel):
    sigma_over_delta: list[float]
    f1: list[float]
    f2: list[float]


class Fig2aRequest(BaseModel):
    alpha: GridAxis = GridAxis(min=0.25, max=20.0, points=80)
    sigma: GridAxis = GridAxis(min=0.0, max=10.0, points=80)
    threads: int | None = Field(default=None, ge=1)

    @model_validator(mode="after")
    def _domains(self):
        if self.alpha.min <= 0:
            raise ValueError("alpha grid must be strictly positive")
        if self.sigma.min < 0:
            raise ValueError("sigma/delta grid must start at >= 0")
        return self


class Fig2aResponse(BaseModel):
    alpha: list[float]
    sigma_over_delta: list[float]
    # s[i][j] = S(alpha[i], sigma_over_delta[j])
    s: list[list[float]]


class Fig2bRequest(BaseModel):
    g2: GridAxis = GridAxis(min=0.0, max=4.0, points=80)
    sigma: GridAxis = GridAxis(min=0.0, max=3.0, points=80)
    threads: int | None = Field(default=None, ge=1)

    @model_validator(mode="after")
    def _domains(self):
        if self.g2.min < 0:
            raise ValueError("(g/g0)^2 grid must start at >= 0")
        if self.sigma.min < 0:
            raise ValueError("sigma/delta grid must start at >= 0")
        return self


class Fig2bResponse(BaseModel):
    g_over_g0_sq: list[float]
    sigma_over_delta: list[float]
    # kt_c[i][j] = critical kT/delta at (g2[i], sigma[j]); null = normal at all T
    kt_c_over_delta: list[list[float | None]]


class BoundaryRequest(BaseModel):
    sigma: GridAxis = GridAxis(min=0.0, max=3.0, points=200)
    kt_over_delta: float = Field(default=0.0, ge=0.0)

    @model_validator(mode="after")
    def _domains(self):
        if self.sigma.min < 0:
            raise ValueError("sigma/delta grid must start at >= 0")
        return self


class BoundaryResponse(BaseModel):
    sigma_over_delta: list[float]
    # Critical (g/g0)^2 above which the system is superradiant at this kT.
    g2_crit: list[float]


class CriticalCouplingRequest(BaseModel):
    ensemble: EnsembleModel
    kt: float = Field(default=0.0, ge=0.0)


class CriticalCouplingResponse(BaseModel):
    scale: float
    lhs: float


class OracleRequest(BaseModel):
    ensemble: EnsembleModel
    fock_cutoff: int = Field(default=40, ge=1)
    k: int = Field(default=4, ge=2)
    ansatz: bool = True
    sz_field: float = 0.0
    check_convergence: bool = True


class AnsatzReport(BaseModel):
    branch: str
    energy: float
    overlap_ground: float


class OracleResponse(BaseModel):
    dim: int
    energies: list[float]
    gap: float
    x_mean: float
    x_sq_mean: float
    parity: float
    converged: bool
    mean_field_x0: float
    ansatz: list[AnsatzReport] | None = None


class HealthResponse(BaseModel):
    status: str
    version: str
