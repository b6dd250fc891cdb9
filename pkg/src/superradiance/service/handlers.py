"""Request handlers: pure functions from request models to response models.

The FastAPI routes delegate here, and the CLI calls the same functions
directly when no remote server is configured, so both front ends share one
code path.
"""
from __future__ import annotations

import numpy as np

from .. import meanfield, oracle, phase
from ..model import DisorderSpec, ThermalSpec, sample_ensemble
from ..specialfn import f1, f2
from . import schemas

ANGLE_REPORT_LIMIT = 1000


def health() -> schemas.HealthResponse:
    from .. import __version__

    return schemas.HealthResponse(status="ok", version=__version__)


def solve(req: schemas.SolveRequest) -> schemas.SolveResponse:
    e = req.ensemble.to_ensemble()
    t = ThermalSpec(req.kt)
    sol = meanfield.solve(e, t)
    ground = sol.ground
    include_angles = req.include_angles
    if include_angles is None:
        include_angles = e.n <= ANGLE_REPORT_LIMIT
    return schemas.SolveResponse(
        n=e.n,
        kt=t.kT,
        x=ground.x,
        p=ground.p,
        energy=ground.energy,
        x0=sol.x0,
        stationary_points=[
            schemas.StationaryPointModel(x=p.x, energy=p.energy, stability=p.stability)
            for p in sol.stationary_points
        ],
        thetas=list(ground.thetas) if include_angles else None,
        theta_primes=list(ground.theta_primes) if include_angles else None,
        omegas=list(ground.omegas) if include_angles else None,
    )


def balance(req: schemas.BalanceRequest) -> schemas.BalanceResponse:
    e = req.ensemble.to_ensemble()
    t = ThermalSpec(req.kt)
    shift, balanced = meanfield.balance_bias(e, t)
    return schemas.BalanceResponse(
        delta_shift=shift,
        residual_at_zero=meanfield.balance_residual(balanced, t),
        ensemble=schemas.EnsembleModel.from_ensemble(balanced),
    )


def classify(req: schemas.ClassifyRequest) -> schemas.ClassifyResponse:
    e = req.ensemble.to_ensemble()
    t = ThermalSpec(req.kt)
    point = phase.classify(e, t, auto_balance=req.auto_balance)
    balanced = e.with_bias_shift(point.bias_shift) if point.bias_shift else e
    summary = phase.criticality_summary(balanced, t)
    return schemas.ClassifyResponse(
        lam=point.lam,
        g_over_g0_sq=point.g_over_g0_sq,
        sigma_over_delta=point.sigma_over_delta,
        kt_over_delta=point.kt_over_delta,
        classification=point.classification,
        order_parameter=point.order_parameter,
        bias_shift=point.bias_shift,
        lhs_t0=summary.lhs_T0,
        lhs_finite_t=summary.lhs_finiteT,
    )


def sample(req: schemas.SampleRequest) -> schemas.EnsembleModel:
    spec = DisorderSpec(
        mean_delta=req.mean_delta,
        mean_epsilon=req.mean_epsilon,
        mean_g=req.mean_g,
        sigma_delta=req.sigma_delta,
        sigma_epsilon=req.sigma_epsilon,
        sigma_g=req.sigma_g,
        seed=req.seed,
    )
    return schemas.EnsembleModel.from_ensemble(sample_ensemble(spec, req.n, req.omega))


def _axis(axis: schemas.GridAxis) -> np.ndarray:
    return np.linspace(axis.min, axis.max, axis.points)


def fig1(req: schemas.Fig1Request) -> schemas.Fig1Response:
    rs = _axis(req.r)
    return schemas.Fig1Response(
        sigma_over_delta=list(rs),
        f1=[f1(r) for r in rs],
        f2=[f2(r) for r in rs],
    )


def fig2a(req: schemas.Fig2aRequest) -> schemas.Fig2aResponse:
    alphas = _axis(req.alpha)
    sigmas = _axis(req.sigma)
    grid = phase.fig2a_grid(alphas, sigmas, threads=req.threads)
    return schemas.Fig2aResponse(
        alpha=list(alphas),
        sigma_over_delta=list(sigmas),
        s=[list(row) for row in grid],
    )


def fig2b(req: schemas.Fig2bRequest) -> schemas.Fig2bResponse:
    g2 = _axis(req.g2)
    sigmas = _axis(req.sigma)
    columns = phase._map_columns(
        lambda r: phase.critical_temperature_curve(g2, r), sigmas, req.threads)
    # columns[j][i] -> rows indexed by g2
    kt_c = [[columns[j][i] for j in range(len(sigmas))] for i in range(len(g2))]
    return schemas.Fig2bResponse(
        g_over_g0_sq=list(g2),
        sigma_over_delta=list(sigmas),
        kt_c_over_delta=kt_c,
    )


def boundary(req: schemas.BoundaryRequest) -> schemas.BoundaryResponse:
    sigmas = _axis(req.sigma)
    if req.kt_over_delta == 0.0:
        crit = [1.0 / f2(r) for r in sigmas]
    else:
        alpha = 1.0 / (2.0 * req.kt_over_delta)
        crit = [1.0 / phase.suppression_factor(alpha, r) for r in sigmas]
    return schemas.BoundaryResponse(sigma_over_delta=list(sigmas), g2_crit=crit)


def critical_coupling(req: schemas.CriticalCouplingRequest) -> schemas.CriticalCouplingResponse:
    e = req.ensemble.to_ensemble()
    t = ThermalSpec(req.kt)
    scale = phase.critical_coupling_scale(e, t)
    summary = phase.criticality_summary(e, t)
    lhs = summary.lhs_T0 if t.is_ground_state else summary.lhs_finiteT
    return schemas.CriticalCouplingResponse(scale=scale, lhs=lhs)


def oracle_report(req: schemas.OracleRequest) -> schemas.OracleResponse:
    e = req.ensemble.to_ensemble()
    spec = oracle.HamiltonianSpec(e, req.fock_cutoff)
    result = oracle.lowest_eigenpairs(
        spec, k=req.k, sz_field=req.sz_field, check_convergence=req.check_convergence)
    solution = meanfield.solve(e)
    reports = None
    if req.ansatz:
        H = oracle.build_hamiltonian(spec, req.sz_field)
        reports = []
        for branch in oracle.BRANCHES:
            if branch == "antisymmetric" and solution.x0 == 0.0:
                continue  # null combination in the normal phase
            state = oracle.build_ansatz(spec, branch, solution)
            reports.append(schemas.AnsatzReport(
                branch=branch,
                energy=float(state.vector @ H @ state.vector),
                overlap_ground=oracle.ansatz_overlap(state, result.vectors[:, 0]),
            ))
    return schemas.OracleResponse(
        dim=spec.dim,
        energies=list(result.energies),
        gap=result.gap,
        x_mean=result.x_mean,
        x_sq_mean=result.x_sq_mean,
        parity=result.parity,
        converged=result.converged,
        mean_field_x0=solution.x0,
        ansatz=reports,
    )
