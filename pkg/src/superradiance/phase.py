"""Closed-form criticality conditions, phase classification and the
critical-temperature surface.

For a bias-balanced ensemble, x = 0 stops being the stable solution exactly
when the slope of the self-consistent right-hand side at the origin exceeds
one.  At zero temperature the criterion reads

    sum_i (4 g_i^2 / (omega delta_i)) * [1 + (epsilon_i/delta_i)^2]^(-3/2) > 1,

and at temperature kT each term acquires the thermal factor implemented in
:func:`per_qubit_thermal_factor`.  Both sums equal 1 - F''(0)/(2 omega), so
the classification provably agrees with the fixed-point structure found by
:mod:`superradiance.meanfield`.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from . import meanfield
from .errors import InvalidParameterError, NumericalFailureError
from .model import Ensemble, ThermalSpec, ZERO_TEMPERATURE
from .specialfn import (
    ADAPTIVE_RTOL,
    DEFAULT_ORDER,
    MAX_ADAPTIVE_ORDER,
    SQRT_PI,
    QuadratureRule,
    _weighted_gk,
    f2,
)

__all__ = [
    "PhasePoint",
    "CriticalitySummary",
    "dimensionless_coupling",
    "criticality_lhs_T0",
    "criticality_lhs_finiteT",
    "per_qubit_thermal_factor",
    "suppression_factor",
    "fig2a_grid",
    "critical_temperature",
    "critical_temperature_curve",
    "critical_coupling_scale",
    "classify",
    "criticality_summary",
]

CRITICAL_BAND = 1e-9       # |LHS - 1| below this is labeled "critical"
IMBALANCE_WARN = 1e-9      # of sum(g); warn when evaluating criticality off-balance
ALPHA_MAX = 60.0           # tanh/sech^2 saturate to double precision well before
TC_SCAN_POINTS = 512
TC_BISECT_ITERS = 80


@dataclass(frozen=True)
class PhasePoint:
    """A classified point of the phase diagram.

    ``lam`` is the dimensionless coupling sum_i 4 g_i^2/(omega delta_i)
    (equal to 4 g^2 N/(omega delta) for uniform ensembles),
    ``g_over_g0_sq`` the coupling in units of g0 = sqrt(omega*mean(delta)/(4N)).
    """

    lam: float
    g_over_g0_sq: float
    sigma_over_delta: float
    kt_over_delta: float
    classification: str  # "normal" | "superradiant" | "critical"
    order_parameter: float
    bias_shift: float = 0.0


@dataclass(frozen=True)
class CriticalitySummary:
    lhs_T0: float
    lhs_finiteT: float
    is_superradiant: bool


def dimensionless_coupling(e: Ensemble) -> float:
    """sum_i 4 g_i^2 / (omega delta_i), the bare (epsilon-free) coupling sum."""
    return float(np.sum(4.0 * e.gs**2 / (e.omega * e.deltas)))


def _warn_if_unbalanced(e: Ensemble, t: ThermalSpec) -> None:
    g_total = float(np.sum(e.gs))
    if g_total == 0.0:
        return
    imbalance = abs(meanfield.balance_residual(e, t))
    if imbalance > IMBALANCE_WARN * g_total:
        warnings.warn(
            f"ensemble is not bias-balanced (|residual at x=0| = {imbalance:.3e}); "
            "the criticality sum assumes x = 0 is stationary",
            stacklevel=3,
        )


def criticality_lhs_T0(e: Ensemble) -> float:
    """Zero-temperature criticality sum; > 1 means superradiant.

    The caller is responsible for bias balance; a warning is emitted when
    the x = 0 force residual is significant.
    """
    _warn_if_unbalanced(e, ZERO_TEMPERATURE)
    ratio_sq = (e.epsilons / e.deltas) ** 2
    return float(np.sum(4.0 * e.gs**2 / (e.omega * e.deltas) * (1.0 + ratio_sq) ** -1.5))


def criticality_lhs_finiteT(e: Ensemble, t: ThermalSpec) -> float:
    """Finite-temperature criticality sum (reduces to the T0 sum as kT -> 0).

    Each qubit contributes
    (4 g^2/(omega delta)) [1+r^2]^{-3/2} tanh(Omega0/2kT)
    + (2 g^2/(omega kT)) r^2/(1+r^2) sech^2(Omega0/2kT)
    with r = epsilon/delta and Omega0 = sqrt(delta^2 + epsilon^2).
    """
    if t.is_ground_state:
        return criticality_lhs_T0(e)
    _warn_if_unbalanced(e, t)
    r_sq = (e.epsilons / e.deltas) ** 2
    omega0 = np.hypot(e.deltas, e.epsilons)
    y = omega0 / (2.0 * t.kT)
    sech2 = meanfield._sech_sq(y)
    terms = 4.0 * e.gs**2 / (e.omega * e.deltas) * (1.0 + r_sq) ** -1.5 * np.tanh(y) \
        + 2.0 * e.gs**2 / (e.omega * t.kT) * r_sq / (1.0 + r_sq) * sech2
    return float(np.sum(terms))


def per_qubit_thermal_factor(alpha, eps_over_delta):
    """Bracketed per-qubit term of the finite-temperature criterion.

    [1+r^2]^{-3/2} tanh(a sqrt(1+r^2)) + a r^2/(1+r^2) sech^2(a sqrt(1+r^2))
    with a = delta/(2 kT) and r = epsilon/delta.  Broadcasts over numpy
    inputs; lies in [0, 1], vanishing as a -> 0 and approaching
    (1+r^2)^{-3/2} as a -> inf.
    """
    alpha = np.asarray(alpha, dtype=float)
    if np.any(alpha <= 0):
        raise InvalidParameterError("alpha = delta/(2 kT) must be > 0")
    r_sq = np.asarray(eps_over_delta, dtype=float) ** 2
    root = np.sqrt(1.0 + r_sq)
    y = alpha * root
    out = (1.0 + r_sq) ** -1.5 * np.tanh(y) \
        + alpha * r_sq / (1.0 + r_sq) * meanfield._sech_sq(y)
    if out.ndim == 0:
        return float(out)
    return out


def _suppression_batch(alphas: np.ndarray, sigma_over_delta: float,
                       rule: QuadratureRule | None) -> np.ndarray:
    """Gaussian average of the thermal factor for a batch of alpha values."""
    alphas = np.atleast_1d(np.asarray(alphas, dtype=float))
    r = float(sigma_over_delta)
    if r < 0:
        raise InvalidParameterError(f"sigma_over_delta must be >= 0, got {r}")
    if r == 0.0:
        return np.tanh(alphas)

    def apply(rl: QuadratureRule) -> np.ndarray:
        nodes = math.sqrt(2.0) * r * rl.nodes
        vals = per_qubit_thermal_factor(alphas[:, None], nodes[None, :])
        return vals @ rl.weights / SQRT_PI

    if rule is not None:
        return apply(rule)

    prev = apply(QuadratureRule.gauss_hermite(DEFAULT_ORDER))
    order = 2 * DEFAULT_ORDER
    while order <= MAX_ADAPTIVE_ORDER:
        cur = apply(QuadratureRule.gauss_hermite(order))
        if np.all(np.abs(cur - prev) <= np.maximum(ADAPTIVE_RTOL * np.abs(cur), 1e-14)):
            return cur
        prev = cur
        order *= 2
    # Large sigma/delta: the integrand is too narrow for the Hermite ladder;
    # integrate each alpha adaptively instead.
    return np.array([
        _weighted_gk(lambda x, a=a: per_qubit_thermal_factor(a, x), r, 0.0)
        for a in alphas
    ])


def suppression_factor(alpha: float, sigma_over_delta: float,
                       rule: QuadratureRule | None = None) -> float:
    """S(alpha, sigma/delta): the per-qubit thermal factor averaged over a
    centered Gaussian bias distribution.  Lies in [0, 1]; equals tanh(alpha)
    at sigma = 0 and approaches f2(sigma/delta) as alpha -> inf."""
    return float(_suppression_batch(np.array([float(alpha)]), sigma_over_delta, rule)[0])


def fig2a_grid(alphas, sigmas_over_delta, rule: QuadratureRule | None = None,
               threads: int | None = None) -> np.ndarray:
    """S(alpha, sigma/delta) on the outer product of the two grids.

    Returns shape (len(alphas), len(sigmas_over_delta)); column order is
    fixed by the input grids regardless of execution schedule.
    """
    alphas = np.asarray(alphas, dtype=float)
    sigmas = np.asarray(sigmas_over_delta, dtype=float)
    columns = _map_columns(
        lambda r: _suppression_batch(alphas, r, rule), sigmas, threads)
    return np.column_stack(columns) if columns else np.empty((alphas.size, 0))


def _map_columns(fn, values, threads):
    values = list(values)
    if threads is not None and threads > 1 and len(values) > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(fn, values))
    return [fn(v) for v in values]


def critical_temperature(g_over_g0_sq: float, sigma_over_delta: float,
                         rule: QuadratureRule | None = None) -> float | None:
    """Critical temperature kT_c / delta, or None when the system stays
    normal at every temperature (g_over_g0_sq * f2(sigma/delta) < 1).

    Solves g_over_g0_sq * S(alpha_c, sigma/delta) = 1 for the smallest
    alpha_c (the highest-temperature crossing) by an upward scan plus
    bisection; kT_c/delta = 1/(2 alpha_c).  Exactly on the zero-temperature
    boundary the result is 0.0.
    """
    return critical_temperature_curve([g_over_g0_sq], sigma_over_delta, rule)[0]


def critical_temperature_curve(g2_values, sigma_over_delta: float,
                               rule: QuadratureRule | None = None) -> list[float | None]:
    """Vectorized :func:`critical_temperature` for one sigma/delta column.

    The alpha scan is shared by the whole column, which makes dense
    phase-diagram grids cheap.
    """
    g2 = np.asarray(list(g2_values), dtype=float)
    if np.any(g2 < 0):
        raise InvalidParameterError("g_over_g0_sq must be >= 0")
    r = float(sigma_over_delta)
    s_inf = f2(r)
    out: list[float | None] = [None] * g2.size

    for i in np.flatnonzero(g2 * s_inf == 1.0):
        out[i] = 0.0
    solvable = np.flatnonzero(g2 * s_inf > 1.0)
    if solvable.size == 0:
        return out

    # S(alpha) <= alpha, so alpha_lo below 1/max(g2) guarantees a sign change.
    alpha_lo = min(1e-4, 0.5 / float(np.max(g2[solvable])))
    grid = np.geomspace(alpha_lo, ALPHA_MAX, TC_SCAN_POINTS)
    s_grid = _suppression_batch(grid, r, rule)

    active, lo, hi = [], [], []
    for i in solvable:
        crossing = np.flatnonzero(g2[i] * s_grid >= 1.0)
        if crossing.size == 0:
            # S has saturated to f2 within double precision without reaching
            # the threshold: T_c is indistinguishable from the boundary.
            out[i] = 0.0
            continue
        k = int(crossing[0])
        if k == 0:
            raise NumericalFailureError("critical-temperature scan started above the root")
        active.append(i)
        lo.append(grid[k - 1])
        hi.append(grid[k])
    if active:
        a_lo = np.array(lo)
        a_hi = np.array(hi)
        target = 1.0 / g2[active]
        for _ in range(TC_BISECT_ITERS):
            mid = 0.5 * (a_lo + a_hi)
            above = _suppression_batch(mid, r, rule) >= target
            a_hi = np.where(above, mid, a_hi)
            a_lo = np.where(above, a_lo, mid)
        alpha_c = 0.5 * (a_lo + a_hi)
        for j, i in enumerate(active):
            out[i] = float(1.0 / (2.0 * alpha_c[j]))
    return out


def critical_coupling_scale(e: Ensemble, t: ThermalSpec | None = None) -> float:
    """Global multiplier s* on every g_i that puts the ensemble exactly on
    the transition: the criticality sum scales as s^2, so s* = LHS^{-1/2}."""
    if t is None:
        t = ZERO_TEMPERATURE
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        lhs = criticality_lhs_finiteT(e, t) if not t.is_ground_state else criticality_lhs_T0(e)
    if lhs <= 0.0:
        raise InvalidParameterError("criticality sum is zero; no coupling rescale reaches the transition")
    return 1.0 / math.sqrt(lhs)


def criticality_summary(e: Ensemble, t: ThermalSpec | None = None) -> CriticalitySummary:
    """Both criticality sums plus the superradiance verdict at temperature ``t``."""
    if t is None:
        t = ZERO_TEMPERATURE
    lhs_T0 = criticality_lhs_T0(e)
    lhs_finiteT = criticality_lhs_finiteT(e, t)
    applicable = lhs_T0 if t.is_ground_state else lhs_finiteT
    return CriticalitySummary(lhs_T0=lhs_T0, lhs_finiteT=lhs_finiteT,
                              is_superradiant=bool(applicable > 1.0))


def classify(e: Ensemble, t: ThermalSpec | None = None, auto_balance: bool = True) -> PhasePoint:
    """Classify an ensemble as normal / superradiant / critical.

    Unless already balanced, the ensemble is bias-balanced first (the shift
    is recorded on the returned point).  The classification comes from the
    criticality sum against 1 with a 1e-9 tolerance band; the order
    parameter x0 comes from the mean-field solver, and the two views are
    cross-checked against each other.
    """
    if t is None:
        t = ZERO_TEMPERATURE
    g_total = float(np.sum(e.gs))
    shift = 0.0
    balanced = e
    if auto_balance and g_total > 0.0:
        if abs(meanfield.balance_residual(e, t)) > 1e-12 * g_total:
            shift, balanced = meanfield.balance_bias(e, t)

    lhs = criticality_lhs_finiteT(balanced, t) if not t.is_ground_state \
        else criticality_lhs_T0(balanced)
    if abs(lhs - 1.0) <= CRITICAL_BAND:
        classification = "critical"
    elif lhs > 1.0:
        classification = "superradiant"
    else:
        classification = "normal"

    solution = meanfield.solve(balanced, t)
    x0 = solution.x0
    if classification == "superradiant" and not x0 > 0.0:
        raise NumericalFailureError(
            f"criticality sum {lhs} > 1 but the solver found no symmetry-broken minimum")
    if classification == "normal" and x0 > 0.0:
        # Strongly bimodal bias distributions can open a bistable window where
        # a symmetry-broken global minimum coexists with a stable origin
        # (first-order structure); the local criterion cannot label that case.
        raise NumericalFailureError(
            f"criticality sum {lhs} < 1 but the solver found a symmetry-broken "
            f"minimum at x0 = {x0} (bistable first-order structure)")

    mean_delta = float(np.mean(balanced.deltas))
    mean_g = float(np.mean(balanced.gs))
    lam = dimensionless_coupling(balanced)
    if _is_uniform_symmetric(balanced):
        g_over_g0_sq = lam  # identical quantity in the uniform epsilon = 0 case
    else:
        g_over_g0_sq = 4.0 * balanced.n * mean_g**2 / (balanced.omega * mean_delta)
    return PhasePoint(
        lam=lam,
        g_over_g0_sq=g_over_g0_sq,
        sigma_over_delta=float(np.std(balanced.epsilons)) / mean_delta,
        kt_over_delta=t.kT / mean_delta,
        classification=classification,
        order_parameter=x0,
        bias_shift=shift,
    )


def _is_uniform_symmetric(e: Ensemble) -> bool:
    return (np.all(e.gs == e.gs[0]) and np.all(e.deltas == e.deltas[0])
            and np.all(e.epsilons == 0.0))
