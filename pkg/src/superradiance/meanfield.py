"""Classical (mean-field) equilibrium state of the qubit-cavity system.

Minimizing the classical energy over every spin direction at fixed cavity
displacement x (and p = 0) leaves a scalar effective potential

    F(x) = omega x^2 - sum_i kT ln(2 cosh(Omega_i(x) / (2 kT))),
    Omega_i(x) = sqrt(delta_i^2 + (epsilon_i + 4 g_i x)^2),

with the zero-temperature limit F0(x) = omega x^2 - (1/2) sum_i Omega_i(x).
Its stationary points are exactly the self-consistency condition

    x = sum_i (g_i/omega) * u_i / sqrt(1 + u_i^2) * tanh(Omega_i / (2 kT)),
    u_i = (epsilon_i + 4 g_i x) / delta_i,

via the identity dF/dx = 2 omega * residual(x).  The right-hand side is
bounded by sum_i g_i / omega, so every fixed point lies inside that bracket.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidParameterError, NumericalFailureError
from .model import Ensemble, ThermalSpec, ZERO_TEMPERATURE

__all__ = [
    "ClassicalState",
    "StationaryPoint",
    "SelfConsistentSolution",
    "dressed_energies",
    "effective_potential",
    "residual",
    "curvature",
    "classical_state",
    "solve",
    "balance_bias",
    "balance_residual",
    "qubit_expectations",
]

INITIAL_GRID = 4096
MAX_GRID = 1 << 20
BISECT_TOL = 1e-12          # of the bracket half-width B
MARGINAL_CURVATURE = 1e-12  # |F''| below this is labeled "marginal"
BRACKET_PADDING = 1.05


@dataclass(frozen=True)
class ClassicalState:
    """Mean-field state at displacement ``x``: spin angles, dressed energies
    and the effective-potential value.  ``p`` is always 0 in equilibrium.
    """

    x: float
    p: float
    thetas: np.ndarray
    theta_primes: np.ndarray
    omegas: np.ndarray
    energy: float


@dataclass(frozen=True)
class StationaryPoint:
    x: float
    energy: float
    stability: str  # "minimum" | "maximum" | "marginal"


@dataclass(frozen=True)
class SelfConsistentSolution:
    """All stationary points of F, the global minimum, and the positive
    superradiant displacement ``x0`` (0 when none exists)."""

    stationary_points: tuple[StationaryPoint, ...]
    ground: ClassicalState
    x0: float


def dressed_energies(e: Ensemble, x: float) -> np.ndarray:
    """Per-qubit dressed splittings Omega_i(x) = sqrt(delta_i^2 + (epsilon_i + 4 g_i x)^2)."""
    s = e.epsilons + 4.0 * e.gs * x
    return np.hypot(e.deltas, s)


def effective_potential(e: Ensemble, t: ThermalSpec, x: float) -> float:
    """Effective (free-)energy potential F(x); the T -> 0 limit is taken
    analytically at kT = 0, so no large-argument overflow occurs."""
    omegas = dressed_energies(e, x)
    cavity = e.omega * x * x
    if t.is_ground_state:
        return cavity - 0.5 * float(np.sum(omegas))
    # kT ln(2 cosh(y)) = kT (y + log1p(e^{-2y})) for y = Omega/(2 kT) > 0
    y = omegas / (2.0 * t.kT)
    return cavity - float(np.sum(0.5 * omegas + t.kT * np.log1p(np.exp(-2.0 * y))))


def residual(e: Ensemble, t: ThermalSpec, x: float) -> float:
    """x minus the self-consistent right-hand side; zero at stationary points."""
    return float(_residual_grid(e, t, np.array([x]))[0])


def _residual_grid(e: Ensemble, t: ThermalSpec, xs: np.ndarray) -> np.ndarray:
    xs = np.asarray(xs, dtype=float)
    out = np.empty_like(xs)
    # Chunk so the (N, n_x) temporaries stay modest for large ensembles.
    chunk = max(1, (1 << 22) // max(e.n, 1))
    gs = e.gs[:, None]
    eps = e.epsilons[:, None]
    deltas = e.deltas[:, None]
    for start in range(0, xs.size, chunk):
        xv = xs[start:start + chunk][None, :]
        s = eps + 4.0 * gs * xv
        omegas = np.hypot(deltas, s)
        terms = (gs / e.omega) * (s / omegas)
        if not t.is_ground_state:
            terms = terms * np.tanh(omegas / (2.0 * t.kT))
        out[start:start + chunk] = xs[start:start + chunk] - np.sum(terms, axis=0)
    return out


def curvature(e: Ensemble, t: ThermalSpec, x: float) -> float:
    """Second derivative F''(x), from the closed-form per-qubit terms."""
    s = e.epsilons + 4.0 * e.gs * x
    omegas = np.hypot(e.deltas, s)
    if t.is_ground_state:
        per_qubit = e.deltas**2 / omegas**3
    else:
        y = omegas / (2.0 * t.kT)
        sech2 = _sech_sq(y)
        per_qubit = (e.deltas**2 / omegas**3) * np.tanh(y) \
            + (s**2 / omegas**2) * sech2 / (2.0 * t.kT)
    return 2.0 * e.omega - 8.0 * float(np.sum(e.gs**2 * per_qubit))


def _sech_sq(y):
    # sech^2(y) = (2 e^{-y} / (1 + e^{-2y}))^2, overflow-free for y >= 0
    ey = np.exp(-y)
    return (2.0 * ey / (1.0 + ey * ey)) ** 2


def classical_state(e: Ensemble, t: ThermalSpec, x: float) -> ClassicalState:
    """Mean-field state at a given displacement (p = 0, angles from x)."""
    x = float(x)
    s = e.epsilons + 4.0 * e.gs * x
    thetas = np.arctan2(s, e.deltas)
    return ClassicalState(
        x=x,
        p=0.0,
        thetas=thetas,
        theta_primes=0.5 * math.pi - np.abs(thetas),
        omegas=np.hypot(e.deltas, s),
        energy=effective_potential(e, t, x),
    )


def qubit_expectations(e: Ensemble, state: ClassicalState, t: ThermalSpec) -> np.ndarray:
    """Per-qubit (<sigma_x>, <sigma_z>) as an (N, 2) array.

    <sigma_x^i> = cos(theta_i) tanh(Omega_i / 2kT) and
    <sigma_z^i> = -sin(theta_i) tanh(Omega_i / 2kT); the thermal factor is 1
    at kT = 0.
    """
    pol = t.polarization(state.omegas)
    return np.column_stack((np.cos(state.thetas) * pol, -np.sin(state.thetas) * pol))


def _refine_root(e, t, lo, hi, r_lo, tol):
    # Plain bisection: the sign change is guaranteed by the caller.
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        r_mid = residual(e, t, mid)
        if r_mid == 0.0:
            return mid
        if (r_mid < 0) == (r_lo < 0):
            lo, r_lo = mid, r_mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _scan_roots(e, t, bracket, m):
    xs = np.linspace(-bracket, bracket, m + 1)
    r = _residual_grid(e, t, xs)
    tol = BISECT_TOL * bracket
    roots = []
    for i in range(m):
        if r[i] == 0.0:
            roots.append(float(xs[i]))
        elif (r[i] < 0) != (r[i + 1] < 0) and r[i + 1] != 0.0:
            roots.append(_refine_root(e, t, float(xs[i]), float(xs[i + 1]), float(r[i]), tol))
    if r[m] == 0.0:
        roots.append(float(xs[m]))
    return roots, 2.0 * bracket / m


def solve(e: Ensemble, t: ThermalSpec | None = None) -> SelfConsistentSolution:
    """Find every stationary point of F on the fixed-point bracket and pick
    the global minimum.

    Scans a uniform grid for sign changes of the residual, refines each by
    bisection to ``1e-12 * B`` and classifies stability from F''.  The grid
    is doubled (up to 2^20 points) whenever two detected roots fall within
    four cells of each other or no minimum has been resolved yet, which
    covers the nearly-degenerate root triple just above the transition.
    For degenerate ground states (+x0 / -x0) the non-negative representative
    is reported as ``ground``.
    """
    if t is None:
        t = ZERO_TEMPERATURE
    g_total = float(np.sum(e.gs))
    if g_total == 0.0:
        # Decoupled cavity: F = omega x^2 + const, single minimum at 0.
        ground = classical_state(e, t, 0.0)
        point = StationaryPoint(0.0, ground.energy, "minimum")
        return SelfConsistentSolution((point,), ground, 0.0)

    bracket = BRACKET_PADDING * g_total / e.omega
    m = INITIAL_GRID
    while True:
        roots, cell = _scan_roots(e, t, bracket, m)
        if not roots:
            if m < MAX_GRID:
                m *= 2
                continue
            raise NumericalFailureError("no stationary point found on the fixed-point bracket")
        stabilities = [_classify_curvature(curvature(e, t, x)) for x in roots]
        too_close = any(b - a < 4.0 * cell for a, b in zip(roots, roots[1:]))
        if (too_close or "minimum" not in stabilities) and m < MAX_GRID:
            m *= 2
            continue
        break

    points = tuple(
        StationaryPoint(x, effective_potential(e, t, x), stab)
        for x, stab in zip(roots, stabilities)
    )
    ground_point = _select_ground(points)
    ground = classical_state(e, t, ground_point.x)
    x_tol = 4.0 * BISECT_TOL * bracket
    positive_minima = [p.x for p in points if p.stability == "minimum" and p.x > x_tol]
    x0 = max(positive_minima) if positive_minima else 0.0
    return SelfConsistentSolution(points, ground, x0)


def _classify_curvature(f2):
    if abs(f2) <= MARGINAL_CURVATURE:
        return "marginal"
    return "minimum" if f2 > 0 else "maximum"


def _select_ground(points):
    e_min = min(p.energy for p in points)
    tie = 1e-12 * max(1.0, abs(e_min))
    candidates = [p for p in points if p.energy <= e_min + tie]
    return max(candidates, key=lambda p: p.x)


def balance_residual(e: Ensemble, t: ThermalSpec | None = None, shift: float = 0.0) -> float:
    """Mean-field force on the cavity at x = 0 after shifting all biases:
    sum_i g_i u_i / sqrt(1 + u_i^2) * tanh(Omega_i / 2kT), u_i = (epsilon_i + shift)/delta_i."""
    if t is None:
        t = ZERO_TEMPERATURE
    s = e.epsilons + shift
    omegas = np.hypot(e.deltas, s)
    return float(np.sum(e.gs * (s / omegas) * t.polarization(omegas)))


def balance_bias(e: Ensemble, t: ThermalSpec | None = None) -> tuple[float, Ensemble]:
    """Find the global bias shift that makes x = 0 a stationary point.

    Solves sum_i g_i (epsilon_i + d) / sqrt(delta_i^2 + (epsilon_i + d)^2) = 0
    (with the thermal polarization factor when ``t`` has kT > 0) by bisection
    on the strictly increasing shift function; the residual at the solution
    is below 1e-12 * sum_i g_i.  Returns (shift, shifted ensemble).
    """
    if t is None:
        t = ZERO_TEMPERATURE
    coupled = e.gs > 0
    if not np.any(coupled):
        raise InvalidParameterError("balance_bias needs at least one qubit with g > 0")
    g_total = float(np.sum(e.gs))
    eps_coupled = e.epsilons[coupled]
    # All coupled terms are strictly negative below -max(eps) and strictly
    # positive above -min(eps); pad to make the bracket signs strict.
    pad = float(np.max(e.deltas)) + 1e-3 * (float(np.ptp(eps_coupled)) + 1.0)
    lo = -float(np.max(eps_coupled)) - pad
    hi = -float(np.min(eps_coupled)) + pad
    f_lo = balance_residual(e, t, lo)
    if f_lo == 0.0:
        shift = lo
    else:
        shift = _bisect_to_machine(lambda d: balance_residual(e, t, d), lo, hi, f_lo)
    achieved = balance_residual(e, t, shift)
    if abs(achieved) > 1e-12 * g_total:
        raise NumericalFailureError(
            f"bias balancing stalled at |residual| = {abs(achieved):.3e} > 1e-12 * sum(g)")
    return shift, e.with_bias_shift(shift)


def _bisect_to_machine(fn, lo, hi, f_lo):
    while True:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            return mid
        f_mid = fn(mid)
        if f_mid == 0.0:
            return mid
        if (f_mid < 0) == (f_lo < 0):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
