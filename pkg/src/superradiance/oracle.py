"""Exact diagonalization of the full qubit-cavity Hamiltonian at small N.

The Hamiltonian

    H = sum_i [-(delta_i/2) sigma_x^i + (epsilon_i/2) sigma_z^i]
        + omega (a^dag a + 1/2) + sum_i g_i sigma_z^i (a + a^dag)

is assembled as a dense real-symmetric matrix in the basis
|qubit z-config> (x) |Fock n>, n = 0..fock_cutoff, and solved with a dense
symmetric eigensolver.  This is the desk-scale ground truth for the
mean-field module, including the two-branch superposition structure of the
lowest states in the symmetry-broken regime.

Basis conventions: spin index s runs over 0..2^N-1 with qubit i stored in
bit N-1-i; bit value 0 is the sigma_z = +1 state |L> and bit value 1 the
sigma_z = -1 state |R>.  That assignment makes the left product branch
(the cos(theta'/2)|L> + sin(theta'/2)|R> one) the local ground state at
displacement -x0, which a sign self-test in the test suite pins against
the Hamiltonian.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh
from scipy.special import gammaln

from . import meanfield
from .errors import InvalidParameterError, ResourceLimitError, TruncationError
from .model import Ensemble, uniform_ensemble

__all__ = [
    "HamiltonianSpec",
    "EDResult",
    "AnsatzState",
    "build_hamiltonian",
    "parity_matrix",
    "lowest_eigenpairs",
    "build_ansatz",
    "ansatz_overlap",
    "gap_vs_n",
]

DIMENSION_LIMIT = 1 << 16
MAX_QUBITS = 8
DISPLACEMENT_NORM_LOSS = 1e-10
BRANCHES = ("left", "right", "symmetric", "antisymmetric")


@dataclass(frozen=True)
class HamiltonianSpec:
    """Ensemble plus oscillator truncation (levels 0..fock_cutoff)."""

    ensemble: Ensemble
    fock_cutoff: int

    def __post_init__(self):
        object.__setattr__(self, "fock_cutoff", int(self.fock_cutoff))
        if self.fock_cutoff < 1:
            raise InvalidParameterError(f"fock_cutoff must be >= 1, got {self.fock_cutoff}")
        if self.ensemble.n > MAX_QUBITS:
            raise ResourceLimitError(
                f"exact diagonalization supports N <= {MAX_QUBITS}, got {self.ensemble.n}")
        if self.dim > DIMENSION_LIMIT:
            raise ResourceLimitError(
                f"Hilbert space dimension {self.dim} exceeds the guard {DIMENSION_LIMIT}")

    @property
    def n_fock(self) -> int:
        return self.fock_cutoff + 1

    @property
    def dim(self) -> int:
        return (1 << self.ensemble.n) * (self.fock_cutoff + 1)


@dataclass(frozen=True)
class EDResult:
    """Lowest-k spectrum and ground-state observables.

    ``converged`` reports whether raising the cutoff by 10 levels moves E0
    and E1 by less than 1e-8 (relative to max(1, |E|)).
    """

    energies: np.ndarray
    gap: float
    x_mean: float
    x_sq_mean: float
    parity: float
    converged: bool
    vectors: np.ndarray  # columns are the k lowest eigenvectors


@dataclass(frozen=True)
class AnsatzState:
    """Variational product/superposition state in the truncated basis."""

    branch: str
    theta_primes: np.ndarray
    displacement: float
    vector: np.ndarray


def _spin_z_table(n: int) -> np.ndarray:
    """(2^n, n) table of sigma_z eigenvalues; qubit i lives in bit n-1-i."""
    s = np.arange(1 << n)
    bits = (s[:, None] >> np.arange(n - 1, -1, -1)[None, :]) & 1
    return 1.0 - 2.0 * bits


def build_hamiltonian(spec: HamiltonianSpec, sz_field: float = 0.0) -> np.ndarray:
    """Dense real-symmetric H; ``sz_field`` adds eta * sum_i sigma_z^i, the
    symmetry-breaking probe used to resolve the +-x0 branches."""
    e = spec.ensemble
    n = e.n
    nf = spec.n_fock
    dim = spec.dim
    z = _spin_z_table(n)
    nvec = np.arange(nf, dtype=float)

    H = np.zeros((dim, dim))
    idx = np.arange(dim)
    diag_spin = z @ (e.epsilons / 2.0 + sz_field)
    H[idx, idx] = np.repeat(diag_spin, nf) + np.tile(e.omega * (nvec + 0.5), 1 << n)

    # sigma_x^i couples s <-> s XOR bit(i) at fixed Fock level.
    s = np.arange(1 << n)
    for i in range(n):
        flipped = s ^ (1 << (n - 1 - i))
        rows = (flipped[:, None] * nf + np.arange(nf)[None, :]).ravel()
        cols = (s[:, None] * nf + np.arange(nf)[None, :]).ravel()
        H[rows, cols] += -e.deltas[i] / 2.0

    # (a + a^dag) is tridiagonal in n with coefficient sum_i g_i z_i(s).
    zg = z @ e.gs
    ladder = np.sqrt(nvec[1:])
    rows = (s[:, None] * nf + np.arange(1, nf)[None, :]).ravel()
    cols = (s[:, None] * nf + np.arange(nf - 1)[None, :]).ravel()
    vals = (zg[:, None] * ladder[None, :]).ravel()
    H[rows, cols] += vals
    H[cols, rows] += vals
    return H


def parity_matrix(spec: HamiltonianSpec) -> np.ndarray:
    """P = (prod_i sigma_x^i) exp(i pi a^dag a), real and symmetric; commutes
    with H when every epsilon_i = 0."""
    n = spec.ensemble.n
    nf = spec.n_fock
    dim = spec.dim
    P = np.zeros((dim, dim))
    s = np.arange(1 << n)
    flipped = (1 << n) - 1 - s  # prod sigma_x complements every bit
    signs = np.where(np.arange(nf) % 2 == 0, 1.0, -1.0)
    rows = (flipped[:, None] * nf + np.arange(nf)[None, :]).ravel()
    cols = (s[:, None] * nf + np.arange(nf)[None, :]).ravel()
    P[rows, cols] = np.tile(signs, 1 << n)
    return P


def _apply_x(psi_grid: np.ndarray) -> np.ndarray:
    """Apply x = (a + a^dag)/2 to psi reshaped as (2^n, n_fock)."""
    nf = psi_grid.shape[1]
    root = np.sqrt(np.arange(1, nf))
    out = np.zeros_like(psi_grid)
    out[:, :-1] += 0.5 * root[None, :] * psi_grid[:, 1:]
    out[:, 1:] += 0.5 * root[None, :] * psi_grid[:, :-1]
    return out


def _ground_observables(spec: HamiltonianSpec, psi0: np.ndarray):
    grid = psi0.reshape(1 << spec.ensemble.n, spec.n_fock)
    x_psi = _apply_x(grid)
    x_mean = float(np.sum(grid * x_psi))
    x_sq_mean = float(np.sum(x_psi * x_psi))
    signs = np.where(np.arange(spec.n_fock) % 2 == 0, 1.0, -1.0)
    parity = float(np.sum(grid[::-1, :] * grid * signs[None, :]))
    return x_mean, x_sq_mean, parity


def lowest_eigenpairs(spec: HamiltonianSpec, k: int = 4, sz_field: float = 0.0,
                      check_convergence: bool = True) -> EDResult:
    """Lowest-k eigenpairs plus ground-state moments and parity.

    Convergence is assessed by re-solving with the cutoff raised by 10; the
    flag is False (not an error) when the re-run moves E0 or E1, or when the
    enlarged problem would exceed the dimension guard.
    """
    k = int(k)
    if k < 2:
        raise InvalidParameterError(f"need k >= 2 eigenvalues, got {k}")
    if k > spec.dim:
        raise InvalidParameterError(f"k = {k} exceeds the Hilbert dimension {spec.dim}")
    H = build_hamiltonian(spec, sz_field)
    vals, vecs = eigh(H, subset_by_index=(0, k - 1))
    x_mean, x_sq_mean, parity = _ground_observables(spec, vecs[:, 0])

    converged = False
    if check_convergence:
        try:
            bigger = HamiltonianSpec(spec.ensemble, spec.fock_cutoff + 10)
        except ResourceLimitError:
            bigger = None
        if bigger is not None:
            ref = eigh(build_hamiltonian(bigger, sz_field),
                       subset_by_index=(0, 1), eigvals_only=True)
            converged = all(
                abs(ref[j] - vals[j]) <= 1e-8 * max(1.0, abs(ref[j])) for j in (0, 1))

    return EDResult(
        energies=vals,
        gap=float(vals[1] - vals[0]),
        x_mean=x_mean,
        x_sq_mean=x_sq_mean,
        parity=parity,
        converged=converged,
        vectors=vecs,
    )


def _displaced_vacuum(displacement: float, n_fock: int) -> np.ndarray:
    """Coherent state with <x> = displacement, from the displacement series on
    vacuum, renormalized; raises when the truncated tail exceeds the guard."""
    beta = float(displacement)
    if beta == 0.0:
        vec = np.zeros(n_fock)
        vec[0] = 1.0
        return vec
    m = np.arange(n_fock, dtype=float)
    log_mag = -0.5 * beta * beta + m * math.log(abs(beta)) - 0.5 * gammaln(m + 1.0)
    vec = np.exp(log_mag)
    if beta < 0:
        vec[1::2] *= -1.0
    norm_sq = float(vec @ vec)
    loss = 1.0 - norm_sq
    if loss > DISPLACEMENT_NORM_LOSS:
        raise TruncationError(
            f"displaced state |{beta:g}> loses norm {loss:.3e} at cutoff {n_fock - 1}; "
            "raise fock_cutoff")
    return vec / math.sqrt(norm_sq)


def _branch_product(spec: HamiltonianSpec, displacement: float):
    """Product state with every qubit in its local ground state at the given
    cavity displacement, tensored with the displaced vacuum."""
    e = spec.ensemble
    thetas = np.arctan2(e.epsilons + 4.0 * e.gs * displacement, e.deltas)
    # Local ground of (1/2)[E sigma_z - delta sigma_x] is
    # sin(pi/4 - theta/2)|z+> + cos(pi/4 - theta/2)|z->, theta = atan(E/delta).
    half = 0.25 * math.pi - 0.5 * thetas
    spin = np.array([1.0])
    for a_up, a_dn in zip(np.sin(half), np.cos(half)):
        spin = np.kron(spin, np.array([a_up, a_dn]))
    vector = np.kron(spin, _displaced_vacuum(displacement, spec.n_fock))
    return 0.5 * math.pi - np.abs(thetas), vector


def build_ansatz(spec: HamiltonianSpec, branch: str,
                 solution: "meanfield.SelfConsistentSolution | None" = None) -> AnsatzState:
    """Variational state for one superposition branch.

    ``left``/``right`` are the product states displaced to -x0/+x0 with every
    qubit in its local ground state; ``symmetric``/``antisymmetric`` are their
    renormalized sum/difference.  In the normal phase (x0 = 0) the two product
    branches coincide and the antisymmetric combination does not exist.
    """
    if branch not in BRANCHES:
        raise InvalidParameterError(f"branch must be one of {BRANCHES}, got {branch!r}")
    if solution is None:
        solution = meanfield.solve(spec.ensemble)
    x0 = solution.x0

    if branch == "left":
        theta_primes, vector = _branch_product(spec, -x0)
        return AnsatzState(branch, theta_primes, -x0, vector)
    if branch == "right":
        theta_primes, vector = _branch_product(spec, +x0)
        return AnsatzState(branch, theta_primes, +x0, vector)

    tp_left, left = _branch_product(spec, -x0)
    _, right = _branch_product(spec, +x0)
    combined = left + right if branch == "symmetric" else left - right
    norm = float(np.linalg.norm(combined))
    if norm < 1e-8:
        raise InvalidParameterError(
            f"the {branch} combination is null: both branches coincide (x0 = {x0:g})")
    return AnsatzState(branch, tp_left, x0, combined / norm)


def ansatz_overlap(state: AnsatzState, vector: np.ndarray) -> float:
    """|<ansatz|psi>|^2 against an eigenvector from :func:`lowest_eigenpairs`."""
    return float(np.dot(state.vector, np.asarray(vector))) ** 2


def gap_vs_n(lam: float, n_list, omega: float = 1.0, delta: float = 1.0,
             fock_cutoff: int = 40) -> list[tuple[int, float]]:
    """E1 - E0 for a ladder of qubit numbers at fixed dimensionless coupling.

    Holds lam = 4 g^2 N/(omega delta) fixed by setting
    g = sqrt(lam omega delta / (4 N)) per size.
    """
    if not lam > 0:
        raise InvalidParameterError(f"lam must be > 0, got {lam}")
    results = []
    for n in n_list:
        n = int(n)
        g = math.sqrt(lam * omega * delta / (4.0 * n))
        spec = HamiltonianSpec(uniform_ensemble(n, omega, delta, 0.0, g), fock_cutoff)
        res = lowest_eigenpairs(spec, k=2, check_convergence=False)
        results.append((n, res.gap))
    return results
