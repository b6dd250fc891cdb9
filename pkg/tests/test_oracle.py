import math

import numpy as np
import pytest

from superradiance import meanfield, oracle
from superradiance.errors import InvalidParameterError, ResourceLimitError, TruncationError
from superradiance.model import uniform_ensemble


def uniform_spec(n, lam, cutoff, omega=1.0, delta=1.0, epsilon=0.0):
    g = math.sqrt(lam * omega * delta / (4 * n))
    return oracle.HamiltonianSpec(uniform_ensemble(n, omega, delta, epsilon, g), cutoff)


def test_dimension_guard():
    with pytest.raises(ResourceLimitError):
        oracle.HamiltonianSpec(uniform_ensemble(9, 1.0, 1.0, 0.0, 0.1), 10)
    with pytest.raises(ResourceLimitError):
        oracle.HamiltonianSpec(uniform_ensemble(8, 1.0, 1.0, 0.0, 0.1), 300)
    spec = oracle.HamiltonianSpec(uniform_ensemble(4, 1.0, 1.0, 0.0, 0.1), 40)
    assert spec.dim == 16 * 41


def test_decoupled_single_qubit_spectrum():
    spec = oracle.HamiltonianSpec(uniform_ensemble(1, 1.0, 1.0, 0.0, 0.0), 1)
    vals = np.linalg.eigvalsh(oracle.build_hamiltonian(spec))
    # qubit +-delta/2 plus oscillator (n + 1/2): {0, 1, 1, 2} for delta = omega = 1
    assert np.allclose(vals, [0.0, 1.0, 1.0, 2.0], atol=1e-12)


def test_decoupled_pair_ground_energy():
    spec = oracle.HamiltonianSpec(uniform_ensemble(2, 1.0, 1.0, 0.0, 0.0), 20)
    res = oracle.lowest_eigenpairs(spec, k=2, check_convergence=False)
    assert res.energies[0] == pytest.approx(-0.5, abs=1e-12)
    assert res.gap == pytest.approx(1.0, abs=1e-12)  # min(delta, omega)


def test_decoupled_gap_is_min_of_scales():
    spec = oracle.HamiltonianSpec(uniform_ensemble(2, 0.3, 1.0, 0.0, 0.0), 20)
    res = oracle.lowest_eigenpairs(spec, k=2, check_convergence=False)
    assert res.gap == pytest.approx(0.3, abs=1e-12)


def test_hamiltonian_is_symmetric():
    spec = uniform_spec(3, 2.0, 15, epsilon=0.2)
    H = oracle.build_hamiltonian(spec)
    assert np.array_equal(H, H.T)


def test_parity_commutes_at_zero_bias():
    spec = uniform_spec(3, 3.0, 25)
    H = oracle.build_hamiltonian(spec)
    P = oracle.parity_matrix(spec)
    assert np.allclose(P @ P, np.eye(spec.dim), atol=1e-14)
    comm = np.linalg.norm(H @ P - P @ H)
    assert comm <= 1e-10 * np.linalg.norm(H)


def test_parity_broken_by_bias():
    spec = uniform_spec(2, 2.0, 15, epsilon=0.4)
    H = oracle.build_hamiltonian(spec)
    P = oracle.parity_matrix(spec)
    assert np.linalg.norm(H @ P - P @ H) > 1e-3


def test_ground_state_observables_at_zero_bias():
    spec = uniform_spec(4, 3.0, 40)
    res = oracle.lowest_eigenpairs(spec, k=2)
    assert res.converged
    assert abs(res.parity) <= 1.0 + 1e-10
    assert res.parity == pytest.approx(1.0, abs=1e-9)
    assert abs(res.x_mean) <= 1e-8  # parity forces <x> = 0
    assert res.gap >= 0.0
    assert np.all(np.diff(res.energies) >= -1e-12)


def test_cutoff_ladder_energy_non_increasing():
    energies = []
    for cutoff in (10, 20, 30, 40):
        spec = uniform_spec(4, 4.0, cutoff)
        res = oracle.lowest_eigenpairs(spec, k=2, check_convergence=False)
        energies.append(res.energies[0])
    assert all(b <= a + 1e-13 for a, b in zip(energies, energies[1:]))


def test_convergence_flag():
    assert oracle.lowest_eigenpairs(uniform_spec(4, 4.0, 45), k=2).converged
    assert not oracle.lowest_eigenpairs(uniform_spec(4, 4.0, 3), k=2).converged


def test_gap_closes_with_n_in_superradiant_phase():
    gaps = dict(oracle.gap_vs_n(3.0, [2, 3, 4, 5], fock_cutoff=35))
    assert gaps[2] > gaps[3] > gaps[4] > gaps[5] > 0.0
    # log-gap second differences non-positive: consistent with an
    # exponential (or faster) trend at these sizes
    logs = [math.log(gaps[n]) for n in (2, 3, 4, 5)]
    second = [logs[i + 2] - 2 * logs[i + 1] + logs[i] for i in range(2)]
    assert all(d <= 0.05 for d in second)


def test_gap_survives_in_normal_phase():
    gaps = dict(oracle.gap_vs_n(0.5, [2, 3, 4, 5], fock_cutoff=25))
    # normal phase: gap stays on the (1 - lam) * min(delta, omega) scale
    for gap in gaps.values():
        assert 0.25 <= gap <= 1.0


def test_displaced_vacuum_moments_and_guard():
    vec = oracle._displaced_vacuum(1.5, 60)
    assert np.linalg.norm(vec) == pytest.approx(1.0, abs=1e-12)
    grid = vec[None, :]
    x_mean = float(np.sum(grid * oracle._apply_x(grid)))
    assert x_mean == pytest.approx(1.5, rel=1e-10)
    with pytest.raises(TruncationError):
        oracle._displaced_vacuum(3.0, 6)


def test_ansatz_normal_phase_is_polarized_vacuum():
    spec = uniform_spec(3, 0.5, 12)
    state = oracle.build_ansatz(spec, "left")
    assert np.all(state.theta_primes == pytest.approx(math.pi / 2))
    assert state.displacement == 0.0
    # every qubit along +x, oscillator in vacuum
    plus = np.array([1.0, 1.0]) / math.sqrt(2.0)
    spin = np.kron(np.kron(plus, plus), plus)
    fock = np.zeros(13)
    fock[0] = 1.0
    assert np.allclose(state.vector, np.kron(spin, fock), atol=1e-12)


def test_ansatz_branch_signs_pinned_by_energy():
    # The "left" product branch must sit at the NEGATIVE displacement: its
    # spin part paired with the +x0 oscillator state costs energy.
    spec = uniform_spec(3, 3.0, 30)
    H = oracle.build_hamiltonian(spec)
    solution = meanfield.solve(spec.ensemble)
    left = oracle.build_ansatz(spec, "left", solution)
    assert left.displacement == -solution.x0
    spin_dim = 1 << 3
    spin = left.vector.reshape(spin_dim, spec.n_fock) @ oracle._displaced_vacuum(
        -solution.x0, spec.n_fock)
    wrong = np.kron(spin, oracle._displaced_vacuum(+solution.x0, spec.n_fock))
    wrong /= np.linalg.norm(wrong)
    e_left = left.vector @ H @ left.vector
    e_wrong = wrong @ H @ wrong
    assert e_left < e_wrong - 1.0


def test_ansatz_branches_normalized_and_variational():
    spec = uniform_spec(4, 4.0, 40)
    H = oracle.build_hamiltonian(spec)
    res = oracle.lowest_eigenpairs(spec, k=2, check_convergence=False)
    solution = meanfield.solve(spec.ensemble)
    for branch in oracle.BRANCHES:
        state = oracle.build_ansatz(spec, branch, solution)
        assert np.linalg.norm(state.vector) == pytest.approx(1.0, abs=1e-12)
        energy = state.vector @ H @ state.vector
        assert energy >= res.energies[0] - 1e-10


def test_symmetric_ansatz_beats_single_branch_overlap():
    spec = uniform_spec(4, 4.0, 40)
    res = oracle.lowest_eigenpairs(spec, k=2, check_convergence=False)
    solution = meanfield.solve(spec.ensemble)
    left = oracle.build_ansatz(spec, "left", solution)
    sym = oracle.build_ansatz(spec, "symmetric", solution)
    anti = oracle.build_ansatz(spec, "antisymmetric", solution)
    ov_left = oracle.ansatz_overlap(left, res.vectors[:, 0])
    ov_sym = oracle.ansatz_overlap(sym, res.vectors[:, 0])
    assert ov_sym > ov_left
    assert ov_sym > 0.9
    # the antisymmetric partner matches the first excited state instead
    assert oracle.ansatz_overlap(anti, res.vectors[:, 1]) > 0.9
    assert oracle.ansatz_overlap(anti, res.vectors[:, 0]) < 1e-6


def test_antisymmetric_branch_null_in_normal_phase():
    spec = uniform_spec(3, 0.5, 12)
    with pytest.raises(InvalidParameterError):
        oracle.build_ansatz(spec, "antisymmetric")
    with pytest.raises(InvalidParameterError):
        oracle.build_ansatz(spec, "sideways")


def test_mean_field_consistency_of_second_moment():
    # Normal phase: <x^2> stays near the free-oscillator value 1/4.
    res = oracle.lowest_eigenpairs(uniform_spec(4, 0.5, 30), k=2, check_convergence=False)
    assert 0.125 <= res.x_sq_mean <= 0.5
    # Superradiant: the second moment reflects the displaced branches.
    spec = uniform_spec(4, 3.0, 40)
    res = oracle.lowest_eigenpairs(spec, k=2, check_convergence=False)
    x0 = meanfield.solve(spec.ensemble).x0
    assert math.sqrt(res.x_sq_mean) > 0.5 * x0


def test_symmetry_breaking_field_selects_branch():
    # Deep in the superradiant phase the tiny sigma_z probe picks one branch:
    # eta > 0 favors <sigma_z> < 0, i.e. the +x0 well.
    spec = uniform_spec(4, 6.0, 60)
    x0 = meanfield.solve(spec.ensemble).x0
    res_plus = oracle.lowest_eigenpairs(spec, k=2, sz_field=1e-6, check_convergence=False)
    res_minus = oracle.lowest_eigenpairs(spec, k=2, sz_field=-1e-6, check_convergence=False)
    assert res_plus.x_mean > 0.8 * x0
    assert res_minus.x_mean < -0.8 * x0


def test_lowest_eigenpairs_validates_k():
    spec = uniform_spec(2, 1.0, 5)
    with pytest.raises(InvalidParameterError):
        oracle.lowest_eigenpairs(spec, k=1)
    with pytest.raises(InvalidParameterError):
        oracle.lowest_eigenpairs(spec, k=10_000)
