import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.linalg import expm

from qdq.bath import SpectralDensityParams, build_bath_kernel
from qdq.engine import (full_path_sum, initial_state_bright_pair, invariant_report, propagate,
                        short_time_propagator)
from qdq.errors import CapacityError, TraceDriftError
from qdq.model import (ExcitonNetworkParams, build_lab_hamiltonian, build_rwa_hamiltonian,
                       coupling_vector)
from qdq.reference import independent_boson_reference, unitary_reference

CV2 = coupling_vector(2)


def vec(rho):
    return rho.reshape(-1)


def test_bright_pair_state():
    rho = initial_state_bright_pair()
    assert np.trace(rho) == pytest.approx(1.0, abs=1e-15)
    assert rho[1, 2] == pytest.approx(0.5, abs=1e-15)
    np.testing.assert_allclose(rho @ rho, rho, atol=1e-15)
    assert np.count_nonzero(np.abs(rho) > 1e-15) == 4


def test_propagator_identity_for_zero_hamiltonian():
    assert np.array_equal(short_time_propagator(np.zeros((4, 4), complex), 1.0), np.eye(16))


def test_propagator_half_steps_compose(rwa_pair):
    full = short_time_propagator(rwa_pair, 1.0)
    half = short_time_propagator(rwa_pair, 0.5)
    np.testing.assert_allclose(half @ half, full, atol=1e-12)


def test_propagator_matches_liouvillian_expm(rwa_pair):
    # row-major vec: -i[H, rho] -> -i (H x 1 - 1 x H^T)
    L = -1j * (np.kron(rwa_pair, np.eye(4)) - np.kron(np.eye(4), rwa_pair.T))
    np.testing.assert_allclose(short_time_propagator(rwa_pair, 0.7), expm(0.7 * L), atol=1e-12)


@settings(max_examples=30, deadline=None)
@given(K=st.floats(0, 2), J=st.floats(-2, 2), dt=st.floats(0.01, 3), seed=st.integers(0, 2 ** 16))
def test_propagator_preserves_trace_and_hermiticity(K, J, dt, seed):
    H = build_rwa_hamiltonian(ExcitonNetworkParams.pair(J, K))
    rng = np.random.default_rng(seed)
    A = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    rho = A @ A.conj().T
    rho /= np.trace(rho)
    out = (short_time_propagator(H, dt) @ vec(rho)).reshape(4, 4)
    assert abs(np.trace(out) - 1) < 1e-12
    assert np.abs(out - out.conj().T).max() < 1e-12


def test_bright_state_stationary_without_drive():
    H = build_rwa_hamiltonian(ExcitonNetworkParams.pair(1.4, 0.0))
    rho = initial_state_bright_pair()
    out = short_time_propagator(H, 1.0) @ vec(rho)
    np.testing.assert_allclose(out, vec(rho), atol=1e-14)


def test_unitary_reference_trivial(rwa_pair):
    rho = initial_state_bright_pair()
    np.testing.assert_allclose(unitary_reference(rho, rwa_pair, 0.0), rho, atol=1e-15)
    H0 = build_rwa_hamiltonian(ExcitonNetworkParams.pair(1.4, 0.0))
    np.testing.assert_allclose(unitary_reference(rho, H0, 37.0), rho, atol=1e-13)


# from eigendecomposition; the |00> value also equals the closed-form Rabi result
# 0.5 * (4K^2/W^2) sin^2(W t) with W^2 = (J/2)^2 + 4K^2
UNITARY_GOLDEN = {
    1.0: (0.09006135189326561, 0.4099386481067346),
    5.0: (0.12729690458661083, 0.37270309541338925),
    10.0: (0.10385000788649631, 0.39614999211350377),
}


@pytest.mark.parametrize("t", sorted(UNITARY_GOLDEN))
def test_unitary_reference_golden(rwa_pair, t):
    rho = unitary_reference(initial_state_bright_pair(), rwa_pair, t)
    p00, coh = UNITARY_GOLDEN[t]
    assert rho[0, 0].real == pytest.approx(p00, abs=1e-13)
    assert rho[3, 3].real == pytest.approx(p00, abs=1e-13)
    assert rho[1, 2].real == pytest.approx(coh, abs=1e-13)
    K, J = 0.24, 1.4
    W = np.sqrt((J / 2) ** 2 + 4 * K ** 2)
    assert p00 == pytest.approx(0.5 * 4 * K ** 2 / W ** 2 * np.sin(W * t) ** 2, abs=1e-13)


def test_zero_coupling_is_unitary(rwa_pair):
    rho0 = initial_state_bright_pair()
    k = build_bath_kernel(SpectralDensityParams(0.0, 2.2), 77.0, 1.0, 3)
    traj = propagate(rho0, rwa_pair, k, CV2, 100)
    for t, rho in zip(traj.times, traj.states):
        assert np.abs(rho - unitary_reference(rho0, rwa_pair, t)).max() < 1e-10


def test_decoherence_free_pair(kernel_77):
    H = build_rwa_hamiltonian(ExcitonNetworkParams.pair(1.4, 0.0))
    rho0 = initial_state_bright_pair()
    traj = propagate(rho0, H, kernel_77, CV2, 100)
    assert np.abs(traj.states - rho0).max() < 1e-8


def test_paper_run_coherence_survives(rwa_pair, kernel_77):
    traj = propagate(initial_state_bright_pair(), rwa_pair, kernel_77, CV2, 120)
    coh = traj.element(1, 2).real
    assert np.all(np.abs(coh[100:]) > 0.02)


def test_paper_run_invariants(rwa_pair, kernel_77):
    traj = propagate(initial_state_bright_pair(), rwa_pair, kernel_77, CV2, 200)
    rep = invariant_report(traj.states)
    assert rep["max_trace_drift"] < 1e-8
    assert rep["max_hermiticity_error"] < 1e-10
    assert rep["min_eigenvalue"] > -1e-8


def test_full_path_sum_single_step(rwa_pair, kernel_77):
    rho0 = initial_state_bright_pair()
    a = full_path_sum(rho0, rwa_pair, kernel_77, CV2, 1)
    for kmax in (1, 2, 3):
        k = build_bath_kernel(kernel_77.params, 77.0, 1.0, kmax)
        b = propagate(rho0, rwa_pair, k, CV2, 1)
        assert np.abs(a.states - b.states).max() < 1e-13


def test_full_path_sum_zero_coupling(rwa_pair):
    rho0 = initial_state_bright_pair()
    k = build_bath_kernel(SpectralDensityParams(0.0, 2.2), 77.0, 1.0, 3)
    traj = full_path_sum(rho0, rwa_pair, k, CV2, 4)
    for t, rho in zip(traj.times, traj.states):
        assert np.abs(rho - unitary_reference(rho0, rwa_pair, t)).max() < 1e-12


@pytest.mark.parametrize("J,K,T", [(1.4, 0.24, 77.0), (1.4, 0.24, 300.0), (0.59, 0.6, 40.0)])
def test_iterative_equals_path_sum(paper_bath, J, K, T):
    H = build_rwa_hamiltonian(ExcitonNetworkParams.pair(J, K))
    k = build_bath_kernel(paper_bath, T, 1.0, 5)
    rho0 = initial_state_bright_pair()
    a = propagate(rho0, H, k, CV2, 5)
    b = full_path_sum(rho0, H, k, CV2, 5)
    assert np.abs(a.states - b.states).max() < 1e-12


def test_exact_path_filter_matches_dense(rwa_pair, kernel_77):
    rho0 = initial_state_bright_pair()
    dense = propagate(rho0, rwa_pair, kernel_77, CV2, 30)
    sparse = propagate(rho0, rwa_pair, kernel_77, CV2, 30, path_filter=0.0)
    assert np.abs(dense.states - sparse.states).max() < 1e-13


def test_path_filter_accuracy_regression(rwa_pair, kernel_77):
    rho0 = initial_state_bright_pair()
    dense = propagate(rho0, rwa_pair, kernel_77, CV2, 60)
    filtered = propagate(rho0, rwa_pair, kernel_77, CV2, 60, path_filter=1e-10)
    assert np.abs(dense.states - filtered.states).max() < 1e-6


def test_trace_drift_is_an_error(rwa_pair, kernel_77):
    with pytest.raises(TraceDriftError) as info:
        propagate(initial_state_bright_pair(), rwa_pair, kernel_77, CV2, 60, path_filter=1e-4)
    assert info.value.step >= 1


def test_capacity_errors(rwa_pair, paper_bath):
    k = build_bath_kernel(paper_bath, 77.0, 1.0, 7)
    rho0 = initial_state_bright_pair()
    with pytest.raises(CapacityError):
        propagate(rho0, rwa_pair, k, CV2, 10)
    with pytest.raises(CapacityError):
        full_path_sum(rho0, rwa_pair, k, CV2, 7)


def test_stride(rwa_pair, kernel_77):
    rho0 = initial_state_bright_pair()
    every = propagate(rho0, rwa_pair, kernel_77, CV2, 20)
    some = propagate(rho0, rwa_pair, kernel_77, CV2, 20, stride=5)
    np.testing.assert_array_equal(some.times, [0, 5, 10, 15, 20])
    np.testing.assert_array_equal(some.states, every.states[::5])


def test_deterministic(rwa_pair, kernel_77):
    rho0 = initial_state_bright_pair()
    a = propagate(rho0, rwa_pair, kernel_77, CV2, 50)
    b = propagate(rho0, rwa_pair, kernel_77, CV2, 50)
    assert a.states.tobytes() == b.states.tobytes()


def test_trotter_convergence(paper_bath, rwa_pair):
    # memory held at 1 ps so the finest grid stays cheap
    rho0 = initial_state_bright_pair()
    final = {}
    for dt, kmax in ((1.0, 1), (0.5, 2), (0.25, 4)):
        k = build_bath_kernel(paper_bath, 77.0, dt, kmax)
        final[dt] = propagate(rho0, rwa_pair, k, CV2, int(round(20 / dt))).states[-1]
    coarse = np.abs(final[1.0] - final[0.5]).max()
    fine = np.abs(final[0.5] - final[0.25]).max()
    assert fine < coarse


def test_independent_boson_short(paper_bath):
    net = ExcitonNetworkParams(1, (1.0,), 0.0, np.zeros((1, 1)), frame="lab")
    H = build_lab_hamiltonian(net, 0.0)
    k = build_bath_kernel(paper_bath, 77.0, 0.1, 50)
    traj = propagate(np.full((2, 2), 0.5, complex), H, k, coupling_vector(1), 50, path_filter=0.0)
    mags = np.abs(traj.element(0, 1)) / 0.5
    ref = [independent_boson_reference(paper_bath, 77.0, t) for t in traj.times]
    np.testing.assert_allclose(mags, ref, rtol=1e-6)


def test_independent_boson_reference_limits(paper_bath):
    assert independent_boson_reference(paper_bath, 77.0, 0.0) == 1.0
    assert independent_boson_reference(SpectralDensityParams(0.0, 2.2), 77.0, 5.0) == 1.0
