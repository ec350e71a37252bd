import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qdq.analysis import (CoherenceSeries, SweepResult, envelope_at, extract_coherence,
                          fit_decoherence_rate, moving_average)
from qdq.engine import Trajectory, initial_state_bright_pair, propagate
from qdq.errors import InsufficientDataError
from qdq.model import ExcitonNetworkParams, build_rwa_hamiltonian, coupling_vector


def series(values, dt=1.0):
    t = np.arange(len(values)) * dt
    return CoherenceSeries(t, np.asarray(values, float), (1, 2), "re")


def exp_series(gamma, amp=0.5, n=201, dt=1.0):
    t = np.arange(n) * dt
    return CoherenceSeries(t, amp * np.exp(-gamma * t), (1, 2), "re")


def test_extract_initial_coherence():
    traj = Trajectory(np.array([0.0]), initial_state_bright_pair()[None])
    assert extract_coherence(traj, (1, 2), "re").values[0] == pytest.approx(0.5, abs=1e-15)


def test_extract_abs_nonnegative():
    rng = np.random.default_rng(1)
    states = rng.normal(size=(10, 4, 4)) + 1j * rng.normal(size=(10, 4, 4))
    s = extract_coherence(Trajectory(np.arange(10.0), states), (0, 3), "abs")
    assert np.all(s.values >= 0)


def test_extract_rejects_bad_index():
    traj = Trajectory(np.array([0.0]), initial_state_bright_pair()[None])
    with pytest.raises(IndexError):
        extract_coherence(traj, (4, 0))


def test_dark_run_series_constant(kernel_77):
    H = build_rwa_hamiltonian(ExcitonNetworkParams.pair(1.4, 0.0))
    traj = propagate(initial_state_bright_pair(), H, kernel_77, coupling_vector(2), 50)
    s = extract_coherence(traj)
    np.testing.assert_allclose(s.values, 0.5, atol=1e-12)
    assert fit_decoherence_rate(s, (0, 50), 10).gamma == pytest.approx(0, abs=1e-12)


def test_synthetic_one_per_ns():
    fit = fit_decoherence_rate(exp_series(0.001), (0, 200), 10)
    assert fit.gamma == pytest.approx(0.001, abs=1e-9)
    assert fit.gamma_per_ns == pytest.approx(1.0, abs=1e-6)
    assert fit.window == (0.0, 200.0)


def test_constant_series_zero_rate():
    fit = fit_decoherence_rate(series(np.full(201, 0.3)), (0, 200), 10)
    assert fit.gamma == pytest.approx(0.0, abs=1e-12)
    assert not fit.growing


@pytest.mark.parametrize("gamma", [1e-4, 1e-3, 1e-2])
def test_exact_on_noiseless_exponential(gamma):
    fit = fit_decoherence_rate(exp_series(gamma), (0, 200), 10)
    assert fit.residual < 1e-9
    assert fit.gamma == pytest.approx(gamma, rel=1e-9)


def test_growing_series_is_flagged(caplog):
    fit = fit_decoherence_rate(exp_series(-0.001), (0, 200), 10)
    assert fit.growing and fit.gamma < 0
    assert "not decaying" in caplog.text


def test_insufficient_points():
    with pytest.raises(InsufficientDataError):
        fit_decoherence_rate(series(np.full(201, 1e-9)), (0, 200), 10)
    with pytest.raises(InsufficientDataError):
        fit_decoherence_rate(exp_series(0.01, n=50), (0, 5), 0)


def test_window_outside_series():
    with pytest.raises(InsufficientDataError):
        fit_decoherence_rate(exp_series(0.01, n=50), (0, 200), 10)


def test_smoothing_removes_fast_oscillation():
    t = np.arange(401) * 0.5
    vals = 0.5 * np.exp(-0.002 * t) * (1 + 0.3 * np.cos(2 * np.pi * t / 2.5))
    fit = fit_decoherence_rate(CoherenceSeries(t, vals, (1, 2), "re"), (0, 200), 10)
    assert fit.gamma == pytest.approx(0.002, rel=0.02)


def test_moving_average_trims_edges():
    t = np.arange(21.0)
    tc, v = moving_average(t, t, 4)
    np.testing.assert_array_equal(tc, t[2:-2])
    np.testing.assert_allclose(v, t[2:-2])


def test_envelope_at():
    s = series(np.full(50, -0.2))
    assert envelope_at(s, 20.0, 10) == pytest.approx(0.2)
    with pytest.raises(InsufficientDataError):
        envelope_at(s, 48.0, 10)


@settings(max_examples=40, deadline=None)
@given(gamma=st.floats(1e-4, 2e-2), c=st.floats(1e-3, 1e3),
       phase=st.floats(0, 2 * math.pi))
def test_fit_invariant_under_positive_scaling(gamma, c, phase):
    t = np.arange(201.0)
    vals = 0.5 * np.exp(-gamma * t) * (1 + 0.2 * np.cos(1.3 * t + phase))
    s1 = CoherenceSeries(t, vals, (1, 2), "re")
    s2 = CoherenceSeries(t, c * vals, (1, 2), "re")
    g1 = fit_decoherence_rate(s1, (0, 200), 10).gamma
    g2 = fit_decoherence_rate(s2, (0, 200), 10).gamma
    assert g2 == pytest.approx(g1, abs=1e-12)


def test_sweep_result_round_trip():
    from qdq.analysis import DecoherenceFit
    res = SweepResult([40.0, 77.0], [1e-3, float("nan")],
                      [DecoherenceFit(1e-3, 0.4, (0.0, 200.0), 0.01, 191), None],
                      [None, "boom"], {"a": 1})
    back = SweepResult.from_dict(res.to_dict())
    assert back.temperatures == res.temperatures
    assert back.gammas[0] == res.gammas[0] and math.isnan(back.gammas[1])
    assert back.fits == res.fits
    assert back.errors == res.errors and back.config == res.config


def test_sweep_result_requires_increasing_temperatures():
    with pytest.raises(ValueError):
        SweepResult([77.0, 40.0], [0, 0], [None, None], [None, None])
