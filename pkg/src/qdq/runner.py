"""Config-driven simulations, temperature sweeps, and the oracle-check suite."""

from __future__ import annotations

import dataclasses
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .analysis import (DecoherenceFit, SweepResult, extract_coherence, fit_decoherence_rate)
from .bath import SpectralDensityParams, build_bath_kernel
from .config import RunConfig, effective_config
from .engine import (Trajectory, full_path_sum, initial_state_bright_pair, invariant_report,
                     propagate)
from .errors import QdqError
from .model import ExcitonNetworkParams, build_lab_hamiltonian, coupling_vector, system_hamiltonian
from .reference import independent_boson_reference, unitary_reference

log = logging.getLogger(__name__)


def initial_state(cfg: RunConfig) -> np.ndarray:
    if cfg.system.initial == "bright-pair":
        return initial_state_bright_pair()
    d = 2 ** cfg.system.n_dots
    return np.full((d, d), 1.0 / d, dtype=complex)


def simulate(cfg: RunConfig, temperature: float | None = None) -> Trajectory:
    """Propagate the configured system at ``temperature`` (default: the config's)."""
    T = cfg.bath.temperature if temperature is None else temperature
    num = cfg.numerics
    net = cfg.network()
    H = system_hamiltonian(net)
    kernel = build_bath_kernel(cfg.spectral(), T, num.dt, num.kmax)
    traj = propagate(initial_state(cfg), H, kernel, coupling_vector(net.n_dots), num.n_steps,
                     path_filter=num.path_filter, stride=num.stride)
    traj.meta["config"] = effective_config(cfg)
    traj.meta["temperature"] = T
    return traj


def fit_trajectory(cfg: RunConfig, traj: Trajectory) -> DecoherenceFit:
    a = cfg.analysis
    series = extract_coherence(traj, a.element, a.reduction)
    return fit_decoherence_rate(series, a.fit_window, a.smoothing)


def _sweep_point(args):
    cfg, T = args
    try:
        return fit_trajectory(cfg, simulate(cfg, T)), None
    except QdqError as exc:
        return None, f"{type(exc).__name__}: {exc}"


def temperature_sweep(cfg: RunConfig, temperatures: list[float] | None = None,
                      threads: int = 1) -> SweepResult:
    """Fit a decoherence rate at each temperature; failures are recorded per point."""
    temps = cfg.bath.sweep.temperatures() if temperatures is None else [float(t) for t in temperatures]
    if any(t <= 0 for t in temps):
        raise ValueError("temperatures must be > 0")
    jobs = [(cfg, T) for T in temps]
    if threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(_sweep_point, jobs))
    else:
        results = [_sweep_point(j) for j in jobs]
    fits = [r[0] for r in results]
    errors = [r[1] for r in results]
    gammas = [f.gamma if f is not None else float("nan") for f in fits]
    return SweepResult(temps, gammas, fits, errors, effective_config(cfg))


@dataclass
class CheckResult:
    name: str
    passed: bool
    error: float
    tolerance: float
    seconds: float
    detail: str = ""

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] {self.name}: error={self.error:.3e} tol={self.tolerance:.1e} ({self.seconds:.2f}s) {self.detail}"


def _timed(name, tol, fn):
    t0 = time.perf_counter()
    try:
        err, detail = fn()
    except QdqError as exc:
        return CheckResult(name, False, float("inf"), tol, time.perf_counter() - t0, str(exc))
    return CheckResult(name, bool(err <= tol), float(err), tol, time.perf_counter() - t0, detail)


def check_closed_system(cfg: RunConfig, n_steps: int = 100) -> CheckResult:
    def run():
        H = system_hamiltonian(cfg.network())
        rho0 = initial_state(cfg)
        kernel = build_bath_kernel(SpectralDensityParams(0.0, cfg.bath.omega_c),
                                   cfg.bath.temperature, cfg.numerics.dt, cfg.numerics.kmax)
        traj = propagate(rho0, H, kernel, coupling_vector(cfg.system.n_dots), n_steps)
        err = max(np.abs(s - unitary_reference(rho0, H, t)).max()
                  for t, s in zip(traj.times, traj.states))
        return err, f"{n_steps} steps, alpha=0"
    return _timed("closed-system", 1e-10, run)


def check_path_sum(cfg: RunConfig, n_steps: int = 5) -> CheckResult:
    def run():
        H = system_hamiltonian(cfg.network())
        rho0 = initial_state(cfg)
        kernel = build_bath_kernel(cfg.spectral(), cfg.bath.temperature, cfg.numerics.dt, n_steps)
        cv = coupling_vector(cfg.system.n_dots)
        a = propagate(rho0, H, kernel, cv, n_steps)
        b = full_path_sum(rho0, H, kernel, cv, n_steps)
        return float(np.abs(a.states - b.states).max()), f"{n_steps} steps, kmax={n_steps}"
    return _timed("path-sum-equivalence", 1e-12, run)


def check_decoherence_free(cfg: RunConfig, n_steps: int = 100) -> CheckResult:
    def run():
        net = ExcitonNetworkParams.pair(cfg.coupling_J, 0.0)
        H = system_hamiltonian(net)
        rho0 = initial_state_bright_pair()
        kernel = build_bath_kernel(cfg.spectral(), cfg.bath.temperature, cfg.numerics.dt,
                                   cfg.numerics.kmax)
        traj = propagate(rho0, H, kernel, coupling_vector(2), n_steps)
        return float(np.abs(traj.states - rho0).max()), f"K=0 bright pair, {n_steps} steps"
    return _timed("decoherence-free-subspace", 1e-8, run)


def check_independent_boson(cfg: RunConfig, dt: float = 0.05, memory: float = 5.0,
                            t_end: float = 10.0) -> CheckResult:
    def run():
        p = cfg.spectral()
        T = cfg.bath.temperature
        net = ExcitonNetworkParams(1, (1.0,), 0.0, np.zeros((1, 1)), frame="lab")
        H = build_lab_hamiltonian(net, 0.0)
        kernel = build_bath_kernel(p, T, dt, int(round(memory / dt)))
        rho0 = np.full((2, 2), 0.5, dtype=complex)
        traj = propagate(rho0, H, kernel, coupling_vector(1), int(round(t_end / dt)),
                         path_filter=0.0)
        mags = np.abs(traj.element(0, 1)) / 0.5
        ref = np.array([independent_boson_reference(p, T, t) for t in traj.times])
        return float(np.max(np.abs(mags / ref - 1))), f"dt={dt}, memory={memory} ps"
    return _timed("independent-boson", 1e-2, run)


def oracle_check(cfg: RunConfig) -> list[CheckResult]:
    checks = [check_closed_system(cfg), check_independent_boson(cfg)]
    if cfg.system.n_dots == 2 and cfg.system.frame == "rotating-wave":
        checks += [check_path_sum(cfg), check_decoherence_free(cfg)]
    return checks


def trajectory_report(cfg: RunConfig, traj: Trajectory) -> dict:
    """Summary numbers written next to a simulated trajectory."""
    from .analysis import envelope_at

    a = cfg.analysis
    series = extract_coherence(traj, a.element, a.reduction)
    out = {"invariants": invariant_report(traj.states)}
    try:
        out["envelope_100ps"] = envelope_at(series, 100.0, a.smoothing)
    except QdqError:
        out["envelope_100ps"] = None
    try:
        fit = fit_trajectory(cfg, traj)
        out["fit"] = dataclasses.asdict(fit)
    except QdqError as exc:
        out["fit"] = None
        out["fit_error"] = str(exc)
    return out
