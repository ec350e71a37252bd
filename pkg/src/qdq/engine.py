"""Finite-memory quasi-adiabatic path-integral propagation of the reduced
density matrix, plus an exhaustive path-sum oracle.

Density matrices are vectorised row-major: Liouville index ``j = a*d + b``
labels the forward/backward pair ``(a, b)`` of product-basis states. The
coupling operator is diagonal in that basis, so a Liouville index fixes both
coupling eigenvalues ``s+ = s[a]`` and ``s- = s[b]``.

Time-slicing: interval ``k`` covers ``[(k-1) dt, k dt]`` and carries one
Liouville index ``j_k``. The reduced density matrix at ``t_N`` is

    rho_N = U_half . sum_paths  F[j_1..j_N]  prod_k U[j_{k+1}, j_k]  (U_half rho_0)[j_1]

with ``U`` the free Liouville propagator over ``dt`` and ``F`` the product of
influence factors between every pair of intervals no more than ``kmax`` apart.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .bath import BathKernel
from .errors import CapacityError
from .model import CouplingVector

MAX_TENSOR_ELEMENTS = 2 ** 24
TRACE_TOLERANCE = 1e-6


@dataclass
class Trajectory:
    """Stored density matrices ``states[n]`` at ``times[n]``."""

    times: np.ndarray
    states: np.ndarray
    meta: dict = field(default_factory=dict)

    @property
    def dim(self) -> int:
        return self.states.shape[1]

    def element(self, i: int, j: int) -> np.ndarray:
        return self.states[:, i, j]

    def __len__(self):
        return len(self.times)


def initial_state_bright_pair() -> np.ndarray:
    """Projector onto (|0X> + |X0>)/sqrt(2) in the pair basis."""
    psi = np.zeros(4, dtype=complex)
    psi[1] = psi[2] = 1 / math.sqrt(2)
    return np.outer(psi, psi.conj())


def evolution_operator(H: np.ndarray, t: float) -> np.ndarray:
    """exp(-i H t) for Hermitian H via eigendecomposition."""
    E, W = np.linalg.eigh(H)
    return (W * np.exp(-1j * E * t)) @ W.conj().T


def short_time_propagator(H: np.ndarray, dt: float) -> np.ndarray:
    """Liouville-space propagator of rho -> exp(-iH dt) rho exp(iH dt), row-major."""
    V = evolution_operator(H, dt)
    return np.kron(V, V.conj())


def influence_matrices(kernel: BathKernel, coupling: CouplingVector) -> tuple[np.ndarray, np.ndarray]:
    """Return the same-step factors ``I0[j]`` and the pair factors ``I[k, j, j']``.

    ``I[k, j, j']`` weights a later interval in state ``j`` against an earlier
    one ``k`` steps back in state ``j'``; ``I[0]`` is unused.
    """
    s = np.asarray(coupling.s, dtype=float)
    d = len(s)
    sp = np.repeat(s, d)
    sm = np.tile(s, d)
    diff = sp - sm
    eta = kernel.eta
    I0 = np.exp(-diff * (eta[0] * sp - eta[0].conjugate() * sm))
    I = np.ones((kernel.kmax + 1, d * d, d * d), dtype=complex)
    for k in range(1, kernel.kmax + 1):
        I[k] = np.exp(-np.outer(diff, eta[k] * sp - eta[k].conjugate() * sm))
    return I0, I


def _check_inputs(rho0, H, kernel, coupling, n_steps):
    d = H.shape[0]
    if rho0.shape != (d, d) or coupling.dim != d:
        raise ValueError("rho0, H and coupling dimensions disagree")
    if n_steps < 1:
        raise ValueError("n_steps must be >= 1")
    if not np.allclose(H, H.conj().T, atol=1e-12, rtol=0):
        raise ValueError("H must be Hermitian")
    return d


def _trace_guard(rho: np.ndarray, step: int, tol: float):
    from .errors import TraceDriftError

    drift = abs(np.trace(rho) - 1.0)
    if drift > tol:
        raise TraceDriftError(step, drift)


def _meta(H, kernel, n_steps, kmax, path_filter, scheme):
    return {
        "scheme": scheme,
        "dt": kernel.dt,
        "kmax": kmax,
        "n_steps": n_steps,
        "temperature": kernel.temperature,
        "alpha": kernel.params.alpha,
        "omega_c": kernel.params.omega_c,
        "path_filter": path_filter,
        "hamiltonian": [[[z.real, z.imag] for z in row] for row in np.asarray(H)],
        "deterministic": True,
    }


def propagate(rho0: np.ndarray, H: np.ndarray, kernel: BathKernel, coupling: CouplingVector,
              n_steps: int, *, path_filter: float | None = None, stride: int = 1,
              max_elements: int = MAX_TENSOR_ELEMENTS,
              trace_tol: float = TRACE_TOLERANCE) -> Trajectory:
    """Iterative propagation keeping the last ``kernel.kmax`` intervals in memory.

    With ``path_filter=None`` the augmented tensor is stored densely. A float
    threshold switches to an explicit list of paths, discarding any whose
    amplitude magnitude is at or below the threshold after each step;
    ``path_filter=0.0`` drops only exact zeros and stays exact.
    """
    d = _check_inputs(rho0, H, kernel, coupling, n_steps)
    D = d * d
    kmax = kernel.kmax
    slots = max(kmax, 1)
    if path_filter is None and D ** (slots + 1) > max_elements:
        raise CapacityError(f"dense tensor needs {D}^{slots + 1} elements, budget {max_elements}")
    if stride < 1:
        raise ValueError("stride must be >= 1")

    U = short_time_propagator(H, kernel.dt)
    Uh = short_time_propagator(H, kernel.dt / 2)
    I0, I = influence_matrices(kernel, coupling)
    v0 = Uh @ np.asarray(rho0, dtype=complex).reshape(D)

    times = [0.0]
    states = [np.array(rho0, dtype=complex)]

    def store(step, last_slot_sums):
        rho = (Uh @ last_slot_sums).reshape(d, d)
        _trace_guard(rho, step, trace_tol)
        if step % stride == 0:
            times.append(step * kernel.dt)
            states.append(rho)

    if path_filter is None:
        A = v0 * I0
        store(1, A)
        for step in range(2, n_steps + 1):
            A = _dense_step(A, U, I0, I, kmax, slots)
            store(step, A.reshape(-1, D).sum(axis=0))
    else:
        paths = np.arange(D, dtype=np.int16)[:, None]
        amps = v0 * I0
        paths, amps = _filter(paths, amps, path_filter)
        store(1, np.bincount(paths[:, -1], amps.real, D) + 1j * np.bincount(paths[:, -1], amps.imag, D))
        for step in range(2, n_steps + 1):
            paths, amps = _sparse_step(paths, amps, U, I0, I, kmax, slots, path_filter, max_elements)
            last = paths[:, -1]
            store(step, np.bincount(last, amps.real, D) + 1j * np.bincount(last, amps.imag, D))

    return Trajectory(np.array(times), np.array(states),
                      _meta(H, kernel, n_steps, kmax, path_filter, "iterative"))


def _dense_step(A, U, I0, I, kmax, slots):
    r = A.ndim
    D = U.shape[0]
    n_mem = min(kmax, r)
    pieces = []
    for jn in range(D):
        w = A * (U[jn] * I0[jn])
        for k in range(1, n_mem + 1):
            shape = [1] * r
            shape[r - k] = D
            w = w * I[k, jn].reshape(shape)
        if r + 1 > slots:
            w = w.sum(axis=0)
        pieces.append(w)
    return np.stack(pieces, axis=-1)


def _filter(paths, amps, threshold):
    keep = np.abs(amps) > threshold
    return paths[keep], amps[keep]


def _sparse_step(paths, amps, U, I0, I, kmax, slots, threshold, max_elements):
    P, r = paths.shape
    D = U.shape[0]
    if P * D > max_elements:
        raise CapacityError(f"{P} paths x {D} branches exceeds budget {max_elements}")
    w = amps[:, None] * U[:, paths[:, -1]].T * I0[None, :]
    for k in range(1, min(kmax, r) + 1):
        w = w * I[k][:, paths[:, r - k]].T
    new_paths = np.concatenate(
        [np.repeat(paths, D, axis=0), np.tile(np.arange(D, dtype=paths.dtype), P)[:, None]], axis=1)
    w = w.reshape(-1)
    new_paths, w = _filter(new_paths, w, threshold)
    if r + 1 > slots:
        new_paths, inverse = _merge_rows(new_paths[:, 1:], D)
        n = len(new_paths)
        w = np.bincount(inverse, w.real, n) + 1j * np.bincount(inverse, w.imag, n)
        new_paths, w = _filter(new_paths, w, threshold)
    return new_paths, w


def _merge_rows(paths, D):
    """Unique rows of ``paths`` (sorted) and the inverse index."""
    r = paths.shape[1]
    if D ** r < 2 ** 62:
        weights = D ** np.arange(r - 1, -1, -1, dtype=np.int64)
        codes, inverse = np.unique(paths.astype(np.int64) @ weights, return_inverse=True)
        digits = (codes[:, None] // weights[None, :]) % D
        return digits.astype(paths.dtype), inverse.reshape(-1)
    uniq, inverse = np.unique(paths, axis=0, return_inverse=True)
    return uniq, inverse.reshape(-1)


def full_path_sum(rho0: np.ndarray, H: np.ndarray, kernel: BathKernel, coupling: CouplingVector,
                  n_steps: int, *, max_elements: int = MAX_TENSOR_ELEMENTS) -> Trajectory:
    """Enumerate every Liouville path for each horizon 1..n_steps.

    Uses the untruncated influence functional, so ``kernel.kmax`` must be at
    least ``n_steps - 1``.
    """
    d = _check_inputs(rho0, H, kernel, coupling, n_steps)
    D = d * d
    if D ** n_steps > max_elements:
        raise CapacityError(f"{D}^{n_steps} paths exceeds budget {max_elements}")
    if kernel.kmax < n_steps - 1:
        raise ValueError(f"kernel.kmax={kernel.kmax} too short for {n_steps} steps")
    U = short_time_propagator(H, kernel.dt)
    Uh = short_time_propagator(H, kernel.dt / 2)
    I0, I = influence_matrices(kernel, coupling)
    v0 = Uh @ np.asarray(rho0, dtype=complex).reshape(D)

    states = [np.array(rho0, dtype=complex)]
    for N in range(1, n_steps + 1):
        paths = np.indices((D,) * N, dtype=np.int16).reshape(N, -1)
        w = v0[paths[0]].copy()
        for k in range(N):
            w *= I0[paths[k]]
            if k:
                w *= U[paths[k], paths[k - 1]]
            for kp in range(k):
                w *= I[k - kp][paths[k], paths[kp]]
        last = paths[N - 1]
        summed = np.bincount(last, w.real, D) + 1j * np.bincount(last, w.imag, D)
        states.append((Uh @ summed).reshape(d, d))
    times = np.arange(n_steps + 1) * kernel.dt
    return Trajectory(times, np.array(states),
                      _meta(H, kernel, n_steps, n_steps - 1, None, "full-path-sum"))


def invariant_report(states: np.ndarray) -> dict:
    """Worst-case trace drift, non-Hermiticity, and most negative eigenvalue."""
    states = np.asarray(states)
    traces = np.einsum("nii->n", states)
    herm = np.abs(states - states.conj().transpose(0, 2, 1)).max()
    herm_part = 0.5 * (states + states.conj().transpose(0, 2, 1))
    return {
        "max_trace_drift": float(np.abs(traces - 1).max()),
        "max_hermiticity_error": float(herm),
        "min_eigenvalue": float(np.linalg.eigvalsh(herm_part).min()),
    }
