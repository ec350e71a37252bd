"""Sensitivity of the 77 K coherence to time step and memory length.

Prints Re<0X|rho|X0> at 20, 50 and 100 ps for a grid of (dt, kmax).
"""

from qdq.analysis import extract_coherence
from qdq.bath import SpectralDensityParams, build_bath_kernel
from qdq.engine import initial_state_bright_pair, propagate
from qdq.model import DipoleGeometry, ExcitonNetworkParams, build_rwa_hamiltonian, coupling_vector, dipole_coupling

GRID = [(1.0, 1), (1.0, 2), (1.0, 3), (1.0, 4), (0.5, 2), (0.5, 4), (0.5, 5)]


def main():
    H = build_rwa_hamiltonian(ExcitonNetworkParams.pair(dipole_coupling(DipoleGeometry()), 0.24))
    bath = SpectralDensityParams()
    for dt, kmax in GRID:
        k = build_bath_kernel(bath, 77.0, dt, kmax)
        traj = propagate(initial_state_bright_pair(), H, k, coupling_vector(2), int(round(100 / dt)))
        c = extract_coherence(traj).values
        picks = [c[int(round(t / dt))] for t in (20, 50, 100)]
        print(f"dt={dt:<4} kmax={kmax}  memory={dt * kmax:.1f} ps  " +
              "  ".join(f"{v:.5f}" for v in picks))


if __name__ == "__main__":
    main()
