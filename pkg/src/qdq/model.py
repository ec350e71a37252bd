"""Exciton Hamiltonians and bath coupling operators for N dipole-coupled dots.

Product basis: each dot is a two-level system with ground ``0`` (index 0) and
exciton ``X`` (index 1). Dot 1 is the most significant digit, so for a pair the
order is ``|00>, |0X>, |X0>, |XX>``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Literal

import numpy as np
from scipy import constants

from .errors import CapacityError, UnsupportedConfigurationError
from .units import DEBYE

MAX_DOTS = 10

SIGMA_Z = np.array([[-1.0, 0.0], [0.0, 1.0]], dtype=complex)
SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SIGMA_PLUS = np.array([[0.0, 0.0], [1.0, 0.0]], dtype=complex)  # |X><0|
SIGMA_MINUS = SIGMA_PLUS.T.copy()  # |0><X|

Frame = Literal["lab", "rotating-wave"]


@dataclass(frozen=True)
class ExcitonNetworkParams:
    """Parameters of the exciton Hamiltonian, all rates in 1/ps.

    ``coupling`` is the symmetric dipole-coupling matrix J_ij with zero
    diagonal. ``delta`` holds one gap per dot and only matters in the lab
    frame.
    """

    n_dots: int
    delta: tuple[float, ...]
    drive_K: float
    coupling: np.ndarray
    omega_L: float = 0.0
    frame: Frame = "rotating-wave"

    def __post_init__(self):
        if self.n_dots < 1:
            raise ValueError("n_dots must be >= 1")
        if self.n_dots > MAX_DOTS:
            raise CapacityError(f"n_dots={self.n_dots} exceeds MAX_DOTS={MAX_DOTS}")
        object.__setattr__(self, "delta", tuple(float(x) for x in self.delta))
        if len(self.delta) != self.n_dots:
            raise ValueError("delta needs one entry per dot")
        J = np.array(self.coupling, dtype=float)
        if J.shape != (self.n_dots, self.n_dots):
            raise ValueError(f"coupling must be {self.n_dots}x{self.n_dots}")
        if not np.array_equal(J, J.T):
            raise ValueError("coupling matrix must be symmetric")
        if np.any(np.diag(J) != 0):
            raise ValueError("coupling matrix must have zero diagonal")
        J.setflags(write=False)
        object.__setattr__(self, "coupling", J)
        if self.drive_K < 0:
            raise ValueError("drive_K must be >= 0")
        if self.frame not in ("lab", "rotating-wave"):
            raise ValueError(f"unknown frame {self.frame!r}")
        if self.frame == "lab" and any(d <= 0 for d in self.delta):
            raise ValueError("lab frame requires positive gaps")

    @classmethod
    def pair(cls, J: float, K: float, delta: float = 0.0, omega_L: float = 0.0,
             frame: Frame = "rotating-wave") -> "ExcitonNetworkParams":
        """Two identical dots with coupling ``J`` and drive ``K``."""
        return cls(n_dots=2, delta=(delta, delta), drive_K=K,
                   coupling=np.array([[0.0, J], [J, 0.0]]), omega_L=omega_L, frame=frame)

    @property
    def dim(self) -> int:
        return 2 ** self.n_dots


def basis_labels(n_dots: int) -> list[str]:
    return ["".join(p) for p in itertools.product("0X", repeat=n_dots)]


def site_operator(op: np.ndarray, site: int, n_dots: int) -> np.ndarray:
    """Embed a 2x2 operator acting on dot ``site`` (0-based) in the product space."""
    out = np.array([[1.0 + 0j]])
    for i in range(n_dots):
        out = np.kron(out, op if i == site else np.eye(2))
    return out


def build_lab_hamiltonian(params: ExcitonNetworkParams, t: float) -> np.ndarray:
    """Lab-frame exciton Hamiltonian at time ``t`` (ps)."""
    if params.frame != "lab":
        raise UnsupportedConfigurationError("build_lab_hamiltonian needs frame='lab'")
    n = params.n_dots
    drive = 0.5 * params.drive_K * np.cos(params.omega_L * t)
    H = np.zeros((params.dim, params.dim), dtype=complex)
    for i in range(n):
        H += 0.5 * params.delta[i] * site_operator(SIGMA_Z, i, n)
        if drive != 0.0:
            H += drive * site_operator(SIGMA_X, i, n)
        for j in range(n):
            if i != j and params.coupling[i, j] != 0.0:
                H += params.coupling[i, j] * (
                    site_operator(SIGMA_PLUS, i, n) @ site_operator(SIGMA_MINUS, j, n))
    return H


def build_rwa_hamiltonian(params: ExcitonNetworkParams) -> np.ndarray:
    """Resonant rotating-wave Hamiltonian of a driven pair.

    The drive ``K`` couples |00> and |XX> to both single-exciton states and
    ``J`` couples |0X> to |X0>; the diagonal is zero (exact resonance).
    """
    if params.n_dots != 2:
        raise UnsupportedConfigurationError("rotating-wave matrix is defined for a pair only")
    K = params.drive_K
    J = params.coupling[0, 1]
    return np.array([
        [0, K, K, 0],
        [K, 0, J, K],
        [K, J, 0, K],
        [0, K, K, 0],
    ], dtype=complex)


def system_hamiltonian(params: ExcitonNetworkParams, t: float = 0.0) -> np.ndarray:
    """Dispatch on ``params.frame``."""
    if params.frame == "lab":
        return build_lab_hamiltonian(params, t)
    return build_rwa_hamiltonian(params)


@dataclass(frozen=True)
class DipoleGeometry:
    """Transition dipole (debye), relative permittivity, and dot spacing (nm)."""

    mu: float = 79.0
    epsilon: float = 10.0
    L: float = 7.5

    def __post_init__(self):
        if self.mu < 0 or self.epsilon <= 0 or self.L <= 0:
            raise ValueError("need mu >= 0, epsilon > 0, L > 0")


def dipole_coupling(geom: DipoleGeometry) -> float:
    """Point-dipole exchange rate mu^2 / (4 pi eps0 eps L^3 hbar) in 1/ps."""
    mu = geom.mu * DEBYE
    L = geom.L * 1e-9
    energy = mu ** 2 / (4 * np.pi * constants.epsilon_0 * geom.epsilon * L ** 3)
    return energy / constants.hbar * 1e-12


@dataclass(frozen=True)
class CouplingVector:
    """Diagonal of the system-side bath coupling operator sum_i |X_i><X_i|."""

    s: np.ndarray = field(repr=True)

    @property
    def dim(self) -> int:
        return len(self.s)


def coupling_vector(n_dots: int) -> CouplingVector:
    if n_dots < 1:
        raise ValueError("n_dots must be >= 1")
    s = np.array([lab.count("X") for lab in basis_labels(n_dots)], dtype=float)
    s.setflags(write=False)
    return CouplingVector(s)
