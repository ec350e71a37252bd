"""Closed-form limits used to check the path-integral engine."""

from __future__ import annotations

import math

import numpy as np

from .bath import SpectralDensityParams, dephasing_exponent
from .engine import evolution_operator


def unitary_reference(rho0: np.ndarray, H: np.ndarray, t: float) -> np.ndarray:
    """Bath-free evolution exp(-iHt) rho0 exp(iHt)."""
    V = evolution_operator(H, t)
    return V @ rho0 @ V.conj().T


def independent_boson_reference(p: SpectralDensityParams, T: float, t: float) -> float:
    """|rho_0X(t) / rho_0X(0)| for a single undriven dot, exp(-Gamma(t))."""
    return math.exp(-dephasing_exponent(p, T, t))
