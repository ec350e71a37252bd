"""Unit conventions: hbar = 1, energies and rates in 1/ps, times in ps."""

from scipy import constants

#: Boltzmann constant over hbar, in 1/(ps K).
KB_PER_PS = constants.k / constants.hbar * 1e-12

#: One debye in C m.
DEBYE = 1e-21 / constants.c


def thermal_energy(temperature: float) -> float:
    """k_B T expressed as an angular frequency in 1/ps."""
    return KB_PER_PS * temperature
