"""Super-Ohmic acoustic-phonon bath: spectral density, correlation function,
and the discretised influence-functional coefficients.

Conventions (hbar = 1, rates in 1/ps):

    J(w) = alpha w^3 exp(-(w/wc)^2)
    R(t) = int_0^inf dw/pi J(w) [cos(wt) coth(w/2kT) - i sin(wt)]

The coefficient table ``eta`` integrates R over pairs of full time steps:
``eta[0]`` is the same-step (triangle) integral and ``eta[k]`` for k >= 1
couples steps that are ``k`` apart. The engine uses a symmetric splitting in
which the bath acts on whole steps and half system steps pad both ends of the
trajectory, so no separate endpoint coefficients are needed.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .errors import NumericalFailureError, UndefinedMemoryError
from .units import thermal_energy

# exp(-64) ~ 1.6e-28, the Gaussian tail beyond this is negligible
CUTOFF_MULTIPLE = 8.0
EPSREL = 1e-11
# absolute floor relative to the natural scale of the integrand
EPSABS_SCALE = 1e-14
QUAD_LIMIT = 2000


@dataclass(frozen=True)
class SpectralDensityParams:
    alpha: float = 0.027 * math.pi  # ps^2
    omega_c: float = 2.2  # 1/ps

    def __post_init__(self):
        if self.alpha < 0:
            raise ValueError("alpha must be >= 0")
        if self.omega_c <= 0:
            raise ValueError("omega_c must be > 0")

    @property
    def omega_max(self) -> float:
        return CUTOFF_MULTIPLE * self.omega_c


def spectral_density(omega, p: SpectralDensityParams):
    omega = np.asarray(omega, dtype=float)
    if np.any(omega < 0):
        raise ValueError("omega must be >= 0")
    out = p.alpha * omega ** 3 * np.exp(-(omega / p.omega_c) ** 2)
    return out if out.ndim else float(out)


def _omega_coth(omega: float, kT: float) -> float:
    """omega * coth(omega / 2kT), continuous at omega = 0."""
    if omega == 0.0:
        return 2.0 * kT
    return omega / math.tanh(omega / (2.0 * kT))


def _scale(p: SpectralDensityParams, kT: float) -> float:
    """Order of magnitude of R(0), used to set absolute tolerances."""
    return p.alpha * p.omega_c ** 3 * (p.omega_c + 2.0 * kT)


def _quad(f, p: SpectralDensityParams, epsrel: float, scale: float, **kw) -> float:
    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        try:
            val, _ = integrate.quad(f, 0.0, p.omega_max, epsabs=EPSABS_SCALE * epsrel / EPSREL * scale,
                                    epsrel=epsrel, limit=QUAD_LIMIT, **kw)
        except integrate.IntegrationWarning as exc:
            raise NumericalFailureError(f"frequency quadrature failed: {exc}") from exc
    return val / math.pi


def _check_temperature(T: float) -> float:
    if not T > 0:
        raise ValueError(f"temperature must be > 0 K, got {T}")
    return thermal_energy(T)


def bath_correlation(t: float, p: SpectralDensityParams, T: float,
                     epsrel: float = EPSREL) -> complex:
    """R(t) by adaptive quadrature; Fourier-weighted rules are used for t > 0."""
    kT = _check_temperature(T)
    if t < 0:
        raise ValueError("t must be >= 0")
    if p.alpha == 0.0:
        return 0j
    a, wc = p.alpha, p.omega_c

    def sym(w):
        return a * w * w * math.exp(-(w / wc) ** 2) * _omega_coth(w, kT)

    def anti(w):
        return a * w ** 3 * math.exp(-(w / wc) ** 2)

    sc = _scale(p, kT)
    if t == 0.0:
        return complex(_quad(sym, p, epsrel, sc), 0.0)
    re = _quad(sym, p, epsrel, sc, weight="cos", wvar=t)
    im = -_quad(anti, p, epsrel, sc, weight="sin", wvar=t)
    return complex(re, im)


def eta_coefficient(k: int, p: SpectralDensityParams, T: float, dt: float,
                    epsrel: float = EPSREL) -> complex:
    """Double time integral of R over two steps of length ``dt`` that are ``k`` apart.

    k = 0: int_0^dt dt' int_0^t' dt'' R(t' - t'')
    k > 0: int_{k dt}^{(k+1) dt} dt' int_0^dt dt'' R(t' - t'')
    Both reduce analytically to single frequency integrals.
    """
    kT = _check_temperature(T)
    if p.alpha == 0.0:
        return 0j
    a, wc = p.alpha, p.omega_c

    def env(w):
        # J(w) / w^2
        return a * w * math.exp(-(w / wc) ** 2)

    if k == 0:
        def re_f(w):
            return a * math.exp(-(w / wc) ** 2) * _omega_coth(w, kT) * (1 - math.cos(w * dt))

        def im_f(w):
            return env(w) * (w * dt - math.sin(w * dt))
    else:
        def re_f(w):
            return (a * math.exp(-(w / wc) ** 2) * _omega_coth(w, kT)
                    * 2 * (1 - math.cos(w * dt)) * math.cos(w * k * dt))

        def im_f(w):
            return env(w) * 2 * (1 - math.cos(w * dt)) * math.sin(w * k * dt)

    sc = _scale(p, kT) * dt * dt
    return complex(_quad(re_f, p, epsrel, sc), -_quad(im_f, p, epsrel, sc))


@dataclass(frozen=True)
class BathKernel:
    """Influence-functional coefficients for one (bath, T, dt, kmax).

    ``eta[k]`` for k = 0..kmax as described in :func:`eta_coefficient`;
    ``r_table[n]`` holds R(n dt) for n = 0..kmax+1.
    """

    params: SpectralDensityParams
    temperature: float
    dt: float
    kmax: int
    eta: np.ndarray
    r_table: np.ndarray

    def scaled(self, factor: float) -> "BathKernel":
        return BathKernel(SpectralDensityParams(self.params.alpha * factor, self.params.omega_c),
                          self.temperature, self.dt, self.kmax,
                          self.eta * factor, self.r_table * factor)

    def to_text(self) -> str:
        """Lossless text form: header lines then ``kind index re im`` rows."""
        lines = [
            "# qdq bath kernel",
            f"alpha {self.params.alpha:.17g}",
            f"omega_c {self.params.omega_c:.17g}",
            f"temperature {self.temperature:.17g}",
            f"dt {self.dt:.17g}",
            f"kmax {self.kmax}",
        ]
        for k, v in enumerate(self.eta):
            lines.append(f"eta {k} {v.real:.17g} {v.imag:.17g}")
        for n, v in enumerate(self.r_table):
            lines.append(f"R {n} {v.real:.17g} {v.imag:.17g}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "BathKernel":
        scalars = {}
        eta, rt = {}, {}
        for line in text.splitlines():
            if not line.strip() or line.startswith("#"):
                continue
            parts = line.split()
            if parts[0] in ("eta", "R"):
                target = eta if parts[0] == "eta" else rt
                target[int(parts[1])] = complex(float(parts[2]), float(parts[3]))
            else:
                scalars[parts[0]] = parts[1]
        kmax = int(scalars["kmax"])
        return cls(
            SpectralDensityParams(float(scalars["alpha"]), float(scalars["omega_c"])),
            float(scalars["temperature"]), float(scalars["dt"]), kmax,
            np.array([eta[k] for k in range(kmax + 1)], dtype=complex),
            np.array([rt[n] for n in range(len(rt))], dtype=complex),
        )


def build_bath_kernel(p: SpectralDensityParams, T: float, dt: float, kmax: int) -> BathKernel:
    if dt <= 0:
        raise ValueError("dt must be > 0")
    if kmax < 0:
        raise ValueError("kmax must be >= 0")
    eta = np.array([eta_coefficient(k, p, T, dt) for k in range(kmax + 1)], dtype=complex)
    r_table = np.array([bath_correlation(n * dt, p, T) for n in range(kmax + 2)], dtype=complex)
    eta.setflags(write=False)
    r_table.setflags(write=False)
    return BathKernel(p, float(T), float(dt), int(kmax), eta, r_table)


MEMORY_GRID_END = 25.0
MEMORY_GRID_STEP = 0.05


def memory_time(p: SpectralDensityParams, T: float, threshold: float) -> float:
    """Smallest grid time after which |R(t)|/|R(0)| stays below ``threshold``."""
    if not 0 < threshold < 1:
        raise ValueError("threshold must lie in (0, 1)")
    if p.alpha == 0.0:
        raise UndefinedMemoryError("R(t) vanishes identically for alpha = 0")
    n = int(round(MEMORY_GRID_END / MEMORY_GRID_STEP))
    times = np.arange(n + 1) * MEMORY_GRID_STEP
    mags = np.array([abs(bath_correlation(t, p, T)) for t in times])
    ratio = mags / mags[0]
    above = np.nonzero(ratio[1:] >= threshold)[0]
    if len(above) == 0:
        return 0.0
    return float(times[above[-1] + 1])


def dephasing_exponent(p: SpectralDensityParams, T: float, t: float) -> float:
    """Gamma(t) = int dw/pi J(w) coth(w/2kT) (1 - cos wt) / w^2."""
    kT = _check_temperature(T)
    if p.alpha == 0.0 or t == 0.0:
        return 0.0
    a, wc = p.alpha, p.omega_c
    return _quad(lambda w: a * math.exp(-(w / wc) ** 2) * _omega_coth(w, kT)
                 * (1 - math.cos(w * t)), p, EPSREL, _scale(p, kT) * t * t)
