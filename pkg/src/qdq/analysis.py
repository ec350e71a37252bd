"""Coherence extraction, exponential decoherence fits, and temperature sweeps."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from .engine import Trajectory
from .errors import InsufficientDataError

log = logging.getLogger(__name__)

Reduction = Literal["re", "im", "abs"]

LOG_FLOOR = 1e-6
MIN_POINTS = 10
# slopes this close to zero are rounding noise, not growth
GROWTH_TOL = 1e-12


@dataclass
class CoherenceSeries:
    times: np.ndarray
    values: np.ndarray
    element: tuple[int, int]
    reduction: Reduction

    @property
    def dt(self) -> float:
        return float(self.times[1] - self.times[0])


def extract_coherence(traj: Trajectory, element=(1, 2), reduction: Reduction = "re") -> CoherenceSeries:
    i, j = element
    d = traj.dim
    if not (0 <= i < d and 0 <= j < d):
        raise IndexError(f"element {element} out of range for dimension {d}")
    z = traj.element(i, j)
    values = {"re": z.real, "im": z.imag, "abs": np.abs(z)}[reduction]
    return CoherenceSeries(np.asarray(traj.times, float), np.array(values, float), (i, j), reduction)


def moving_average(times: np.ndarray, values: np.ndarray, width: float) -> tuple[np.ndarray, np.ndarray]:
    """Centred box average over an odd number of samples spanning ``width``.

    Only windows that fit entirely inside the data are returned, so the
    output is shorter than the input by ``2 * half`` samples.
    """
    dt = times[1] - times[0]
    half = int(round(width / (2 * dt)))
    if half == 0:
        return times, values
    n = 2 * half + 1
    if len(values) < n:
        return times[:0], values[:0]
    kernel = np.full(n, 1.0 / n)
    return times[half:-half], np.convolve(values, kernel, mode="valid")


def envelope_at(series: CoherenceSeries, t: float, width: float = 10.0) -> float:
    """Moving average of |values| evaluated at the stored time closest to ``t``."""
    tc, env = moving_average(series.times, np.abs(series.values), width)
    if len(tc) == 0 or t < tc[0] - 1e-9 or t > tc[-1] + 1e-9:
        raise InsufficientDataError(f"no full averaging window around t={t}")
    return float(env[np.argmin(np.abs(tc - t))])


@dataclass
class DecoherenceFit:
    gamma: float  # 1/ps
    amplitude: float
    window: tuple[float, float]
    residual: float
    n_points: int
    method: str = "log-ols-moving-average"
    growing: bool = False

    @property
    def gamma_per_ns(self) -> float:
        return self.gamma * 1e3


def fit_decoherence_rate(series: CoherenceSeries, window: tuple[float, float] = (0.0, 200.0),
                         smoothing_window: float = 10.0) -> DecoherenceFit:
    """Fit |values| ~ A exp(-gamma t) by least squares on the log of a smoothed envelope.

    Points inside ``window`` are box-averaged over ``smoothing_window`` ps,
    values below ``LOG_FLOOR`` are dropped, and a straight line is fitted
    to the natural log. The residual is the RMS misfit in the log domain.
    A negative gamma is returned with ``growing=True`` instead of raising.
    """
    t0, t1 = window
    t = series.times
    dt = series.dt
    if t1 - t0 < MIN_POINTS * dt - 1e-9:
        raise InsufficientDataError(f"fit window {window} shorter than {MIN_POINTS} steps")
    if t0 < t[0] - 1e-9 or t1 > t[-1] + 1e-9:
        raise InsufficientDataError(f"series covers [{t[0]}, {t[-1]}], window is {window}")
    sel = (t >= t0 - 1e-9) & (t <= t1 + 1e-9)
    tc, env = moving_average(t[sel], np.abs(series.values[sel]), smoothing_window)
    keep = env > LOG_FLOOR
    tc, env = tc[keep], env[keep]
    if len(tc) < MIN_POINTS:
        raise InsufficientDataError(f"only {len(tc)} usable points after flooring")
    y = np.log(env)
    slope, intercept = np.polyfit(tc, y, 1)
    resid = y - (slope * tc + intercept)
    gamma = -float(slope)
    fit = DecoherenceFit(gamma, float(np.exp(intercept)), (float(t0), float(t1)),
                         float(np.sqrt(np.mean(resid ** 2))), len(tc), growing=gamma < -GROWTH_TOL)
    if fit.growing:
        log.warning("fitted gamma %.3e < 0: series is not decaying on %s", gamma, window)
    return fit


@dataclass
class SweepResult:
    temperatures: list[float]
    gammas: list[float]
    fits: list[DecoherenceFit | None]
    errors: list[str | None]
    config: dict = field(default_factory=dict)

    def __post_init__(self):
        if not (len(self.temperatures) == len(self.gammas) == len(self.fits) == len(self.errors)):
            raise ValueError("sweep columns differ in length")
        if any(b <= a for a, b in zip(self.temperatures, self.temperatures[1:])):
            raise ValueError("temperatures must be strictly increasing")

    @property
    def ok(self) -> bool:
        return all(e is None for e in self.errors)

    def to_dict(self) -> dict:
        return {
            "temperatures": list(self.temperatures),
            "gammas": list(self.gammas),
            "fits": [None if f is None else {
                "gamma": f.gamma, "amplitude": f.amplitude, "window": list(f.window),
                "residual": f.residual, "n_points": f.n_points, "method": f.method,
                "growing": f.growing,
            } for f in self.fits],
            "errors": list(self.errors),
            "config": self.config,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "SweepResult":
        fits = [None if f is None else DecoherenceFit(
            f["gamma"], f["amplitude"], tuple(f["window"]), f["residual"], f["n_points"],
            f["method"], f["growing"]) for f in data["fits"]]
        return cls(list(data["temperatures"]), list(data["gammas"]), fits,
                   list(data["errors"]), dict(data["config"]))
