"""Run configuration: YAML schema, defaults, validation, and echo.

Defaults reproduce the reference configuration: a resonantly driven pair in
the rotating frame with K = 0.24 /ps, point-dipole coupling from
mu = 79 D, eps = 10, L = 7.5 nm, the GaAs acoustic-phonon bath
(alpha = 0.027 pi ps^2, omega_c = 2.2 /ps) at 77 K, dt = 1 ps, kmax = 3.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np
import yaml

from .bath import SpectralDensityParams
from .errors import ConfigError
from .model import DipoleGeometry, ExcitonNetworkParams, dipole_coupling

MODES = ("simulate", "sweep", "oracle-check")
FRAMES = ("lab", "rotating-wave")
INITIAL_STATES = ("bright-pair", "equal-superposition")
REDUCTIONS = ("re", "im", "abs")
FORMATS = ("csv", "json")


@dataclass(frozen=True)
class GeometryConfig:
    mu: float = 79.0
    epsilon: float = 10.0
    L: float = 7.5


@dataclass(frozen=True)
class SystemConfig:
    n_dots: int = 2
    frame: str = "rotating-wave"
    delta: float | None = None
    K: float = 0.24
    omega_L: float | None = None
    J: float | None = None
    geometry: GeometryConfig | None = GeometryConfig()
    initial: str = "bright-pair"


@dataclass(frozen=True)
class SweepRange:
    t_min: float = 40.0
    t_max: float = 300.0
    count: int = 30

    def temperatures(self) -> list[float]:
        return [float(x) for x in np.linspace(self.t_min, self.t_max, self.count)]


@dataclass(frozen=True)
class BathConfig:
    alpha: float = 0.027 * math.pi
    omega_c: float = 2.2
    temperature: float = 77.0
    sweep: SweepRange = SweepRange()


@dataclass(frozen=True)
class NumericsConfig:
    dt: float = 1.0
    kmax: int = 3
    n_steps: int = 200
    path_filter: float | None = None
    stride: int = 1


@dataclass(frozen=True)
class AnalysisConfig:
    element: tuple[int, int] = (1, 2)
    reduction: str = "re"
    fit_window: tuple[float, float] = (0.0, 200.0)
    smoothing: float = 10.0


@dataclass(frozen=True)
class OutputConfig:
    directory: str | None = None
    formats: tuple[str, ...] = ("csv", "json")


@dataclass(frozen=True)
class RunConfig:
    mode: str = "simulate"
    system: SystemConfig = SystemConfig()
    bath: BathConfig = BathConfig()
    numerics: NumericsConfig = NumericsConfig()
    analysis: AnalysisConfig = AnalysisConfig()
    output: OutputConfig = OutputConfig()

    # -- derived objects -------------------------------------------------
    @property
    def coupling_J(self) -> float:
        s = self.system
        if s.J is not None:
            return s.J
        g = s.geometry
        return dipole_coupling(DipoleGeometry(g.mu, g.epsilon, g.L))

    def network(self) -> ExcitonNetworkParams:
        s = self.system
        n = s.n_dots
        J = np.zeros((n, n))
        if n >= 2:
            # nearest-neighbour chain with uniform coupling
            for i in range(n - 1):
                J[i, i + 1] = J[i + 1, i] = self.coupling_J
        delta = s.delta if s.delta is not None else 0.0
        omega_L = s.omega_L if s.omega_L is not None else delta
        return ExcitonNetworkParams(n, (delta,) * n, s.K, J, omega_L, s.frame)

    def spectral(self) -> SpectralDensityParams:
        return SpectralDensityParams(self.bath.alpha, self.bath.omega_c)

    def replace(self, **sections) -> "RunConfig":
        return dataclasses.replace(self, **sections)

    def with_overrides(self, *, mode=None, temperature=None, dt=None, kmax=None,
                       out=None) -> "RunConfig":
        cfg = self
        if mode is not None:
            cfg = dataclasses.replace(cfg, mode=mode)
        if temperature is not None:
            cfg = dataclasses.replace(cfg, bath=dataclasses.replace(cfg.bath, temperature=float(temperature)))
        num = {}
        if dt is not None:
            num["dt"] = float(dt)
        if kmax is not None:
            num["kmax"] = int(kmax)
        if num:
            cfg = dataclasses.replace(cfg, numerics=dataclasses.replace(cfg.numerics, **num))
        if out is not None:
            cfg = dataclasses.replace(cfg, output=dataclasses.replace(cfg.output, directory=str(out)))
        validate(cfg)
        return cfg

    def to_dict(self) -> dict:
        return _to_plain(dataclasses.asdict(self))


def _to_plain(obj):
    if isinstance(obj, dict):
        return {k: _to_plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_to_plain(v) for v in obj]
    return obj


# -- parsing -----------------------------------------------------------------

def _number(key, value, *, integer=False, allow_none=False):
    if value is None and allow_none:
        return None
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(key, f"expected a number, got {value!r}")
    if integer:
        if isinstance(value, float) and not value.is_integer():
            raise ConfigError(key, f"expected an integer, got {value!r}")
        return int(value)
    if not math.isfinite(value):
        raise ConfigError(key, "must be finite")
    return float(value)


def _section(cls, data, prefix, converters):
    if data is None:
        return cls()
    if not isinstance(data, dict):
        raise ConfigError(prefix, "expected a mapping")
    names = {f.name for f in dataclasses.fields(cls)}
    for key in data:
        if key not in names:
            raise ConfigError(f"{prefix}.{key}", "unknown key")
    kwargs = {}
    for key, value in data.items():
        conv = converters.get(key)
        kwargs[key] = conv(f"{prefix}.{key}", value) if conv else value
    return cls(**kwargs)


def _choice(options):
    def conv(key, value):
        if value not in options:
            raise ConfigError(key, f"must be one of {list(options)}, got {value!r}")
        return value
    return conv


def _pair(kind):
    def conv(key, value):
        if not isinstance(value, (list, tuple)) or len(value) != 2:
            raise ConfigError(key, "expected a two-element list")
        return tuple(_number(key, v, integer=(kind is int)) for v in value)
    return conv


def _formats(key, value):
    if not isinstance(value, (list, tuple)) or not value:
        raise ConfigError(key, "expected a non-empty list")
    for v in value:
        _choice(FORMATS)(key, v)
    return tuple(value)


def from_dict(data: dict | None) -> RunConfig:
    data = dict(data or {})
    # the echo carries derived values for readers; they are recomputed, not trusted
    derived = data.pop("derived", None)
    if derived is not None and not isinstance(derived, dict):
        raise ConfigError("derived", "expected a mapping")
    for key in data:
        if key not in {f.name for f in dataclasses.fields(RunConfig)}:
            raise ConfigError(key, "unknown key")

    num = lambda k, v: _number(k, v)  # noqa: E731
    num_or_none = lambda k, v: _number(k, v, allow_none=True)  # noqa: E731
    integer = lambda k, v: _number(k, v, integer=True)  # noqa: E731

    sys_raw = data.get("system") or {}
    if not isinstance(sys_raw, dict):
        raise ConfigError("system", "expected a mapping")
    has_J = sys_raw.get("J") is not None
    has_geom = sys_raw.get("geometry") is not None
    if has_J and has_geom:
        raise ConfigError("system", "give either J or geometry, not both")
    system = _section(SystemConfig, sys_raw, "system", {
        "n_dots": integer, "frame": _choice(FRAMES), "delta": num_or_none, "K": num,
        "omega_L": num_or_none, "J": num_or_none, "initial": _choice(INITIAL_STATES),
        "geometry": lambda k, v: None if v is None else _section(
            GeometryConfig, v, k, {"mu": num, "epsilon": num, "L": num}),
    })
    if has_J:
        system = dataclasses.replace(system, geometry=None)
    elif not has_geom:
        system = dataclasses.replace(system, geometry=GeometryConfig())

    bath = _section(BathConfig, data.get("bath"), "bath", {
        "alpha": num, "omega_c": num, "temperature": num,
        "sweep": lambda k, v: _section(SweepRange, v, k,
                                       {"t_min": num, "t_max": num, "count": integer}),
    })
    numerics = _section(NumericsConfig, data.get("numerics"), "numerics", {
        "dt": num, "kmax": integer, "n_steps": integer, "path_filter": num_or_none,
        "stride": integer,
    })
    analysis = _section(AnalysisConfig, data.get("analysis"), "analysis", {
        "element": _pair(int), "reduction": _choice(REDUCTIONS),
        "fit_window": _pair(float), "smoothing": num,
    })
    output = _section(OutputConfig, data.get("output"), "output", {
        "directory": lambda k, v: None if v is None else str(v), "formats": _formats,
    })
    mode = _choice(MODES)("mode", data.get("mode", "simulate"))
    cfg = RunConfig(mode, system, bath, numerics, analysis, output)
    validate(cfg)
    return cfg


def validate(cfg: RunConfig) -> None:
    s, b, n, a = cfg.system, cfg.bath, cfg.numerics, cfg.analysis
    if s.n_dots < 1:
        raise ConfigError("system.n_dots", "must be >= 1")
    if s.frame == "rotating-wave" and s.n_dots != 2:
        raise ConfigError("system.frame", "rotating-wave frame needs n_dots = 2")
    if s.frame == "lab" and (s.delta is None or s.delta <= 0):
        raise ConfigError("system.delta", "lab frame needs a positive gap")
    if s.frame == "lab" and s.K != 0:
        raise ConfigError("system.K", "driven lab-frame propagation is not supported; use rotating-wave")
    if s.K < 0:
        raise ConfigError("system.K", "must be >= 0")
    if (s.J is None) == (s.geometry is None):
        raise ConfigError("system", "exactly one of J or geometry is required")
    if s.geometry is not None:
        g = s.geometry
        if g.mu < 0 or g.epsilon <= 0 or g.L <= 0:
            raise ConfigError("system.geometry", "need mu >= 0, epsilon > 0, L > 0")
    if s.initial == "bright-pair" and s.n_dots != 2:
        raise ConfigError("system.initial", "bright-pair needs n_dots = 2")
    if b.alpha < 0:
        raise ConfigError("bath.alpha", "must be >= 0")
    if b.omega_c <= 0:
        raise ConfigError("bath.omega_c", "must be > 0")
    if b.temperature <= 0:
        raise ConfigError("bath.temperature", "must be > 0")
    sw = b.sweep
    if sw.count < 1 or sw.t_min <= 0 or (sw.count > 1 and sw.t_max <= sw.t_min):
        raise ConfigError("bath.sweep", "need count >= 1 and 0 < t_min < t_max")
    if n.dt <= 0:
        raise ConfigError("numerics.dt", "must be > 0")
    if n.kmax < 0:
        raise ConfigError("numerics.kmax", "must be >= 0")
    if n.n_steps < 1:
        raise ConfigError("numerics.n_steps", "must be >= 1")
    if n.stride < 1:
        raise ConfigError("numerics.stride", "must be >= 1")
    if n.path_filter is not None and n.path_filter < 0:
        raise ConfigError("numerics.path_filter", "must be >= 0")
    d = 2 ** s.n_dots
    if not all(0 <= i < d for i in a.element):
        raise ConfigError("analysis.element", f"indices must lie in [0, {d})")
    if a.fit_window[1] <= a.fit_window[0]:
        raise ConfigError("analysis.fit_window", "end must exceed start")
    if a.smoothing < 0:
        raise ConfigError("analysis.smoothing", "must be >= 0")


def parse_config(text: str) -> RunConfig:
    """Parse a YAML document; an empty document gives the default configuration."""
    try:
        data = yaml.safe_load(text) if text.strip() else {}
    except yaml.YAMLError as exc:
        raise ConfigError("<document>", f"not valid YAML: {exc}") from exc
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ConfigError("<document>", "top level must be a mapping")
    return from_dict(data)


def effective_config(cfg: RunConfig) -> dict[str, Any]:
    """Plain-dict echo of ``cfg`` plus derived quantities; reparses to ``cfg``."""
    out = cfg.to_dict()
    out["derived"] = {"J": cfg.coupling_J}
    return out


def dump_config(cfg: RunConfig) -> str:
    return yaml.safe_dump(effective_config(cfg), sort_keys=False)
