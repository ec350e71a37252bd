"""CSV and JSON layouts for trajectories and sweep tables.

Trajectory CSV: two ``#`` provenance lines (package/format version, then the
effective configuration as one-line JSON), a header row, and one row per
stored step: ``t_ps`` followed by real/imaginary pairs of every density
matrix element in row-major basis order. Floats use 17 significant digits.

Sweep CSV: the same provenance lines, then ``temperature_K, gamma_per_ps,
gamma_per_ns, residual, fit_window_start_ps, fit_window_end_ps``.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from . import FORMAT_VERSION, __version__
from .analysis import SweepResult
from .engine import Trajectory
from .model import basis_labels


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def provenance_lines(config: dict) -> list[str]:
    return [
        f"# qdq {__version__} format {FORMAT_VERSION}",
        "# config " + json.dumps(config, sort_keys=True, separators=(",", ":")),
    ]


def trajectory_header(dim: int) -> list[str]:
    n = int(round(np.log2(dim)))
    labels = basis_labels(n) if 2 ** n == dim else [str(i) for i in range(dim)]
    cols = ["t_ps"]
    for a in labels:
        for b in labels:
            cols += [f"re_{a}_{b}", f"im_{a}_{b}"]
    return cols


def trajectory_to_csv(traj: Trajectory, config: dict) -> str:
    d = traj.dim
    lines = provenance_lines(config) + [",".join(trajectory_header(d))]
    for t, rho in zip(traj.times, traj.states):
        flat = rho.reshape(-1)
        row = [_fmt(t)]
        for z in flat:
            row += [_fmt(z.real), _fmt(z.imag)]
        lines.append(",".join(row))
    return "\n".join(lines) + "\n"


def trajectory_from_csv(text: str) -> tuple[Trajectory, dict]:
    config = {}
    rows = []
    for line in text.splitlines():
        if line.startswith("# config "):
            config = json.loads(line[len("# config "):])
        elif line.startswith("#") or line.startswith("t_ps") or not line.strip():
            continue
        else:
            rows.append([float(x) for x in line.split(",")])
    arr = np.array(rows)
    n_el = (arr.shape[1] - 1) // 2
    d = int(round(np.sqrt(n_el)))
    z = arr[:, 1::2] + 1j * arr[:, 2::2]
    return Trajectory(arr[:, 0], z.reshape(-1, d, d)), config


SWEEP_COLUMNS = ["temperature_K", "gamma_per_ps", "gamma_per_ns", "residual",
                 "fit_window_start_ps", "fit_window_end_ps"]


def sweep_to_csv(result: SweepResult) -> str:
    lines = provenance_lines(result.config) + [",".join(SWEEP_COLUMNS)]
    for T, fit in zip(result.temperatures, result.fits):
        if fit is None:
            nan = "nan"
            lines.append(",".join([_fmt(T), nan, nan, nan, nan, nan]))
        else:
            lines.append(",".join(_fmt(x) for x in (
                T, fit.gamma, fit.gamma_per_ns, fit.residual, fit.window[0], fit.window[1])))
    return "\n".join(lines) + "\n"


def write_json(path: Path, payload: dict) -> None:
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def header_payload(config: dict) -> dict:
    return {"package": "qdq", "version": __version__, "format_version": FORMAT_VERSION,
            "config": config}
