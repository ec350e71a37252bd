"""Command-line front end: ``qdq simulate | sweep | oracle-check``."""

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import os
import sys
from pathlib import Path

from . import io
from .config import RunConfig, effective_config, parse_config
from .errors import ConfigError, QdqError
from .runner import oracle_check, simulate, temperature_sweep, trajectory_report

log = logging.getLogger("qdq")

DEFAULT_OUT = "qdq-out"


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="YAML run configuration")
    common.add_argument("--temperature", type=float, help="bath temperature in K")
    common.add_argument("--dt", type=float, help="time step in ps")
    common.add_argument("--kmax", type=int, help="memory length in steps")
    common.add_argument("--out", type=Path, help="output directory (default: $QDQ_OUT_DIR or ./qdq-out)")
    common.add_argument("--threads", type=int, default=1, help="worker processes for sweeps")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="qdq", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("simulate", parents=[common], help="propagate one trajectory")
    sub.add_parser("sweep", parents=[common], help="fit decoherence rates over temperature")
    sub.add_parser("oracle-check", parents=[common], help="run the reference-limit checks")
    return parser


def load_config(args) -> RunConfig:
    text = args.config.read_text() if args.config else ""
    cfg = parse_config(text)
    out = args.out
    if out is None and cfg.output.directory is None:
        out = os.environ.get("QDQ_OUT_DIR", DEFAULT_OUT)
    return cfg.with_overrides(mode=args.command, temperature=args.temperature, dt=args.dt,
                              kmax=args.kmax, out=out)


def run(cfg: RunConfig, threads: int = 1) -> int:
    """Execute ``cfg.mode`` and write its outputs; returns the exit status."""
    out = Path(cfg.output.directory)
    out.mkdir(parents=True, exist_ok=True)
    echo = effective_config(cfg)
    (out / "config.yaml").write_text(
        "# qdq effective configuration\n" + json.dumps(echo, indent=2, sort_keys=True) + "\n")

    if cfg.mode == "simulate":
        traj = simulate(cfg)
        if "csv" in cfg.output.formats:
            (out / "trajectory.csv").write_text(io.trajectory_to_csv(traj, echo))
        if "json" in cfg.output.formats:
            io.write_json(out / "summary.json", {**io.header_payload(echo),
                                                 **trajectory_report(cfg, traj)})
        return 0

    if cfg.mode == "sweep":
        result = temperature_sweep(cfg, threads=threads)
        if "csv" in cfg.output.formats:
            (out / "sweep.csv").write_text(io.sweep_to_csv(result))
        if "json" in cfg.output.formats:
            io.write_json(out / "sweep.json", {**io.header_payload(echo), "result": result.to_dict()})
        for T, err in zip(result.temperatures, result.errors):
            if err:
                log.error("T=%g K failed: %s", T, err)
        return 0 if result.ok else 1

    checks = oracle_check(cfg)
    for c in checks:
        print(c.line())
    io.write_json(out / "oracle_check.json", {**io.header_payload(echo),
                                              "checks": [dataclasses.asdict(c) for c in checks]})
    return 0 if all(c.passed for c in checks) else 1


def _error_record(out_dir, exc: Exception) -> dict:
    record = {"error": type(exc).__name__, "message": str(exc)}
    for attr in ("key", "step"):
        if hasattr(exc, attr):
            record[attr] = getattr(exc, attr)
    print(json.dumps(record), file=sys.stderr)
    if out_dir is not None:
        try:
            Path(out_dir).mkdir(parents=True, exist_ok=True)
            io.write_json(Path(out_dir) / "error.json", record)
        except OSError:
            pass
    return record


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = load_config(args)
    except (ConfigError, OSError) as exc:
        _error_record(args.out, exc)
        return 2
    try:
        return run(cfg, threads=args.threads)
    except QdqError as exc:
        _error_record(cfg.output.directory, exc)
        return 1


if __name__ == "__main__":
    sys.exit(main())
