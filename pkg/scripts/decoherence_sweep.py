"""Decoherence rate versus temperature, 40-300 K, for a chosen inter-dot distance.

    python scripts/decoherence_sweep.py --L 10 --count 30 --threads 4
"""

import argparse
import dataclasses
from pathlib import Path

from qdq import io
from qdq.config import GeometryConfig, RunConfig, SweepRange
from qdq.runner import temperature_sweep


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--L", type=float, default=10.0, help="inter-dot distance in nm")
    ap.add_argument("--count", type=int, default=30)
    ap.add_argument("--threads", type=int, default=1)
    ap.add_argument("--out", type=Path, default=Path("results/sweep"))
    args = ap.parse_args()

    cfg = RunConfig(mode="sweep")
    cfg = cfg.replace(
        system=dataclasses.replace(cfg.system, geometry=GeometryConfig(L=args.L)),
        bath=dataclasses.replace(cfg.bath, sweep=SweepRange(40.0, 300.0, args.count)),
    )
    result = temperature_sweep(cfg, threads=args.threads)
    args.out.mkdir(parents=True, exist_ok=True)
    (args.out / f"sweep_L{args.L:g}nm.csv").write_text(io.sweep_to_csv(result))
    for T, g in zip(result.temperatures, result.gammas):
        print(f"{T:7.2f} K  gamma = {g * 1e3:.4f} /ns")


if __name__ == "__main__":
    main()
