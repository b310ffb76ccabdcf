#!/usr/bin/env python3
"""Regenerate the five reference linear-entropy tables (CSV plus gnuplot mirror).

Each table samples the three analytic entropy curves on a shared scaled-time
grid at one of the preset (alpha0, nbar) pairs.
"""

import argparse
from pathlib import Path

from minienv.cli import main as cli_main


def run(outdir: Path, points: int, tmax: float) -> None:
    outdir.mkdir(parents=True, exist_ok=True)
    for fid in (1, 2, 3, 4, 5):
        out = outdir / f"figure{fid}.csv"
        code = cli_main([
            "figure", str(fid), "--output", str(out),
            "--points", str(points), "--tmax", str(tmax), "--dat",
        ])
        if code != 0:
            raise SystemExit(code)


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--outdir", type=Path, default=Path("out/figures"))
    ap.add_argument("--points", type=int, default=2000)
    ap.add_argument("--tmax", type=float, default=3.0)
    args = ap.parse_args()
    run(args.outdir, args.points, args.tmax)
