#!/usr/bin/env python3
"""Measured versus estimated decoherence times across environment occupations.

For each model and nbar the script finds the first crossing of (1 - 1/e) of
the model's plateau on a fine analytic grid and prints it next to the
closed-form estimate, then writes the sweep as CSV.  The ratio column shows
the 1/nbar scaling of the bath model against the 1/sqrt(nbar) scaling of the
single-oscillator models.
"""

import argparse
import math
from pathlib import Path

import numpy as np

from minienv.models import (
    Model,
    ModelParams,
    decoherence_time_estimate,
    entropy_series,
    measured_decoherence_time,
)


def crossing(p: ModelParams, horizon: float, points: int = 8001):
    series = entropy_series(p, np.linspace(0.0, horizon, points))
    return measured_decoherence_time(series)


def run(alpha0: float, nbars: list[float], out: Path) -> None:
    rows = ["model,alpha0,nbar,measured,estimate,ratio"]
    print(f"{'model':<10} {'nbar':>7} {'measured':>12} {'estimate':>12} {'ratio':>8}")
    for model in Model:
        for nbar in nbars:
            p = ModelParams(alpha0, nbar, 1.0, model)
            estimate = decoherence_time_estimate(p)
            horizon = 0.05 if math.isinf(estimate) else max(8.0 * estimate, 0.05)
            measured = crossing(p, horizon)
            if measured is None or math.isinf(estimate):
                print(f"{model.value:<10} {nbar:>7g} {'-':>12} {estimate:>12g} {'-':>8}")
                rows.append(f"{model.value},{alpha0:g},{nbar:g},,{estimate:g},")
                continue
            ratio = measured / estimate
            print(f"{model.value:<10} {nbar:>7g} {measured:>12.6f} "
                  f"{estimate:>12.6f} {ratio:>8.3f}")
            rows.append(
                f"{model.value},{alpha0:g},{nbar:g},{measured:.12g},"
                f"{estimate:.12g},{ratio:.12g}"
            )
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text("\n".join(rows) + "\n")
    print(f"wrote {out}")


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--alpha0", type=float, default=5.0)
    ap.add_argument("--nbar", type=str, default="1,2,5,10,25,100",
                    help="comma list of occupations")
    ap.add_argument("--output", type=Path, default=Path("out/decoherence_times.csv"))
    args = ap.parse_args()
    run(args.alpha0, [float(tok) for tok in args.nbar.split(",")], args.output)
