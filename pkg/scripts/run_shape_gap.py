#!/usr/bin/env python3
"""Measure how fast the chain shape converges to the continuum shape.

For growing joint counts, compares the rigid-chain centerline against
the continuum centerline of a preset member — at rest and under a few
representative tip loads — and fits the decay order of the largest
point gap.  The gap should shrink like n^-2 (each link is a chord of an
arc, and chord-vs-arc deviation is quadratic in the link length).

    python3 scripts/run_shape_gap.py --preset ctr_inner --out results
"""

import argparse
import math
import sys
from pathlib import Path

import numpy as np

from prbkit.fitting import tip_gap_study
from prbkit.presets import get_preset, preset_names
from prbkit.reporting import write_csv, write_json

DEFAULT_N = (3, 4, 6, 10, 15, 20, 30)


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--preset", choices=preset_names(),
                        default="ctr_inner")
    parser.add_argument("--n", type=int, nargs="+", default=list(DEFAULT_N))
    parser.add_argument("--out", type=Path, default=Path("results"))
    args = parser.parse_args()

    preset = get_preset(args.preset)
    # a light, moderate and strong load from the preset's own grid range
    f_hi = preset.grid.axes[0].hi
    mt_hi = preset.grid.axes[2].hi
    wrenches = [
        (0.1 * f_hi * math.cos(2.0), 0.1 * f_hi * math.sin(2.0), 0.0),
        (0.0, 0.0, 0.5 * mt_hi),
        (f_hi * math.cos(2.0), f_hi * math.sin(2.0), mt_hi),
    ]

    rows = tip_gap_study(preset.spec, wrenches, args.n)

    header = ["n", "rest_gap_mm"] + \
             [f"loaded_gap_{i + 1}_mm" for i in range(len(wrenches))] + \
             [f"deflection_gap_{i + 1}_mm" for i in range(len(wrenches))]
    cells = [[r["n"], r["rest_gap"], *r["loaded_gap"], *r["deflection_gap"]]
             for r in rows]
    args.out.mkdir(parents=True, exist_ok=True)
    csv_path = args.out / f"{preset.name}_shape_gap.csv"
    write_csv(header, cells, csv_path)

    # log-log slope of the rest gap: gap ~ C * n^-order
    n_vals = np.array([r["n"] for r in rows], dtype=float)
    gaps = np.array([r["rest_gap"] for r in rows])
    summary = {"preset": preset.name, "n": [int(v) for v in n_vals]}
    if np.all(gaps > 0.0):
        order = -np.polyfit(np.log(n_vals), np.log(gaps), 1)[0]
        summary["rest_gap_order"] = float(order)
        print(f"rest-shape gap decays like n^-{order:.3f}")
    else:
        print("rest shape coincides with the chain (straight member); "
              "no rest decay order to fit")
    for i in range(len(wrenches)):
        loaded = np.array([r["loaded_gap"][i] for r in rows])
        order = -np.polyfit(np.log(n_vals), np.log(loaded), 1)[0]
        summary[f"loaded_gap_{i + 1}_order"] = float(order)
        print(f"loaded-shape gap (case {i + 1}) decays like n^-{order:.3f}")

    write_json(summary, args.out / f"{preset.name}_shape_gap.json")
    print(f"wrote {csv_path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
