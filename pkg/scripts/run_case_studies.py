#!/usr/bin/env python3
"""Reproduce the full case-study table set.

Fits every built-in member at every chain size, writes per-member
stiffness/error tables plus fit-report JSONs, runs the 3-segment
partition sweep for the catheter and the length sweep for the CTR tube.
Everything goes through the command-line entry points, so the artifacts
are exactly what a user would get by hand.

    python3 scripts/run_case_studies.py --out results            # ~2 min
    python3 scripts/run_case_studies.py --out results --reduced  # ~15 s
"""

import argparse
import sys
import time
from pathlib import Path

from prbkit.cli import main as prbkit_main

FIXED_PRESETS = ("catheter", "catheter_nonuniform_ei",
                 "ctr_inner", "ctr_variable_curvature")
REDUCED = ("--load-counts", "5,9,5")


def run(argv) -> None:
    code = prbkit_main(list(argv))
    if code != 0:
        raise SystemExit(f"command failed ({code}): prbkit {' '.join(argv)}")


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out", type=Path, default=Path("results"))
    parser.add_argument("--reduced", action="store_true",
                        help="small load grids for a quick smoke pass")
    parser.add_argument("--jobs", type=int, default=1)
    args = parser.parse_args()
    extra = list(REDUCED) if args.reduced else []

    t0 = time.perf_counter()
    for preset in FIXED_PRESETS:
        print(f"--- fit {preset}")
        run(["fit", "--preset", preset, "--jobs", str(args.jobs),
             "--out", str(args.out / preset)] + extra)

    print("--- sweep-segments catheter")
    run(["sweep-segments", "--preset", "catheter",
         "--out", str(args.out / "catheter_segments")] + extra)

    print("--- sweep-length ctr_variable_length")
    run(["sweep-length", "--preset", "ctr_variable_length",
         "--out", str(args.out / "ctr_variable_length")])

    print(f"done in {time.perf_counter() - t0:.1f} s -> {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
