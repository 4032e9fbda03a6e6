#!/usr/bin/env python3
"""Slope estimates along a ray for a few saturated sets, as CSV.

Useful for plotting how the raw slope dips below one on the far side of the
medial axis of a nonconvex set.
"""

import argparse
import csv
import sys

import numpy as np

from orbitconvex.scenarios import parse_action
from orbitconvex.submetry import SaturatedSet, ascending_slope

CASES = {
    "disk": ("O2", lambda a: SaturatedSet.radial(a, 0.0, 1.0), [1.0, 0.0]),
    "circle": ("O2", lambda a: SaturatedSet.radial(a, 1.0, 1.0), [1.0, 0.0]),
    "s3-orbit": ("S3", lambda a: SaturatedSet.fibers(a, [[1.0, 2.0, 3.0]]), [1.0, -1.0, 0.0]),
    "pentagon": ("C5", lambda a: SaturatedSet.fibers(a, [[1.0, 0.0]]), [1.0, 0.0]),
}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--case", choices=sorted(CASES), action="append")
    parser.add_argument("--steps", type=int, default=21)
    parser.add_argument("--span", type=float, default=3.0, help="ray parameter runs over [-span, span]")
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args(argv)

    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["case", "t", "f", "raw_slope", "clamped"])
    for name in args.case or sorted(CASES):
        spec, build, direction = CASES[name]
        S = build(parse_action(spec))
        d = np.asarray(direction, dtype=float)
        d /= np.linalg.norm(d)
        offset = S.fixed_subspace().embed(np.full(S.fixed_subspace().dim, 2.0))
        for t in np.linspace(-args.span, args.span, args.steps):
            x = offset + t * d
            f = S.distance(x)
            if f < 1e-6:
                continue
            est = ascending_slope(S, x, seed=args.seed)
            w.writerow([name, f"{t:.4f}", f"{f:.6f}", f"{est.extrapolated:.6f}", f"{est.clamped:.6f}"])
    return 0


if __name__ == "__main__":
    sys.exit(main())
