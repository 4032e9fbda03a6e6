#!/usr/bin/env python3
"""Run every registered scenario with default settings and print a status table."""

import argparse
import sys
import time

from orbitconvex.config import DEFAULT_SEED
from orbitconvex.scenarios import SCENARIOS, run_scenario


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seed", type=int, default=DEFAULT_SEED)
    parser.add_argument("--output-dir", default="out")
    parser.add_argument("--jobs", type=int, default=1)
    parser.add_argument("--only", nargs="*", choices=sorted(SCENARIOS))
    args = parser.parse_args(argv)

    failed = 0
    for name in args.only or SCENARIOS:
        t0 = time.perf_counter()
        rep = run_scenario(name, seed=args.seed, output_dir=args.output_dir, jobs=args.jobs)
        dt = time.perf_counter() - t0
        failed += not rep.passed
        bad = ",".join(rep.failing_metrics())
        print(f"{name:24s} {rep.status:12s} {rep.verdict:36s} {dt:7.1f}s {bad}")
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
