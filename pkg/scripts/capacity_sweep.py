"""Sweep the radial capacity lower bound over radii and slope fractions.

    python3 scripts/capacity_sweep.py --radius 0.5 1 2 --fraction 0.5 0.9 0.95 0.99
"""

import argparse
import csv
import sys

from lagcap.dynamics.admissibility import radial_capacity_lower_bound


def main(argv=None) -> int:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--radius", type=float, nargs="+", default=[0.5, 1.0, 2.0])
    p.add_argument("--fraction", type=float, nargs="+", default=[0.5, 0.9, 0.95, 0.99])
    p.add_argument("--grid", type=int, default=32)
    p.add_argument("--csv")
    args = p.parse_args(argv)
    header = ["radius", "fraction", "lower_bound", "upper", "ratio", "admissible"]
    rows = []
    for R in args.radius:
        for f in args.fraction:
            b = radial_capacity_lower_bound(R, f, args.grid)
            rows.append([R, f, f"{b.value:.9g}", f"{b.upper:.9g}", f"{b.value / b.upper:.6f}", b.report.admissible])
    print(" ".join(f"{h:>12}" for h in header))
    for r in rows:
        print(" ".join(f"{str(c):>12}" for c in r))
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            w.writerows(rows)
    return 0 if all(r[-1] for r in rows) else 2


if __name__ == "__main__":
    sys.exit(main())
