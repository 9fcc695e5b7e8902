"""Replay the capacity bound on the circle family for several slicings and maxima.

    python3 scripts/run_theorem_replay.py --m0 0.9 --steps 2 3 5 8
"""

import argparse
import sys

from lagcap.errors import PreconditionError
from lagcap.scenarios import circle_family, run_theorem_scenario


def main(argv=None) -> int:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--m0", type=float, nargs="+", default=[0.3, 0.9])
    p.add_argument("--steps", type=int, nargs="*", default=[])
    p.add_argument("--d-L", type=float, default=1.0)
    p.add_argument("--verbose", action="store_true")
    args = p.parse_args(argv)
    ok = True
    print(f"{'m0':>6} {'steps':>6} {'verdict':>8}  summary")
    for m0 in args.m0:
        for steps in args.steps or [None]:
            try:
                fam = circle_family(m0, args.d_L, steps)
            except PreconditionError as exc:
                print(f"{m0:>6g} {steps or '-':>6} {'skipped':>8}  {exc}")
                continue
            rep = run_theorem_scenario(fam)
            ok = ok and rep.verdict
            print(f"{m0:>6g} {len(fam.partition) - 1:>6} {'PASS' if rep.verdict else 'FAIL':>8}  {'; '.join(rep.summary)}")
            if args.verbose:
                print(rep.text())
    return 0 if ok else 2


if __name__ == "__main__":
    sys.exit(main())
