"""Command-line entry point.

Exit codes: 0 when every verdict passes, 2 when a mathematical verdict fails,
1 on malformed input.  Negative numbers in lists need the ``--opt=`` form,
e.g. ``--window=-0.5,0.5``.
"""

from __future__ import annotations

import argparse
import csv
import sys
from pathlib import Path

from .errors import InputError, LagcapError, VerdictFailure

EXIT_OK, EXIT_INPUT, EXIT_VERDICT = 0, 1, 2


def _floats(n: int | None = None):
    def parse(text: str) -> list[float]:
        try:
            vals = [float(v) for v in text.split(",")]
        except ValueError:
            raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")
        if n is not None and len(vals) != n:
            raise argparse.ArgumentTypeError(f"expected {n} comma-separated numbers, got {len(vals)}")
        return vals

    return parse


def _write_csv(out: str | None, name: str, header: list[str], rows) -> None:
    if not out:
        return
    d = Path(out)
    d.mkdir(parents=True, exist_ok=True)
    with open(d / name, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def _print(lines) -> None:
    for ln in lines:
        print(ln)


def cmd_validate(args) -> int:
    from .complex import validate
    from .corpus import load_model

    rep = validate(load_model(args.file))
    _print(rep.lines())
    return EXIT_OK if rep.ok else EXIT_VERDICT


def cmd_homology(args) -> int:
    from .complex import Window, require_valid
    from .corpus import load_model
    from .persistence import window_homology

    cx = require_valid(load_model(args.file))
    h = window_homology(cx, Window(*args.window))
    _print(h.lines())
    _write_csv(args.out, "homology.csv", ["a", "b", "degree", "rank"], h.csv_rows())
    return EXIT_OK


def cmd_barcode(args) -> int:
    from .complex import require_valid
    from .corpus import load_model
    from .persistence import barcode

    cx = require_valid(load_model(args.file))
    bc = barcode(cx, tuple(args.domain) if args.domain else None)
    _print(bc.lines())
    _write_csv(args.out, "barcode.csv", ["birth", "death", "degree"], bc.csv_rows())
    return EXIT_OK


def cmd_triangle(args) -> int:
    from .complex import require_valid
    from .corpus import load_model
    from .persistence import exact_triangle

    cx = require_valid(load_model(args.file))
    rep = exact_triangle(cx, *args.cuts, check=False)
    _print(rep.lines())
    return EXIT_OK if rep.ok else EXIT_VERDICT


def cmd_map(args) -> int:
    from .chainmaps import verify_chain_map
    from .corpus import load_chain_map

    f = load_chain_map(args.mapfile)
    rep = verify_chain_map(f, raise_on_fail=False)
    _print(rep.lines())
    if not rep.ok or not args.after:
        return EXIT_OK if rep.ok else EXIT_VERDICT
    from .chainmaps import verify_factorization
    from .complex import Window

    psi = load_chain_map(args.after)
    c1 = 0.0 - f.shift + 0.0 if args.c1 is None else args.c1
    c2 = psi.shift if args.c2 is None else args.c2
    windows = [Window(*w) for w in args.window] if args.window else []
    if not windows:
        raise ValueError("factorization check needs at least one --window")
    fac = verify_factorization(psi, f, c1, c2, windows)
    _print(fac.lines())
    return EXIT_OK if fac.ok else EXIT_VERDICT


def _integrator(args):
    from .dynamics.flow import IntegratorConfig

    return IntegratorConfig(step=args.step)


def cmd_chord_scan(args) -> int:
    import numpy as np

    from .corpus import load_hamiltonian
    from .dynamics.flow import chord_scan

    model = load_hamiltonian(args.hamfile)
    chords = chord_scan(model, args.tmax, args.grid, _integrator(args))
    moving = sorted((c for c in chords if not c.constant), key=lambda c: (c.return_time, tuple(c.start)))
    print(f"chord scan of {model.name}: {len(chords)} seeds, {len(chords) - len(moving)} constant, "
          f"{len(moving)} nonconstant with T <= {args.tmax:g}")
    rows = []
    for c in moving:
        start = np.round(c.start, 9).tolist()
        print(f"  T = {c.return_time:.10f}  from {start}")
        rows.append([*start, f"{c.return_time:.12g}"])
    n = model.dim // 2
    _write_csv(args.out, "chords.csv", [f"x{i}" for i in range(1, n + 1)] + [f"y{i}" for i in range(1, n + 1)] + ["T"],
               rows)
    return EXIT_OK


def cmd_admissible(args) -> int:
    from .corpus import load_hamiltonian
    from .dynamics.admissibility import check_admissible

    model = load_hamiltonian(args.hamfile)
    rep = check_admissible(model, args.eta, args.grid, _integrator(args))
    _print(rep.lines())
    return EXIT_VERDICT if rep.admissible is False else EXIT_OK


def cmd_capacity(args) -> int:
    from .dynamics.admissibility import radial_capacity_lower_bound

    res = radial_capacity_lower_bound(args.radius, args.fraction, args.grid, _integrator(args))
    _print(res.lines())
    return EXIT_OK if res.report.ok else EXIT_VERDICT


def cmd_scenario(args) -> int:
    from .scenarios import run_named

    ok = True
    for rep in run_named(args.name):
        sys.stdout.write(rep.text())
        if args.out:
            rep.write_artifacts(args.out)
        ok = ok and rep.verdict
    return EXIT_OK if ok else EXIT_VERDICT


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="lagcap", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("validate", help="check the complex axioms")
    s.add_argument("file")
    s.set_defaults(func=cmd_validate)

    s = sub.add_parser("homology", help="window homology HF^(a,b)")
    s.add_argument("file")
    s.add_argument("--window", type=_floats(2), required=True, metavar="A,B")
    s.add_argument("--out")
    s.set_defaults(func=cmd_homology)

    s = sub.add_parser("barcode", help="bars with birth in a fundamental domain")
    s.add_argument("file")
    s.add_argument("--domain", type=_floats(2), metavar="A,B")
    s.add_argument("--out")
    s.set_defaults(func=cmd_barcode)

    s = sub.add_parser("triangle", help="exact triangle at three cuts")
    s.add_argument("file")
    s.add_argument("--cuts", type=_floats(3), required=True, metavar="A,B,C")
    s.set_defaults(func=cmd_triangle)

    s = sub.add_parser("map", help="filtered chain maps")
    msub = s.add_subparsers(dest="action", required=True)
    v = msub.add_parser("verify", help="check d f = f d and the shift budget")
    v.add_argument("mapfile")
    v.add_argument("--after", metavar="PSIFILE", help="also check mapfile o PSIFILE against the inclusion")
    v.add_argument("--c1", type=float, help="default: -(shift of mapfile)")
    v.add_argument("--c2", type=float, help="default: shift of PSIFILE")
    v.add_argument("--window", type=_floats(2), action="append", metavar="A,B")
    v.set_defaults(func=cmd_map)

    for name, func, extra in (("chord-scan", cmd_chord_scan, "tmax"), ("admissible", cmd_admissible, "eta")):
        s = sub.add_parser(name)
        s.add_argument("hamfile")
        if extra == "tmax":
            s.add_argument("--tmax", type=float, required=True)
        else:
            s.add_argument("--eta", type=float, default=0.0)
        s.add_argument("--grid", type=int, default=64)
        s.add_argument("--step", type=float, default=1e-3)
        s.add_argument("--out")
        s.set_defaults(func=func)

    s = sub.add_parser("capacity", help="capacity lower bounds")
    csub = s.add_subparsers(dest="kind", required=True)
    r = csub.add_parser("radial")
    r.add_argument("--radius", type=float, required=True)
    r.add_argument("--fraction", type=float, required=True)
    r.add_argument("--grid", type=int, default=64)
    r.add_argument("--step", type=float, default=1e-3)
    r.set_defaults(func=cmd_capacity)

    s = sub.add_parser("scenario", help="run a bundled scenario (or 'all')")
    s.add_argument("name")
    s.add_argument("--out")
    s.set_defaults(func=cmd_scenario)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        return args.func(args)
    except InputError as exc:
        print(f"input error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except VerdictFailure as exc:
        print(f"verdict failed: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_VERDICT
    except (LagcapError, ValueError, OSError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
