"""descent-kit command line."""
from __future__ import annotations

import argparse
import json
import sys
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from functools import partial

from . import __version__
from .arith import set_cache
from .report import Bounds, cmd_cuboid, cmd_curve_three, cmd_curve_torsion, cmd_curve_two, to_csv, to_json
from .three_descent import EIS_SEARCH_BOUND

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_DEGENERATE = 3
EXIT_INCOMPLETE = 4


def rational(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}")


def positive_int(text: str) -> int:
    n = int(text)
    if n < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return n


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--search-bound", type=positive_int, default=200,
                   help="largest q (2-descent) or |X|, Z (3-descent) tried in witness searches (default 200)")
    p.add_argument("--eis-search-bound", type=positive_int, default=EIS_SEARCH_BOUND,
                   help=f"norm bound for the Eisenstein-side search (default {EIS_SEARCH_BOUND})")
    p.add_argument("--local-bound", type=positive_int, default=None,
                   help="largest prime power used in residue obstructions (default 81 for 2-descent, 121 for 3-descent)")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--cache", metavar="PATH", help="factorization cache file (created if missing)")
    p.add_argument("--timing", action="store_true", help="include wall-clock timing (breaks byte-identical output)")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="descent-kit", description=__doc__)
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("cuboid", help="full report for one (b, c) parameter pair")
    p.add_argument("--b", type=rational, required=True)
    p.add_argument("--c", type=rational, required=True)
    p.add_argument("--family", choices=("p1", "p2"), default="p1")
    _common(p)

    p = sub.add_parser("scan", help="reports over a (b, c) grid, one per line")
    for name in ("b-from", "b-to", "c-from", "c-to"):
        p.add_argument(f"--{name}", type=rational, required=True)
    p.add_argument("--step", type=rational, required=True)
    p.add_argument("--out", required=True, help="output file (JSON lines or CSV)")
    p.add_argument("--family", choices=("p1", "p2"), default="p1")
    p.add_argument("--jobs", type=positive_int, default=1)
    _common(p)

    p = sub.add_parser("curve", help="run an engine on a directly given curve")
    csub = p.add_subparsers(dest="mode", required=True)
    q = csub.add_parser("two", help="2-descent on y^2 = x^3 + a x - c^3 - a c")
    q.add_argument("--a", type=int, required=True)
    q.add_argument("--c", type=int, required=True)
    _common(q)
    q = csub.add_parser("three", help="3-descent on y^2 = x^3 + e^2")
    q.add_argument("--e", type=int, required=True)
    _common(q)
    q = csub.add_parser("torsion", help="torsion subgroup of y^2 = x^3 + a x + b")
    q.add_argument("--a", type=int, required=True)
    q.add_argument("--b", type=int, required=True)
    _common(q)
    return ap


def exit_code(rep: dict) -> int:
    if rep["status"] == "error":
        kind = rep["error"]["type"]
        if kind == "degenerate":
            return EXIT_DEGENERATE
        # the input was fine; the factorization budget was not
        return EXIT_INCOMPLETE if kind == "factorization-incomplete" else EXIT_INVALID
    if rep["status"] == "incomplete":
        return EXIT_INCOMPLETE
    return EXIT_OK


def _bounds(args) -> Bounds:
    return Bounds(args.search_bound, args.local_bound, args.eis_search_bound)


def _emit(rep: dict, fmt: str) -> None:
    sys.stdout.write(to_json(rep) + "\n" if fmt == "json" else to_csv([rep]))


def frange(lo: Fraction, hi: Fraction, step: Fraction) -> list[Fraction]:
    if step <= 0:
        raise ValueError("step must be positive")
    out, x = [], lo
    while x <= hi:
        out.append(x)
        x += step
    return out


def _scan_point(bc, family, bounds, cache, timing):
    if cache:
        set_cache(cache)
    return cmd_cuboid(bc[0], bc[1], family, bounds, timing=timing)


def run_scan(args) -> int:
    try:
        grid = [(b, c) for b in frange(args.b_from, args.b_to, args.step)
                for c in frange(args.c_from, args.c_to, args.step)]
    except ValueError as exc:
        print(f"descent-kit: {exc}", file=sys.stderr)
        return EXIT_INVALID
    work = partial(_scan_point, family=args.family, bounds=_bounds(args), cache=args.cache, timing=args.timing)
    try:
        fh = open(args.out, "w", encoding="ascii", newline="")
    except OSError as exc:
        print(f"descent-kit: cannot write {args.out}: {exc}", file=sys.stderr)
        return EXIT_INVALID
    by_case: Counter = Counter()
    by_rank: Counter = Counter()
    with fh:
        if args.format == "csv":
            fh.write(to_csv([], header=True))
        if args.jobs > 1:
            pool = ProcessPoolExecutor(max_workers=args.jobs)
            reports = pool.map(work, grid, chunksize=4)
        else:
            pool = None
            reports = map(work, grid)
        try:
            # map() yields in grid order, so the file is deterministic for any --jobs
            for rep in reports:
                fh.write(to_json(rep) + "\n" if args.format == "json" else to_csv([rep], header=False))
                if rep["status"] == "error":
                    by_case[rep["error"]["type"]] += 1
                else:
                    by_case[rep["method"]] += 1
                    r = rep["rank"]
                    by_rank[f"{r['lower']}..{r['upper']}"] += 1
        finally:
            if pool is not None:
                pool.shutdown()
    summary = {"points": len(grid), "by_method": dict(by_case), "by_rank": dict(by_rank), "out": args.out}
    print(json.dumps(summary, sort_keys=True))
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.cache:
        set_cache(args.cache)
    bounds = _bounds(args)
    if args.command == "scan":
        return run_scan(args)
    if args.command == "cuboid":
        rep = cmd_cuboid(args.b, args.c, args.family, bounds, timing=args.timing)
    elif args.mode == "two":
        rep = cmd_curve_two(args.a, args.c, bounds, timing=args.timing)
    elif args.mode == "three":
        rep = cmd_curve_three(args.e, bounds, timing=args.timing)
    else:
        rep = cmd_curve_torsion(args.a, args.b, bounds, timing=args.timing)
    _emit(rep, args.format)
    return exit_code(rep)


if __name__ == "__main__":
    sys.exit(main())
