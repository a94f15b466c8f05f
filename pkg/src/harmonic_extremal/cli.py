"""Command-line entry point.

Exit status: 0 success, 1 validation or check failure, 2 usage/parse error.
Complex arguments are written ``re,im``; use ``--a=-0.5,0`` for a leading minus.
"""

from __future__ import annotations

import argparse
import logging
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .convex_domain import Polygon, from_family
from .disc_harmonics import DEFAULT_N, containment_excess
from .domain_io import (
    SpecError,
    fmt,
    load_domain,
    parse_complex,
    write_curve_csv,
    write_report,
    write_svg,
)
from .extremal_solver import SolverError, solve
from .quadratic_family import FamilyParams, boundary_curve, convexity_certificate, schur_cohn

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


def _complex_arg(text):
    try:
        return parse_complex(text)
    except SpecError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


class _Failure(Exception):
    pass


def _load(path):
    try:
        return load_domain(path)
    except SpecError:
        raise
    except ValueError as exc:
        raise _Failure(f"invalid domain: {exc}") from None


def cmd_check_family(args) -> int:
    a, lam = args.a, args.lam
    v = schur_cohn(a, lam)
    print(f"zero_free: {v.zero_free}")
    print(f"margin1: {fmt(v.margin1)}")
    print(f"margin2: {fmt(v.margin2)}")
    if abs(lam) < 1:
        convex, strong, margin = convexity_certificate(a, lam)
    else:
        convex, strong, margin = False, False, v.margin2
    print(f"convex: {convex}")
    print(f"strongly_convex: {strong}")
    ok = (v.zero_free and strong) if args.strict else convex
    print("pass" if ok else "fail")
    return EXIT_OK if ok else EXIT_FAIL


def _emit(D, rep, out: Path, tag: str = ""):
    out.mkdir(parents=True, exist_ok=True)
    n = rep.n
    bound = D.perimeter() / (2 * math.pi)
    data = rep.to_dict()
    data["perimeter_bound"] = bound
    data["domain"] = repr(D)
    write_report(out / "report.json", data)
    # curves in the coordinates of the input domain
    write_curve_csv(out / "boundary.csv", D.boundary_samples(n))
    write_curve_csv(out / "psi_star.csv", rep.psi_star.values + rep.point)
    notes = [f"M = {fmt(rep.M)}", f"Per/2pi = {fmt(bound)}", f"gap = {fmt(rep.duality_gap)}"]
    write_svg(out / "figure.svg", D.boundary_samples(min(n, 4096)), rep.psi_star.values + rep.point,
              rep.point, notes)
    return bound


def _print_report(rep, bound):
    print(f"M: {fmt(rep.M)}")
    print(f"dual a: {fmt(rep.dual.a)}")
    print(f"dual lambda: {fmt(rep.dual.lam)}")
    print(f"lower_bound: {fmt(rep.lower_bound)}")
    print(f"duality_gap: {fmt(rep.duality_gap)}")
    print(f"residuals: {fmt(rep.residual_A0)} {fmt(rep.residual_A1)}")
    print(f"perimeter_bound: {fmt(bound)}")
    print(f"grid: {rep.n}  method: {rep.method}  converged: {rep.converged}")


def _solve(D, point, args):
    try:
        return solve(D, point, n=args.grid, tol=args.tol)
    except SolverError as exc:
        raise _Failure(str(exc)) from None


def cmd_solve(args) -> int:
    D, point = _load(args.domain)
    if args.point is not None:
        point = args.point
    rep = _solve(D, point, args)
    bound = _emit(D, rep, Path(args.out))
    _print_report(rep, bound)
    print(f"outputs: {args.out}")
    return EXIT_OK


def cmd_verify_exceptional(args) -> int:
    try:
        params = FamilyParams(args.a, args.lam, args.c)
    except ValueError as exc:
        raise _Failure(str(exc)) from None
    n = args.grid or DEFAULT_N
    D = from_family(params, max(n, 256))
    rep = solve(D, 0j, n=n, tol=args.tol)
    diam = D.diameter()
    F = boundary_curve(params, n).values
    checks = [
        ("M = c", abs(rep.M - params.c), 1e-3 * params.c),
        ("dual a", abs(rep.dual.a - params.a), 1e-2),
        ("dual lambda", abs(rep.dual.lam - params.lam), 1e-2),
        ("psi* = F on the circle", float(np.abs(rep.psi_star.values - F).max()), 1e-6 * diam),
    ]
    print(f"M: {fmt(rep.M)}  c: {fmt(params.c)}")
    print(f"dual: a={fmt(rep.dual.a)} lambda={fmt(rep.dual.lam)}")
    ok = True
    for name, err, tol in checks:
        good = err <= tol
        ok &= good
        print(f"{'PASS' if good else 'FAIL'} {name}: error {fmt(err)} (tolerance {fmt(tol)})")
    return EXIT_OK if ok else EXIT_FAIL


def cmd_perimeter(args) -> int:
    D, _ = _load(args.domain)
    print(f"cauchy_perimeter: {fmt(D.perimeter())}")
    if isinstance(D, Polygon):
        print(f"edge_sum: {fmt(D.edge_length_sum())}")
    print(f"perimeter_bound: {fmt(D.perimeter() / (2 * math.pi))}")
    return EXIT_OK


def cmd_poisson_check(args) -> int:
    D, point = _load(args.domain)
    if args.point is not None:
        point = args.point
    rep = _solve(D, point, args)
    D0 = D.translate(point) if point != 0 else D
    slack = 1e-6 * D.diameter()
    excess, z, w = containment_excess(rep.psi_star, D0, args.poisson_grid)
    bex = float(np.max(D0.excess(rep.psi_star.values)))
    print(f"M: {fmt(rep.M)}")
    print(f"boundary_excess: {fmt(bex)}")
    print(f"interior_excess: {fmt(excess)} (slack {fmt(slack)})")
    if max(excess, bex) > slack:
        print(f"FAIL worst point z={fmt(z)} value={fmt(w + point)}")
        return EXIT_FAIL
    print("PASS")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="harmext", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=__version__)
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check-family", help="Schur-Cohn and convexity verdict for (a, lambda)")
    p.add_argument("--a", type=_complex_arg, required=True)
    p.add_argument("--lambda", dest="lam", type=_complex_arg, required=True)
    p.add_argument("--strict", action="store_true", help="require strict zero-freeness and strong convexity")
    p.set_defaults(func=cmd_check_family)

    def solver_flags(p):
        p.add_argument("--grid", type=int, default=None, help=f"circle grid size (default {DEFAULT_N}, auto-refined)")
        p.add_argument("--tol", type=float, default=1e-8)

    p = sub.add_parser("solve", help="compute M_D(p) and write report, curves and figure")
    p.add_argument("--domain", required=True)
    p.add_argument("--point", type=_complex_arg, default=None)
    p.add_argument("--out", default="out")
    solver_flags(p)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("verify-exceptional", help="check that a family member attains M = c")
    p.add_argument("--a", type=_complex_arg, required=True)
    p.add_argument("--lambda", dest="lam", type=_complex_arg, required=True)
    p.add_argument("--c", type=float, required=True)
    solver_flags(p)
    p.set_defaults(func=cmd_verify_exceptional)

    p = sub.add_parser("perimeter", help="Cauchy perimeter of a domain")
    p.add_argument("--domain", required=True)
    p.set_defaults(func=cmd_perimeter)

    p = sub.add_parser("poisson-check", help="maximum-principle containment of the extremal")
    p.add_argument("--domain", required=True)
    p.add_argument("--point", type=_complex_arg, default=None)
    p.add_argument("--poisson-grid", type=int, default=64)
    solver_flags(p)
    p.set_defaults(func=cmd_poisson_check)
    return ap


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.ERROR,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except SpecError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except _Failure as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
