"""Command-line surface: moment evaluation, verification suites, and exact
exponent queries.

Exit codes: 0 success, 1 configuration error, 2 per-item failures,
3 verification-suite failure.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from fractions import Fraction

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_ITEM = 2
EXIT_SUITE = 3


def _fmt(x: float) -> str:
    return f"{x:.12g}"


def _load_form(selector: str, n_max: int):
    from .eigenforms import delta_coefficients, ingest_coefficients

    if selector.startswith("builtin:"):
        name = selector.split(":", 1)[1]
        if name != "delta":
            raise ValueError(f"unknown builtin form {name!r}")
        return delta_coefficients(n_max)
    if selector.startswith("file:"):
        return ingest_coefficients(selector.split(":", 1)[1])
    raise ValueError("form selector must be builtin:<name> or file:<path>")


def _parse_range(text: str) -> tuple[int, int]:
    lo, _, hi = text.partition(":")
    return int(lo), int(hi)


def cmd_moment(args) -> int:
    from .lfunctions import triple_weight
    from .moments import MomentQuery, brute_moment, main_term, sweep

    try:
        if args.q_range:
            q_lo, q_hi = _parse_range(args.q_range)
        elif args.q:
            q_lo = q_hi = args.q
        else:
            print("error: --q or --q-range required", file=sys.stderr)
            return EXIT_CONFIG
        x_need = None
        form = _load_form(args.form, 10)
        x_need = int(math.ceil(max(triple_weight(form, 0).cutoff(args.tol),
                                   triple_weight(form, 1).cutoff(args.tol))
                               * q_hi * q_hi))
        form = _load_form(args.form, max(x_need, 450_000))
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    out = open(args.out, "w") if args.out else sys.stdout
    try:
        if args.sweep:
            summary = sweep(form, q_lo, q_hi, args.a, args.b, v_tol=args.tol,
                            csv_path=args.out or None,
                            jsonl_path=(args.out + ".jsonl") if args.out else None)
            info = dict(winner=summary.winner,
                        median_dev_theorem=summary.median_dev_theorem,
                        median_dev_corollary=summary.median_dev_corollary,
                        error_exponent_fit=summary.error_exponent_fit,
                        rows=len(summary.rows))
            print(json.dumps(info, sort_keys=True))
            return EXIT_OK
        failures = 0
        print("q,a,b,moment,m_even,m_odd,main_theorem,ratio_theorem,chars_used",
              file=out)
        for q in range(q_lo, q_hi + 1):
            try:
                query = MomentQuery(q, args.a, args.b)
            except ValueError as exc:
                if q_lo == q_hi:
                    print(f"error: {exc}", file=sys.stderr)
                    return EXIT_CONFIG
                continue
            try:
                rep = brute_moment(form, query, v_tol=args.tol)
                mt = main_term(form, query)
                row = [q, args.a, args.b, _fmt(rep.moment),
                       _fmt(complex(rep.m_even).real), _fmt(complex(rep.m_odd).real),
                       _fmt(mt.value_theorem), _fmt(rep.moment / mt.value_theorem),
                       rep.chars_used]
                print(",".join(str(c) for c in row), file=out)
            except (ArithmeticError, IndexError) as exc:
                failures += 1
                print(f"item q={q} failed: {exc}", file=sys.stderr)
        return EXIT_ITEM if failures else EXIT_OK
    finally:
        if out is not sys.stdout:
            out.close()


def _suite_orthogonality(args) -> dict:
    from .characters import enumerated_orthogonality, orthogonality_sum

    q_max = args.q_max or 60
    worst = 0.0
    for q in range(3, q_max + 1):
        if q % 4 == 2:
            continue
        for m, n in ((1, 1), (2, 3), (1, q - 1), (5, 7)):
            if math.gcd(m * n, q) != 1:
                continue
            for sigma in (1, -1):
                lhs = enumerated_orthogonality(q, m, n, sigma)
                rhs = float(orthogonality_sum(q, m, n, sigma))
                worst = max(worst, abs(lhs - rhs))
    return dict(suite="orthogonality", q_max=q_max, max_residual=worst,
                passed=bool(worst <= 1e-9))


def _suite_hecke(args) -> dict:
    from .eigenforms import delta_coefficients, hecke_violations

    n = args.q_max or 10_000
    bad = hecke_violations(delta_coefficients(n), n)
    return dict(suite="hecke", n_max=n, violations=bad, passed=bad == 0)


def _suite_weil(args) -> dict:
    from .expsums import weil_certify

    rep = weil_certify(args.c_max or 500)
    return dict(suite="weil", c_max=rep.c_max, max_ratio=rep.max_ratio,
                passed=bool(rep.max_ratio <= 1.0 + 1e-9))


def _suite_afe(args) -> dict:
    from .characters import build_group
    from .eigenforms import delta_coefficients
    from .lfunctions import (afe_triple_product, conjugate_index,
                             dirichlet_L_half, twisted_L_half)

    form = delta_coefficients(40_000)
    worst = 0.0
    for q in (5, 7, 13):
        group = build_group(q)
        for i in group.primitive_indices(parity=1):
            triple = afe_triple_product(group, i, form)
            prod = (twisted_L_half(group, i, form)
                    * dirichlet_L_half(group, conjugate_index(group, i)) ** 2)
            worst = max(worst, abs(triple - prod) / abs(triple))
    return dict(suite="afe", max_rel_residual=worst, passed=bool(worst <= 1e-6))


def _suite_voronoi(args) -> dict:
    from .eigenforms import delta_coefficients
    from .voronoi import VoronoiCase, voronoi_check

    form = delta_coefficients(2_200_000)
    worst = 0.0
    cells = []
    for d in (1, 2, 3, 4, 5):
        b = 1 if d == 1 else d - 1
        for q in (1, 2, 3, 6):
            for X in (10.0, 20.0, 40.0):
                resid = voronoi_check(VoronoiCase(b, d, q, X, form))
                worst = max(worst, resid)
                cells.append(dict(b=b, d=d, q=q, X=X, residual=resid))
    return dict(suite="voronoi", cells=len(cells), max_residual=worst,
                passed=bool(worst <= 1e-6))


_SUITES = dict(orthogonality=_suite_orthogonality, hecke=_suite_hecke,
               weil=_suite_weil, afe=_suite_afe, voronoi=_suite_voronoi)


def cmd_verify(args) -> int:
    if args.suite not in _SUITES:
        print(f"error: unknown suite {args.suite!r}; have {sorted(_SUITES)}",
              file=sys.stderr)
        return EXIT_CONFIG
    report = _SUITES[args.suite](args)
    print(json.dumps(report, sort_keys=True, default=float))
    status = "PASS" if report["passed"] else "FAIL"
    print(f"{args.suite}: {status}", file=sys.stderr)
    return EXIT_OK if report["passed"] else EXIT_SUITE


def cmd_exponent(args) -> int:
    from .moments import error_exponent

    try:
        theta = Fraction(args.theta)
        beta = Fraction(args.beta)
        budget = error_exponent(theta=theta, beta=beta)
    except (ValueError, ZeroDivisionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    print(json.dumps(dict(theta=str(budget.theta), beta=str(budget.beta),
                          balanced=str(budget.balanced),
                          unbalanced=str(budget.unbalanced),
                          eta=str(budget.eta)), sort_keys=True))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="momentlab",
                                description="numerical laboratory for mixed "
                                            "moments of twisted L-functions")
    p.add_argument("--cache-dir", help="override coefficient/cache directory")
    sub = p.add_subparsers(dest="command", required=True)

    pm = sub.add_parser("moment", help="evaluate the mixed moment")
    pm.add_argument("--q", type=int)
    pm.add_argument("--q-range", help="lo:hi inclusive")
    pm.add_argument("--a", type=int, default=1)
    pm.add_argument("--b", type=int, default=1)
    pm.add_argument("--form", default="builtin:delta")
    pm.add_argument("--tol", type=float, default=1e-9)
    pm.add_argument("--out")
    pm.add_argument("--jobs", type=int, default=1)
    pm.add_argument("--sweep", action="store_true")
    pm.set_defaults(func=cmd_moment)

    pv = sub.add_parser("verify", help="run a verification suite")
    pv.add_argument("suite", help="orthogonality|hecke|weil|afe|voronoi")
    pv.add_argument("--q-max", type=int)
    pv.add_argument("--c-max", type=int)
    pv.set_defaults(func=cmd_verify)

    pe = sub.add_parser("exponent", help="exact rational error exponents")
    pe.add_argument("--theta", default="0")
    pe.add_argument("--beta", default="0")
    pe.set_defaults(func=cmd_exponent)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.cache_dir:
        os.environ["MOMENTLAB_CACHE_DIR"] = args.cache_dir
    try:
        return args.func(args)
    except KeyboardInterrupt:
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
