#!/usr/bin/env python3
"""Residuals of the coprime-twisted Voronoi summation formula on a grid.

For each (b/d, q, X) cell, evaluates both sides of the identity for the
weight-12 cusp form and prints |LHS - RHS| together with the certified
truncation-tail bound of the dual side.

Example:
    python3 scripts/voronoi_residuals.py --d-max 5 --qs 1 2 3 6 --xs 10 20 40
"""

import argparse
import math
import sys

from momentlab.eigenforms import delta_coefficients
from momentlab.voronoi import VoronoiCase, tail_certificate, voronoi_check


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--d-max", type=int, default=5)
    ap.add_argument("--qs", type=int, nargs="+", default=[1, 2, 3, 6])
    ap.add_argument("--xs", type=float, nargs="+", default=[10.0, 20.0, 40.0])
    ap.add_argument("--n-max", type=int, default=2_200_000)
    args = ap.parse_args()

    form = delta_coefficients(args.n_max)
    worst = 0.0
    print(f"{'b/d':>5} {'q':>3} {'X':>6} {'residual':>12} {'tail bound':>12}")
    for d in range(1, args.d_max + 1):
        for b in range(1, max(d, 2)):
            if math.gcd(b, d) != 1:
                continue
            for q in args.qs:
                for X in args.xs:
                    case = VoronoiCase(b, d, q, X, form)
                    resid = voronoi_check(case)
                    tail = tail_certificate(case)
                    worst = max(worst, resid)
                    print(f"{b}/{d:>3} {q:>3} {X:>6.0f} {resid:>12.3e} {tail:>12.3e}")
    print(f"\nmax residual: {worst:.3e}")
    return 0 if worst <= 1e-6 else 1


if __name__ == "__main__":
    sys.exit(main())
