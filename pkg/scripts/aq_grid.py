#!/usr/bin/env python3
"""Empirical bound ratios for the twisted shifted convolution A_q.

For each modulus q and aspect-ratio choice (M, N) ~ scale * sqrt(q), the
brute-force value of A_q is compared against the four-term theoretical bound
(with the epsilon factor instantiated as (log q)^2).  Ratios are reported,
never asserted: the implied constant in the theorem is unknowable.

Example:
    python3 scripts/aq_grid.py --qs 101 199 401 1009 --out aq_grid.csv
"""

import argparse
import sys

from momentlab.eigenforms import delta_coefficients
from momentlab.expsums import aq_grid_report


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--qs", type=int, nargs="+", default=[101, 199, 401, 1009])
    ap.add_argument("--scale", type=float, default=10.0)
    ap.add_argument("--out", default=None)
    args = ap.parse_args()

    n_need = int(8 * args.scale * max(args.qs) ** 0.5) + 10
    form = delta_coefficients(max(n_need, 10_000))
    rows = aq_grid_report(form, args.qs, scale=args.scale, csv_path=args.out)
    print(f"{'q':>6} {'M':>10} {'N':>10} {'value':>14} {'bound':>12} {'ratio':>8}")
    for r in rows:
        print(f"{r['q']:>6} {r['M']:>10.1f} {r['N']:>10.1f} "
              f"{r['value']:>14.5e} {r['bound']:>12.4e} {r['ratio']:>8.5f}")
    worst = max(r["ratio"] for r in rows)
    print(f"\nmax ratio: {worst:.5f} over {len(rows)} cells")
    return 0


if __name__ == "__main__":
    sys.exit(main())
