"""Solve the Young-condition problem on a grid and tabulate heights and estimate slacks.

    python scripts/bvp_table.py --out results/bvp_table.csv
"""

import argparse
import csv
import math
import sys
from pathlib import Path

from bandsolve.bounds import bounds_report, es2_bounds, ua_upper_bound
from bandsolve.shooting import BvpProblem, solve_bvp

FIELDS = ("a", "beta", "kappa", "u0", "u0_lower", "u0_upper", "u_a", "u_a_upper", "young_residual", "min_slack", "passed")


def row(a, beta, kappa):
    s = solve_bvp(BvpProblem(a, beta, kappa))
    rep = bounds_report(s)
    lo, hi = es2_bounds(a, beta, kappa)
    slacks = [r.slack for r in rep.records if r.status != "degenerate"]
    return {
        "a": a,
        "beta": beta,
        "kappa": kappa,
        "u0": s.u0,
        "u0_lower": lo,
        "u0_upper": hi,
        "u_a": s.u_a,
        "u_a_upper": ua_upper_bound(a, beta, kappa),
        "young_residual": s.young_residual,
        "min_slack": min(slacks),
        "passed": rep.passed,
    }


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--a", type=float, nargs="+", default=[0.5, 1.0, 2.0])
    ap.add_argument("--beta", type=float, nargs="+", default=[0.25, 1.0, 2.0])
    ap.add_argument("--kappa", type=float, nargs="+", default=[0.5, 1.0, 2.0])
    ap.add_argument("--out", type=Path)
    args = ap.parse_args(argv)
    if any(k <= 0 for k in args.kappa) or any(b <= 0 for b in args.beta):
        ap.error("the estimates need kappa > 0 and beta > 0")

    rows = [row(a, b, k) for a in args.a for b in args.beta for k in args.kappa]
    print(f"{'a':>5} {'beta':>5} {'kappa':>5} {'u0':>12} {'u0 interval':>25} {'u(a)':>12} {'min slack':>10}")
    for r in rows:
        interval = f"({r['u0_lower']:.5g}, {r['u0_upper']:.5g})"
        print(f"{r['a']:5g} {r['beta']:5g} {r['kappa']:5g} {r['u0']:12.8f} {interval:>25} {r['u_a']:12.8f} {r['min_slack']:10.2e}")
    if args.out:
        args.out.parent.mkdir(parents=True, exist_ok=True)
        with args.out.open("w", newline="") as fh:
            w = csv.DictWriter(fh, FIELDS)
            w.writeheader()
            w.writerows(rows)
        print(f"wrote {args.out}")
    bad = [r for r in rows if not r["passed"] or not math.isfinite(r["u0"])]
    return 1 if bad else 0


if __name__ == "__main__":
    sys.exit(main())
