"""Leaves of the sessile foliation through points (a, b) on a vertical line.

Prints u0 for each leaf and the smallest gap between neighbouring leaves on
[0, rmax]; optionally plots them.
"""

import argparse
import sys
from pathlib import Path

import numpy as np

from bandsolve.export import plot_profiles
from bandsolve.ode_core import ModelParams, integrate_ivp
from bandsolve.shooting import solve_foliation


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--a", type=float, default=2.0)
    ap.add_argument("--b", type=float, nargs="+", default=list(np.linspace(-3, 3, 13)))
    ap.add_argument("--kappa", type=float, default=1.0)
    ap.add_argument("--rmax", type=float, default=5.0)
    ap.add_argument("--plot", type=Path)
    args = ap.parse_args(argv)

    bs = sorted(args.b)
    grid = np.linspace(0.0, args.rmax, 401)
    leaves, curves = [], []
    for b in bs:
        u0 = solve_foliation(args.a, b, args.kappa)
        p = integrate_ivp(ModelParams(args.kappa, u0), args.rmax)
        leaves.append(p)
        curves.append(p.u_at(grid))
        print(f"b = {b:8.4f}  u0 = {u0:14.10f}  u(a) - b = {p.u_at(args.a) - b:9.1e}")
    gap = min(float(np.min(hi - lo)) for lo, hi in zip(curves, curves[1:])) if len(curves) > 1 else float("nan")
    print(f"smallest gap between neighbouring leaves on [0, {args.rmax:g}]: {gap:.3e}")
    if args.plot:
        args.plot.parent.mkdir(parents=True, exist_ok=True)
        plot_profiles(leaves, args.plot, labels=[f"b={b:.3g}" for b in bs], title=f"leaves through r={args.a:g}")
        print(f"wrote {args.plot}")
    return 0 if gap > 0 else 1


if __name__ == "__main__":
    sys.exit(main())
