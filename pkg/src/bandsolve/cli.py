"""Command-line interface.

Every subcommand prints a JSON document on stdout and a short human summary
on stderr.  Option values are resolved as: command-line flag, then the
environment variable ``BANDSOLVE_<OPTION>`` (e.g. ``BANDSOLVE_KAPPA``), then
the built-in default.

Exit codes: 0 all checks pass, 1 a check failed, 2 usage error, 3 numeric failure.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, replace

import numpy as np

from . import analysis, bounds, export
from .errors import BandsolveError, DomainError, IntegratorError, NoBracketError, PreconditionError
from .ode_core import IntegratorSettings, ModelParams, integrate_ivp, normalize_lambda, shoot
from .shooting import TOL_BVP, BvpProblem, solve_bvp, solve_foliation

EXIT_OK, EXIT_CHECK, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3
ENV_PREFIX = "BANDSOLVE_"


class UsageError(BandsolveError):
    pass


def _opt(parser, name, type=float, default=None, required=False, help=None, **kw):
    env = ENV_PREFIX + name.lstrip("-").replace("-", "_").upper()
    if env in os.environ:
        try:
            default = type(os.environ[env])
        except ValueError:
            raise UsageError(f"bad value for {env}: {os.environ[env]!r}")
        required = False
    parser.add_argument(name, type=type, default=default, required=required, help=help, **kw)


def _ctrl(args) -> IntegratorSettings:
    tol = getattr(args, "tol", None) or 1e-10
    return IntegratorSettings(rtol=tol, atol=tol)


def _params(args) -> tuple[ModelParams, float]:
    raw = ModelParams(args.kappa, args.u0, args.lam)
    return normalize_lambda(raw)


def _emit(payload: dict, summary: list[str]) -> int:
    checks = payload.get("checks", {})
    ok = all(bool(v) for v in checks.values())
    payload["passed"] = ok
    json.dump(payload, sys.stdout, indent=1, sort_keys=True, default=_json_default)
    sys.stdout.write("\n")
    for line in summary:
        print(line, file=sys.stderr)
    print("PASS" if ok else "FAIL: " + ", ".join(k for k, v in checks.items() if not v), file=sys.stderr)
    return EXIT_OK if ok else EXIT_CHECK


def _json_default(o):
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, np.bool_):
        return bool(o)
    raise TypeError(type(o))


# subcommands --------------------------------------------------------------


def cmd_solve_ivp(args) -> int:
    params, shift = _params(args)
    p = integrate_ivp(params, args.rmax, _ctrl(args))
    if args.out:
        export.export_profile(p, args.out, shift=shift)
    ok_bound = bool(np.all(np.abs(p.u) <= abs(params.u0) + p.r + 1e-12))
    payload = {
        "command": "solve-ivp",
        "params": asdict(ModelParams(args.kappa, args.u0, args.lam)),
        "shift": shift,
        "n_samples": len(p),
        "u_end": float(p.u[-1]) - shift,
        "slope_end": float(p.slope[-1]),
        "max_residual": p.max_residual,
        "checks": {"conservation": p.max_residual <= 1e-8, "growth_bound": ok_bound},
    }
    return _emit(payload, [f"u({args.rmax:g}) = {payload['u_end']:.12g}, max first-integral residual {p.max_residual:.2e}"])


def _bvp_payload(res, shift=0.0) -> dict:
    prob = res.problem
    k = prob.kappa
    cf = math.sqrt(res.u0**2 + 2.0 / k * (math.cosh(prob.beta) - 1.0)) if res.u0 or prob.beta else 0.0
    cf = math.copysign(cf, res.u_a) if res.u_a else cf
    return {
        "problem": asdict(prob),
        "u0": res.u0 - shift,
        "u_a": res.u_a - shift,
        "young_residual": res.young_residual,
        "bracket": list(res.bracket),
        "iterations": res.iterations,
        "branch": res.branch.value,
        "closed_form_u_a": cf - shift,
        "checks": {
            "young": abs(res.young_residual) <= TOL_BVP,
            "closed_form_u_a": abs(res.u_a - cf) <= 1e-7 * max(1.0, abs(cf)),
        },
    }


def cmd_solve_bvp(args) -> int:
    prob = BvpProblem(args.a, args.beta, args.kappa)
    res = solve_bvp(prob, ctrl=_ctrl(args))
    shift = args.lam / args.kappa
    if args.out:
        export.export_profile(res.profile, args.out, shift=shift)
    payload = {"command": "solve-bvp", **_bvp_payload(res, shift)}
    return _emit(payload, [f"u0 = {payload['u0']:.12g} ({res.branch.value}), u'(a) - tanh(beta) = {res.young_residual:.2e}"])


def cmd_foliate(args) -> int:
    ctrl = _ctrl(args)
    u0 = solve_foliation(args.a, args.b, args.kappa, ctrl)
    b_hat = shoot(args.kappa, u0, args.a, ctrl).u
    payload = {
        "command": "foliate",
        "a": args.a,
        "b": args.b,
        "kappa": args.kappa,
        "u0": u0,
        "u_a": b_hat,
        "checks": {"reproduces_b": abs(b_hat - args.b) <= 1e-8},
    }
    return _emit(payload, [f"leaf through ({args.a:g}, {args.b:g}): u0 = {u0:.12g}"])


def cmd_pendent(args) -> int:
    params, shift = _params(args)
    s = analysis.pendent_summary(params, _ctrl(args))
    d = s.to_dict()
    payload = {"command": "pendent", "shift": shift, **d, "checks": {"structure": d["passed"]}}
    lo1, lo2 = s.zero_bounds
    return _emit(
        payload,
        [
            f"r_o = {s.r_o:.10g} (> {lo2:.6g} > {lo1:.6g}), period = {s.period:.10g}",
            f"max slope = {s.max_slope_at_zero:.10g} (closed form {s.max_slope_formula:.10g})",
        ],
    )


def cmd_bounds(args) -> int:
    prob = BvpProblem(args.a, args.beta, args.kappa)
    note = None
    if args.beta < 0:
        prob = replace(prob, beta=-args.beta)
        note = "beta < 0 solved as the sign reflection of |beta|"
    res = solve_bvp(prob, ctrl=_ctrl(args))
    rep = bounds.bounds_report(res)
    d = rep.to_dict()
    if note:
        d["note"] = note
    payload = {"command": "bounds", **d, "checks": {r.name: r.passed for r in rep.records}}
    lines = [f"{r.name:28s} {r.status:10s} slack={r.slack:.3e}" for r in rep.records]
    return _emit(payload, lines)


def cmd_compare(args) -> int:
    grid = np.linspace(0.0, args.rmax, args.n + 1)[1:]
    ctrl = _ctrl(args)
    if args.mode == "kappa":
        _need(args, "u0", "k1", "k2")
        v = analysis.compare_kappa(args.u0, args.k1, args.k2, grid, ctrl)
    elif args.mode == "u0":
        _need(args, "kappa", "u0", "delta")
        v = analysis.compare_u0(args.kappa, args.u0, args.delta, grid, ctrl)
    else:
        _need(args, "a", "beta", "k1", "k2")
        v = analysis.compare_kappa_bvp(args.a, args.beta, args.k1, args.k2, None, ctrl)
    payload = {"command": "compare", "mode": args.mode, **v.to_dict(), "checks": {"strict": v.passed and v.min_slack > 0}}
    return _emit(payload, [f"{v.relation}: min slack {v.min_slack:.3e}"])


def _need(args, *names):
    missing = [n for n in names if getattr(args, n, None) is None]
    if missing:
        raise UsageError("missing options: " + ", ".join("--" + m.replace("_", "-") for m in missing))


def _source_profile(args):
    """Profile from either (--a, --beta, --kappa) or (--kappa, --u0, --rmax)."""
    ctrl = _ctrl(args)
    if args.a is not None and args.beta is not None:
        res = solve_bvp(BvpProblem(args.a, args.beta, args.kappa), ctrl=ctrl)
        return res.profile, args.lam / args.kappa, res
    _need(args, "u0", "rmax")
    params, shift = _params(args)
    return integrate_ivp(params, args.rmax, ctrl), shift, None


def cmd_export_mesh(args) -> int:
    p, shift, _ = _source_profile(args)
    mesh = export.export_mesh(p, args.out, args.half_width, args.n_rulings, shift, symmetric=not args.half)
    checks = {"rulings_horizontal": mesh.rulings_horizontal()}
    payload = {"command": "export-mesh", "out": args.out, "n_vertices": int(mesh.vertices.shape[0]),
               "n_faces": int(mesh.faces.shape[0]), "checks": checks}
    if args.n_rulings:
        res, h = export.mesh_curvature_residual(mesh, args.kappa, shift)
        payload["curvature_residual"] = res
        payload["h"] = h
    return _emit(payload, [f"wrote {args.out}: {payload['n_vertices']} vertices, {payload['n_faces']} faces"])


def cmd_plot(args) -> int:
    p, shift, res = _source_profile(args)
    overlays, envelope = [], None
    if res is not None and res.u0 != 0 and res.problem.beta > 0:
        prob = res.problem
        if prob.kappa > 0:
            y1 = bounds.lower_hyperbola(prob.kappa, res.u0)
            y2 = bounds.upper_hyperbola_sessile(prob.a, prob.beta, res.u0)
            y3 = bounds.lowered_hyperbola(prob.a, prob.beta, res.u_a)
            overlays = [("y1", y1), ("y2", y2), ("y3", y3)]
            envelope = (y1, y2)
        else:
            overlays = [("y4", bounds.lower_hyperbola(prob.kappa, res.u0))]
    if shift:
        p = replace(p, u=p.u - shift)
    export.plot_profiles([p], args.out, overlays, envelope)
    return _emit({"command": "plot", "out": args.out, "checks": {}}, [f"wrote {args.out}"])


def _sweep_one(job):
    a, beta, kappa, tol = job
    try:
        res = solve_bvp(BvpProblem(a, beta, kappa), ctrl=IntegratorSettings(rtol=tol, atol=tol))
        d = _bvp_payload(res)
        return {"a": a, "beta": beta, "kappa": kappa, "u0": d["u0"], "u_a": d["u_a"],
                "young_residual": d["young_residual"], "branch": d["branch"], "ok": all(d["checks"].values())}
    except BandsolveError as exc:
        return {"a": a, "beta": beta, "kappa": kappa, "error": str(exc), "ok": False}


def cmd_sweep(args) -> int:
    jobs = [(a, b, k, args.tol or 1e-10) for a in args.a for b in args.beta for k in args.kappa]
    if args.workers > 1:
        with ProcessPoolExecutor(args.workers) as ex:
            rows = list(ex.map(_sweep_one, jobs))
    else:
        rows = [_sweep_one(j) for j in jobs]
    if args.out:
        export.atomic_write(args.out, json.dumps(rows, indent=1, sort_keys=True) + "\n")
    payload = {"command": "sweep", "rows": rows, "checks": {"all_solved": all(r["ok"] for r in rows)}}
    return _emit(payload, [f"{sum(r['ok'] for r in rows)}/{len(rows)} problems solved"])


# parser -------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="bandsolve", description="Stationary band solver")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, lam=True):
        _opt(p, "--tol", default=None, help="integrator rtol=atol (default 1e-10)")
        if lam:
            _opt(p, "--lam", default=0.0, help="Laplace offset lambda")

    p = sub.add_parser("solve-ivp", help="integrate u(0)=u0, u'(0)=0")
    _opt(p, "--kappa", required=True)
    _opt(p, "--u0", required=True)
    _opt(p, "--rmax", required=True)
    _opt(p, "--out", type=str)
    common(p)
    p.set_defaults(func=cmd_solve_ivp)

    p = sub.add_parser("solve-bvp", help="Young-condition problem u'(a)=tanh(beta)")
    _opt(p, "--a", required=True)
    _opt(p, "--beta", required=True)
    _opt(p, "--kappa", required=True)
    _opt(p, "--out", type=str)
    common(p)
    p.set_defaults(func=cmd_solve_bvp)

    p = sub.add_parser("foliate", help="leaf of the sessile foliation through (a, b)")
    _opt(p, "--a", required=True)
    _opt(p, "--b", required=True)
    _opt(p, "--kappa", required=True)
    common(p, lam=False)
    p.set_defaults(func=cmd_foliate)

    p = sub.add_parser("pendent", help="zeros, period and slope of a pendent profile")
    _opt(p, "--kappa", required=True)
    _opt(p, "--u0", required=True)
    common(p)
    p.set_defaults(func=cmd_pendent)

    p = sub.add_parser("bounds", help="all size estimates for a solved problem")
    _opt(p, "--a", required=True)
    _opt(p, "--beta", required=True)
    _opt(p, "--kappa", required=True)
    common(p, lam=False)
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("compare", help="monotonicity verdicts")
    p.add_argument("--mode", choices=("kappa", "u0", "kappa-bvp"), required=True)
    for name in ("--u0", "--k1", "--k2", "--kappa", "--delta", "--a", "--beta"):
        _opt(p, name)
    _opt(p, "--rmax", default=3.0)
    _opt(p, "--n", type=int, default=60)
    common(p, lam=False)
    p.set_defaults(func=cmd_compare)

    for name, func, hlp in (
        ("export-mesh", cmd_export_mesh, "write the swept surface as OBJ"),
        ("plot", cmd_plot, "SVG plot of the profile with comparison hyperbolas"),
    ):
        p = sub.add_parser(name, help=hlp)
        _opt(p, "--kappa", required=True)
        for opt in ("--u0", "--rmax", "--a", "--beta"):
            _opt(p, opt)
        _opt(p, "--out", type=str, required=True)
        if name == "export-mesh":
            _opt(p, "--half-width", default=1.0)
            _opt(p, "--n-rulings", type=int, default=None)
            p.add_argument("--half", action="store_true", help="only r >= 0 (no reflection)")
        common(p)
        p.set_defaults(func=func)

    p = sub.add_parser("sweep", help="solve a grid of BVPs, optionally in parallel")
    p.add_argument("--a", type=float, nargs="+", required=True)
    p.add_argument("--beta", type=float, nargs="+", required=True)
    p.add_argument("--kappa", type=float, nargs="+", required=True)
    _opt(p, "--workers", type=int, default=1)
    _opt(p, "--out", type=str)
    _opt(p, "--tol", default=None)
    p.set_defaults(func=cmd_sweep)
    return ap


def main(argv=None) -> int:
    try:
        parser = build_parser()
    except UsageError as exc:
        print(f"bandsolve: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return args.func(args)
    except (UsageError, DomainError, PreconditionError) as exc:
        print(f"bandsolve: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (IntegratorError, NoBracketError, BandsolveError) as exc:
        print(f"bandsolve: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"bandsolve: I/O error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
