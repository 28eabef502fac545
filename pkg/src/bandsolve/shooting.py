"""Shooting on the initial height u0 for the Young-condition and foliation problems."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace
from typing import Callable, Sequence

from .errors import BandsolveError, DomainError, NoBracketError, PreconditionError
from .ode_core import (
    DEFAULT_CTRL,
    IntegratorSettings,
    ModelParams,
    Profile,
    integrate_ivp,
    reflect_sign,
    shoot,
)

TOL_BVP = 1e-9
MAX_ITER = 200
U0_RTOL = 1e-12


class Branch(str, enum.Enum):
    PLANE = "plane"
    SESSILE = "sessile"
    PENDENT_NEGATIVE = "pendent-negative"
    # mirror image of a pendent-negative solution, used for beta < 0
    PENDENT_POSITIVE = "pendent-positive"


@dataclass(frozen=True)
class BvpProblem:
    """Strip half-width ``a``, hyperbolic contact angle ``beta``, capillary constant ``kappa``."""

    a: float
    beta: float
    kappa: float

    def __post_init__(self):
        if not (self.a > 0 and math.isfinite(self.a)):
            raise DomainError("a must be positive and finite")
        if not math.isfinite(self.beta):
            raise DomainError("beta must be finite")
        if self.kappa == 0 or not math.isfinite(self.kappa):
            raise DomainError("kappa must be finite and non-zero")


@dataclass(frozen=True, eq=False)
class ShootingResult:
    problem: BvpProblem
    u0: float
    profile: Profile
    young_residual: float
    bracket: tuple[float, float]
    iterations: int
    branch: Branch

    @property
    def u_a(self) -> float:
        return float(self.profile.u[-1])

    @property
    def params(self) -> ModelParams:
        return self.profile.params


def young_residual(p: Profile, a: float, beta: float) -> float:
    """``u'(a) - tanh(beta)`` on profile ``p``."""
    if not p.covers(a):
        raise DomainError(f"a={a} outside profile range")
    idx = int(abs(p.r - a).argmin())
    if p.r[idx] == a:
        s = float(p.slope[idx])
    else:
        s = float(p.slope_at(a))
    return s - math.tanh(beta)


def bisect(
    g: Callable[[float], float],
    lo: float,
    hi: float,
    max_iter: int = MAX_ITER,
    rtol: float = U0_RTOL,
) -> tuple[float, tuple[float, float], int]:
    """Bisection for a sign change of ``g`` between ``lo`` and ``hi``.

    ``g(lo)`` and ``g(hi)`` must have opposite signs (a zero at either end is
    accepted).  Stops when the bracket is narrower than
    ``rtol * max(1, |midpoint|)``.
    """
    glo, ghi = g(lo), g(hi)
    if glo == 0:
        return lo, (lo, lo), 0
    if ghi == 0:
        return hi, (hi, hi), 0
    if (glo < 0) == (ghi < 0):
        raise NoBracketError(f"g has the same sign at {lo} and {hi}", [(lo, glo, True), (hi, ghi, True)])
    neg_at_lo = glo < 0
    it = 0
    while it < max_iter:
        mid = 0.5 * (lo + hi)
        if abs(hi - lo) <= rtol * max(1.0, abs(mid)):
            break
        it += 1
        gm = g(mid)
        if gm == 0:
            return mid, (mid, mid), it
        if (gm < 0) == neg_at_lo:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi), (lo, hi), it


def _plane(prob: BvpProblem, ctrl: IntegratorSettings) -> ShootingResult:
    p = integrate_ivp(ModelParams(prob.kappa, 0.0), prob.a, ctrl)
    return ShootingResult(prob, 0.0, p, 0.0, (0.0, 0.0), 0, Branch.PLANE)


def _finish(prob, u0, bracket, it, branch, tol_bvp, ctrl) -> ShootingResult:
    p = integrate_ivp(ModelParams(prob.kappa, u0), prob.a, ctrl)
    res = young_residual(p, prob.a, prob.beta)
    if abs(res) > tol_bvp:
        raise BandsolveError(f"Young residual {res:.3e} exceeds tol_bvp={tol_bvp:g} (u0={u0!r})")
    return ShootingResult(prob, u0, p, res, bracket, it, branch)


def _mirror(res: ShootingResult, prob: BvpProblem, branch: Branch) -> ShootingResult:
    lo, hi = res.bracket
    return ShootingResult(prob, -res.u0, reflect_sign(res.profile), -res.young_residual, (-hi, -lo), res.iterations, branch)


def solve_bvp(
    prob: BvpProblem,
    tol_bvp: float = TOL_BVP,
    ctrl: IntegratorSettings = DEFAULT_CTRL,
    bracket: tuple[float, float] | None = None,
    scan_start: float = 1e-6,
    scan_factor: float = 2.0,
    scan_limit: int = 80,
) -> ShootingResult:
    """Find u0 with u'(a; u0) = tanh(beta).

    kappa > 0: u'(a; u0) increases strictly with u0, so bisection on
    ``[0, sinh(beta)/(a kappa)]`` (expanded if needed) converges to the
    unique root.  kappa < 0: u0 is scanned outward from 0 in geometric steps
    and the first sign change between two scans whose trajectory stays
    negative on ``[0, a)`` is bisected.  ``beta < 0`` is solved for
    ``|beta|`` and mirrored.
    """
    if prob.beta == 0:
        return _plane(prob, ctrl)
    if prob.beta < 0:
        flipped = replace(prob, beta=-prob.beta)
        base = solve_bvp(flipped, tol_bvp, ctrl, None if bracket is None else (-bracket[1], -bracket[0]),
                         scan_start, scan_factor, scan_limit)
        branch = Branch.SESSILE if prob.kappa > 0 else Branch.PENDENT_POSITIVE
        return _mirror(base, prob, branch)
    if prob.kappa > 0:
        return _solve_sessile(prob, tol_bvp, ctrl, bracket)
    return _solve_pendent(prob, tol_bvp, ctrl, bracket, scan_start, scan_factor, scan_limit)


def _solve_sessile(prob, tol_bvp, ctrl, bracket) -> ShootingResult:
    a, k = prob.a, prob.kappa
    target = math.tanh(prob.beta)

    def g(u0):
        return shoot(k, u0, a, ctrl).slope - target

    if bracket is None:
        lo, hi = 0.0, math.sinh(prob.beta) / (a * k)
    else:
        lo, hi = bracket
        if not 0 <= lo < hi:
            raise PreconditionError("sessile bracket must satisfy 0 <= lo < hi")
    for _ in range(64):
        if g(hi) > 0:
            break
        lo, hi = hi, 2.0 * hi
    else:
        raise NoBracketError("upper bracket not found", [(hi, g(hi), True)])
    while lo > 0 and g(lo) > 0:
        lo *= 0.5
        if lo < 1e-300:
            lo = 0.0
    u0, br, it = bisect(g, lo, hi)
    return _finish(prob, u0, br, it, Branch.SESSILE, tol_bvp, ctrl)


def _admissible(shot) -> bool:
    # u < 0 and rising on [0, a]: no zero of u before a
    return shot.u < 0 and shot.u_max < 0 and shot.v_min > 0


def shooting_scan(prob: BvpProblem, u0_values: Sequence[float], ctrl: IntegratorSettings = DEFAULT_CTRL):
    """Diagnostic trace ``(u0, u'(a; u0) - tanh beta, admissible)`` over ``u0_values``.

    ``admissible`` marks trajectories that stay negative and increasing on
    ``[0, a]``.  Roots between non-admissible scans are the additional
    solutions created by periodicity; they are never returned by
    :func:`solve_bvp`.
    """
    target = math.tanh(prob.beta)
    out = []
    for u0 in u0_values:
        s = shoot(prob.kappa, u0, prob.a, ctrl)
        out.append((float(u0), s.slope - target, _admissible(s)))
    return out


def _solve_pendent(prob, tol_bvp, ctrl, bracket, scan_start, scan_factor, scan_limit) -> ShootingResult:
    a, k = prob.a, prob.kappa
    target = math.tanh(prob.beta)
    trace: list[tuple[float, float, bool]] = []

    def g(u0):
        s = shoot(k, u0, a, ctrl)
        ok = _admissible(s)
        trace.append((u0, s.slope - target, ok))
        return s.slope - target, ok

    if bracket is None:
        prev = None
        u0 = -scan_start
        for _ in range(scan_limit):
            val, ok = g(u0)
            if ok and prev is not None and prev[2] and prev[1] < 0 <= val:
                bracket = (u0, prev[0])
                break
            prev = (u0, val, ok)
            u0 *= scan_factor
        else:
            raise NoBracketError(
                f"no admissible sign change for a={a}, beta={prob.beta}, kappa={k}", trace
            )
    lo, hi = min(bracket), max(bracket)
    if hi >= 0:
        raise PreconditionError("pendent bracket must be negative")

    def gb(u0):
        val, ok = g(u0)
        if not ok:
            raise NoBracketError(f"bisection left the negative branch at u0={u0!r}", trace)
        return val

    u0, br, it = bisect(gb, lo, hi)
    return _finish(prob, u0, br, it, Branch.PENDENT_NEGATIVE, tol_bvp, ctrl)


def solve_foliation(a: float, b: float, kappa: float, ctrl: IntegratorSettings = DEFAULT_CTRL) -> float:
    """The unique u0 whose sessile leaf passes through height ``b`` at ``r = a``.

    u(a; u0) increases strictly with u0 and u(a; u0) > u0 for u0 > 0, so
    ``[0, b]`` brackets the root for ``b > 0``; ``b < 0`` follows by sign
    reflection.
    """
    if kappa <= 0:
        raise PreconditionError("foliation requires kappa > 0")
    if not (a > 0 and math.isfinite(a) and math.isfinite(b)):
        raise DomainError("a must be positive; a, b finite")
    if b == 0:
        return 0.0
    if b < 0:
        return -solve_foliation(a, -b, kappa, ctrl)

    def g(u0):
        return shoot(kappa, u0, a, ctrl).u - b

    u0, _, _ = bisect(g, 0.0, b)
    return u0
