"""Comparison hyperbolas and the size estimates derived from them.

A hyperbola ``y(r) = c + sqrt(r^2 + m^2)`` has constant curvature
``y'' / (1 - y'^2)^(3/2) = 1/m``; it is the directrix of a hyperbolic
cylinder and the barrier against which band profiles are compared.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .analysis import first_zero
from .errors import DomainError, PreconditionError, RegimeError
from .ode_core import Profile
from .shooting import BvpProblem, ShootingResult

TOL_COMPARE = 1e-9


@dataclass(frozen=True)
class Hyperbola:
    """``y(r) = c + sqrt(r^2 + m^2)`` with waist parameter ``m > 0``."""

    c: float
    m: float

    def __post_init__(self):
        if not (self.m > 0 and math.isfinite(self.m)):
            raise DomainError("m must be positive and finite")

    def __call__(self, r):
        return self.c + np.hypot(r, self.m)

    def slope(self, r):
        return r / np.hypot(r, self.m)

    def second(self, r):
        return self.m**2 / np.hypot(r, self.m) ** 3

    def curvature(self, r):
        return self.second(r) / (1.0 - self.slope(r) ** 2) ** 1.5

    @property
    def constant_curvature(self) -> float:
        return 1.0 / self.m

    def zero(self) -> float | None:
        """Positive root of y, if any."""
        if self.c >= 0 or -self.c < self.m:
            return None
        return math.sqrt(self.c * self.c - self.m * self.m)

    def integral(self, a: float) -> float:
        return F(self.c, self.m, a)


def hyperbolic_cylinder(m: float) -> Hyperbola:
    """Directrix ``sqrt(r^2 + 1/m^2)`` of the hyperbolic cylinder with curvature ``m`` (H = m/2)."""
    if not (m > 0 and math.isfinite(m)):
        raise DomainError("m must be positive and finite")
    return Hyperbola(0.0, 1.0 / m)


def F(c: float, m: float, a: float) -> float:
    """Integral of ``sqrt(r^2 + m^2) + c`` over ``[0, a]``.

    ``log((a + sqrt(a^2 + m^2)) / m)`` is evaluated as ``asinh(a/m)``.
    """
    if not m > 0:
        raise DomainError("m must be positive")
    if not a > 0:
        raise DomainError("a must be positive")
    h = math.hypot(a, m)
    return a * c + 0.5 * a * h + 0.5 * m * m * math.asinh(a / m)


@dataclass(frozen=True)
class BoundRecord:
    """One inequality ``lhs < rhs``; ``slack = rhs - lhs``.

    For pointwise inequalities lhs/rhs are taken at the worst grid point
    ``r``.  ``status`` is ``"ok"``, ``"failed"`` or ``"degenerate"`` (skipped).
    """

    name: str
    family: str
    lhs: float
    rhs: float
    slack: float
    passed: bool
    status: str
    r: float | None = None

    @classmethod
    def scalar(cls, name, family, lhs, rhs, tol=TOL_COMPARE):
        slack = float(rhs - lhs)
        ok = slack > -tol
        return cls(name, family, float(lhs), float(rhs), slack, ok, "ok" if ok else "failed")

    @classmethod
    def pointwise(cls, name, family, grid, lhs, rhs, tol=TOL_COMPARE):
        lhs = np.broadcast_to(lhs, grid.shape)
        rhs = np.broadcast_to(rhs, grid.shape)
        slack = rhs - lhs
        i = int(np.argmin(slack))
        ok = bool(slack[i] > -tol)
        return cls(name, family, float(lhs[i]), float(rhs[i]), float(slack[i]), ok, "ok" if ok else "failed", float(grid[i]))

    @classmethod
    def degenerate(cls, name, family):
        return cls(name, family, math.nan, math.nan, math.nan, True, "degenerate")


@dataclass(frozen=True, eq=False)
class BoundsReport:
    problem: BvpProblem
    u0: float
    records: tuple[BoundRecord, ...]
    grid: np.ndarray = field(repr=False)

    @property
    def passed(self) -> bool:
        return all(rec.passed for rec in self.records)

    def record(self, name: str) -> BoundRecord:
        for rec in self.records:
            if rec.name == name:
                return rec
        raise KeyError(name)

    def to_dict(self) -> dict:
        def clean(d):
            return {k: (None if isinstance(v, float) and math.isnan(v) else v) for k, v in d.items()}

        return {
            "problem": asdict(self.problem),
            "u0": self.u0,
            "n_grid": int(self.grid.size),
            "passed": self.passed,
            "records": [clean(asdict(r)) for r in self.records],
        }


def _interior(a: float, n: int) -> np.ndarray:
    return np.linspace(0.0, a, n + 1)[1:]


def _check_sessile(solved: ShootingResult):
    if solved.problem.kappa <= 0:
        raise PreconditionError("sessile estimates need kappa > 0")
    if solved.problem.beta != 0 and solved.u0 <= 0:
        raise PreconditionError("sessile estimates use the canonical branch u0 > 0, beta > 0")


def upper_hyperbola_sessile(a: float, beta: float, u0: float) -> Hyperbola:
    """Hyperbola through (0, u0) with slope tanh(beta) at r=a: waist a/sinh(beta)."""
    mu2 = a / math.sinh(beta)
    return Hyperbola(u0 - mu2, mu2)


def lower_hyperbola(kappa: float, u0: float) -> Hyperbola:
    """Hyperbola through (0, u0) with curvature kappa*u0 (waist 1/(kappa u0))."""
    mu1 = 1.0 / (kappa * u0)
    return Hyperbola(u0 - mu1, mu1)


def envelope_sessile(solved: ShootingResult, n: int = 400):
    """``y1 < u < y2`` on (0, a]; returns ``(y1, y2, records)`` (y2 is None when beta=0)."""
    _check_sessile(solved)
    prob = solved.problem
    if prob.beta == 0:
        return None, None, [
            BoundRecord.degenerate("envelope: y1 < u", "envelope"),
            BoundRecord.degenerate("envelope: u < y2", "envelope"),
        ]
    grid = _interior(prob.a, n)
    u = solved.profile.u_at(grid)
    y1 = lower_hyperbola(prob.kappa, solved.u0)
    y2 = upper_hyperbola_sessile(prob.a, prob.beta, solved.u0)
    recs = [
        BoundRecord.pointwise("envelope: y1 < u", "envelope", grid, y1(grid), u),
        BoundRecord.pointwise("envelope: u < y2", "envelope", grid, u, y2(grid)),
        BoundRecord.scalar("curvature at 0: C_y1 < C_y2", "curvature-order", y1.constant_curvature, y2.constant_curvature),
    ]
    return y1, y2, recs


def check_es1(solved: ShootingResult) -> list[BoundRecord]:
    """Height at the boundary between y1(a) and y2(a)."""
    _check_sessile(solved)
    a, beta, k = solved.problem.a, solved.problem.beta, solved.problem.kappa
    if beta == 0:
        return [BoundRecord.degenerate("u(a) lower", "boundary-height"), BoundRecord.degenerate("u(a) upper", "boundary-height")]
    u0, ua = solved.u0, solved.u_a
    lower = u0 - 1.0 / (k * u0) + math.sqrt(a * a + 1.0 / (k * k * u0 * u0))
    upper = u0 + a * (math.cosh(beta) - 1.0) / math.sinh(beta)
    return [
        BoundRecord.scalar("u(a) lower", "boundary-height", lower, ua),
        BoundRecord.scalar("u(a) upper", "boundary-height", ua, upper),
    ]


def es2_bounds(a: float, beta: float, kappa: float) -> tuple[float, float]:
    """Interval for u0 in terms of (a, beta, kappa) only."""
    sb = math.sinh(beta)
    hi = sb / (a * kappa)
    lo = hi + a / sb - a / (2.0 * math.tanh(beta)) - a * beta / (2.0 * sb * sb)
    return lo, hi


def check_es2(solved: ShootingResult) -> list[BoundRecord]:
    """Volume inequalities kappa F(y1) < sinh(beta) < kappa F(y2) and the u0 interval."""
    _check_sessile(solved)
    a, beta, k = solved.problem.a, solved.problem.beta, solved.problem.kappa
    names = ("F(y1) < sinh b / k", "sinh b / k < F(y2)", "F(y1) expanded", "F(y2) expanded", "u0 lower", "u0 upper")
    if beta == 0:
        return [BoundRecord.degenerate(n, "volume") for n in names]
    u0 = solved.u0
    sb = math.sinh(beta)
    mu1 = 1.0 / (k * u0)
    mu2 = a / sb
    x = a * k * u0
    root = math.sqrt(1.0 + x * x)
    f1_expanded = a / (2 * k * u0) * (2 * (k * u0 * u0 - 1) + root) + math.log(x + root) / (2 * k * k * u0 * u0)
    f2_expanded = a * u0 + a * a / (2 * math.tanh(beta)) + a * a * beta / (2 * sb * sb) - a * a / sb
    lo, hi = es2_bounds(a, beta, k)
    return [
        BoundRecord.scalar(names[0], "volume", F(u0 - mu1, mu1, a), sb / k),
        BoundRecord.scalar(names[1], "volume", sb / k, F(u0 - mu2, mu2, a)),
        BoundRecord.scalar(names[2], "volume", f1_expanded, sb / k),
        BoundRecord.scalar(names[3], "volume", sb / k, f2_expanded),
        BoundRecord.scalar(names[4], "volume", lo, u0),
        BoundRecord.scalar(names[5], "volume", u0, hi),
    ]


def lowered_hyperbola(a: float, beta: float, u_a: float) -> Hyperbola:
    """The upper hyperbola translated down to pass through (a, u(a))."""
    mu2 = a / math.sinh(beta)
    return Hyperbola(u_a - a / math.tanh(beta), mu2)


def ua_upper_bound(a: float, beta: float, kappa: float) -> float:
    """Upper bound on u(a) that does not involve u0."""
    sb = math.sinh(beta)
    return sb / (kappa * a) + 0.5 * a / math.tanh(beta) - a * beta / (2 * sb * sb)


def check_meniscus_ua(solved: ShootingResult, n: int = 400) -> list[BoundRecord]:
    """y3 < u on [0, a) and the u0-free upper bound on u(a)."""
    _check_sessile(solved)
    a, beta, k = solved.problem.a, solved.problem.beta, solved.problem.kappa
    if beta == 0:
        return [BoundRecord.degenerate("y3 < u", "lowered-envelope"), BoundRecord.degenerate("u(a) u0-free upper", "lowered-envelope")]
    y3 = lowered_hyperbola(a, beta, solved.u_a)
    grid = np.linspace(0.0, a, n + 1)[:-1]
    u = solved.profile.u_at(grid)
    return [
        BoundRecord.pointwise("y3 < u", "lowered-envelope", grid, y3(grid), u),
        BoundRecord.scalar("u(a) u0-free upper", "lowered-envelope", solved.u_a, ua_upper_bound(a, beta, k)),
    ]


def check_pendent_bounds(solved: ShootingResult, n: int = 400) -> list[BoundRecord]:
    """Estimates on [0, r_o] for a pendent solution below the axis (kappa < 0, u0 < 0)."""
    prob = solved.problem
    a, beta, k = prob.a, prob.beta, prob.kappa
    if k >= 0:
        raise PreconditionError("pendent estimates need kappa < 0")
    u0 = solved.u0
    if beta == 0:
        names = ("y4: u < y4", "pendent u(a) upper", "pendent sinh b / k", "zero bounds ordered", "zero lower bound")
        return [BoundRecord.degenerate(nm, "pendent") for nm in names]
    if u0 >= 0:
        raise PreconditionError("pendent estimates use the canonical branch u0 < 0, beta > 0")
    params = solved.params
    ro = first_zero(params)
    if a > ro:
        raise RegimeError(f"a={a} exceeds the first zero r_o={ro}")
    y4 = lower_hyperbola(k, u0)
    grid = _interior(a, n)
    u = solved.profile.u_at(grid)
    x = a * k * u0
    root = math.sqrt(1.0 + x * x)
    f4 = a / (2 * k * u0) * (2 * (k * u0 * u0 - 1) + root) + math.log(x + root) / (2 * k * k * u0 * u0)
    inner, outer = math.sqrt(-2.0 / k), math.sqrt(u0 * u0 - 2.0 / k)
    return [
        BoundRecord.pointwise("y4: u < y4", "pendent", grid, u, y4(grid)),
        BoundRecord.scalar("pendent u(a) upper", "pendent", solved.u_a, float(y4(a))),
        BoundRecord.scalar("pendent sinh b / k", "pendent", math.sinh(beta) / k, f4),
        BoundRecord.scalar("zero bounds ordered", "pendent", inner, outer),
        BoundRecord.scalar("zero lower bound", "pendent", outer, ro),
    ]


def bounds_report(solved: ShootingResult, n: int = 400) -> BoundsReport:
    """All estimates applicable to the regime of ``solved``."""
    prob = solved.problem
    if prob.kappa > 0:
        _, _, recs = envelope_sessile(solved, n)
        recs = recs + check_es1(solved) + check_es2(solved) + check_meniscus_ua(solved, n)
    else:
        recs = check_pendent_bounds(solved, n)
    return BoundsReport(prob, solved.u0, tuple(recs), _interior(prob.a, n))


def profile_curvature(p: Profile) -> np.ndarray:
    """u'' / (1 - u'^2)^(3/2) from the stored samples, which equals kappa * u."""
    return p.u2 * (1.0 + p.v * p.v) ** 1.5
