"""Shape verifiers for sessile and pendent profiles and the comparison principles."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, PreconditionError
from .ode_core import DEFAULT_CTRL, IntegratorSettings, ModelParams, Profile, integrate_ivp
from .shooting import BvpProblem, solve_bvp

TOL_COMPARE = 1e-9
ZERO_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class ComparisonVerdict:
    """Outcome of a pointwise strict inequality checked on ``grid``.

    ``slack`` holds the margin at each grid point (positive when the
    inequality holds); ``min_slack`` is its minimum.
    """

    relation: str
    grid: np.ndarray
    slack: np.ndarray
    min_slack: float
    tol: float = TOL_COMPARE
    window_note: str = ""

    @property
    def passed(self) -> bool:
        return self.min_slack >= -self.tol

    def to_dict(self) -> dict:
        return {
            "relation": self.relation,
            "n_points": int(self.grid.size),
            "min_slack": self.min_slack,
            "passed": self.passed,
            **({"note": self.window_note} if self.window_note else {}),
        }


def _verdict(relation, grid, *slacks, note="") -> ComparisonVerdict:
    grid = np.asarray(grid, dtype=float)
    slack = np.min(np.vstack([np.broadcast_to(s, grid.shape) for s in slacks]), axis=0)
    ms = float(np.min(slack)) if slack.size else math.inf
    return ComparisonVerdict(relation, grid, slack, ms, window_note=note)


def _bisect_interp(f, lo, hi, tol=1e-12):
    flo = f(lo)
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if fm == 0:
            return mid
        if (fm < 0) == (flo < 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def sign_changes(p: Profile, values: np.ndarray, f, skip_first: bool = True, tol: float = 1e-12) -> np.ndarray:
    """Roots of a sampled quantity, refined by bisection on its interpolant ``f``."""
    s = np.sign(values)
    start = 1 if skip_first else 0
    roots = []
    for i in range(start, values.size - 1):
        if s[i] == 0 and i > start:
            roots.append(float(p.r[i]))
        elif s[i] * s[i + 1] < 0:
            roots.append(_bisect_interp(f, float(p.r[i]), float(p.r[i + 1]), tol))
    return np.array(roots)


# sessile ------------------------------------------------------------------


@dataclass(frozen=True)
class SessileShapeReport:
    increasing_margin: float
    convexity_margin: float
    min_location: float
    u2_at_zero: float
    slope_end: float
    slope_lower_bound: float
    tail_u2: float
    tail_decreasing: bool
    growth: ComparisonVerdict = field(repr=False)
    growth_limit: float
    growth_limit_error: float

    @property
    def passed(self) -> bool:
        return (
            self.increasing_margin > 0
            and self.convexity_margin > 0
            and self.min_location == 0.0
            and self.slope_end >= self.slope_lower_bound - TOL_COMPARE
            and self.tail_decreasing
            and self.growth.passed
            and self.growth_limit_error < 1e-6
        )


def slope_lower_bound(kappa: float, u0: float, r: float) -> float:
    """Lower bound for u'(r) from sinh(psi(r)) > kappa u0 r on a sessile profile.

    Serves as the tolerance schedule for the asymptotic slope check:
    ``1 - u'(r) <= 1 - slope_lower_bound``.
    """
    x = kappa * u0 * r
    return x / math.sqrt(1.0 + x * x)


def sessile_shape_check(p: Profile) -> SessileShapeReport:
    """Verify monotonicity, convexity, asymptotic slope and growth bounds of a sessile profile."""
    k, u0 = p.params.kappa, p.params.u0
    if not (k > 0 and u0 > 0):
        raise PreconditionError("sessile check needs kappa > 0 and u0 > 0")
    if p.r[0] != 0.0:
        raise PreconditionError("profile must start at r=0")
    du = np.diff(p.u)
    u2 = p.u2
    peak = int(np.argmax(u2))
    tail = np.diff(u2[peak:])
    r_end = float(p.r[-1])
    growth = sessile_growth_bounds(p)
    lim, err = growth_limit_at_zero(p)
    return SessileShapeReport(
        increasing_margin=float(du.min()) if du.size else 0.0,
        convexity_margin=float(u2.min()),
        min_location=float(p.r[int(np.argmin(p.u))]),
        u2_at_zero=float(u2[0]),
        slope_end=float(p.slope[-1]),
        slope_lower_bound=slope_lower_bound(k, u0, r_end),
        tail_u2=float(u2[-1]),
        tail_decreasing=bool(np.all(tail < 0)),
        growth=growth,
        growth_limit=lim,
        growth_limit_error=err,
    )


def sessile_growth_bounds(p: Profile) -> ComparisonVerdict:
    """kappa u0 < v(r)/r < kappa u(r) for r > 0, as relative slack."""
    k, u0 = p.params.kappa, p.params.u0
    m = p.r > 0
    r, u, v = p.r[m], p.u[m], p.v[m]
    q = v / r
    return _verdict("k*u0 < sinh(psi)/r < k*u(r)", r, (q - k * u0) / (k * u0), (k * u - q) / (k * u0))


def growth_limit_at_zero(p: Profile, h: float = 1e-2) -> tuple[float, float]:
    """Richardson-extrapolated limit of v(r)/r as r -> 0 and its distance to kappa*u0."""
    h = min(h, float(p.r[-1]))
    q1 = p.at(h)[1] / h
    q2 = p.at(h / 2)[1] / (h / 2)
    # v(r)/r = k u0 + O(r^2)
    lim = q2 + (q2 - q1) / 3.0
    return float(lim), float(abs(lim - p.params.kappa * p.params.u0))


# pendent ------------------------------------------------------------------


def max_slope_closed_form(params: ModelParams) -> float:
    """Slope at the zeros of a pendent profile, the maximum of |u'|."""
    k, u0 = params.kappa, params.u0
    if k >= 0:
        raise PreconditionError("max slope formula needs kappa < 0")
    if u0 > 0:
        raise PreconditionError("use the canonical sign u0 <= 0")
    return -u0 / (2.0 - k * u0 * u0) * math.sqrt(k * k * u0 * u0 - 4.0 * k)


def zero_lower_bounds(params: ModelParams) -> tuple[float, float]:
    """``(sqrt(-2/kappa), sqrt(u0^2 - 2/kappa))``, both below the first zero."""
    k, u0 = params.kappa, params.u0
    return math.sqrt(-2.0 / k), math.sqrt(u0 * u0 - 2.0 / k)


def first_zero(params: ModelParams, ctrl: IntegratorSettings = DEFAULT_CTRL, tol: float = 1e-10) -> float:
    """First positive zero r_o of a pendent profile."""
    k, u0 = params.kappa, params.u0
    if not (k < 0 and u0 < 0):
        raise PreconditionError("first_zero needs kappa < 0 and u0 < 0")
    length = 2.0 * zero_lower_bounds(params)[1]
    for _ in range(60):
        p = integrate_ivp(params, length, ctrl)
        idx = np.nonzero(p.u >= 0)[0]
        if idx.size:
            i = int(idx[0])
            return _bisect_interp(p.u_at, float(p.r[i - 1]), float(p.r[i]), tol)
        length *= 2.0
    raise DomainError("no zero found")


@dataclass(frozen=True, eq=False)
class PendentSummary:
    params: ModelParams
    r_o: float
    period: float
    amplitude: float
    max_slope: float
    max_slope_at_zero: float
    max_slope_formula: float
    zero_bounds: tuple[float, float]
    zero_locations: np.ndarray
    extrema_locations: np.ndarray
    inflection_locations: np.ndarray
    period_residual: float
    u_min: float
    u_max: float
    profile: Profile = field(repr=False)

    @property
    def zero_bound_ok(self) -> bool:
        lo1, lo2 = self.zero_bounds
        return lo1 < lo2 < self.r_o

    @property
    def amplitude_ok(self) -> bool:
        u0 = self.params.u0
        return self.u_min >= u0 - ZERO_TOL and self.u_max <= -u0 + ZERO_TOL

    def lattice_error(self) -> tuple[float, float]:
        """Distance of extrema from multiples of 2 r_o and of zeros from odd multiples of r_o."""
        ro = self.r_o
        ext = self.extrema_locations / (2 * ro)
        zer = (self.zero_locations / ro - 1) / 2
        e1 = float(np.max(np.abs(ext - np.round(ext)) * 2 * ro)) if ext.size else 0.0
        e2 = float(np.max(np.abs(zer - np.round(zer)) * 2 * ro)) if zer.size else 0.0
        return e1, e2

    @property
    def inflections_match_zeros(self) -> bool:
        z, f = self.zero_locations, self.inflection_locations
        return z.size == f.size and bool(np.all(np.abs(z - f) < 1e-8))

    @property
    def passed(self) -> bool:
        e1, e2 = self.lattice_error()
        return (
            self.zero_bound_ok
            and self.amplitude_ok
            and self.period_residual < 1e-6
            and e1 < 1e-6
            and e2 < 1e-6
            and abs(self.max_slope_at_zero - self.max_slope_formula) < 1e-6
            and self.max_slope <= self.max_slope_formula + 1e-9
            and self.max_slope < 1.0
            and self.inflections_match_zeros
        )

    def to_dict(self) -> dict:
        e1, e2 = self.lattice_error()
        return {
            "kappa": self.params.kappa,
            "u0": self.params.u0,
            "r_o": self.r_o,
            "period": self.period,
            "amplitude": self.amplitude,
            "max_slope": self.max_slope,
            "max_slope_at_zero": self.max_slope_at_zero,
            "max_slope_formula": self.max_slope_formula,
            "zero_lower_bounds": list(self.zero_bounds),
            "zero_bound_ok": self.zero_bound_ok,
            "amplitude_ok": self.amplitude_ok,
            "period_residual": self.period_residual,
            "extrema_lattice_error": e1,
            "zero_lattice_error": e2,
            "inflections_match_zeros": self.inflections_match_zeros,
            "zeros": self.zero_locations.tolist(),
            "extrema": self.extrema_locations.tolist(),
            "passed": self.passed,
        }


def pendent_summary(
    params: ModelParams, ctrl: IntegratorSettings = DEFAULT_CTRL, n_check: int = 2001
) -> PendentSummary:
    """Zero, period, amplitude and slope structure of a pendent profile over two periods.

    The period is taken as 4 r_o (even symmetry about r=0 composed with point
    symmetry about (r_o, 0)); periodicity is then checked, not fitted.
    """
    k, u0 = params.kappa, params.u0
    if k >= 0:
        raise PreconditionError("pendent summary needs kappa < 0")
    if u0 >= 0:
        raise PreconditionError("pendent summary needs u0 < 0 (canonical sign)")
    ro = first_zero(params, ctrl)
    period = 4.0 * ro
    p = integrate_ivp(params, 2.0 * period * (1 + 1e-12), ctrl)
    grid = np.linspace(0.0, period, n_check)
    period_residual = float(np.max(np.abs(p.u_at(grid + period) - p.u_at(grid))))
    zeros = sign_changes(p, p.u, p.u_at)
    extrema = np.concatenate([[0.0], sign_changes(p, p.v, lambda r: p.at(r)[1])])

    def u2_at(r):
        u, v = p.at(r)
        return k * u / (1 + v * v) ** 1.5

    inflections = sign_changes(p, p.u2, u2_at)
    ms_formula = max_slope_closed_form(params)
    return PendentSummary(
        params=params,
        r_o=ro,
        period=period,
        amplitude=abs(u0),
        max_slope=float(np.max(np.abs(p.slope))),
        max_slope_at_zero=float(abs(p.slope_at(ro))),
        max_slope_formula=ms_formula,
        zero_bounds=zero_lower_bounds(params),
        zero_locations=zeros,
        extrema_locations=extrema,
        inflection_locations=inflections,
        period_residual=period_residual,
        u_min=float(p.u.min()),
        u_max=float(p.u.max()),
        profile=p,
    )


# comparison principles ----------------------------------------------------


def _grid(r_grid) -> np.ndarray:
    g = np.asarray(r_grid, dtype=float).ravel()
    if g.size == 0:
        raise DomainError("empty grid")
    return g


def _ivp_on(params: ModelParams, grid: np.ndarray, ctrl) -> tuple[np.ndarray, np.ndarray]:
    ag = np.abs(grid)
    p = integrate_ivp(params, float(ag.max()) if ag.max() > 0 else 1.0, ctrl, r_eval=ag)
    u, v = p.at(ag)
    return u, np.sign(grid) * v / np.sqrt(1 + v * v)


def compare_kappa(u0: float, k1: float, k2: float, r_grid, ctrl: IntegratorSettings = DEFAULT_CTRL) -> ComparisonVerdict:
    """Same u0, 0 < k1 < k2: u1 < u2 for r != 0 and u1' < u2' for r > 0."""
    if not 0 < k1 < k2:
        raise PreconditionError("need 0 < k1 < k2")
    if u0 <= 0:
        raise PreconditionError("need u0 > 0")
    grid = _grid(r_grid)
    grid = grid[grid != 0]
    u1, s1 = _ivp_on(ModelParams(k1, u0), grid, ctrl)
    u2, s2 = _ivp_on(ModelParams(k2, u0), grid, ctrl)
    ds = np.where(grid > 0, s2 - s1, np.inf)
    return _verdict("u(r;u0,k1) < u(r;u0,k2), u'1 < u'2", grid, u2 - u1, ds)


def compare_kappa_bvp(
    a: float, beta: float, k1: float, k2: float, r_grid=None, ctrl: IntegratorSettings = DEFAULT_CTRL
) -> ComparisonVerdict:
    """Same (a, beta), 0 < k1 < k2: u1 > u2 on [0, a] and u1' > u2' on (0, a)."""
    if not 0 < k1 < k2:
        raise PreconditionError("need 0 < k1 < k2")
    if beta <= 0:
        raise PreconditionError("need beta > 0")
    s1 = solve_bvp(BvpProblem(a, beta, k1), ctrl=ctrl)
    s2 = solve_bvp(BvpProblem(a, beta, k2), ctrl=ctrl)
    grid = np.linspace(0.0, a, 201) if r_grid is None else _grid(r_grid)
    if np.any(grid < 0) or np.any(grid > a):
        raise DomainError("grid must lie in [0, a]")
    u1, v1 = s1.profile.at(grid)
    u2, v2 = s2.profile.at(grid)
    d1 = v1 / np.sqrt(1 + v1 * v1) - v2 / np.sqrt(1 + v2 * v2)
    ds = np.where((grid > 0) & (grid < a), d1, np.inf)
    return _verdict("BVP: u1 > u2 on [0,a], u1' > u2' on (0,a)", grid, u1 - u2, ds)


def compare_u0(kappa: float, u0: float, delta: float, r_grid, ctrl: IntegratorSettings = DEFAULT_CTRL) -> ComparisonVerdict:
    """u(r; u0 + delta) - delta > u(r; u0) for r != 0 (kappa > 0)."""
    if kappa <= 0:
        raise PreconditionError("need kappa > 0")
    if delta <= 0:
        raise PreconditionError("need delta > 0")
    grid = _grid(r_grid)
    grid = grid[grid != 0]
    ua, _ = _ivp_on(ModelParams(kappa, u0), grid, ctrl)
    ub, _ = _ivp_on(ModelParams(kappa, u0 + delta), grid, ctrl)
    return _verdict("u(r;u0+d) - d > u(r;u0)", grid, ub - delta - ua)


def pendent_monotonicity(
    u0: float,
    k1: float,
    k2: float,
    delta: float,
    window: float | None = None,
    n: int = 200,
    ctrl: IntegratorSettings = DEFAULT_CTRL,
) -> tuple[ComparisonVerdict, ComparisonVerdict]:
    """Local comparisons near r=0 for pendent profiles (k1 < k2 < 0, u0 < 0).

    Only claimed on an interval around r=0; the default window is
    ``(0, min(r_o(k1), r_o(k2)) / 2]`` and is reported in the verdicts.
    """
    if not k1 < k2 < 0:
        raise PreconditionError("need k1 < k2 < 0")
    if u0 >= 0 or delta <= 0:
        raise PreconditionError("need u0 < 0 and delta > 0")
    note = "window given"
    if window is None:
        window = 0.5 * min(first_zero(ModelParams(k1, u0), ctrl), first_zero(ModelParams(k2, u0), ctrl))
        note = "default window (0, min r_o / 2]"
    grid = np.linspace(0.0, window, n + 1)[1:]
    u1, _ = _ivp_on(ModelParams(k1, u0), grid, ctrl)
    u2, _ = _ivp_on(ModelParams(k2, u0), grid, ctrl)
    vk = _verdict("pendent: u(r;u0,k1) > u(r;u0,k2)", grid, u1 - u2, note=note)
    ua, _ = _ivp_on(ModelParams(k2, u0), grid, ctrl)
    ub, _ = _ivp_on(ModelParams(k2, u0 - delta), grid, ctrl)
    vd = _verdict("pendent: u(r;u0-d) + d >= u(r;u0)", grid, ub + delta - ua, note=note)
    return vk, vd
