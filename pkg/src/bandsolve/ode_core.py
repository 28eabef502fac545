"""Profile ODE for cylindrical stationary bands.

The directrix u(r) of a band with H = kappa * x3 solves

    u'' / (1 - u'^2)^(3/2) = kappa * u,     u(0) = u0,  u'(0) = 0.

With v = sinh(psi) = u' / sqrt(1 - u'^2) this becomes the first-order system

    u' = v / sqrt(1 + v^2),     v' = kappa * u,

which is smooth and non-stiff, so an explicit embedded Runge-Kutta pair is
used.  The first integral

    u^2 = u0^2 + (2 / kappa) * (cosh(psi) - 1)

is only evaluated as a diagnostic; it is never used to propagate the state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Iterator, Sequence

import numpy as np
from scipy.interpolate import BPoly

from .errors import DomainError, IntegratorError, PreconditionError

TOL_CONSERVE = 1e-8


@dataclass(frozen=True)
class ModelParams:
    """Capillary constant ``kappa``, Laplace offset ``lam`` and height ``u0`` at r=0."""

    kappa: float
    u0: float
    lam: float = 0.0

    def __post_init__(self):
        for name in ("kappa", "u0", "lam"):
            if not math.isfinite(getattr(self, name)):
                raise DomainError(f"{name} must be finite")


@dataclass(frozen=True)
class PhaseState:
    r: float
    u: float
    v: float

    @property
    def slope(self) -> float:
        return slope(self)

    @property
    def angle(self) -> float:
        return angle(self)

    @property
    def cosh_psi(self) -> float:
        return math.sqrt(1.0 + self.v * self.v)


@dataclass(frozen=True)
class IntegratorSettings:
    """Integrator controls.

    ``method`` is ``"dopri5"`` (embedded 5(4) pair with error control on
    ``rtol``/``atol``) or ``"rk4"`` (classical fixed step ``h``).  Output
    samples are the accepted steps plus a uniform grid of spacing
    ``sample_spacing`` (``None`` keeps only the steps).
    """

    method: str = "dopri5"
    rtol: float = 1e-10
    atol: float = 1e-10
    max_step: float = 0.1
    h: float = 1e-3
    sample_spacing: float | None = 0.02
    min_step: float = 1e-13

    def __post_init__(self):
        if self.method not in ("dopri5", "rk4"):
            raise DomainError(f"unknown integrator method {self.method!r}")
        if self.rtol <= 0 or self.atol <= 0 or self.max_step <= 0 or self.h <= 0:
            raise DomainError("tolerances and step sizes must be positive")

    @property
    def order(self) -> int:
        return 5 if self.method == "dopri5" else 4


DEFAULT_CTRL = IntegratorSettings()


@dataclass(frozen=True)
class StepStats:
    method: str
    order: int
    rtol: float
    atol: float
    max_step: float
    n_steps: int
    n_rejected: int = 0


def rhs(state: PhaseState, kappa: float) -> tuple[float, float]:
    """Right-hand side ``(du/dr, dv/dr)`` of the first-order system."""
    if kappa == 0:
        raise DomainError("kappa must be non-zero")
    if not (math.isfinite(state.u) and math.isfinite(state.v) and math.isfinite(kappa)):
        raise DomainError("non-finite state")
    return _f(state.u, state.v, kappa)


def _f(u: float, v: float, kappa: float) -> tuple[float, float]:
    return v / math.sqrt(1.0 + v * v), kappa * u


def slope(state: PhaseState) -> float:
    return state.v / math.sqrt(1.0 + state.v * state.v)


def angle(state: PhaseState) -> float:
    return math.asinh(state.v)


def _cosh_minus_one(v):
    # sqrt(1+v^2) - 1 without cancellation for small v
    return v * v / (np.sqrt(1.0 + v * v) + 1.0)


def first_integral_residual(state: PhaseState, params: ModelParams) -> float:
    """Relative defect of ``u^2 = u0^2 + (2/kappa)(cosh psi - 1)`` at ``state``.

    Scaled by ``max(1, u0^2, u^2)``; zero on exact trajectories.
    """
    if params.kappa == 0:
        raise DomainError("kappa must be non-zero")
    return float(_residuals(np.asarray(state.u), np.asarray(state.v), params))


def _residuals(u, v, params: ModelParams):
    u0sq = params.u0 * params.u0
    raw = u * u - u0sq - (2.0 / params.kappa) * _cosh_minus_one(v)
    return raw / np.maximum(1.0, np.maximum(u0sq, u * u))


# Dormand-Prince 5(4) tableau
_C2, _C3, _C4, _C5 = 1 / 5, 3 / 10, 4 / 5, 8 / 9
_A21 = 1 / 5
_A31, _A32 = 3 / 40, 9 / 40
_A41, _A42, _A43 = 44 / 45, -56 / 15, 32 / 9
_A51, _A52, _A53, _A54 = 19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729
_A61, _A62, _A63, _A64, _A65 = 9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656
_B1, _B3, _B4, _B5, _B6 = 35 / 384, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84
_E1, _E3, _E4, _E5, _E6, _E7 = (
    71 / 57600,
    -71 / 16695,
    71 / 1920,
    -17253 / 339200,
    22 / 525,
    -1 / 40,
)


@dataclass
class _Run:
    rs: list
    us: list
    vs: list
    u_max: float
    v_min: float
    n_steps: int = 0
    n_rejected: int = 0
    h_max: float = 0.0


def _dopri5(kappa, u0, r_end, ctrl: IntegratorSettings, record: bool) -> _Run:
    rtol, atol = ctrl.rtol, ctrl.atol
    r, u, v = 0.0, float(u0), 0.0
    k1u, k1v = _f(u, v, kappa)
    h = min(ctrl.max_step, r_end, 1e-2 / max(1.0, math.sqrt(abs(kappa))))
    run = _Run([r], [u], [v], u, math.inf)
    while r < r_end:
        last = r + h >= r_end
        if last:
            h = r_end - r
        k2u, k2v = _f(u + h * _A21 * k1u, v + h * _A21 * k1v, kappa)
        k3u, k3v = _f(u + h * (_A31 * k1u + _A32 * k2u), v + h * (_A31 * k1v + _A32 * k2v), kappa)
        k4u, k4v = _f(
            u + h * (_A41 * k1u + _A42 * k2u + _A43 * k3u),
            v + h * (_A41 * k1v + _A42 * k2v + _A43 * k3v),
            kappa,
        )
        k5u, k5v = _f(
            u + h * (_A51 * k1u + _A52 * k2u + _A53 * k3u + _A54 * k4u),
            v + h * (_A51 * k1v + _A52 * k2v + _A53 * k3v + _A54 * k4v),
            kappa,
        )
        k6u, k6v = _f(
            u + h * (_A61 * k1u + _A62 * k2u + _A63 * k3u + _A64 * k4u + _A65 * k5u),
            v + h * (_A61 * k1v + _A62 * k2v + _A63 * k3v + _A64 * k4v + _A65 * k5v),
            kappa,
        )
        un = u + h * (_B1 * k1u + _B3 * k3u + _B4 * k4u + _B5 * k5u + _B6 * k6u)
        vn = v + h * (_B1 * k1v + _B3 * k3v + _B4 * k4v + _B5 * k5v + _B6 * k6v)
        k7u, k7v = _f(un, vn, kappa)
        eu = h * (_E1 * k1u + _E3 * k3u + _E4 * k4u + _E5 * k5u + _E6 * k6u + _E7 * k7u)
        ev = h * (_E1 * k1v + _E3 * k3v + _E4 * k4v + _E5 * k5v + _E6 * k6v + _E7 * k7v)
        eu /= atol + rtol * max(abs(u), abs(un))
        ev /= atol + rtol * max(abs(v), abs(vn))
        err = math.sqrt(0.5 * (eu * eu + ev * ev))
        if not math.isfinite(err):
            raise IntegratorError(f"non-finite state at r={r!r}")
        if err <= 1.0:
            r = r_end if last else r + h
            u, v = un, vn
            k1u, k1v = k7u, k7v
            run.n_steps += 1
            run.h_max = max(run.h_max, h)
            run.u_max = max(run.u_max, u)
            run.v_min = min(run.v_min, v)
            if record:
                run.rs.append(r)
                run.us.append(u)
                run.vs.append(v)
            if last:
                break
        else:
            run.n_rejected += 1
        fac = 5.0 if err == 0.0 else min(5.0, max(0.2, 0.9 * err**-0.2))
        h = min(h * fac, ctrl.max_step)
        if h < ctrl.min_step * max(1.0, abs(r)):
            raise IntegratorError(f"step size underflow at r={r!r} (h={h!r})")
    if not record:
        run.rs.append(r)
        run.us.append(u)
        run.vs.append(v)
    return run


def _rk4(kappa, u0, r_end, ctrl: IntegratorSettings, record: bool) -> _Run:
    n = max(1, math.ceil(r_end / min(ctrl.h, ctrl.max_step) - 1e-9))
    h = r_end / n
    u, v = float(u0), 0.0
    run = _Run([0.0], [u], [v], u, math.inf, h_max=h)
    for i in range(1, n + 1):
        k1u, k1v = _f(u, v, kappa)
        k2u, k2v = _f(u + 0.5 * h * k1u, v + 0.5 * h * k1v, kappa)
        k3u, k3v = _f(u + 0.5 * h * k2u, v + 0.5 * h * k2v, kappa)
        k4u, k4v = _f(u + h * k3u, v + h * k3v, kappa)
        u += h / 6.0 * (k1u + 2 * k2u + 2 * k3u + k4u)
        v += h / 6.0 * (k1v + 2 * k2v + 2 * k3v + k4v)
        if not (math.isfinite(u) and math.isfinite(v)):
            raise IntegratorError(f"non-finite state at r={i * h!r}")
        run.u_max = max(run.u_max, u)
        run.v_min = min(run.v_min, v)
        if record or i == n:
            run.rs.append(r_end if i == n else i * h)
            run.us.append(u)
            run.vs.append(v)
    run.n_steps = n
    return run


def _run(kappa, u0, r_end, ctrl, record) -> _Run:
    if ctrl.method == "dopri5":
        return _dopri5(kappa, u0, r_end, ctrl, record)
    return _rk4(kappa, u0, r_end, ctrl, record)


@dataclass(frozen=True)
class Shot:
    """Endpoint of one integration, as used by the shooting solvers.

    ``u_max`` is the largest u and ``v_min`` the smallest v over the accepted
    steps after r=0 (``inf`` when no step was taken).
    """

    u: float
    v: float
    u_max: float
    v_min: float

    @property
    def slope(self) -> float:
        return self.v / math.sqrt(1.0 + self.v * self.v)


def shoot(kappa: float, u0: float, r_end: float, ctrl: IntegratorSettings = DEFAULT_CTRL) -> Shot:
    """Integrate from r=0 to ``r_end`` and return only the endpoint state."""
    if kappa == 0:
        raise DomainError("kappa must be non-zero")
    if u0 == 0.0 or r_end == 0.0:
        return Shot(float(u0), 0.0, float(u0), 0.0 if r_end > 0 else math.inf)
    run = _run(kappa, u0, r_end, ctrl, record=False)
    return Shot(run.us[-1], run.vs[-1], run.u_max, run.v_min)


def _quintic_hermite(x: np.ndarray, d: np.ndarray) -> BPoly:
    """Piecewise quintic matching value, first and second derivative at every node.

    Same interpolant as ``BPoly.from_derivatives`` with three derivatives per
    node, with the Bernstein coefficients built in one vectorized pass.
    """
    h = np.diff(x)
    y0, d0, s0 = d[:-1, 0], d[:-1, 1], d[:-1, 2]
    y1, d1, s1 = d[1:, 0], d[1:, 1], d[1:, 2]
    c = np.empty((6, h.size))
    c[0] = y0
    c[1] = y0 + h * d0 / 5
    c[2] = y0 + 2 * h * d0 / 5 + h * h * s0 / 20
    c[3] = y1 - 2 * h * d1 / 5 + h * h * s1 / 20
    c[4] = y1 - h * d1 / 5
    c[5] = y1
    return BPoly(c, x, extrapolate=False)


@dataclass(frozen=True, eq=False)
class Profile:
    """Sampled trajectory ``(r, u, v)`` with strictly increasing ``r``.

    Between samples the profile is evaluated by quintic Hermite
    interpolation on ``(u, u', u'')`` and ``(v, v', v'')``, all of which are
    known exactly from the ODE at every sample.
    """

    params: ModelParams
    r: np.ndarray
    u: np.ndarray
    v: np.ndarray
    step_stats: StepStats = field(default_factory=lambda: StepStats("none", 0, 0.0, 0.0, 0.0, 0))

    def __post_init__(self):
        arrays = []
        for name in ("r", "u", "v"):
            a = np.array(getattr(self, name), dtype=float)
            a.setflags(write=False)
            object.__setattr__(self, name, a)
            arrays.append(a)
        r, u, v = arrays
        if not (r.shape == u.shape == v.shape and r.ndim == 1 and r.size >= 1):
            raise DomainError("r, u, v must be 1-D arrays of equal length")
        if not (np.all(np.isfinite(r)) and np.all(np.isfinite(u)) and np.all(np.isfinite(v))):
            raise DomainError("profile contains NaN/Inf")
        if r.size > 1 and np.any(np.diff(r) <= 0):
            raise DomainError("r must be strictly increasing")

    def __len__(self) -> int:
        return self.r.size

    @property
    def kappa(self) -> float:
        return self.params.kappa

    @property
    def slope(self) -> np.ndarray:
        return self.v / np.sqrt(1.0 + self.v * self.v)

    @property
    def psi(self) -> np.ndarray:
        return np.arcsinh(self.v)

    @property
    def u2(self) -> np.ndarray:
        """Second derivative u'' = kappa * u * (1 - u'^2)^(3/2)."""
        return self.kappa * self.u / (1.0 + self.v * self.v) ** 1.5

    @property
    def residuals(self) -> np.ndarray:
        return _residuals(self.u, self.v, self.params)

    @property
    def max_residual(self) -> float:
        return float(np.max(np.abs(self.residuals)))

    def states(self) -> Iterator[PhaseState]:
        for r, u, v in zip(self.r, self.u, self.v):
            yield PhaseState(float(r), float(u), float(v))

    @property
    def samples(self) -> tuple[PhaseState, ...]:
        return tuple(self.states())

    @cached_property
    def _interp(self) -> tuple[BPoly, BPoly]:
        if self.r.size < 2:
            raise DomainError("need at least two samples to interpolate")
        k = self.kappa
        s = self.slope
        ud = np.column_stack([self.u, s, self.u2])
        vd = np.column_stack([self.v, k * self.u, k * s])
        return _quintic_hermite(self.r, ud), _quintic_hermite(self.r, vd)

    def covers(self, r) -> bool:
        r = np.asarray(r, dtype=float)
        return bool(np.all((r >= self.r[0]) & (r <= self.r[-1])))

    def at(self, r):
        """Interpolated ``(u, v)`` at ``r`` (scalar or array)."""
        if not self.covers(r):
            raise DomainError(f"r outside profile range [{self.r[0]}, {self.r[-1]}]")
        pu, pv = self._interp
        ru = pu(r)
        rv = pv(r)
        if np.ndim(r) == 0:
            return float(ru), float(rv)
        return ru, rv

    def slope_at(self, r):
        _, v = self.at(r)
        return v / np.sqrt(1.0 + np.square(v))

    def u_at(self, r):
        return self.at(r)[0]


def _sample_grid(r_max: float, spacing: float | None, r_eval) -> np.ndarray:
    grids = []
    if spacing is not None:
        n = max(1, math.ceil(r_max / spacing - 1e-9))
        grids.append(np.linspace(0.0, r_max, n + 1))
    if r_eval is not None:
        re = np.asarray(r_eval, dtype=float).ravel()
        if np.any(re < 0) or np.any(re > r_max):
            raise DomainError("r_eval must lie in [0, r_max]")
        grids.append(re)
    if not grids:
        return np.empty(0)
    return np.unique(np.concatenate(grids))


def _merge(step_r, grid, tol):
    # grid points that coincide with a step point (to rounding) are dropped
    idx = np.searchsorted(step_r, grid)
    lo = np.abs(grid - step_r[np.clip(idx - 1, 0, step_r.size - 1)])
    hi = np.abs(grid - step_r[np.clip(idx, 0, step_r.size - 1)])
    return grid[(np.minimum(lo, hi) > tol)]


def integrate_ivp(
    params: ModelParams,
    r_max: float,
    ctrl: IntegratorSettings = DEFAULT_CTRL,
    r_eval: Sequence[float] | None = None,
) -> Profile:
    """Solve the initial value problem u(0)=u0, u'(0)=0 on ``[0, r_max]``.

    Samples are the accepted integrator steps together with a uniform grid of
    spacing ``ctrl.sample_spacing`` and any extra abscissae in ``r_eval``,
    the latter filled in by quintic Hermite interpolation between steps.
    """
    if params.kappa == 0:
        raise DomainError("kappa must be non-zero; use bounds.hyperbolic_cylinder for kappa=0")
    if params.lam != 0:
        raise PreconditionError("normalize_lambda first: the solver runs with lam=0")
    if not (r_max > 0 and math.isfinite(r_max)):
        raise DomainError("r_max must be positive and finite")

    grid = _sample_grid(r_max, ctrl.sample_spacing, r_eval)
    if params.u0 == 0.0:
        r = np.unique(np.concatenate([[0.0, r_max], grid]))
        zeros = np.zeros_like(r)
        stats = StepStats("exact-zero", ctrl.order, ctrl.rtol, ctrl.atol, 0.0, 0)
        return Profile(params, r, zeros, zeros.copy(), stats)

    run = _run(params.kappa, params.u0, r_max, ctrl, record=True)
    stats = StepStats(ctrl.method, ctrl.order, ctrl.rtol, ctrl.atol, run.h_max, run.n_steps, run.n_rejected)
    steps = Profile(params, run.rs, run.us, run.vs, stats)
    if steps.max_residual > TOL_CONSERVE:
        raise IntegratorError(f"first-integral drift {steps.max_residual:.3e} exceeds {TOL_CONSERVE:g}")
    extra = _merge(steps.r, grid, 1e-12 * max(1.0, r_max))
    if extra.size == 0:
        return steps
    ue, ve = steps.at(extra)
    r = np.concatenate([steps.r, extra])
    order = np.argsort(r, kind="stable")
    return Profile(
        params,
        r[order],
        np.concatenate([steps.u, ue])[order],
        np.concatenate([steps.v, ve])[order],
        stats,
    )


def extend_by_symmetry(p: Profile) -> Profile:
    """Even reflection about r=0: u(-r) = u(r), v(-r) = -v(r)."""
    if p.r[0] != 0.0 or p.v[0] != 0.0:
        raise PreconditionError("profile must start at a critical point r=0 with v=0")
    return Profile(
        p.params,
        np.concatenate([-p.r[:0:-1], p.r]),
        np.concatenate([p.u[:0:-1], p.u]),
        np.concatenate([-p.v[:0:-1], p.v]),
        p.step_stats,
    )


def reflect_sign(p: Profile) -> Profile:
    """The trajectory for ``-u0``: (u, v) -> (-u, -v) sample-wise."""
    return Profile(replace(p.params, u0=-p.params.u0), p.r, -p.u, -p.v, p.step_stats)


def normalize_lambda(params: ModelParams) -> tuple[ModelParams, float]:
    """Shift heights by ``lam/kappa`` so that the curvature is ``kappa * u``.

    Returns the shifted parameters (with ``lam=0``) and the shift; a height
    ``w`` in the normalized frame is ``w - shift`` in the original one.
    """
    if params.kappa == 0:
        if params.lam != 0:
            raise DomainError("kappa=0 with lam!=0 is the constant mean curvature case; use bounds.hyperbolic_cylinder")
        return params, 0.0
    shift = params.lam / params.kappa
    return ModelParams(params.kappa, params.u0 + shift, 0.0), shift


def canonicalize_sign(params: ModelParams) -> tuple[ModelParams, bool]:
    """Flip ``u0`` so that it has the sign of ``kappa``.

    Returns ``(params, flipped)``; when ``flipped`` the original trajectory is
    ``reflect_sign`` of the canonical one.
    """
    if params.u0 == 0 or (params.u0 > 0) == (params.kappa > 0):
        return params, False
    return replace(params, u0=-params.u0), True
