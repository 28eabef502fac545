"""Stationary bands: spacelike cylindrical surfaces with mean curvature linear in time."""

from .errors import (
    BandsolveError,
    DomainError,
    IntegratorError,
    NoBracketError,
    PreconditionError,
    RegimeError,
)
from .ode_core import (
    IntegratorSettings,
    ModelParams,
    PhaseState,
    Profile,
    canonicalize_sign,
    extend_by_symmetry,
    first_integral_residual,
    integrate_ivp,
    normalize_lambda,
    reflect_sign,
    rhs,
    shoot,
)
from .shooting import Branch, BvpProblem, ShootingResult, solve_bvp, solve_foliation, young_residual

__version__ = "0.1.0"
