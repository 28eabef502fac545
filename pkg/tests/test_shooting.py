import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import oracles
from bandsolve.errors import DomainError, NoBracketError, PreconditionError
from bandsolve.ode_core import ModelParams, integrate_ivp, shoot
from bandsolve.shooting import (
    Branch,
    BvpProblem,
    bisect,
    shooting_scan,
    solve_bvp,
    solve_foliation,
    young_residual,
)

# brentq on the DOP853 (rtol=atol=1e-13) terminal slope, frozen
BVP_ORACLE = {
    (1.0, 1.0, 1.0): 1.0204704268245741,
    (0.5, 0.25, 2.0): 0.23288986533856373,
    (2.0, 2.0, 0.5): 3.026244464341055,
}
PENDENT_U0 = -1.3569403760984138  # a=1, beta=1, kappa=-1
FOLIATION_U0 = 1.51202436769249  # a=2, b=3, kappa=1


def test_bisect_simple():
    x, br, it = bisect(lambda x: x * x - 2, 0.0, 2.0)
    assert x == pytest.approx(math.sqrt(2), abs=1e-12)
    assert br[0] <= math.sqrt(2) <= br[1] and it < 60


def test_bisect_endpoint_zero_and_no_bracket():
    assert bisect(lambda x: x, 0.0, 1.0)[0] == 0.0
    with pytest.raises(NoBracketError) as e:
        bisect(lambda x: x * x + 1, -1.0, 1.0)
    assert len(e.value.trace) == 2


@pytest.mark.parametrize("a,beta,kappa", [(0, 1, 1), (-1, 1, 1), (1, math.nan, 1), (1, 1, 0), (math.inf, 1, 1)])
def test_problem_validation(a, beta, kappa):
    with pytest.raises(DomainError):
        BvpProblem(a, beta, kappa)


@pytest.mark.parametrize("key", sorted(BVP_ORACLE))
def test_sessile_against_oracle(key):
    a, beta, kappa = key
    res = solve_bvp(BvpProblem(a, beta, kappa))
    assert res.branch is Branch.SESSILE
    assert res.u0 == pytest.approx(BVP_ORACLE[key], abs=1e-9)
    assert abs(res.young_residual) < 1e-9
    assert res.profile.r[-1] == a and res.u_a == res.profile.u[-1]


@pytest.mark.parametrize("a", [0.5, 1.0, 2.0])
@pytest.mark.parametrize("beta", [0.25, 1.0, 2.0])
@pytest.mark.parametrize("kappa", [0.5, 1.0, 2.0])
def test_sessile_closed_form_height(a, beta, kappa):
    res = solve_bvp(BvpProblem(a, beta, kappa))
    closed = math.sqrt(res.u0**2 + 2.0 / kappa * (math.cosh(beta) - 1.0))
    assert abs(res.u_a - closed) < 1e-7
    assert abs(young_residual(res.profile, a, beta)) < 1e-9


def test_plane_solution():
    res = solve_bvp(BvpProblem(1.0, 0.0, 2.0))
    assert res.branch is Branch.PLANE and res.u0 == 0.0
    assert np.all(res.profile.u == 0)


def test_negative_beta_mirrors():
    pos = solve_bvp(BvpProblem(1.0, 1.0, 1.0))
    neg = solve_bvp(BvpProblem(1.0, -1.0, 1.0))
    assert neg.branch is Branch.SESSILE
    assert neg.u0 == -pos.u0
    assert np.array_equal(neg.profile.u, -pos.profile.u)
    assert abs(neg.young_residual) < 1e-9


def test_pendent_negative_branch():
    res = solve_bvp(BvpProblem(1.0, 1.0, -1.0))
    assert res.branch is Branch.PENDENT_NEGATIVE
    assert res.u0 == pytest.approx(PENDENT_U0, abs=1e-9)
    assert res.u_a < 0 and np.all(res.profile.u < 0)
    assert np.all(np.diff(res.profile.u) > 0)


def test_pendent_mirror_branch():
    res = solve_bvp(BvpProblem(1.0, -1.0, -1.0))
    assert res.branch is Branch.PENDENT_POSITIVE
    assert res.u0 == pytest.approx(-PENDENT_U0, abs=1e-9)


def test_pendent_no_admissible_root():
    # the sign change near u0=-1.1 belongs to a profile that crosses zero
    # before r=2; every admissible scan has a positive residual
    with pytest.raises(NoBracketError) as e:
        solve_bvp(BvpProblem(2.0, 1.0, -1.0))
    assert e.value.trace
    assert all(val > 0 for _, val, ok in e.value.trace if ok)


def test_pendent_large_height():
    res = solve_bvp(BvpProblem(0.1, 5.0, -1.0))
    assert res.u0 < -700 and abs(res.young_residual) < 1e-9


def test_pendent_bracket_must_be_negative():
    with pytest.raises(PreconditionError):
        solve_bvp(BvpProblem(1.0, 1.0, -1.0), bracket=(-1.0, 0.5))


def test_sessile_bracket_validation():
    with pytest.raises(PreconditionError):
        solve_bvp(BvpProblem(1.0, 1.0, 1.0), bracket=(2.0, 1.0))


def test_explicit_bracket_same_answer():
    res = solve_bvp(BvpProblem(1.0, 1.0, 1.0), bracket=(0.5, 5.0))
    assert res.u0 == pytest.approx(BVP_ORACLE[(1.0, 1.0, 1.0)], abs=1e-9)


def test_shooting_scan_flags():
    prob = BvpProblem(1.0, 1.0, -1.0)
    trace = shooting_scan(prob, [-0.5, -1.0, -2.0, -10.0])
    assert [t[0] for t in trace] == [-0.5, -1.0, -2.0, -10.0]
    assert all(t[2] for t in trace)
    # the solution lies between -1 and -2
    assert trace[1][1] < 0 < trace[2][1]
    # r_o = 1.643 for kappa=-1, u0=-0.5: crosses zero before a=3
    assert not shooting_scan(BvpProblem(3.0, 1.0, -1.0), [-0.5])[0][2]


@settings(max_examples=20, deadline=None)
@given(st.floats(0.2, 3.0), st.floats(0.05, 2.5), st.floats(0.2, 3.0))
def test_young_condition_property(a, beta, kappa):
    res = solve_bvp(BvpProblem(a, beta, kappa))
    assert res.u0 > 0
    s = shoot(kappa, res.u0, a)
    assert abs(s.slope - math.tanh(beta)) < 1e-9


@settings(max_examples=20, deadline=None)
@given(st.floats(0.2, 3.0), st.floats(0.1, 2.0), st.floats(0.3, 2.0), st.floats(1.05, 3.0))
def test_bvp_height_decreases_with_kappa(a, beta, k1, ratio):
    u1 = solve_bvp(BvpProblem(a, beta, k1)).u0
    u2 = solve_bvp(BvpProblem(a, beta, k1 * ratio)).u0
    assert u1 > u2


def test_foliation_oracle():
    u0 = solve_foliation(2.0, 3.0, 1.0)
    assert u0 == pytest.approx(FOLIATION_U0, abs=1e-9)
    assert shoot(1.0, u0, 2.0).u == pytest.approx(3.0, abs=1e-8)


def test_foliation_sign_and_zero():
    assert solve_foliation(1.0, 0.0, 1.0) == 0.0
    assert solve_foliation(2.0, -3.0, 1.0) == -solve_foliation(2.0, 3.0, 1.0)


def test_foliation_preconditions():
    with pytest.raises(PreconditionError):
        solve_foliation(1.0, 1.0, -1.0)
    with pytest.raises(DomainError):
        solve_foliation(0.0, 1.0, 1.0)


@settings(max_examples=30, deadline=None)
@given(st.floats(0.01, 5.0), st.floats(-5.0, 5.0))
def test_foliation_reproduces_height(a, b):
    u0 = solve_foliation(a, b, 1.0)
    assert abs(u0) <= abs(b)
    p = integrate_ivp(ModelParams(1.0, u0), a)
    assert abs(p.u[-1] - b) < 1e-8


def test_foliation_independent_route():
    # u(a; u0) from the quadrature oracle at the returned u0
    u0 = solve_foliation(1.0, 2.0, 1.0)
    assert oracles.u_of_r(1.0, 1.0, u0) == pytest.approx(2.0, abs=1e-9)
