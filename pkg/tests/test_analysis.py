import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import oracles
from bandsolve.analysis import (
    compare_kappa,
    compare_kappa_bvp,
    compare_u0,
    first_zero,
    growth_limit_at_zero,
    max_slope_closed_form,
    pendent_monotonicity,
    pendent_summary,
    sessile_shape_check,
    slope_lower_bound,
    zero_lower_bounds,
)
from bandsolve.errors import PreconditionError
from bandsolve.ode_core import ModelParams, integrate_ivp

# first zero r_o by quadrature of dr = du / u'(u), frozen
R_O = {
    (-0.5, -0.5): 2.2730071256089115,
    (-0.5, -1.0): 2.4221120551369193,
    (-0.5, -2.0): 2.9526026316142473,
    (-1.0, -0.5): 1.643039530047624,
    (-1.0, -1.0): 1.8451711373602895,
    (-1.0, -2.0): 2.509169011881652,
    (-2.0, -0.5): 1.2110560275684596,
    (-2.0, -1.0): 1.4763013158071234,
    (-2.0, -2.0): 2.260942962518476,
}


def test_frozen_table_matches_oracle():
    for (k, u0), ro in R_O.items():
        assert oracles.first_zero(k, u0) == pytest.approx(ro, abs=1e-12)


@pytest.mark.parametrize("key", sorted(R_O))
def test_first_zero(key):
    prm = ModelParams(*key)
    ro = first_zero(prm)
    assert abs(ro - R_O[key]) < 1e-8
    lo1, lo2 = zero_lower_bounds(prm)
    assert lo1 < lo2 < ro


def test_first_zero_preconditions():
    with pytest.raises(PreconditionError):
        first_zero(ModelParams(1.0, -1.0))
    with pytest.raises(PreconditionError):
        first_zero(ModelParams(-1.0, 1.0))


def test_max_slope_spot_value():
    assert max_slope_closed_form(ModelParams(-1.0, -1.0)) == pytest.approx(math.sqrt(5) / 3, abs=1e-15)
    with pytest.raises(PreconditionError):
        max_slope_closed_form(ModelParams(1.0, -1.0))
    with pytest.raises(PreconditionError):
        max_slope_closed_form(ModelParams(-1.0, 1.0))


@given(st.floats(0.01, 100), st.floats(0.01, 100))
def test_max_slope_below_one(k, u0):
    s = max_slope_closed_form(ModelParams(-k, -u0))
    assert 0 < s < 1


@pytest.mark.parametrize("key", sorted(R_O))
def test_pendent_summary(key):
    s = pendent_summary(ModelParams(*key))
    assert s.passed, s.to_dict()
    assert s.period == 4 * s.r_o
    assert s.period_residual < 1e-6
    assert s.u_min >= key[1] - 1e-8 and s.u_max <= -key[1] + 1e-8
    e1, e2 = s.lattice_error()
    assert e1 < 1e-6 and e2 < 1e-6
    assert abs(s.max_slope_at_zero - s.max_slope_formula) < 1e-6
    # two periods: zeros at r_o, 3r_o, 5r_o, 7r_o
    assert s.zero_locations.size == 4


def test_pendent_summary_dict_roundtrip_fields():
    d = pendent_summary(ModelParams(-1.0, -1.0)).to_dict()
    assert d["passed"] and d["max_slope_formula"] == pytest.approx(math.sqrt(5) / 3)
    assert d["r_o"] == pytest.approx(R_O[(-1.0, -1.0)], abs=1e-8)


def test_pendent_summary_preconditions():
    with pytest.raises(PreconditionError):
        pendent_summary(ModelParams(1.0, 1.0))
    with pytest.raises(PreconditionError):
        pendent_summary(ModelParams(-1.0, 1.0))


@pytest.mark.parametrize("k,u0,r", [(1.0, 1.0, 20.0), (0.5, 0.2, 30.0), (2.0, 3.0, 5.0)])
def test_sessile_shape(k, u0, r):
    rep = sessile_shape_check(integrate_ivp(ModelParams(k, u0), r))
    assert rep.passed
    assert rep.min_location == 0.0 and rep.u2_at_zero == k * u0
    assert 1 - rep.slope_end <= 1 - rep.slope_lower_bound + 1e-9


def test_sessile_slope_tends_to_one():
    p = integrate_ivp(ModelParams(1.0, 1.0), 20.0)
    assert p.slope[-1] > 0.9999


def test_slope_lower_bound_values():
    assert slope_lower_bound(1.0, 1.0, 0.0) == 0.0
    assert slope_lower_bound(1.0, 1.0, 1.0) == pytest.approx(1 / math.sqrt(2))


def test_growth_limit():
    lim, err = growth_limit_at_zero(integrate_ivp(ModelParams(2.0, 0.5), 1.0))
    assert err < 1e-6 and lim == pytest.approx(1.0, abs=1e-6)


def test_sessile_check_preconditions():
    with pytest.raises(PreconditionError):
        sessile_shape_check(integrate_ivp(ModelParams(-1.0, -1.0), 1.0))


def test_compare_kappa():
    v = compare_kappa(1.0, 0.5, 1.0, np.linspace(-5, 5, 41))
    assert v.passed and v.min_slack > 0
    # r=0 is excluded
    assert 0.0 not in v.grid
    with pytest.raises(PreconditionError):
        compare_kappa(1.0, 1.0, 0.5, [1.0])


@settings(max_examples=15, deadline=None)
@given(st.floats(0.1, 3.0), st.floats(0.1, 2.0), st.floats(1.1, 3.0), st.floats(0.05, 5.0))
def test_compare_kappa_property(u0, k1, ratio, r):
    v = compare_kappa(u0, k1, k1 * ratio, [r, -r])
    assert v.min_slack > 0


def test_compare_u0():
    v = compare_u0(1.0, 0.5, 0.3, np.linspace(0.1, 4, 20))
    assert v.passed and v.min_slack > 0
    with pytest.raises(PreconditionError):
        compare_u0(-1.0, 0.5, 0.3, [1.0])
    with pytest.raises(PreconditionError):
        compare_u0(1.0, 0.5, -0.3, [1.0])


@settings(max_examples=15, deadline=None)
@given(st.floats(0.2, 3.0), st.floats(-2.0, 2.0), st.floats(0.01, 2.0), st.floats(0.05, 5.0))
def test_compare_u0_property(k, u0, d, r):
    assert compare_u0(k, u0, d, [r]).min_slack > 0


@pytest.mark.parametrize("a,beta", [(0.5, 0.5), (1.0, 1.0), (2.0, 0.25)])
def test_compare_kappa_bvp(a, beta):
    v = compare_kappa_bvp(a, beta, 0.5, 2.0)
    assert v.passed and v.min_slack > 0
    assert v.grid[0] == 0.0 and v.grid[-1] == a


def test_pendent_monotonicity_window_note():
    vk, vd = pendent_monotonicity(-1.0, -2.0, -1.0, 0.2)
    assert vk.passed and vd.passed
    assert "default window" in vk.window_note
    assert vk.grid[-1] == pytest.approx(0.5 * R_O[(-2.0, -1.0)], abs=1e-8)
    vk2, _ = pendent_monotonicity(-1.0, -2.0, -1.0, 0.2, window=0.3)
    assert vk2.window_note == "window given" and vk2.grid[-1] == 0.3


def test_verdict_to_dict():
    d = compare_u0(1.0, 0.5, 0.3, [1.0, 2.0]).to_dict()
    assert d["n_points"] == 2 and d["passed"] is True
