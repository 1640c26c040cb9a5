import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from thermoflow.core import BlockDiagonalState, EnergySpectrum, ThermalContext, beta_order, trace_distance
from thermoflow.curves import curve_dominates, state_curve
from thermoflow.errors import EpsilonTooLarge, IndexOutOfRange, NonTrivialSpectrum, ThermoflowError
from thermoflow.sampling import random_context, random_state, sample_ball
from thermoflow.smoothing import (
    f_index_function,
    flattest_state,
    g_index_function,
    steep_state,
    steepest_bounds,
    steepest_nonexistence_demo,
    steepest_state_small_eps,
    trivial_flattest,
    trivial_steepest,
)


def test_index_functions(three_level):
    state, ctx = three_level
    o = beta_order(state, ctx)
    assert f_index_function(o, ctx, 1) == pytest.approx(0.0125)
    assert f_index_function(o, ctx, 2) == pytest.approx(0.10625)
    assert g_index_function(o, ctx, 3) == pytest.approx(0.15)
    with pytest.raises(IndexOutOfRange):
        f_index_function(o, ctx, 3)
    with pytest.raises(IndexOutOfRange):
        g_index_function(o, ctx, 1)
    th = beta_order(ctx.thermal_state(), ctx)
    assert all(abs(f_index_function(th, ctx, m)) < 1e-15 for m in (1, 2))


@settings(max_examples=100, deadline=None)
@given(st.integers(2, 6), st.integers(0, 2**31))
def test_g2_at_least_delta(d, seed):
    rng = np.random.default_rng(seed)
    ctx = random_context(d, rng)
    s = random_state(ctx, rng)
    o = beta_order(s, ctx)
    assert g_index_function(o, ctx, 2) >= trace_distance(s, ctx.thermal_state()) - 1e-12


def test_six_level_flattest(backend, six_level):
    state, ctx = six_level
    res = flattest_state(state, ctx, 0.1)
    assert np.allclose(res.result_state.probabilities, [0.225, 0.225, 0.22, 0.11, 0.11, 0.11], atol=1e-12)
    assert res.indices == {"M": 2, "N": 4}
    tr = trivial_flattest(state, 0.1)
    assert tr.indices == {"N1": 2, "N2": 4}
    assert np.allclose(tr.result_state.probabilities, res.result_state.probabilities, atol=1e-15)
    assert res.achieved_distance == pytest.approx(0.1)


def test_six_level_steep(six_level):
    state, ctx = six_level
    res = steep_state(state, ctx, 0.1)
    assert np.allclose(res.result_state.probabilities, [0.4, 0.25, 0.22, 0.1, 0.03, 0.0], atol=1e-12)
    assert res.indices == {"R": 5}


def test_three_level_constructions(backend, three_level):
    state, ctx = three_level
    fl = flattest_state(state, ctx, 0.05)
    assert fl.indices == {"M": 2, "N": 3}
    assert np.allclose(fl.result_state.probabilities, [0.08, 0.32, 0.6], atol=1e-12)
    st_ = steep_state(state, ctx, 0.05)
    assert np.allclose(st_.result_state.probabilities, [0.15, 0.35, 0.5], atol=1e-12)
    b = steepest_bounds(state, ctx)
    assert b.eps_a == pytest.approx(0.1) and math.isinf(b.eps_b) and b.eps_c == pytest.approx(0.25 / 7)
    sp = steepest_state_small_eps(state, ctx, 0.03)
    assert np.allclose(sp.result_state.probabilities, [0.13, 0.35, 0.52], atol=1e-12)
    with pytest.raises(EpsilonTooLarge) as info:
        steepest_state_small_eps(state, ctx, 0.05)
    assert info.value.bound_name == "eps_C"


@pytest.mark.parametrize("fn", [flattest_state, steep_state, steepest_state_small_eps])
def test_zero_epsilon_is_identity(fn, three_level):
    state, ctx = three_level
    assert np.array_equal(fn(state, ctx, 0.0).result_state.probabilities, state.probabilities)


def test_saturation_and_pure(three_level):
    state, ctx = three_level
    fl = flattest_state(state, ctx, 0.2)
    assert fl.indices == {"saturated": True}
    assert fl.result_state.allclose(ctx.thermal_state())
    st_ = steep_state(state, ctx, 1.0)
    assert np.array_equal(st_.result_state.probabilities, [1.0, 0.0, 0.0])


def test_epsilon_range(three_level):
    state, ctx = three_level
    with pytest.raises(ThermoflowError):
        flattest_state(state, ctx, 1.5)
    with pytest.raises(ThermoflowError):
        steep_state(state, ctx, -0.1)


def test_trivial_only_constructions(three_level):
    state, _ = three_level
    with pytest.raises(NonTrivialSpectrum):
        trivial_flattest(state, 0.1)
    with pytest.raises(NonTrivialSpectrum):
        trivial_steepest(state, 0.1)


def test_trivial_flattest_large_eps_uniform(six_level):
    state, _ = six_level
    assert np.allclose(trivial_flattest(state, 0.9).result_state.probabilities, 1 / 6)


@settings(max_examples=150, deadline=None)
@given(st.integers(2, 6), st.floats(0.0, 1.0), st.integers(0, 2**31))
def test_constructions_stay_in_ball_and_order(d, eps, seed):
    rng = np.random.default_rng(seed)
    ctx = random_context(d, rng)
    s = random_state(ctx, rng, 0.2)
    fl = flattest_state(s, ctx, eps)
    st_ = steep_state(s, ctx, eps)
    for res in (fl, st_):
        p = res.result_state.probabilities
        assert p.min() >= -1e-15 and p.sum() == pytest.approx(1.0, abs=1e-12)
        assert res.achieved_distance <= eps + 1e-12
    c = state_curve(s, ctx)
    assert curve_dominates(c, state_curve(fl.result_state, ctx))
    assert curve_dominates(state_curve(st_.result_state, ctx), c)


@settings(max_examples=100, deadline=None)
@given(st.integers(2, 6), st.integers(0, 2**31))
def test_trivial_flattest_agrees(d, seed):
    rng = np.random.default_rng(seed)
    ctx = random_context(d, rng, trivial=True)
    s = random_state(ctx, rng, 0.2)
    eps = float(rng.uniform(0, 0.6))
    a = flattest_state(s, ctx, eps).result_state.probabilities
    b = trivial_flattest(s, eps).result_state.probabilities
    assert np.allclose(a, b, atol=1e-12)


def test_pure_state_steepest_bound():
    spec = EnergySpectrum((0.0, 1.0))
    ctx = ThermalContext(spec, 1.0)
    s = BlockDiagonalState(np.array([1.0, 0.0]), spec)
    b = steepest_bounds(s, ctx)
    assert b.k == 1 and b.eps_b == pytest.approx(math.exp(-1.0))
    eps = 0.99 * b.limit
    top = state_curve(steepest_state_small_eps(s, ctx, eps).result_state, ctx)
    rng = np.random.default_rng(0)
    for p in sample_ball(s.probabilities, eps, rng, 200):
        assert curve_dominates(top, state_curve(BlockDiagonalState(p, spec), ctx))
    # just above the bound a ball state escapes
    eps = 1.01 * b.limit
    probe = BlockDiagonalState(np.array([1 - eps, eps]), spec)
    assert not curve_dominates(top, state_curve(probe, ctx))


def test_nonexistence_demo():
    r = steepest_nonexistence_demo(grid_step=100)
    assert r.holds and r.unique_d0_maximizer
    assert r.min_support_weight == pytest.approx(8 / 13)
    assert r.d1_margin == pytest.approx(0.455554, abs=1e-6)
    assert r.steep_d1 > r.d1_of_d0_maximizer and r.steep_d0 < r.d1_of_d0_maximizer


def test_to_dict(three_level):
    state, ctx = three_level
    out = flattest_state(state, ctx, 0.05).to_dict(ctx)
    assert out["kind"] == "flattest" and out["indices"] == {"M": 2, "N": 3}
    assert out["trace_distance"] == pytest.approx(0.05)
