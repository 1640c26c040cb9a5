import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from thermoflow.core import BlockDiagonalState, EnergySpectrum, ThermalContext
from thermoflow.curves import (
    build_curve_unordered,
    curve_dominates,
    epsilon_band_check,
    evaluate,
    max_deviation,
    state_curve,
)
from thermoflow.errors import NotInBall, OutOfDomain, SpectrumMismatch, ThermoflowError
from thermoflow.sampling import random_context, random_state


def test_thermal_curve_is_diagonal():
    ctx = ThermalContext(EnergySpectrum((0.0, 1.0, 2.5)), 0.7)
    c = state_curve(ctx.thermal_state(), ctx)
    assert np.allclose(c.x, c.y)


def test_six_level_curve_kinks(six_level):
    state, ctx = six_level
    c = state_curve(state, ctx)
    assert len(c.kinks) == 7
    assert c.kinks[0] == (0.0, 0.0) and c.x[-1] == 1.0
    assert c.y[1] == pytest.approx(0.3)
    assert c.is_concave()


def test_csv_format(six_level):
    state, ctx = six_level
    text = state_curve(state, ctx).to_csv(band=0.1)
    lines = text.strip().splitlines()
    assert lines[0] == "x,y,y_lo,y_hi" and len(lines) == 8
    assert state_curve(state, ctx).to_csv().startswith("x,y\n")


def test_evaluate_domain(six_level):
    state, ctx = six_level
    c = state_curve(state, ctx)
    assert evaluate(c, 0.0) == 0.0
    assert evaluate(c, 1.0) == pytest.approx(1.0)
    assert evaluate(c, 1 / 6) == pytest.approx(0.3)
    with pytest.raises(OutOfDomain):
        evaluate(c, 1.1)
    assert evaluate(c, np.array([0.0, 0.5])).shape == (2,)


def test_dominance_and_witness(backend, six_level):
    state, ctx = six_level
    top = state_curve(state, ctx)
    th = state_curve(ctx.thermal_state(), ctx)
    assert curve_dominates(top, th)
    dom = curve_dominates(th, top)
    assert not dom and dom.gap > 0.1
    assert 0 < dom.witness_x < 1


def test_mismatched_contexts(six_level):
    state, ctx = six_level
    other = ThermalContext(state.spectrum, 2.0)
    with pytest.raises(SpectrumMismatch):
        curve_dominates(state_curve(state, ctx), state_curve(state, other))


@settings(max_examples=200, deadline=None)
@given(st.integers(2, 7), st.integers(0, 2**31))
def test_unordered_never_above(d, seed):
    rng = np.random.default_rng(seed)
    ctx = random_context(d, rng)
    s = random_state(ctx, rng, 0.2)
    poly = build_curve_unordered(s, rng.permutation(d), ctx)
    assert curve_dominates(state_curve(s, ctx), poly)


def test_bad_permutation(six_level):
    state, ctx = six_level
    with pytest.raises(ThermoflowError):
        build_curve_unordered(state, [0, 0, 1, 2, 3, 4], ctx)


def test_band_check(backend, six_level):
    state, ctx = six_level
    probe = BlockDiagonalState(np.array([0.25, 0.25, 0.22, 0.1, 0.07, 0.11]), state.spectrum)
    res = epsilon_band_check(state, probe, 0.05, ctx)
    assert res.within and res.max_deviation <= 0.05 + 1e-12
    with pytest.raises(NotInBall):
        epsilon_band_check(state, probe, 0.01, ctx)


def test_max_deviation_symmetric(six_level):
    state, ctx = six_level
    a = state_curve(state, ctx)
    b = state_curve(ctx.thermal_state(), ctx)
    assert max_deviation(a, b)[0] == pytest.approx(max_deviation(b, a)[0])
