import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from thermoflow.core import BlockDiagonalState, EnergySpectrum, ThermalContext
from thermoflow.divergences import (
    AlphaGrid,
    divergence_profile,
    free_energy,
    renyi_divergence,
    smoothed_divergence_conventional,
    smoothed_divergence_new,
    smoothed_free_energy,
)
from thermoflow.errors import NegativeAlpha
from thermoflow.sampling import random_context, random_state


def _naive(p, q, a):
    p, q = np.asarray(p), np.asarray(q)
    s = p > 0
    if a == 0:
        return -math.log(q[s].sum())
    if math.isinf(a):
        return math.log(max(p[s] / q[s]))
    if a == 1:
        return float(np.sum(p[s] * np.log(p[s] / q[s])))
    return math.log(np.sum(p[s] ** a * q[s] ** (1 - a))) / (a - 1)


def test_three_level_kl(three_level):
    state, ctx = three_level
    assert renyi_divergence(state, ctx, 1.0) == pytest.approx(0.00954688, abs=1e-7)
    assert free_energy(state, ctx) == pytest.approx(0.0095469 - math.log(13.0), abs=1e-6)


def test_thermal_is_zero_everywhere(three_level):
    _, ctx = three_level
    for a in AlphaGrid.default():
        assert abs(renyi_divergence(ctx.thermal_state(), ctx, a)) < 1e-12


@settings(max_examples=150, deadline=None)
@given(st.integers(2, 6), st.integers(0, 2**31))
def test_matches_naive_and_monotone(d, seed):
    rng = np.random.default_rng(seed)
    ctx = random_context(d, rng)
    s = random_state(ctx, rng, 0.2)
    grid = list(AlphaGrid.default())
    vals = [renyi_divergence(s, ctx, a) for a in grid]
    for a, v in zip(grid, vals):
        assert v == pytest.approx(_naive(s.probabilities, ctx.thermal_weights, a), rel=1e-9, abs=1e-10)
    assert all(b >= a - 1e-10 for a, b in zip(vals, vals[1:]))


def test_kl_window_continuity(three_level):
    state, ctx = three_level
    kl = renyi_divergence(state, ctx, 1.0)
    assert renyi_divergence(state, ctx, 1.0 + 1e-4) == pytest.approx(kl, abs=1e-5)


def test_negative_alpha(three_level):
    state, ctx = three_level
    with pytest.raises(NegativeAlpha):
        renyi_divergence(state, ctx, -0.5)
    with pytest.raises(NegativeAlpha):
        AlphaGrid((-1.0,))


def test_grid_parse():
    g = AlphaGrid.parse("0.5, inf")
    assert g.values == (0.0, 0.5, 1.0, math.inf)
    assert len(AlphaGrid.parse("default")) == len(AlphaGrid.default())


def test_new_smoothing_uses_spec_example():
    spec = EnergySpectrum.trivial(3)
    ctx = ThermalContext(spec, 1.0)
    s = BlockDiagonalState(np.array([0.5, 0.3, 0.2]), spec)
    # steep state {0.6, 0.3, 0.1} for alpha <= 1, flattest {0.4, 0.3, 0.3} for alpha > 1
    assert smoothed_divergence_new(s, ctx, 0.0, 0.1) == pytest.approx(0.0, abs=1e-15)
    assert smoothed_divergence_new(s, ctx, 1.0, 0.1) == pytest.approx(_naive([0.6, 0.3, 0.1], [1 / 3] * 3, 1.0))
    assert smoothed_divergence_new(s, ctx, 2.0, 0.1) == pytest.approx(_naive([0.4, 0.3, 0.3], [1 / 3] * 3, 2.0))
    assert smoothed_free_energy(s, ctx, 2.0, 0.0) == pytest.approx(free_energy(s, ctx, 2.0))


def test_smoothing_moves_divergences_the_right_way(three_level):
    state, ctx = three_level
    for a in AlphaGrid.default():
        v = smoothed_divergence_new(state, ctx, a, 0.05)
        if a <= 1:
            assert v >= renyi_divergence(state, ctx, a) - 1e-12
        else:
            assert v <= renyi_divergence(state, ctx, a) + 1e-12


def test_conventional_budget_zero_is_steep(three_level):
    state, ctx = three_level
    sv = smoothed_divergence_conventional(state, ctx, 0.5, 0.05, sampler_budget=0)
    assert not sv.exact and sv.candidates == 1
    assert sv.value == pytest.approx(smoothed_divergence_new(state, ctx, 0.5, 0.05))
    hi = smoothed_divergence_conventional(state, ctx, 2.0, 0.05)
    assert hi.exact and hi.value == pytest.approx(smoothed_divergence_new(state, ctx, 2.0, 0.05))


def test_conventional_vertices_reach_d0_maximum():
    ctx = ThermalContext(EnergySpectrum.from_beta_factors((1.0, 2.0, 8.0)), 1.0)
    rho = BlockDiagonalState(np.array([0.55, 0.35, 0.1]), ctx.spectrum)
    sv = smoothed_divergence_conventional(rho, ctx, 0.0, 0.45, sampler_budget=0, include_vertices=True)
    assert sv.value == pytest.approx(-math.log(8 / 13))


def test_profile_csv(three_level):
    state, ctx = three_level
    prof = divergence_profile(state, ctx, AlphaGrid.parse("2"))
    lines = prof.to_csv().splitlines()
    assert lines[0] == "alpha,D_nats,F" and lines[-1].startswith("inf,")
    assert divergence_profile(state, ctx, epsilon=0.05).epsilon == 0.05
