import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from thermoflow.sampling import ball_vertices, random_context, random_probabilities, sample_ball


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 8), st.floats(0.0, 1.0), st.integers(0, 2**31))
def test_samples_inside_ball(d, eps, seed):
    rng = np.random.default_rng(seed)
    p = random_probabilities(d, rng, 0.3)
    draws = sample_ball(p, eps, rng, 50)
    assert draws.shape == (50, d)
    assert np.all(draws >= 0)
    assert np.allclose(draws.sum(axis=1), 1.0, atol=1e-12)
    assert np.all(0.5 * np.abs(draws - p).sum(axis=1) <= eps + 1e-12)


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 5), st.floats(0.01, 1.0), st.integers(0, 2**31))
def test_vertices_inside_ball(d, eps, seed):
    rng = np.random.default_rng(seed)
    p = random_probabilities(d, rng)
    v = ball_vertices(p, eps)
    assert np.all(v >= -1e-15)
    assert np.allclose(v.sum(axis=1), 1.0)
    assert np.all(0.5 * np.abs(v - p).sum(axis=1) <= eps + 1e-12)


def test_random_context_trivial():
    ctx = random_context(4, np.random.default_rng(0), trivial=True)
    assert ctx.spectrum.is_trivial


def test_zero_fraction_keeps_one_entry():
    rng = np.random.default_rng(0)
    for _ in range(100):
        p = random_probabilities(3, rng, 0.99)
        assert p.sum() == pytest.approx(1.0) and (p > 0).any()
