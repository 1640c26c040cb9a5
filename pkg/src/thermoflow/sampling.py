"""Random states, random Hamiltonians and same-basis epsilon-ball probes."""
from __future__ import annotations

import itertools

import numpy as np

from .core import BlockDiagonalState, EnergySpectrum, ThermalContext


def random_probabilities(d: int, rng, zero_fraction: float = 0.0) -> np.ndarray:
    """Dirichlet draw with random concentration; optionally zero some entries."""
    conc = rng.choice([0.3, 0.7, 1.0, 2.0, 5.0])
    p = rng.dirichlet(np.full(d, conc))
    if zero_fraction > 0 and d > 1:
        mask = rng.random(d) < zero_fraction
        mask[rng.integers(d)] = False
        if mask.any():
            p[mask] = 0.0
            p /= p.sum()
    return p


def random_context(d: int, rng, trivial: bool = False, beta_range=(0.2, 3.0), energy_scale: float = 2.0) -> ThermalContext:
    if trivial:
        spectrum = EnergySpectrum.trivial(d)
    else:
        spectrum = EnergySpectrum(tuple(rng.uniform(0.0, energy_scale, size=d)))
    return ThermalContext(spectrum, rng.uniform(*beta_range))


def random_state(context: ThermalContext, rng, zero_fraction: float = 0.0) -> BlockDiagonalState:
    return BlockDiagonalState(random_probabilities(context.d, rng, zero_fraction), context.spectrum)


def random_permutation(d: int, rng) -> np.ndarray:
    return rng.permutation(d)


def sample_ball(p, epsilon: float, rng, size: int = 1) -> np.ndarray:
    """Draw ``size`` distributions within trace distance ``epsilon`` of ``p``.

    Each draw moves a total mass ``u * epsilon`` (``u`` uniform on ``(0, 1]``)
    out of a random "take" subset and into a disjoint random "give" subset.
    Removal is clipped at zero, so the mass actually moved, which equals the
    trace distance, never exceeds ``epsilon``.  The draws are not uniform on
    the ball.
    """
    p = np.asarray(p, dtype=np.float64)
    d = p.shape[0]
    if d < 2 or epsilon <= 0:
        return np.tile(p, (size, 1))
    labels = rng.integers(0, 3, size=(size, d))  # 0 neutral, 1 take, 2 give
    take_idx = rng.integers(0, d, size=size)
    give_idx = (take_idx + rng.integers(1, d, size=size)) % d
    rows = np.arange(size)
    labels[rows, take_idx] = 1
    labels[rows, give_idx] = 2

    amount = epsilon * (1.0 - rng.random(size))
    take_w = rng.exponential(size=(size, d)) * (labels == 1)
    take_w /= take_w.sum(axis=1, keepdims=True)
    removed = np.minimum(p, amount[:, None] * take_w)
    moved = removed.sum(axis=1)
    give_w = rng.exponential(size=(size, d)) * (labels == 2)
    give_w /= give_w.sum(axis=1, keepdims=True)
    out = p - removed + moved[:, None] * give_w
    np.maximum(out, 0.0, out=out)
    return out


def ball_vertices(p, epsilon: float) -> np.ndarray:
    """Vertices of the same-basis ball intersected with the simplex.

    A vertex adds the full budget to one level and removes it from the
    others by zeroing a subset and partially lowering at most one further
    level.  Convex functions of ``p`` attain their maximum over the ball at
    one of these points.  Exponential in ``d``; intended for small systems.
    """
    p = np.asarray(p, dtype=np.float64)
    d = p.shape[0]
    if epsilon <= 0 or d < 2:
        return p[None, :].copy()
    found = {}
    for j in range(d):
        others = [i for i in range(d) if i != j]
        if 1.0 - p[j] <= epsilon:
            v = np.zeros(d)
            v[j] = 1.0
            found[tuple(v)] = v
        for r in range(len(others) + 1):
            for zeroed in itertools.combinations(others, r):
                cut = p[list(zeroed)].sum()
                if cut > epsilon:
                    continue
                rest = epsilon - cut
                base = p.copy()
                base[list(zeroed)] = 0.0
                if rest == 0:
                    base[j] += cut
                    found[tuple(base)] = base
                    continue
                for k in others:
                    if k in zeroed or p[k] < rest:
                        continue
                    v = base.copy()
                    v[k] -= rest
                    v[j] += epsilon
                    found[tuple(v)] = v
    return np.array(list(found.values()))
