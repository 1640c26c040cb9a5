"""Explicit constructions inside the same-basis epsilon-ball.

flattest
    thermo-majorized by every state in the ball; exists for every epsilon.
steep
    an explicit ball state that thermo-majorizes the input.
steepest
    thermo-majorizes every ball state; built here only in the small-epsilon
    regime where it is known to exist.

All constructions work along the input's beta-ordering and report results
in the input's own index order.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from . import kernels
from .core import (
    TOL_NORM,
    TOL_ORDER,
    BetaOrderedState,
    BlockDiagonalState,
    EnergySpectrum,
    ThermalContext,
    beta_order,
    check_same_spectrum,
    from_ordered,
    state_to_dict,
    trace_distance,
)
from .errors import (
    EpsilonTooLarge,
    IndexInversion,
    IndexOutOfRange,
    NonTrivialSpectrum,
    ThermoflowError,
)


@dataclass(frozen=True, eq=False)
class SmoothingResult:
    kind: str
    input_state: BlockDiagonalState
    result_state: BlockDiagonalState
    epsilon_used: float
    indices: dict = field(default_factory=dict)

    @property
    def achieved_distance(self) -> float:
        return trace_distance(self.input_state, self.result_state)

    def to_dict(self, context: ThermalContext) -> dict:
        return {
            "kind": self.kind,
            "epsilon": self.epsilon_used,
            "input": state_to_dict(self.input_state, context),
            "probabilities": [float(v) for v in self.result_state.probabilities],
            "indices": dict(self.indices),
            "trace_distance": self.achieved_distance,
        }


def _check_epsilon(epsilon: float) -> float:
    epsilon = float(epsilon)
    if not 0.0 <= epsilon <= 1.0:
        raise ThermoflowError(f"epsilon must lie in [0, 1], got {epsilon}")
    return epsilon


def _unchanged(kind, state, epsilon, **indices):
    return SmoothingResult(kind, state, BlockDiagonalState(state.probabilities, state.spectrum), epsilon, indices)


# -- index functions ----------------------------------------------------------


def f_index_function(ordered: BetaOrderedState, context: ThermalContext, m: int) -> float:
    """Mass of the top ``m`` levels above the line of slope set by level ``m+1``.

    ``F(m) = sum_{i<=m} p_i - p_{m+1} e^{beta E_{m+1}} sum_{i<=m} e^{-beta E_i}``
    with 1-based ``m`` in ``1..d-1``; non-decreasing in ``m``.
    """
    d = ordered.state.d
    if not 1 <= m <= d - 1:
        raise IndexOutOfRange(f"F(m) needs 1 <= m <= {d - 1}, got {m}")
    p, w = ordered.ordered_probabilities, ordered.ordered_weights
    return float(p[:m].sum() - (p[m] / w[m]) * w[:m].sum())


def g_index_function(ordered: BetaOrderedState, context: ThermalContext, m: int) -> float:
    """``G(m) = p_{m-1} e^{beta E_{m-1}} sum_{i>=m} e^{-beta E_i} - sum_{i>=m} p_i``
    for 1-based ``m`` in ``2..d``; non-increasing in ``m``."""
    d = ordered.state.d
    if not 2 <= m <= d:
        raise IndexOutOfRange(f"G(m) needs 2 <= m <= {d}, got {m}")
    p, w = ordered.ordered_probabilities, ordered.ordered_weights
    return float((p[m - 2] / w[m - 2]) * w[m - 1:].sum() - p[m - 1:].sum())


# -- flattest -----------------------------------------------------------------


def flattest_state(state: BlockDiagonalState, context: ThermalContext, epsilon: float) -> SmoothingResult:
    """The ball state that every other ball state can reach by thermal operations.

    When the thermal state is within ``epsilon`` it is the answer.  Otherwise
    the top ``M`` beta-ordered levels lose ``epsilon`` in total and the
    levels ``N..d`` gain it, each block flattened to a common ratio
    ``p_i / tau_i``; levels strictly between are untouched.
    """
    epsilon = _check_epsilon(epsilon)
    check_same_spectrum(state, context)
    if epsilon == 0.0:
        return _unchanged("flattest", state, epsilon)
    thermal = context.thermal_state()
    gap = trace_distance(state, thermal)
    if epsilon >= gap:
        return SmoothingResult("flattest", state, thermal, epsilon, {"saturated": True})

    ordered = beta_order(state, context)
    ones = np.ones(state.d)
    new_p, m, n = kernels.flattest_sorted(ordered.ordered_probabilities, ordered.ordered_weights, ones, epsilon)
    if m < 1 or n < 1 or m >= n:
        raise IndexInversion(m, n)
    return SmoothingResult("flattest", state, from_ordered(ordered, new_p), epsilon, {"M": m, "N": n})


def trivial_flattest(state: BlockDiagonalState, epsilon: float) -> SmoothingResult:
    """Flattest state for a fully degenerate Hamiltonian (plain majorization).

    Written independently of :func:`flattest_state` from the head-cut /
    tail-fill inequalities for ``N1`` and ``N2``.
    """
    epsilon = _check_epsilon(epsilon)
    if not state.spectrum.is_trivial:
        raise NonTrivialSpectrum("trivial_flattest needs all energies equal")
    d = state.d
    if epsilon == 0.0:
        return _unchanged("flattest", state, epsilon)
    order = np.argsort(-state.probabilities, kind="stable")
    p = state.probabilities[order]
    if epsilon >= 0.5 * np.abs(p - 1.0 / d).sum():
        uniform = BlockDiagonalState(np.full(d, 1.0 / d), state.spectrum)
        return SmoothingResult("flattest", state, uniform, epsilon, {"saturated": True})

    n1 = next(k for k in range(1, d) if epsilon <= np.sum(p[:k] - p[k]))
    n2 = next(k for k in range(d, 1, -1) if epsilon <= np.sum(p[k - 2] - p[k - 1:]))
    out = p.copy()
    out[:n1] = (p[:n1].sum() - epsilon) / n1
    out[n2 - 1:] = (p[n2 - 1:].sum() + epsilon) / (d + 1 - n2)
    result = np.empty(d)
    result[order] = out
    return SmoothingResult("flattest", state, BlockDiagonalState(result, state.spectrum), epsilon, {"N1": n1, "N2": n2})


# -- steep --------------------------------------------------------------------


def steep_state(state: BlockDiagonalState, context: ThermalContext, epsilon: float) -> SmoothingResult:
    """Move ``epsilon`` from the bottom of the beta-ordering onto its top level.

    The tail is emptied from the last level upwards; the level ``R`` where
    the budget runs out keeps the remainder.  If ``epsilon`` exceeds
    everything below the top level the result is pure on that level.
    """
    epsilon = _check_epsilon(epsilon)
    check_same_spectrum(state, context)
    if epsilon == 0.0:
        return _unchanged("steep", state, epsilon)
    ordered = beta_order(state, context)
    p = ordered.ordered_probabilities
    d = p.shape[0]
    out = np.zeros(d)
    if epsilon > 1.0 - p[0]:
        out[0] = 1.0
        return SmoothingResult("steep", state, from_ordered(ordered, out), epsilon, {"R": 1, "pure": True})

    # tail[i] = sum_{j >= i} p_j (0-based); R is the last index with tail >= eps
    tail = np.concatenate((np.cumsum(p[::-1])[::-1], [0.0]))
    r = int(np.nonzero(tail[:d] >= epsilon)[0][-1])
    out[:r] = p[:r]
    out[r] += p[r] + tail[r + 1] - epsilon
    out[0] += epsilon
    return SmoothingResult("steep", state, from_ordered(ordered, out), epsilon, {"R": r + 1})


def trivial_steepest(state: BlockDiagonalState, epsilon: float) -> SmoothingResult:
    """Steepest state for a fully degenerate Hamiltonian: cut the tail, add to the head."""
    epsilon = _check_epsilon(epsilon)
    if not state.spectrum.is_trivial:
        raise NonTrivialSpectrum("trivial_steepest needs all energies equal")
    d = state.d
    order = np.argsort(-state.probabilities, kind="stable")
    p = state.probabilities[order]
    out = np.zeros(d)
    if epsilon == 0.0:
        out = p.copy()
        m = d
    elif epsilon >= 1.0 - p[0]:
        out[0] = 1.0
        m = 1
    else:
        # 1-based M with sum_{i>M} p_i < eps <= sum_{i>=M} p_i
        m = max(k for k in range(1, d + 1) if p[k - 1:].sum() >= epsilon)
        out[: m - 1] = p[: m - 1]
        out[m - 1] = p[m - 1] - epsilon + p[m:].sum()
        out[0] += epsilon
    result = np.empty(d)
    result[order] = out
    return SmoothingResult("steepest", state, BlockDiagonalState(result, state.spectrum), epsilon, {"M": m})


# -- steepest for small epsilon ------------------------------------------------


class SteepestBounds(NamedTuple):
    eps_a: float
    eps_b: float
    eps_c: float
    k: int  # 1-based index of the last nonzero beta-ordered level

    @property
    def limit(self) -> float:
        return min(self.eps_a, self.eps_b, self.eps_c)


def steepest_bounds(state: BlockDiagonalState, context: ThermalContext) -> SteepestBounds:
    ordered = beta_order(state, context)
    p = ordered.ordered_probabilities
    e = ordered.ordered_energies
    beta = context.beta
    nz = np.nonzero(p > 0)[0]
    k = int(nz[-1])
    eps_a = float(p[nz].min())

    eps_b = math.inf
    for i in range(1, p.size):
        if e[i] > e[0]:
            b = math.exp(beta * (e[i] - e[0]))
            if k == 0:
                # pure state: the top level cannot gain, so a probe moving
                # eps onto level i must stay below slope 1 / tau_1
                eps_b = min(eps_b, p[0] / b - p[i])
            else:
                eps_b = min(eps_b, (p[0] - p[i] * b) / (b - 1.0))
    eps_c = math.inf
    for i in nz:
        if e[i] > e[k]:
            b = math.exp(beta * (e[i] - e[k]))
            eps_c = min(eps_c, (p[i] * b - p[k]) / (b - 1.0))
    return SteepestBounds(eps_a, eps_b, eps_c, k + 1)


def steepest_state_small_eps(state: BlockDiagonalState, context: ThermalContext, epsilon: float) -> SmoothingResult:
    """Ball state thermo-majorizing the whole ball, valid for small ``epsilon``.

    Adds ``epsilon`` to the top beta-ordered level and removes it from the
    last nonzero one.  Raises :class:`EpsilonTooLarge` naming the first
    violated bound.
    """
    epsilon = _check_epsilon(epsilon)
    check_same_spectrum(state, context)
    bounds = steepest_bounds(state, context)
    for name, bound in (("eps_A", bounds.eps_a), ("eps_B", bounds.eps_b), ("eps_C", bounds.eps_c)):
        if epsilon > bound * (1.0 + TOL_ORDER) + TOL_ORDER:
            raise EpsilonTooLarge(epsilon, name, bound)
    indices = {"k": bounds.k, "eps_A": bounds.eps_a, "eps_B": bounds.eps_b, "eps_C": bounds.eps_c}
    if epsilon == 0.0:
        return _unchanged("steepest", state, epsilon, **indices)
    ordered = beta_order(state, context)
    out = ordered.ordered_probabilities.copy()
    out[0] += epsilon
    # epsilon <= eps_A <= p_k up to the comparison slack above
    out[bounds.k - 1] = max(out[bounds.k - 1] - epsilon, 0.0)
    return SmoothingResult("steepest", state, from_ordered(ordered, out), epsilon, indices)


# -- no steepest state in general -----------------------------------------------


@dataclass(frozen=True)
class NonexistenceReport:
    epsilon: float
    support_weights: dict
    min_support_weight: float
    d0_maximizers: tuple
    unique_d0_maximizer: bool
    d0_max_state: tuple
    d1_of_d0_maximizer: float
    competitor: tuple
    d1_of_competitor: float
    d1_margin: float
    steep_d0: float
    steep_d1: float
    sampled_states: int

    @property
    def holds(self) -> bool:
        return self.unique_d0_maximizer and self.d1_margin > 0


def steepest_nonexistence_demo(grid_step: int = 200) -> NonexistenceReport:
    """Three-level example with no ball state maximizing every D_alpha.

    State ``{0.55, 0.35, 0.1}`` with Boltzmann factors ``exp(beta E) =
    {1, 2, 8}`` and ``epsilon = 0.45``.  A rational grid over the simplex
    with spacing ``1/grid_step`` is filtered to the ball; the grid contains
    the two boundary states of interest exactly.
    """
    from .divergences import renyi_divergence

    beta = 1.0
    spectrum = EnergySpectrum.from_beta_factors((1.0, 2.0, 8.0), beta)
    context = ThermalContext(spectrum, beta)
    rho = BlockDiagonalState(np.array([0.55, 0.35, 0.1]), spectrum)
    eps = 0.45
    tau = context.thermal_weights

    i, j = np.meshgrid(np.arange(grid_step + 1), np.arange(grid_step + 1), indexing="ij")
    keep = i + j <= grid_step
    a, b = i[keep], j[keep]
    grid = np.stack([a, b, grid_step - a - b], axis=1) / grid_step
    dist = 0.5 * np.abs(grid - rho.probabilities).sum(axis=1)
    ball = grid[dist <= eps + 1e-12]

    weights = (ball > 0) @ tau
    w_min = float(weights.min())
    at_min = ball[weights <= w_min + 1e-12]
    supports = {tuple(int(s) for s in np.nonzero(v > 0)[0]) for v in at_min}

    hat = BlockDiagonalState(np.array([1.0, 0.0, 0.0]), spectrum)
    tilde = BlockDiagonalState(np.array([0.45, 0.0, 0.55]), spectrum)
    steep = steep_state(rho, context, eps).result_state
    d1_hat = renyi_divergence(hat, context, 1.0)
    d1_tilde = renyi_divergence(tilde, context, 1.0)
    return NonexistenceReport(
        epsilon=eps,
        support_weights={s: float(tau[list(s)].sum()) for s in supports},
        min_support_weight=w_min,
        d0_maximizers=tuple(tuple(float(x) for x in v) for v in at_min),
        unique_d0_maximizer=len(at_min) == 1 and supports == {(0,)},
        d0_max_state=(1.0, 0.0, 0.0),
        d1_of_d0_maximizer=d1_hat,
        competitor=(0.45, 0.0, 0.55),
        d1_of_competitor=d1_tilde,
        d1_margin=d1_tilde - d1_hat,
        steep_d0=renyi_divergence(steep, context, 0.0),
        steep_d1=renyi_divergence(steep, context, 1.0),
        sampled_states=int(ball.shape[0]),
    )
