"""Renyi divergences of commuting states from the thermal state, and the
free energies built on them.

Everything is in nats.  ``alpha`` is a float in ``[0, inf]``; ``math.inf``
selects the max-divergence.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from .core import BlockDiagonalState, ThermalContext, check_same_spectrum
from .errors import NegativeAlpha, ThermoflowError
from .sampling import ball_vertices, sample_ball
from .smoothing import flattest_state, steep_state

KL_WINDOW = 1e-6

# numpy reduction: same result as scipy logsumexp, far less per-call overhead
_lse = np.logaddexp.reduce

DEFAULT_ALPHAS = (0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0, 1.25, 1.5, 2.0, 3.0, 5.0, 10.0, math.inf)


@dataclass(frozen=True)
class AlphaGrid:
    values: tuple

    def __post_init__(self):
        vals = {float(a) for a in self.values} | {0.0, 1.0, math.inf}
        if any(a < 0 or math.isnan(a) for a in vals):
            raise NegativeAlpha("alpha grid entries must be >= 0")
        object.__setattr__(self, "values", tuple(sorted(vals)))

    @classmethod
    def default(cls, extra=()) -> "AlphaGrid":
        return cls(DEFAULT_ALPHAS + tuple(extra))

    @classmethod
    def dense(cls, points_per_unit: int = 10, top: float = 10.0) -> "AlphaGrid":
        return cls(tuple(np.linspace(0.0, top, int(points_per_unit * top) + 1)))

    @classmethod
    def parse(cls, text: str) -> "AlphaGrid":
        """Comma-separated alphas; ``inf`` allowed; ``default`` adds the default grid."""
        extra = []
        base = ()
        for tok in text.split(","):
            tok = tok.strip().lower()
            if not tok:
                continue
            if tok == "default":
                base = DEFAULT_ALPHAS
            else:
                extra.append(float(tok))
        return cls(base + tuple(extra))

    def __iter__(self):
        return iter(self.values)

    def __len__(self):
        return len(self.values)


def format_alpha(alpha: float) -> str:
    return "inf" if math.isinf(alpha) else f"{alpha:.17g}"


def renyi_from_logs(log_p, log_q, alpha: float, log_mult=None) -> float:
    """Renyi divergence from log-probabilities of commuting distributions.

    ``log_mult`` optionally gives each entry a multiplicity (for compressed
    tensor-power spectra).  Zero-probability entries carry ``-inf``.
    """
    if alpha < 0 or math.isnan(alpha):
        raise NegativeAlpha(f"alpha must be >= 0, got {alpha}")
    log_p = np.asarray(log_p, dtype=np.float64)
    log_q = np.asarray(log_q, dtype=np.float64)
    support = log_p > -np.inf
    lp = log_p[support]
    lq = log_q[support]
    lm = np.zeros_like(lp) if log_mult is None else np.asarray(log_mult, dtype=np.float64)[support]

    if alpha == 0:
        return 0.0 - float(_lse(lm + lq))  # avoid -0.0
    if math.isinf(alpha):
        return float(np.max(lp - lq))
    if abs(alpha - 1.0) < KL_WINDOW:
        return float(np.sum(np.exp(lm + lp) * (lp - lq)))
    return float(_lse(lm + alpha * lp + (1.0 - alpha) * lq)) / (alpha - 1.0)


def _logs(p):
    with np.errstate(divide="ignore"):
        return np.log(p)


def renyi_divergence(state: BlockDiagonalState, context: ThermalContext, alpha: float) -> float:
    check_same_spectrum(state, context)
    return renyi_from_logs(_logs(state.probabilities), np.log(context.thermal_weights), alpha)


def free_energy(state: BlockDiagonalState, context: ThermalContext, alpha: float = 1.0) -> float:
    return (renyi_divergence(state, context, alpha) - context.log_partition_function) / context.beta


def _check_epsilon(epsilon):
    if not 0.0 <= epsilon <= 1.0:
        raise ThermoflowError(f"epsilon must lie in [0, 1], got {epsilon}")


def smoothing_state(state, context, alpha, epsilon):
    """The ball state whose exact divergence defines the new smoothed divergence."""
    _check_epsilon(epsilon)
    if alpha < 0:
        raise NegativeAlpha(f"alpha must be >= 0, got {alpha}")
    if alpha <= 1.0:
        return steep_state(state, context, epsilon).result_state
    return flattest_state(state, context, epsilon).result_state


def smoothed_divergence_new(state, context, alpha: float, epsilon: float) -> float:
    """Steep state for ``alpha <= 1``, flattest state for ``alpha > 1``."""
    return renyi_divergence(smoothing_state(state, context, alpha, epsilon), context, alpha)


def smoothed_free_energy(state, context, alpha: float, epsilon: float) -> float:
    return (smoothed_divergence_new(state, context, alpha, epsilon) - context.log_partition_function) / context.beta


class SmoothedValue(NamedTuple):
    value: float
    exact: bool
    candidates: int = 0


def smoothed_divergence_conventional(
    state,
    context,
    alpha: float,
    epsilon: float,
    sampler_budget: int = 1000,
    rng=None,
    include_vertices: bool = False,
) -> SmoothedValue:
    """Conventional smoothed divergence: min over the ball for ``alpha > 1``,
    max for ``alpha <= 1``.

    The minimum is attained by the flattest state and is returned exactly.
    The maximum has no closed form; it is bounded from below by evaluating
    the steep state plus ``sampler_budget`` random same-basis ball states
    (and, with ``include_vertices``, every vertex of the same-basis ball).
    """
    _check_epsilon(epsilon)
    if alpha > 1.0:
        fl = flattest_state(state, context, epsilon).result_state
        return SmoothedValue(renyi_divergence(fl, context, alpha), True, 1)
    if alpha < 0:
        raise NegativeAlpha(f"alpha must be >= 0, got {alpha}")

    rng = np.random.default_rng(rng)
    best = renyi_divergence(steep_state(state, context, epsilon).result_state, context, alpha)
    count = 1
    log_q = np.log(context.thermal_weights)
    candidates = []
    if sampler_budget > 0:
        candidates.append(sample_ball(state.probabilities, epsilon, rng, size=sampler_budget))
    if include_vertices:
        candidates.append(ball_vertices(state.probabilities, epsilon))
    for batch in candidates:
        for p in batch:
            best = max(best, renyi_from_logs(_logs(p), log_q, alpha))
            count += 1
    return SmoothedValue(best, False, count)


@dataclass(frozen=True)
class DivergenceProfile:
    grid: AlphaGrid
    d_values: tuple
    f_values: tuple
    epsilon: Optional[float] = None

    def to_csv(self, bits: bool = False) -> str:
        scale = 1.0 / math.log(2.0) if bits else 1.0
        head = "alpha,D_bits,F" if bits else "alpha,D_nats,F"
        rows = [head]
        for a, dv, fv in zip(self.grid.values, self.d_values, self.f_values):
            rows.append(f"{format_alpha(a)},{dv * scale:.17g},{fv:.17g}")
        return "\n".join(rows) + "\n"

    def to_dict(self) -> dict:
        return {
            "epsilon": self.epsilon,
            "alpha": [format_alpha(a) for a in self.grid.values],
            "D_nats": list(self.d_values),
            "F": list(self.f_values),
        }


def divergence_profile(state, context, grid: Optional[AlphaGrid] = None, epsilon: Optional[float] = None) -> DivergenceProfile:
    """Exact (``epsilon is None``) or new-smoothed divergences over a grid."""
    grid = grid or AlphaGrid.default()
    if epsilon is None:
        d_vals = tuple(renyi_divergence(state, context, a) for a in grid)
    else:
        _check_epsilon(epsilon)
        steep = steep_state(state, context, epsilon).result_state
        flat = flattest_state(state, context, epsilon).result_state
        d_vals = tuple(renyi_divergence(steep if a <= 1 else flat, context, a) for a in grid)
    f_vals = tuple((dv - context.log_partition_function) / context.beta for dv in d_vals)
    return DivergenceProfile(grid, d_vals, f_vals, epsilon)
