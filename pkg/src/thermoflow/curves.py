"""Thermo-majorization curves and their comparison.

A curve is the polyline through the cumulative (thermal weight, probability)
points of a state taken in some order of its levels.  Along the beta-ordering
the polyline is concave and is the state's thermo-majorization curve; any
other order gives a polyline lying below it.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from . import kernels
from .core import (
    TOL_NORM,
    TOL_ORDER,
    BetaOrderedState,
    BlockDiagonalState,
    ThermalContext,
    beta_order,
    check_same_spectrum,
    trace_distance,
)
from .errors import NotInBall, OutOfDomain, SpectrumMismatch, ThermoflowError

DOMINANCE_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class ThermoMajorizationCurve:
    x: np.ndarray
    y: np.ndarray
    context: Optional[ThermalContext] = None

    def __post_init__(self):
        for name in ("x", "y"):
            arr = np.array(getattr(self, name), dtype=np.float64)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def kinks(self) -> list:
        return list(zip(self.x.tolist(), self.y.tolist()))

    @property
    def slopes(self) -> np.ndarray:
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.diff(self.y) / np.diff(self.x)

    def is_concave(self, tol: float = TOL_ORDER) -> bool:
        s = self.slopes
        return bool(np.all(np.diff(s) <= tol * np.maximum(1.0, np.abs(s[:-1]))))

    def to_csv(self, band: Optional[float] = None) -> str:
        header = "x,y" if band is None else "x,y,y_lo,y_hi"
        rows = [header]
        for x, y in zip(self.x, self.y):
            cols = [x, y] if band is None else [x, y, y - band, y + band]
            rows.append(",".join(f"{v:.17g}" for v in cols))
        return "\n".join(rows) + "\n"


def _polyline(p: np.ndarray, w: np.ndarray, context) -> ThermoMajorizationCurve:
    x = np.concatenate(([0.0], np.cumsum(w)))
    y = np.concatenate(([0.0], np.cumsum(p)))
    # cumulative thermal weight is 1 up to rounding; pin the endpoint
    x[-1] = 1.0
    return ThermoMajorizationCurve(x, y, context)


def build_curve(ordered: BetaOrderedState, context: ThermalContext) -> ThermoMajorizationCurve:
    check_same_spectrum(ordered.state, context)
    return _polyline(ordered.ordered_probabilities, ordered.ordered_weights, context)


def state_curve(state: BlockDiagonalState, context: ThermalContext) -> ThermoMajorizationCurve:
    """Shortcut for ``build_curve(beta_order(state, context), context)``."""
    return build_curve(beta_order(state, context), context)


def build_curve_unordered(state: BlockDiagonalState, permutation, context: ThermalContext) -> ThermoMajorizationCurve:
    """Polyline of ``state`` with its levels visited in ``permutation`` order."""
    check_same_spectrum(state, context)
    perm = np.asarray(permutation, dtype=np.intp)
    if sorted(perm.tolist()) != list(range(state.d)):
        raise ThermoflowError(f"not a permutation of 0..{state.d - 1}: {perm.tolist()}")
    return _polyline(state.probabilities[perm], context.thermal_weights[perm], context)


def evaluate(curve: ThermoMajorizationCurve, x, tol: float = TOL_NORM):
    xs = np.asarray(x, dtype=np.float64)
    if np.any(xs < -tol) or np.any(xs > 1.0 + tol):
        raise OutOfDomain(f"x must lie in [0, 1], got {x}")
    values = np.interp(xs, curve.x, curve.y)
    return float(values) if values.ndim == 0 else values


class Dominance(NamedTuple):
    """Outcome of a curve comparison.

    ``gap`` is the largest excess of the lower curve over the upper one,
    attained at ``witness_x``; the comparison passes when ``gap <= tol``.
    """

    dominates: bool
    gap: float
    witness_x: float

    def __bool__(self):
        return self.dominates


def _check_contexts(a: ThermoMajorizationCurve, b: ThermoMajorizationCurve) -> None:
    if a.context is not None and b.context is not None and a.context != b.context:
        raise SpectrumMismatch("curves come from different Hamiltonians or temperatures")


def curve_dominates(upper: ThermoMajorizationCurve, lower: ThermoMajorizationCurve, tol: float = DOMINANCE_TOL) -> Dominance:
    _check_contexts(upper, lower)
    gap, x = kernels.curve_gap(upper.x, upper.y, lower.x, lower.y)
    return Dominance(gap <= tol, gap, x)


class BandCheck(NamedTuple):
    within: bool
    max_deviation: float
    witness_x: float


def max_deviation(a: ThermoMajorizationCurve, b: ThermoMajorizationCurve):
    """``max |a(x) - b(x)|`` over the union of kinks, with its location."""
    _check_contexts(a, b)
    up, x_up = kernels.curve_gap(b.x, b.y, a.x, a.y)
    down, x_down = kernels.curve_gap(a.x, a.y, b.x, b.y)
    return (up, x_up) if up >= down else (down, x_down)


def epsilon_band_check(
    center: BlockDiagonalState,
    probe: BlockDiagonalState,
    epsilon: float,
    context: ThermalContext,
    tol: float = DOMINANCE_TOL,
) -> BandCheck:
    """Check that the probe's curve stays within ``epsilon`` of the center's."""
    check_same_spectrum(center, context)
    check_same_spectrum(probe, context)
    dist = trace_distance(center, probe)
    if dist > epsilon + TOL_NORM:
        raise NotInBall(dist, epsilon)
    dev, x = max_deviation(state_curve(center, context), state_curve(probe, context))
    return BandCheck(dev <= epsilon + tol, dev, x)
