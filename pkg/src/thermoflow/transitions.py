"""Feasibility verdicts for state transitions at fixed temperature."""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

from .core import BlockDiagonalState, ThermalContext, check_same_spectrum
from .curves import DOMINANCE_TOL, curve_dominates, state_curve
from .divergences import AlphaGrid, format_alpha, free_energy
from .errors import ThermoflowError
from .smoothing import flattest_state, steep_state

MARGIN_TOL = 1e-9


class Verdict(str, enum.Enum):
    FEASIBLE_TO = "Feasible-TO"
    FEASIBLE_CTO_GRID = "Feasible-CTO-grid"
    INFEASIBLE = "Infeasible-witness"
    INCONCLUSIVE = "Inconclusive"

    @property
    def exit_code(self) -> int:
        return {"Feasible-TO": 0, "Feasible-CTO-grid": 0, "Infeasible-witness": 2}.get(self.value, 3)


@dataclass(frozen=True)
class TransitionReport:
    verdict: Verdict
    per_alpha_margins: tuple = ()
    binding_alpha: Optional[float] = None
    curve_witness: Optional[float] = None
    curve_gap: Optional[float] = None
    epsilons: tuple = (0.0, 0.0)
    rescued_alphas: tuple = ()
    notes: tuple = field(default_factory=tuple)

    @property
    def exit_code(self) -> int:
        return self.verdict.exit_code

    @property
    def min_margin(self) -> Optional[float]:
        if not self.per_alpha_margins:
            return None
        return min(m for _, m in self.per_alpha_margins)

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict.value,
            "exit_code": self.exit_code,
            "epsilons": list(self.epsilons),
            "per_alpha_margins": [
                {"alpha": format_alpha(a), "margin": m} for a, m in self.per_alpha_margins
            ],
            "binding_alpha": None if self.binding_alpha is None else format_alpha(self.binding_alpha),
            "curve_witness": self.curve_witness,
            "curve_gap": self.curve_gap,
            "rescued_alphas": [format_alpha(a) for a in self.rescued_alphas],
            "notes": list(self.notes),
        }


def _margins(f_rho, f_sigma, grid):
    margins = tuple((a, f_rho(a) - f_sigma(a)) for a in grid)
    binding = min(margins, key=lambda am: am[1])[0]
    return margins, binding


def check_exact_second_laws(
    rho: BlockDiagonalState,
    sigma: BlockDiagonalState,
    context: ThermalContext,
    grid: Optional[AlphaGrid] = None,
    tol: float = MARGIN_TOL,
) -> TransitionReport:
    """Compare ``F_alpha(rho) >= F_alpha(sigma)`` over a finite alpha grid.

    A violation is conclusive.  Passing only certifies the grid points, so
    the verdict is ``Feasible-CTO-grid`` rather than a full certificate.
    """
    check_same_spectrum(rho, context)
    check_same_spectrum(sigma, context)
    grid = grid or AlphaGrid.default()
    margins, binding = _margins(
        lambda a: free_energy(rho, context, a), lambda a: free_energy(sigma, context, a), grid
    )
    worst = min(m for _, m in margins)
    verdict = Verdict.INFEASIBLE if worst < -tol else Verdict.FEASIBLE_CTO_GRID
    return TransitionReport(verdict, margins, binding)


def check_to_exact(rho: BlockDiagonalState, sigma: BlockDiagonalState, context: ThermalContext, tol: float = DOMINANCE_TOL) -> TransitionReport:
    """Exact thermal-operation test: does the curve of ``rho`` lie above that of ``sigma``?"""
    check_same_spectrum(rho, context)
    check_same_spectrum(sigma, context)
    dom = curve_dominates(state_curve(rho, context), state_curve(sigma, context), tol)
    if dom.dominates:
        return TransitionReport(Verdict.FEASIBLE_TO, curve_gap=dom.gap)
    return TransitionReport(Verdict.INFEASIBLE, curve_witness=dom.witness_x, curve_gap=dom.gap)


def check_theorem1(
    rho: BlockDiagonalState,
    sigma: BlockDiagonalState,
    context: ThermalContext,
    eps1: float,
    eps2: float,
    grid: Optional[AlphaGrid] = None,
    tol: float = MARGIN_TOL,
) -> TransitionReport:
    """Smoothed second laws for ``rho -> sigma`` plus the direct curve check
    ``steep(rho, eps1) -> flattest(sigma, eps2)``.

    Verdicts:

    * direct check passes: ``Feasible-TO``;
    * some grid margin below ``-tol``: ``Infeasible-witness``.  The exact
      second laws are necessary for catalytic transitions, so the smoothed
      pair cannot be connected;
    * grid passes, direct check fails: ``Inconclusive`` (the catalytic
      transition is not certified from a finite grid).
    """
    for e in (eps1, eps2):
        if not 0.0 <= e <= 1.0:
            raise ThermoflowError(f"epsilons must lie in [0, 1], got {e}")
    check_same_spectrum(rho, context)
    check_same_spectrum(sigma, context)
    grid = grid or AlphaGrid.default()

    steep = steep_state(rho, context, eps1).result_state
    flat = flattest_state(sigma, context, eps2).result_state
    rho_fl = flattest_state(rho, context, eps1).result_state
    sigma_st = steep_state(sigma, context, eps2).result_state
    # alpha <= 1 uses the steep states, alpha > 1 the flattest states
    margins, binding = _margins(
        lambda a: free_energy(steep if a <= 1 else rho_fl, context, a),
        lambda a: free_energy(sigma_st if a <= 1 else flat, context, a),
        grid,
    )
    exact = dict(_margins(lambda a: free_energy(rho, context, a), lambda a: free_energy(sigma, context, a), grid)[0])
    rescued = tuple(a for a, m in margins if m >= -tol and exact[a] < -tol)

    dom = curve_dominates(state_curve(steep, context), state_curve(flat, context))
    worst = min(m for _, m in margins)
    notes = []
    if dom.dominates:
        verdict = Verdict.FEASIBLE_TO
        if worst < -tol:
            notes.append("grid margin negative although curves dominate; check tolerances")
    elif worst < -tol:
        verdict = Verdict.INFEASIBLE
    else:
        verdict = Verdict.INCONCLUSIVE
        notes.append("Inconclusive-CTO: smoothed second laws hold on the grid but the TO curve check fails")
    return TransitionReport(
        verdict,
        margins,
        binding,
        curve_witness=None if dom.dominates else dom.witness_x,
        curve_gap=dom.gap,
        epsilons=(eps1, eps2),
        rescued_alphas=rescued,
        notes=tuple(notes),
    )


class OutputBound(NamedTuple):
    raw: float
    bound: float
    clamped: bool


def approximate_output_bound(eps1: float, eps2: float) -> OutputBound:
    """Trace-distance guarantee for running the smoothed-pair channel on the
    original input: ``eps1 + eps2``, reported clamped at 1."""
    for e in (eps1, eps2):
        if not 0.0 <= e <= 1.0:
            raise ThermoflowError(f"epsilons must lie in [0, 1], got {e}")
    raw = eps1 + eps2
    return OutputBound(raw, min(raw, 1.0), raw > 1.0)
