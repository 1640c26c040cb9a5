"""Many-copy behaviour: compressed tensor powers, typicality, finite-n
sandwich bounds and the copy count needed for a transition.

``rho^{(x)n}`` has ``d^n`` eigenvalues but only ``C(n+d-1, d-1)`` distinct
ones, one per composition of ``n`` into ``d`` counts.  Everything here works
on those classes in log space.  All divergences are in nats.
"""
from __future__ import annotations

import math
import os
from dataclasses import dataclass
from typing import Callable, NamedTuple, Optional

import numpy as np
from scipy.special import gammaln, logsumexp

from . import kernels
from .core import BlockDiagonalState, ThermalContext, beta_order, check_same_spectrum
from .curves import DOMINANCE_TOL, ThermoMajorizationCurve, curve_dominates
from .divergences import AlphaGrid, free_energy, renyi_divergence, renyi_from_logs
from .errors import IndexInversion, ThermoflowError, TooLarge

DEFAULT_CLASS_CAP = 2_000_000


def class_cap() -> int:
    raw = os.environ.get("THERMOFLOW_CLASS_CAP")
    return int(raw) if raw else DEFAULT_CLASS_CAP


def _check_n(n):
    if int(n) != n or n < 1:
        raise ThermoflowError(f"n must be a positive integer, got {n}")
    return int(n)


def _check_open_epsilon(epsilon):
    # (0, 1]: the 1/n and n^(-1/3) schedules reach 1 at n = 1
    if not 0.0 < epsilon <= 1.0:
        raise ThermoflowError(f"epsilon must lie in (0, 1], got {epsilon}")
    return float(epsilon)


def _log(x):
    with np.errstate(divide="ignore"):
        return np.log(np.asarray(x, dtype=np.float64))


# -- compressed tensor powers ---------------------------------------------------


@dataclass(frozen=True, eq=False)
class TensorPowerSpectrum:
    """Composition classes of an i.i.d. spectrum.

    Row ``k`` holds per-element log probability, per-element log thermal
    weight and log multiplicity of the class with base-level counts
    ``counts[k]``.
    """

    n: int
    log_p: np.ndarray
    log_q: np.ndarray
    log_mult: np.ndarray
    counts: np.ndarray

    @property
    def classes(self) -> list:
        return list(zip(self.log_p.tolist(), self.log_q.tolist(), np.exp(self.log_mult).tolist()))

    @property
    def log_mass(self) -> np.ndarray:
        return self.log_mult + self.log_p

    @property
    def log_weight(self) -> np.ndarray:
        return self.log_mult + self.log_q

    def total_mass(self) -> float:
        return float(np.exp(logsumexp(self.log_mass)))

    def multiplicities(self) -> list:
        """Exact integer multiplicities."""
        return [math.factorial(self.n) // math.prod(math.factorial(int(c)) for c in row) for row in self.counts]

    def expand(self, base_p, base_q):
        """Full ``d^n`` probability and weight vectors (small ``n`` only), in
        the same lexicographic order as ``np.kron``."""
        p = np.ones(1)
        q = np.ones(1)
        for _ in range(self.n):
            p = np.kron(p, base_p)
            q = np.kron(q, base_q)
        return p, q


def tensor_power(state: BlockDiagonalState, context: ThermalContext, n: int, cap: Optional[int] = None) -> TensorPowerSpectrum:
    check_same_spectrum(state, context)
    n = _check_n(n)
    d = state.d
    cap = class_cap() if cap is None else cap
    required = math.comb(n + d - 1, d - 1)
    if required > cap:
        raise TooLarge(required, cap)
    counts = kernels.compositions(n, d)
    lp = _log(state.probabilities)
    lq = np.log(context.thermal_weights)
    # 0 * log 0 = 0: a zero count contributes nothing
    with np.errstate(invalid="ignore"):
        log_p = np.where(counts > 0, counts * lp, 0.0).sum(axis=1)
    log_q = counts @ lq
    log_mult = gammaln(n + 1) - gammaln(counts + 1).sum(axis=1)
    return TensorPowerSpectrum(n, log_p, log_q, log_mult, counts)


def typical_mass(state: BlockDiagonalState, context: ThermalContext, n: int, delta: float) -> float:
    """Probability under ``rho^{(x)n}`` of the eigenvalues whose log ratio to the
    thermal weight lies within ``n (D +- delta)``, ``D`` the relative entropy."""
    tp = tensor_power(state, context, n)
    kl = renyi_divergence(state, context, 1.0)
    ratio = tp.log_p - tp.log_q
    slack = 1e-12 * n * (1.0 + abs(kl))
    inside = (ratio >= n * (kl - delta) - slack) & (ratio <= n * (kl + delta) + slack) & np.isfinite(tp.log_p)
    if not inside.any():
        return 0.0
    return float(min(1.0, np.exp(logsumexp(tp.log_mass[inside]))))


def hoeffding_bound(n: int, delta: float) -> float:
    return 1.0 - 2.0 * math.exp(-2.0 * n * delta * delta)


# -- smoothing on classes -------------------------------------------------------
#
# A class state is three aligned arrays: total mass, total thermal weight and
# multiplicity.  Per-element values are mass / mult.  Keeping totals avoids the
# underflow of per-element probabilities at large n.


class ClassState(NamedTuple):
    mass: np.ndarray
    weight: np.ndarray
    mult: np.ndarray

    def log_elements(self):
        lm = _log(self.mult)
        return _log(self.mass) - lm, _log(self.weight) - lm, lm

    def divergence(self, alpha: float) -> float:
        lp, lq, lm = self.log_elements()
        return renyi_from_logs(lp, lq, alpha, lm)

    def curve(self) -> ThermoMajorizationCurve:
        lp, lq, _ = self.log_elements()
        order = np.argsort(-(lp - lq), kind="stable")
        x = np.concatenate(([0.0], np.cumsum(self.weight[order])))
        y = np.concatenate(([0.0], np.cumsum(self.mass[order])))
        x[-1] = 1.0
        return ThermoMajorizationCurve(x, y)


def ordered_classes(tp: TensorPowerSpectrum) -> ClassState:
    """Classes sorted by decreasing probability-to-weight ratio; empty classes last."""
    order = np.argsort(-(tp.log_p - tp.log_q), kind="stable")
    return ClassState(np.exp(tp.log_mass[order]), np.exp(tp.log_weight[order]), np.exp(tp.log_mult[order]))


def class_flattest(cs: ClassState, epsilon: float) -> ClassState:
    """Flattest state of ordered classes.  Blocks always end on class
    boundaries, so classes never need splitting."""
    gap = 0.5 * float(np.abs(cs.mass - cs.weight).sum())
    if epsilon >= gap:
        return ClassState(cs.weight.copy(), cs.weight, cs.mult)
    if epsilon == 0.0:
        return cs
    ones = np.ones_like(cs.mass)
    new_mass, m, n = kernels.flattest_sorted(cs.mass, cs.weight, ones, epsilon)
    if m < 1 or n < 1 or m >= n:
        raise IndexInversion(m, n)
    return ClassState(new_mass, cs.weight, cs.mult)


def class_steep(cs: ClassState, epsilon: float) -> ClassState:
    """Steep state of ordered classes, splitting the top class and the class
    where the tail cut ends."""
    if epsilon == 0.0:
        return cs
    mass, weight, mult = (np.asarray(a, dtype=np.float64) for a in cs)
    top_v = mass[0] / mult[0]
    top_w = weight[0] / mult[0]
    pieces = []  # (mass, weight, mult) in ordered position

    if epsilon > 1.0 - top_v:
        pieces.append((1.0, top_w, 1.0))
        if mult[0] > 1:
            pieces.append((0.0, weight[0] - top_w, mult[0] - 1))
        pieces.extend((0.0, w, m) for w, m in zip(weight[1:], mult[1:]))
        return ClassState(*(np.array(c) for c in zip(*pieces)))

    tail = np.concatenate((np.cumsum(mass[::-1])[::-1], [0.0]))
    c = int(np.nonzero(tail[:-1] >= epsilon)[0][-1])
    rest = epsilon - tail[c + 1]  # mass still to remove from class c, in (0, mass[c]]
    v = mass[c] / mult[c]
    w_el = weight[c] / mult[c]
    zeroed = min(max(math.ceil(rest / v) - 1, 0), mult[c] - 1)
    partial = v - (rest - zeroed * v)
    keep = mult[c] - zeroed - 1

    for k in range(c):
        pieces.append((mass[k], weight[k], mult[k]))
    if keep > 0:
        pieces.append((v * keep, w_el * keep, keep))
    pieces.append((partial, w_el, 1.0))
    if zeroed > 0:
        pieces.append((0.0, w_el * zeroed, zeroed))
    pieces.extend((0.0, weight[k], mult[k]) for k in range(c + 1, len(mass)))

    # add epsilon to a single top element
    pm, pw, pn = pieces[0]
    el_m, el_w = pm / pn, pw / pn
    head = [(el_m + epsilon, el_w, 1.0)]
    if pn > 1:
        head.append((pm - el_m, pw - el_w, pn - 1))
    pieces = head + pieces[1:]
    return ClassState(*(np.array(col, dtype=np.float64) for col in zip(*pieces)))


def smoothed_divergence_tensor(state, context, n: int, alpha: float, epsilon: float) -> float:
    """New smoothed divergence of ``rho^{(x)n}`` relative to ``tau^{(x)n}`` (not normalized by n)."""
    if not 0.0 <= epsilon <= 1.0:
        raise ThermoflowError(f"epsilon must lie in [0, 1], got {epsilon}")
    cs = ordered_classes(tensor_power(state, context, n))
    smoothed = class_steep(cs, epsilon) if alpha <= 1.0 else class_flattest(cs, epsilon)
    return smoothed.divergence(alpha)


def tensor_transition_check(rho, sigma, context, n: int, eps1: float, eps2: float, tol: float = DOMINANCE_TOL):
    """Curve check: steep state of ``rho^{(x)n}`` against flattest state of ``sigma^{(x)n}``."""
    steep = class_steep(ordered_classes(tensor_power(rho, context, n)), eps1)
    flat = class_flattest(ordered_classes(tensor_power(sigma, context, n)), eps2)
    return curve_dominates(steep.curve(), flat.curve(), tol)


# -- finite-n bounds ------------------------------------------------------------


def aep_delta(n: int, epsilon: float) -> float:
    return math.sqrt(math.log(2.0 / epsilon) / (2.0 * n))


def _leading(state, context):
    ordered = beta_order(state, context)
    return float(ordered.ordered_probabilities[0]), float(ordered.ordered_weights[0])


def g1_offset(state, context, n: int, epsilon: float) -> float:
    n = _check_n(n)
    epsilon = _check_open_epsilon(epsilon)
    delta = aep_delta(n, epsilon)
    kl = renyi_divergence(state, context, 1.0)
    p1, q1 = _leading(state, context)
    p_tilde = p1 ** n  # may underflow to 0; the term below stays finite
    head = (p_tilde + epsilon) * (math.log(p_tilde + epsilon) - n * math.log(q1)) / n
    return (1.0 - epsilon) * delta - epsilon * kl + head + math.sqrt(2.0 * epsilon) * math.log(p1 / q1)


def g2_offset(state, context, n: int, epsilon: float) -> float:
    n = _check_n(n)
    epsilon = _check_open_epsilon(epsilon)
    delta = aep_delta(n, epsilon)
    kl = renyi_divergence(state, context, 1.0)
    return delta + (math.sqrt(2.0 * epsilon) + epsilon) * (kl - delta) - math.log(epsilon) / n


@dataclass(frozen=True)
class AepBounds:
    n: int
    epsilon: float
    D: float
    delta: float
    g1: float
    g2: float

    @property
    def lower_steep(self) -> float:
        return self.D - self.delta

    @property
    def upper_steep(self) -> float:
        return self.D + self.g1

    @property
    def lower_flat(self) -> float:
        return self.D - self.g2

    @property
    def upper_flat(self) -> float:
        return self.D + self.delta

    @property
    def envelope(self):
        """Interval holding the normalized smoothed divergence for every alpha."""
        return self.D - max(self.delta, self.g2), self.D + max(self.g1, self.delta)

    def branch(self, alpha: float):
        return (self.lower_steep, self.upper_steep) if alpha <= 1.0 else (self.lower_flat, self.upper_flat)

    def to_dict(self) -> dict:
        lo, hi = self.envelope
        return {
            "n": self.n,
            "epsilon": self.epsilon,
            "D": self.D,
            "delta": self.delta,
            "g1": self.g1,
            "g2": self.g2,
            "lower_steep": self.lower_steep,
            "upper_steep": self.upper_steep,
            "lower_flat": self.lower_flat,
            "upper_flat": self.upper_flat,
            "envelope": [lo, hi],
        }


def aep_bounds(state, context, n: int, epsilon: float) -> AepBounds:
    n = _check_n(n)
    epsilon = _check_open_epsilon(epsilon)
    return AepBounds(
        n,
        epsilon,
        renyi_divergence(state, context, 1.0),
        aep_delta(n, epsilon),
        g1_offset(state, context, n, epsilon),
        g2_offset(state, context, n, epsilon),
    )


def convergence_table(state, context, ns, alphas, epsilon: float) -> list:
    """Rows ``(n, alpha, epsilon, normalized_D, lower_bound, upper_bound)``
    using the bound pair of the alpha branch."""
    rows = []
    for n in ns:
        b = aep_bounds(state, context, n, epsilon)
        cs = ordered_classes(tensor_power(state, context, n))
        steep = class_steep(cs, epsilon)
        flat = class_flattest(cs, epsilon)
        for a in alphas:
            value = (steep if a <= 1.0 else flat).divergence(a) / n
            lo, hi = b.branch(a)
            rows.append((n, a, epsilon, value, lo, hi))
    return rows


def convergence_csv(rows) -> str:
    from .divergences import format_alpha

    lines = ["n,alpha,epsilon,normalized_D,lower_bound,upper_bound"]
    for n, a, e, v, lo, hi in rows:
        lines.append(f"{n},{format_alpha(a)},{e:.17g},{v:.17g},{lo:.17g},{hi:.17g}")
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class FiniteNReport:
    n: int
    epsilon: float
    delta: float
    g1: float
    g2: float
    Delta: float
    beta: float
    free_energy_rho: float
    free_energy_sigma: float
    condition_holds: bool
    n_star: Optional[int] = None

    @property
    def required_gap(self) -> float:
        """Free-energy excess needed, in energy units."""
        return self.Delta / self.beta

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "epsilon": self.epsilon,
            "delta": self.delta,
            "g1": self.g1,
            "g2": self.g2,
            "Delta": self.Delta,
            "required_gap": self.required_gap,
            "free_energy_rho": self.free_energy_rho,
            "free_energy_sigma": self.free_energy_sigma,
            "condition_holds": self.condition_holds,
            "n_star": self.n_star,
        }


def corollary1_delta(rho, sigma, context, n: int, epsilon: float) -> FiniteNReport:
    """Sufficient free-energy condition for ``rho^{(x)n} -> sigma^{(x)n}`` up to epsilon.

    ``g1`` is taken on ``sigma`` and ``g2`` on ``rho``.  ``g1`` may be
    negative and is used as is.
    """
    check_same_spectrum(rho, context)
    check_same_spectrum(sigma, context)
    n = _check_n(n)
    epsilon = _check_open_epsilon(epsilon)
    delta = aep_delta(n, epsilon)
    g1 = g1_offset(sigma, context, n, epsilon)
    g2 = g2_offset(rho, context, n, epsilon)
    big = delta + max(g1, g2)
    f_rho = free_energy(rho, context, 1.0)
    f_sigma = free_energy(sigma, context, 1.0)
    holds = f_rho >= f_sigma + big / context.beta
    return FiniteNReport(n, epsilon, delta, g1, g2, big, context.beta, f_rho, f_sigma, bool(holds))


def schedule_cube_root(n: int) -> float:
    return n ** (-1.0 / 3.0)


def schedule_inverse(n: int) -> float:
    return 1.0 / n


SCHEDULES = {"cuberoot": schedule_cube_root, "inverse": schedule_inverse}


class NStarResult(NamedTuple):
    n_star: Optional[int]
    note: str


def find_n_star(
    rho,
    sigma,
    context,
    epsilon_schedule: Callable[[int], float] = schedule_cube_root,
    n_max: int = 2 ** 40,
) -> NStarResult:
    """Doubling then bisection for the copy count at which the condition first holds.

    The result ``n*`` satisfies: the condition holds at ``n*`` and fails at
    ``n* - 1`` (for ``n* > 1``).  The condition need not be monotone in ``n``,
    so smaller passing counts can exist below an earlier failure.
    """
    def holds(n):
        return corollary1_delta(rho, sigma, context, n, epsilon_schedule(n)).condition_holds

    if free_energy(rho, context) <= free_energy(sigma, context):
        return NStarResult(None, "F(rho) <= F(sigma): the required excess is positive, no n works")
    if holds(1):
        return NStarResult(1, "condition holds at n = 1")
    lo, hi = 1, 2
    while not holds(hi):
        lo, hi = hi, hi * 2
        if hi > n_max:
            return NStarResult(None, f"condition not met for any tested n <= {n_max}")
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if holds(mid):
            hi = mid
        else:
            lo = mid
    return NStarResult(hi, "smallest passing n after doubling and bisection")
