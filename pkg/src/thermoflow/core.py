"""Value types for energy spectra, thermal contexts and block-diagonal states.

States are plain probability vectors over energy levels; no density matrix
is ever built.  All types are immutable once constructed.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.special import logsumexp

from .errors import (
    LengthMismatch,
    NegativeProbability,
    NotNormalized,
    SpectrumMismatch,
    ThermoflowError,
)

TOL_NORM = 1e-9
TOL_ORDER = 1e-12


def _frozen(values) -> np.ndarray:
    arr = np.array(values, dtype=np.float64)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class EnergySpectrum:
    energies: tuple

    def __post_init__(self):
        energies = tuple(float(e) for e in self.energies)
        if len(energies) == 0:
            raise ThermoflowError("spectrum needs at least one level")
        if not all(math.isfinite(e) for e in energies):
            raise ThermoflowError("energies must be finite")
        object.__setattr__(self, "energies", energies)

    @classmethod
    def trivial(cls, d: int) -> "EnergySpectrum":
        return cls((0.0,) * d)

    @classmethod
    def from_beta_factors(cls, factors, beta: float = 1.0) -> "EnergySpectrum":
        """Spectrum whose Boltzmann factors ``exp(beta * E_i)`` equal ``factors``."""
        return cls(tuple(math.log(f) / beta for f in factors))

    @property
    def d(self) -> int:
        return len(self.energies)

    @property
    def is_trivial(self) -> bool:
        return all(e == self.energies[0] for e in self.energies)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.energies, dtype=np.float64)


@dataclass(frozen=True)
class ThermalContext:
    spectrum: EnergySpectrum
    beta: float
    log_partition_function: float = field(init=False, compare=False)
    thermal_weights: np.ndarray = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        beta = float(self.beta)
        if not (beta > 0 and math.isfinite(beta)):
            raise ThermoflowError(f"beta must be positive and finite, got {self.beta}")
        object.__setattr__(self, "beta", beta)
        log_factors = -beta * self.spectrum.as_array()
        log_z = float(logsumexp(log_factors))
        weights = np.exp(log_factors - log_z)
        if np.any(weights <= 0):
            raise ThermoflowError("thermal state must have full rank; energy gaps too large")
        object.__setattr__(self, "log_partition_function", log_z)
        object.__setattr__(self, "thermal_weights", _frozen(weights))

    @property
    def d(self) -> int:
        return self.spectrum.d

    @property
    def partition_function(self) -> float:
        return math.exp(self.log_partition_function)

    def thermal_state(self) -> "BlockDiagonalState":
        return BlockDiagonalState(self.thermal_weights, self.spectrum)


@dataclass(frozen=True, eq=False)
class BlockDiagonalState:
    """Occupation probabilities, index-aligned with ``spectrum``.

    Use :func:`make_state` for validated construction from user input.
    """

    probabilities: np.ndarray
    spectrum: EnergySpectrum

    def __post_init__(self):
        object.__setattr__(self, "probabilities", _frozen(self.probabilities))

    @property
    def d(self) -> int:
        return self.probabilities.shape[0]

    def allclose(self, other: "BlockDiagonalState", atol: float = TOL_NORM) -> bool:
        return self.spectrum == other.spectrum and bool(
            np.allclose(self.probabilities, other.probabilities, rtol=0, atol=atol)
        )


@dataclass(frozen=True, eq=False)
class BetaOrderedState:
    state: BlockDiagonalState
    permutation: np.ndarray
    ordered_probabilities: np.ndarray
    ordered_energies: np.ndarray
    ordered_weights: np.ndarray

    @property
    def ratios(self) -> np.ndarray:
        """``p_i / tau_i`` along the ordering; non-increasing."""
        return self.ordered_probabilities / self.ordered_weights


def make_state(probabilities, spectrum: EnergySpectrum, tol_norm: float = TOL_NORM) -> BlockDiagonalState:
    p = np.asarray(probabilities, dtype=np.float64)
    if p.ndim != 1 or p.shape[0] != spectrum.d:
        raise LengthMismatch(f"{p.size} probabilities for {spectrum.d} energy levels")
    if not np.all(np.isfinite(p)):
        raise ThermoflowError("probabilities must be finite")
    if np.any(p < 0):
        raise NegativeProbability(f"negative entry at index {int(np.argmin(p))}: {p.min()}")
    deviation = float(p.sum()) - 1.0
    if abs(deviation) > tol_norm:
        raise NotNormalized(deviation)
    return BlockDiagonalState(p, spectrum)


def check_same_spectrum(state: BlockDiagonalState, context: ThermalContext) -> None:
    if state.spectrum != context.spectrum:
        raise SpectrumMismatch("state and thermal context use different spectra")


def beta_order(state: BlockDiagonalState, context: ThermalContext) -> BetaOrderedState:
    """Sort levels by non-increasing ``p_i exp(beta E_i)``; ties keep input order.

    The sort key is ``p_i / tau_i``, which differs from ``p_i exp(beta E_i)``
    only by the constant factor ``Z`` and cannot overflow.
    """
    check_same_spectrum(state, context)
    ratios = state.probabilities / context.thermal_weights
    perm = np.argsort(-ratios, kind="stable")
    perm.setflags(write=False)
    return BetaOrderedState(
        state=state,
        permutation=perm,
        ordered_probabilities=_frozen(state.probabilities[perm]),
        ordered_energies=_frozen(context.spectrum.as_array()[perm]),
        ordered_weights=_frozen(context.thermal_weights[perm]),
    )


def is_beta_ordered(ordered: BetaOrderedState, tol: float = TOL_ORDER) -> bool:
    r = ordered.ratios
    return bool(np.all(np.diff(r) <= tol * np.maximum(1.0, np.abs(r[:-1]))))


def trace_distance(state_a: BlockDiagonalState, state_b: BlockDiagonalState) -> float:
    a = state_a.probabilities
    b = state_b.probabilities
    if a.shape != b.shape:
        raise LengthMismatch(f"states have {a.size} and {b.size} levels")
    if state_a.spectrum != state_b.spectrum:
        raise SpectrumMismatch("trace distance needs both states on one spectrum")
    return 0.5 * float(np.abs(a - b).sum())


def from_ordered(ordered: BetaOrderedState, new_ordered_probabilities) -> BlockDiagonalState:
    """Map probabilities given along a beta-ordering back to the input basis."""
    p = np.empty(ordered.state.d)
    p[ordered.permutation] = new_ordered_probabilities
    return BlockDiagonalState(p, ordered.state.spectrum)


# -- JSON I/O ---------------------------------------------------------------


def state_to_dict(state: BlockDiagonalState, context: ThermalContext) -> dict:
    return {
        "beta": context.beta,
        "energies": list(context.spectrum.energies),
        "probabilities": [float(v) for v in state.probabilities],
    }


def state_from_dict(data: dict, tol_norm: float = TOL_NORM):
    """Parse ``{"beta", "energies", "probabilities"}``; returns ``(state, context)``.

    ``probabilities`` may be omitted, in which case the thermal state is used.
    """
    try:
        beta = data["beta"]
        energies = data["energies"]
    except KeyError as exc:
        raise ThermoflowError(f"state JSON is missing {exc.args[0]!r}") from None
    context = ThermalContext(EnergySpectrum(tuple(energies)), beta)
    if data.get("probabilities") is None:
        return context.thermal_state(), context
    return make_state(data["probabilities"], context.spectrum, tol_norm), context


def load_state(path, tol_norm: float = TOL_NORM):
    with open(path) as fh:
        return state_from_dict(json.load(fh), tol_norm)


def save_state(path, state: BlockDiagonalState, context: ThermalContext) -> None:
    Path(path).write_text(json.dumps(state_to_dict(state, context), indent=2) + "\n")
