"""Smoothed generalized free energies and thermo-majorization for commuting states."""
from .asymptotics import (
    AepBounds,
    FiniteNReport,
    TensorPowerSpectrum,
    aep_bounds,
    corollary1_delta,
    find_n_star,
    smoothed_divergence_tensor,
    tensor_power,
    typical_mass,
)
from .core import (
    BetaOrderedState,
    BlockDiagonalState,
    EnergySpectrum,
    ThermalContext,
    beta_order,
    load_state,
    make_state,
    save_state,
    trace_distance,
)
from .curves import ThermoMajorizationCurve, curve_dominates, epsilon_band_check, evaluate, state_curve
from .divergences import (
    AlphaGrid,
    free_energy,
    renyi_divergence,
    smoothed_divergence_conventional,
    smoothed_divergence_new,
    smoothed_free_energy,
)
from .errors import *  # noqa: F401,F403
from .kernels import BACKEND
from .smoothing import (
    SmoothingResult,
    flattest_state,
    steep_state,
    steepest_bounds,
    steepest_state_small_eps,
    trivial_flattest,
    trivial_steepest,
)
from .transitions import TransitionReport, Verdict, check_exact_second_laws, check_theorem1, check_to_exact

__version__ = "0.1.0"
