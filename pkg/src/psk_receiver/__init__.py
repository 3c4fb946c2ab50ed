"""Adaptive displacement receivers for M-PSK coherent states below the quantum noise limit."""

__version__ = "0.1.0"

from .bounds import heterodyne_capacity, helstrom_mpsk, holevo_bound, qnl, qnl_heterodyne, qnl_homodyne
from .ensemble import EXPERIMENT, IDEAL, StateEnsemble, SystemModel, make_mpsk_ensemble
from .estimator import AdaptiveReceiver
from .infotheory import mutual_information
from .montecarlo import TrialBatchResult, simulate_trials
from .optimizer import OptimizationResult, optimize, optimize_flat, optimize_historical, optimize_sequential
from .photodetection import bayes_update, click_probability, displaced_mean, photon_count_pmf
from .receiver import (
    ErrorReport,
    Strategy,
    evaluate_strategy,
    flat_strategy,
    induced_channel,
    map_phase,
    non_optimized_strategy,
)
