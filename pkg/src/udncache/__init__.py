"""Coded caching simulator for a cyclic two-dimensional grid of cache nodes."""
from .analysis import (
    LoadReport,
    gap_report,
    lambda_ratios,
    load_benchmark_d,
    load_uncoded,
    ratio_b_over_a,
)
from .combinatorics import binom, subset_rank, subset_unrank
from .demands import DemandMap, random_demands, worst_case_demands
from .geometry import (
    GridConfig,
    NodeId,
    Regime,
    UserClass,
    UserSpec,
    classify_point,
    enumerate_users,
    mod_dist_1d,
    mod_dist_2d,
    region_census,
    user_count,
)
from .mn import MNConfig, PacketId, SignalId, decode_user, mn_load, mn_signals, place, retrievable_packets
from .scheme_a import load_a, load_a_asymptotic, run_scheme_a
from .scheme_b import (
    h_bruteforce,
    h_formula,
    load_b_asymptotic,
    load_b_closed_form,
    modified_signals,
    reconstructible_signals,
    run_scheme_b,
)

__version__ = "0.1.0"
