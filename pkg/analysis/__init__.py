"""STRAIN computation, matchups, mixed model, bootstrap and reports"""
from analysis.strain_calculator import (
    rusher_qb_distance,
    strain_at_frame,
    play_strain_series,
    compute_series,
    player_average_strain,
    aggregate_players,
    positional_curve,
    outcome_curves,
    overall_curve,
    play_feature_table,
)
from analysis.matchups import position_group, nearest_blocker, build_observation, build_observations
from analysis.mixed_model import (
    FIXED_EFFECT_COLUMNS,
    assemble_design,
    design_from_arrays,
    profiled_reml_deviance,
    fit_reml,
    icc,
    rank_random_intercepts,
)
from analysis.bootstrap import resample_drives, bootstrap_effects
from analysis.reports import (
    leaderboard,
    pressure_rate,
    pass_rush_productivity,
    pearson_r,
    correlation_analyses,
    rusher_count_distribution,
)

__all__ = [
    "rusher_qb_distance",
    "strain_at_frame",
    "play_strain_series",
    "compute_series",
    "player_average_strain",
    "aggregate_players",
    "positional_curve",
    "outcome_curves",
    "overall_curve",
    "play_feature_table",
    "position_group",
    "nearest_blocker",
    "build_observation",
    "build_observations",
    "FIXED_EFFECT_COLUMNS",
    "assemble_design",
    "design_from_arrays",
    "profiled_reml_deviance",
    "fit_reml",
    "icc",
    "rank_random_intercepts",
    "resample_drives",
    "bootstrap_effects",
    "leaderboard",
    "pressure_rate",
    "pass_rush_productivity",
    "pearson_r",
    "correlation_analyses",
    "rusher_count_distribution",
]
