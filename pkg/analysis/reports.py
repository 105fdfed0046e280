"""Leaderboards, pressure rates, correlation analyses and model tables"""
import logging
import math
from typing import Dict, Iterable, List, Optional, Sequence

import numpy as np
import pandas as pd

from config.positions import LEADERBOARD_GROUPS
from config.settings import STRAIN_LEADERBOARD_TOP_K, STRAIN_MIN_SNAPS
from models.bootstrap import BootstrapResult
from models.fit import ModelFit
from models.report import CorrelationReport, LeaderboardRow, PairedValue
from models.strain import PlayerAggregate
from models.tracking import PlayerInfo, PlayWindow
from utils.errors import InsufficientDataError

logger = logging.getLogger(__name__)

FULL_SAMPLE = "full_sample"
PER_HALF = "per_half"
FILTER_VARIANTS = (FULL_SAMPLE, PER_HALF)

FIRST_HALF_WEEKS = (1, 2, 3, 4)
SECOND_HALF_WEEKS = (5, 6, 7, 8)

_MIN_CORRELATION_PLAYERS = 3


def _player_name(agg: PlayerAggregate) -> str:
    return agg.display_name or str(agg.player_id)


def leaderboard(
    aggregates: Iterable[PlayerAggregate],
    group: str,
    min_snaps: int = STRAIN_MIN_SNAPS,
    top_k: Optional[int] = STRAIN_LEADERBOARD_TOP_K,
) -> List[LeaderboardRow]:
    """
    Rank rushers of one position family by average STRAIN

    Args:
        aggregates: Player aggregates
        group: "edge" or "interior"
        min_snaps: Minimum plays to qualify
        top_k: Rows to keep; None keeps every qualifying player

    Returns:
        Rows sorted by avg_strain, ties broken by more snaps then name
    """
    if group not in LEADERBOARD_GROUPS:
        raise ValueError(f"Unknown leaderboard group {group!r}; expected one of {sorted(LEADERBOARD_GROUPS)}")
    positions = LEADERBOARD_GROUPS[group]
    qualifying = [a for a in aggregates if a.position_group in positions and a.snaps >= min_snaps]
    qualifying.sort(key=lambda a: (-a.avg_strain, -a.snaps, _player_name(a)))
    if top_k is not None:
        qualifying = qualifying[:top_k]
    return [
        LeaderboardRow(
            rank=i,
            player_id=a.player_id,
            player=_player_name(a),
            team=a.team,
            position=a.position,
            snaps=a.snaps,
            hits=a.hits,
            hurries=a.hurries,
            sacks=a.sacks,
            avg_strain=a.avg_strain,
        )
        for i, a in enumerate(qualifying, start=1)
    ]


def pressure_rate(agg: PlayerAggregate) -> Optional[float]:
    """(hits + hurries + sacks) per snap; None without snaps"""
    if agg.snaps <= 0:
        return None
    return (agg.hits + agg.hurries + agg.sacks) / agg.snaps


def pass_rush_productivity(agg: PlayerAggregate) -> Optional[float]:
    """Sacks plus half-weighted hits and hurries, per snap"""
    if agg.snaps <= 0:
        return None
    return ((agg.hits + agg.hurries) / 2 + agg.sacks) / agg.snaps


def pearson_r(x: Sequence[float], y: Sequence[float]) -> Optional[float]:
    """
    Pearson correlation of two equal-length vectors

    Returns:
        r in [-1, 1], or None when fewer than two pairs or either side is constant
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape:
        raise ValueError(f"vectors differ in length: {x.shape[0]} vs {y.shape[0]}")
    if x.shape[0] < 2:
        return None
    dx, dy = x - x.mean(), y - y.mean()
    sxx, syy = float(dx @ dx), float(dy @ dy)
    if sxx == 0.0 or syy == 0.0:
        return None
    r = float(dx @ dy) / math.sqrt(sxx * syy)
    return max(-1.0, min(1.0, r))


def _report(name: str, x_label: str, y_label: str, pairs: List[PairedValue],
            min_snaps: int, variant: str) -> CorrelationReport:
    if len(pairs) < _MIN_CORRELATION_PLAYERS:
        raise InsufficientDataError(
            f"{name}: {len(pairs)} qualifying players, at least {_MIN_CORRELATION_PLAYERS} needed"
        )
    r = pearson_r([p.x for p in pairs], [p.y for p in pairs])
    if r is None:
        logger.warning("%s: zero variance on one side, correlation undefined", name)
    return CorrelationReport(
        name=name, x_label=x_label, y_label=y_label, pairs=pairs, pearson_r=r,
        n_players=len(pairs), min_snaps=min_snaps, filter_variant=variant,
    )


def correlation_analyses(
    full: Iterable[PlayerAggregate],
    first_half: Iterable[PlayerAggregate],
    second_half: Iterable[PlayerAggregate],
    min_snaps: int = STRAIN_MIN_SNAPS,
    variant: str = FULL_SAMPLE,
) -> List[CorrelationReport]:
    """
    STRAIN/pressure relationships over the full sample and across the two halves

    Args:
        full: Aggregates over all weeks
        first_half: Aggregates over weeks 1-4
        second_half: Aggregates over weeks 5-8
        min_snaps: Snap threshold
        variant: "full_sample" applies the threshold to the full sample only;
            "per_half" also requires it within each half

    Returns:
        Four reports: strain vs pressure, strain predicting later pressure,
        pressure predicting later pressure, strain stability

    Raises:
        InsufficientDataError: If any report has fewer than three players
    """
    if variant not in FILTER_VARIANTS:
        raise ValueError(f"Unknown filter variant {variant!r}")
    full_by_id = {a.player_id: a for a in full}
    first_by_id = {a.player_id: a for a in first_half}
    second_by_id = {a.player_id: a for a in second_half}

    qualified = sorted(pid for pid, a in full_by_id.items() if a.snaps >= min_snaps)
    both_halves = [
        pid for pid in qualified
        if pid in first_by_id and pid in second_by_id
        and first_by_id[pid].snaps > 0 and second_by_id[pid].snaps > 0
    ]
    if variant == PER_HALF:
        both_halves = [
            pid for pid in both_halves
            if first_by_id[pid].snaps >= min_snaps and second_by_id[pid].snaps >= min_snaps
        ]

    def pairs(ids, x_of, y_of) -> List[PairedValue]:
        return [PairedValue(player_id=pid, x=x_of(pid), y=y_of(pid)) for pid in ids]

    return [
        _report("strain_vs_pressure", "avg_strain", "pressure_rate",
                pairs(qualified, lambda p: full_by_id[p].avg_strain, lambda p: pressure_rate(full_by_id[p])),
                min_snaps, variant),
        _report("strain_predicts_pressure", "avg_strain weeks 1-4", "pressure_rate weeks 5-8",
                pairs(both_halves, lambda p: first_by_id[p].avg_strain, lambda p: pressure_rate(second_by_id[p])),
                min_snaps, variant),
        _report("pressure_predicts_pressure", "pressure_rate weeks 1-4", "pressure_rate weeks 5-8",
                pairs(both_halves, lambda p: pressure_rate(first_by_id[p]), lambda p: pressure_rate(second_by_id[p])),
                min_snaps, variant),
        _report("strain_stability", "avg_strain weeks 1-4", "avg_strain weeks 5-8",
                pairs(both_halves, lambda p: first_by_id[p].avg_strain, lambda p: second_by_id[p].avg_strain),
                min_snaps, variant),
    ]


def rusher_count_distribution(windows: Iterable[PlayWindow]) -> Dict[int, int]:
    """Number of plays by count of pass rushers"""
    counts: Dict[int, int] = {}
    for window in windows:
        n = len(window.rusher_ids)
        counts[n] = counts.get(n, 0) + 1
    return dict(sorted(counts.items()))


def player_table(aggregates: Iterable[PlayerAggregate]) -> pd.DataFrame:
    """Aggregates with pressure rate and productivity columns"""
    rows = []
    for a in aggregates:
        row = a.model_dump(mode="json")
        row["pressure_rate"] = pressure_rate(a)
        row["pass_rush_productivity"] = pass_rush_productivity(a)
        rows.append(row)
    return pd.DataFrame(rows)


def coefficient_table(fit: ModelFit) -> pd.DataFrame:
    return pd.DataFrame([fe.model_dump() for fe in fit.fixed_effects])


def variance_table(fit: ModelFit) -> pd.DataFrame:
    rows = [vc.model_dump() for vc in fit.variance_components]
    rows.append({"grouping": "residual", "variance": fit.sigma2, "theta": None,
                 "boundary": False, "n_levels": fit.n_obs})
    return pd.DataFrame(rows)


def icc_table(fit: ModelFit) -> pd.DataFrame:
    return pd.DataFrame([{"grouping": g, "icc": share} for g, share in fit.icc.items()])


def random_intercept_table(fit: ModelFit, players: Optional[Dict[int, PlayerInfo]] = None) -> pd.DataFrame:
    """Per-level predictions with player names and positions where the level is a player"""
    players = players or {}
    rows = []
    for grouping, intercepts in fit.random_intercepts.items():
        for ri in intercepts:
            info = players.get(int(ri.level)) if grouping in ("rusher", "blocker") and ri.level.isdigit() else None
            rows.append({
                "grouping": grouping,
                "level": ri.level,
                "name": info.display_name if info else None,
                "position": info.position if info else None,
                "estimate": ri.estimate,
                "n_obs": ri.n_obs,
            })
    return pd.DataFrame(rows, columns=["grouping", "level", "name", "position", "estimate", "n_obs"])


def bootstrap_summary_table(result: BootstrapResult) -> pd.DataFrame:
    rows = []
    for grouping, dists in result.distributions.items():
        for d in dists:
            rows.append({
                "grouping": grouping,
                "level": d.level_id,
                "effective_replicates": d.effective_replicates,
                "median": d.median,
                "lower": d.lower,
                "upper": d.upper,
                "strictly_positive": d.strictly_positive,
            })
    return pd.DataFrame(rows)


__all__ = [
    "FULL_SAMPLE",
    "PER_HALF",
    "FILTER_VARIANTS",
    "FIRST_HALF_WEEKS",
    "SECOND_HALF_WEEKS",
    "leaderboard",
    "pressure_rate",
    "pass_rush_productivity",
    "pearson_r",
    "correlation_analyses",
    "rusher_count_distribution",
    "player_table",
    "coefficient_table",
    "variance_table",
    "icc_table",
    "random_intercept_table",
    "bootstrap_summary_table",
]
