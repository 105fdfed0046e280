"""STRAIN per frame, per play and per player, plus positional and outcome curves"""
import logging
import math
from collections import Counter
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from config.positions import RUSHER_POSITION_GROUPS
from config.settings import STRAIN_DISTANCE_FLOOR, STRAIN_FRAME_DT, STRAIN_MAX_FRAME
from models.observation import RusherPosition
from models.strain import CurvePoint, PlayerAggregate, StrainCurve, StrainSample, StrainSeries
from models.tracking import Outcome, PlayContext, PlayerInfo, PlayerTrack, PlayWindow
from utils.errors import InsufficientDataError, PlayWindowError

logger = logging.getLogger(__name__)

Point = Tuple[float, float]


def rusher_qb_distance(rusher_xy: Point, qb_xy: Point) -> float:
    """Euclidean distance in yards between a rusher and the quarterback"""
    return math.hypot(rusher_xy[0] - qb_xy[0], rusher_xy[1] - qb_xy[1])


def strain_at_frame(
    dist_t: float,
    dist_prev: float,
    dt: float = STRAIN_FRAME_DT,
    distance_floor: float = STRAIN_DISTANCE_FLOOR,
) -> float:
    """
    STRAIN from two consecutive rusher-QB distances

    Args:
        dist_t: Distance at the current frame (yards)
        dist_prev: Distance at the previous frame (yards)
        dt: Frame step in seconds
        distance_floor: Smallest denominator used, in yards

    Returns:
        Closing velocity over distance, per second; positive while closing
    """
    closing = -(dist_t - dist_prev) / dt
    return closing / max(dist_t, distance_floor)


def _window_positions(track: PlayerTrack, snap: int, end: int) -> np.ndarray:
    """(T, 2) positions for frames snap..end, raising on any gap"""
    missing = track.missing_frames(snap, end)
    if missing:
        raise PlayWindowError(
            f"player {track.player_id} is missing frames {missing} between {snap} and {end}"
        )
    frame_ids = np.asarray(track.frame_ids)
    idx = np.searchsorted(frame_ids, np.arange(snap, end + 1))
    return np.column_stack([np.asarray(track.x)[idx], np.asarray(track.y)[idx]])


def distance_series(window: PlayWindow, rusher_id: int) -> np.ndarray:
    """Rusher-QB distance at every window frame, snap first"""
    if rusher_id not in window.tracks:
        raise PlayWindowError(f"rusher {rusher_id} has no track on play {window.game_id}/{window.play_id}")
    rusher = _window_positions(window.tracks[rusher_id], window.snap_frame, window.end_frame)
    qb = _window_positions(window.tracks[window.qb_id], window.snap_frame, window.end_frame)
    return np.hypot(rusher[:, 0] - qb[:, 0], rusher[:, 1] - qb[:, 1])


def _samples(distances: np.ndarray, dt: float, distance_floor: float) -> List[StrainSample]:
    samples = []
    for t in range(1, len(distances)):
        dist_t, dist_prev = float(distances[t]), float(distances[t - 1])
        samples.append(StrainSample(
            frame_index=t + 1,
            distance=dist_t,
            closing_velocity=-(dist_t - dist_prev) / dt,
            strain=strain_at_frame(dist_t, dist_prev, dt, distance_floor),
        ))
    return samples


def rusher_position_group(position: Optional[str]) -> Optional[RusherPosition]:
    if position is None:
        return None
    return RUSHER_POSITION_GROUPS.get(position.strip().upper())


def play_strain_series(
    window: PlayWindow,
    rusher_id: int,
    week: Optional[int] = None,
    dt: float = STRAIN_FRAME_DT,
    distance_floor: float = STRAIN_DISTANCE_FLOOR,
) -> StrainSeries:
    """
    Per-frame STRAIN of one rusher over a play window

    Args:
        window: Validated play window
        rusher_id: Rusher to evaluate
        week: Schedule week of the play, carried onto the series
        dt: Frame step in seconds
        distance_floor: Denominator clamp in yards

    Returns:
        StrainSeries with samples for window frames 2..T

    Raises:
        PlayWindowError: If the rusher or quarterback track has a gap
    """
    samples = _samples(distance_series(window, rusher_id), dt, distance_floor)
    track = window.tracks[rusher_id]
    credits = window.credits.get(rusher_id)
    play_average = math.fsum(s.strain for s in samples) / len(samples)
    return StrainSeries(
        game_id=window.game_id,
        play_id=window.play_id,
        rusher_id=rusher_id,
        team=track.team,
        position=track.position,
        position_group=rusher_position_group(track.position),
        week=week,
        outcome=window.outcome(rusher_id),
        credited_hit=bool(credits and credits.hit),
        credited_hurry=bool(credits and credits.hurry),
        credited_sack=bool(credits and credits.sack),
        samples=samples,
        play_average=play_average,
    )


def compute_series(
    windows: Iterable[PlayWindow],
    plays: Optional[Dict[Tuple[int, int], PlayContext]] = None,
    dt: float = STRAIN_FRAME_DT,
    distance_floor: float = STRAIN_DISTANCE_FLOOR,
) -> List[StrainSeries]:
    """Series for every rusher of every window, ordered by (game, play, rusher)"""
    plays = plays or {}
    series = []
    for window in sorted(windows, key=lambda w: w.key):
        context = plays.get(window.key)
        week = context.week if context else None
        for rusher_id in window.rusher_ids:
            series.append(play_strain_series(window, rusher_id, week, dt, distance_floor))
    logger.info("computed %d rusher series over %d plays",
                len(series), len({(s.game_id, s.play_id) for s in series}))
    return series


def player_average_strain(
    series: Sequence[StrainSeries],
    player: Optional[PlayerInfo] = None,
) -> PlayerAggregate:
    """
    Frame-weighted average STRAIN over every play of one rusher

    Args:
        series: All series of the player
        player: Roster entry used for name and position

    Returns:
        PlayerAggregate; avg_strain is total STRAIN over total sampled frames
    """
    if not series:
        raise InsufficientDataError("player_average_strain needs at least one series")
    ordered = sorted(series, key=lambda s: (s.game_id, s.play_id))
    player_ids = {s.rusher_id for s in ordered}
    if len(player_ids) != 1:
        raise ValueError(f"series belong to several players: {sorted(player_ids)}")
    player_id = player_ids.pop()

    strain_sum = math.fsum(sample.strain for s in ordered for sample in s.samples)
    total_frames = sum(s.n_frames for s in ordered)
    teams = Counter(s.team for s in ordered if s.team)
    position = (player.position if player and player.position else None) or ordered[-1].position

    return PlayerAggregate(
        player_id=player_id,
        display_name=player.display_name if player else None,
        position=position,
        position_group=rusher_position_group(position),
        team=teams.most_common(1)[0][0] if teams else None,
        snaps=len(ordered),
        total_frames=total_frames,
        strain_sum=strain_sum,
        avg_strain=strain_sum / total_frames if total_frames else 0.0,
        hits=sum(s.credited_hit for s in ordered),
        hurries=sum(s.credited_hurry for s in ordered),
        sacks=sum(s.credited_sack for s in ordered),
    )


def aggregate_players(
    series: Iterable[StrainSeries],
    players: Optional[Dict[int, PlayerInfo]] = None,
    weeks: Optional[Iterable[int]] = None,
) -> List[PlayerAggregate]:
    """
    Aggregate series per rusher, optionally restricted to some schedule weeks

    Returns:
        PlayerAggregate list ordered by player_id
    """
    players = players or {}
    allowed = set(weeks) if weeks is not None else None
    by_player: Dict[int, List[StrainSeries]] = {}
    for s in series:
        if allowed is not None and s.week not in allowed:
            continue
        by_player.setdefault(s.rusher_id, []).append(s)
    return [player_average_strain(by_player[pid], players.get(pid)) for pid in sorted(by_player)]


def _curve(
    series: Sequence[StrainSeries],
    label: str,
    max_frame: int,
    dt: float,
    position_group: Optional[RusherPosition] = None,
    outcome: Optional[Outcome] = None,
) -> StrainCurve:
    if not series:
        logger.warning("curve %s has no series; returning an empty curve", label)
        return StrainCurve(label=label, position_group=position_group, outcome=outcome)

    # Window frame t covers (t-1)*dt seconds after the snap; frame 1 has no sample
    values: Dict[int, List[float]] = {t: [] for t in range(2, max_frame + 2)}
    for s in sorted(series, key=lambda s: (s.game_id, s.play_id, s.rusher_id)):
        for sample in s.samples:
            bucket = values.get(sample.frame_index)
            if bucket is not None:
                bucket.append(sample.strain)

    points = []
    for t, bucket in values.items():
        points.append(CurvePoint(
            frame_index=t,
            seconds_after_snap=round((t - 1) * dt, 10),
            mean_strain=math.fsum(bucket) / len(bucket) if bucket else None,
            n_samples=len(bucket),
        ))
    return StrainCurve(label=label, position_group=position_group, outcome=outcome, points=points)


def _as_group(position_group: Union[RusherPosition, str]) -> RusherPosition:
    return position_group if isinstance(position_group, RusherPosition) else RusherPosition(position_group)


def positional_curve(
    series: Iterable[StrainSeries],
    position_group: Union[RusherPosition, str],
    max_frame: int = STRAIN_MAX_FRAME,
    dt: float = STRAIN_FRAME_DT,
) -> StrainCurve:
    """
    Mean STRAIN per window frame for one position group

    Args:
        series: All rusher series
        position_group: Group to keep
        max_frame: Number of sampled frames after the snap
        dt: Frame step in seconds

    Returns:
        StrainCurve with per-frame sample counts; empty (with a warning) when the group has no series
    """
    group = _as_group(position_group)
    subset = [s for s in series if s.position_group == group]
    return _curve(subset, group.value, max_frame, dt, position_group=group)


def outcome_curves(
    series: Iterable[StrainSeries],
    position_group: Union[RusherPosition, str],
    max_frame: int = STRAIN_MAX_FRAME,
    dt: float = STRAIN_FRAME_DT,
) -> Dict[Outcome, StrainCurve]:
    """Positional curves split by each rusher's credited outcome"""
    group = _as_group(position_group)
    subset = [s for s in series if s.position_group == group]
    return {
        outcome: _curve(
            [s for s in subset if s.outcome == outcome],
            f"{group.value}:{outcome.value}", max_frame, dt,
            position_group=group, outcome=outcome,
        )
        for outcome in Outcome
    }


def overall_curve(
    series: Iterable[StrainSeries],
    max_frame: int = STRAIN_MAX_FRAME,
    dt: float = STRAIN_FRAME_DT,
) -> StrainCurve:
    """Curve pooling every rusher regardless of position"""
    return _curve(list(series), "all", max_frame, dt)


def curves_to_dataframe(curves: Iterable[StrainCurve]) -> pd.DataFrame:
    """Long table (label, group, outcome, frame, seconds, mean, n) for plotting"""
    rows = []
    for curve in curves:
        for point in curve.points:
            rows.append({
                "label": curve.label,
                "position_group": curve.position_group.value if curve.position_group else None,
                "outcome": curve.outcome.value if curve.outcome else None,
                "frame_index": point.frame_index,
                "seconds_after_snap": point.seconds_after_snap,
                "mean_strain": point.mean_strain,
                "n_samples": point.n_samples,
            })
    return pd.DataFrame(rows, columns=[
        "label", "position_group", "outcome", "frame_index",
        "seconds_after_snap", "mean_strain", "n_samples",
    ])


def curves_to_wide(curves: Iterable[StrainCurve]) -> pd.DataFrame:
    """One row per frame, one mean-STRAIN column per curve label"""
    curves = list(curves)
    long = curves_to_dataframe(curves)
    labels = list(dict.fromkeys(c.label for c in curves))
    if long.empty:
        return pd.DataFrame(columns=["frame_index", "seconds_after_snap"] + labels)
    wide = long.pivot(index=["frame_index", "seconds_after_snap"], columns="label", values="mean_strain")
    wide = wide.reindex(columns=labels).astype(float).reset_index()
    wide.columns.name = None
    return wide


def play_feature_table(
    window: PlayWindow,
    dt: float = STRAIN_FRAME_DT,
    distance_floor: float = STRAIN_DISTANCE_FLOOR,
) -> pd.DataFrame:
    """
    Distance, closing velocity and STRAIN for every rusher on one play

    Returns:
        One row per (rusher, sampled frame), ordered by rusher then frame
    """
    rows = []
    for rusher_id in window.rusher_ids:
        series = play_strain_series(window, rusher_id, dt=dt, distance_floor=distance_floor)
        for sample in series.samples:
            rows.append({
                "game_id": window.game_id,
                "play_id": window.play_id,
                "rusher_id": rusher_id,
                "position": series.position,
                "outcome": series.outcome.value,
                "frame_index": sample.frame_index,
                "seconds_after_snap": round((sample.frame_index - 1) * dt, 10),
                "distance": sample.distance,
                "closing_velocity": sample.closing_velocity,
                "strain": sample.strain,
            })
    return pd.DataFrame(rows)


__all__ = [
    "rusher_qb_distance",
    "strain_at_frame",
    "distance_series",
    "rusher_position_group",
    "play_strain_series",
    "compute_series",
    "player_average_strain",
    "aggregate_players",
    "positional_curve",
    "outcome_curves",
    "overall_curve",
    "curves_to_dataframe",
    "curves_to_wide",
    "play_feature_table",
]
