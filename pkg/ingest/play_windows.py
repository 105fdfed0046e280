"""Snap-to-throw window assembly for individual plays"""
import logging
from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Optional, Tuple, Union

import numpy as np
import pandas as pd
from pydantic import BaseModel, Field

from config.positions import END_EVENT_ALIASES, QUARTERBACK_POSITION, SNAP_EVENT
from config.settings import STRAIN_FRAME_DT
from ingest.tracking_reader import Corpus, FileLedger, parse_tracking
from models.tracking import (
    BALL_MARKER,
    PlayContext,
    PlayerInfo,
    PlayerPlayRole,
    PlayerTrack,
    PlayWindow,
    RejectionReason,
    Role,
    RusherCredits,
    WindowRejection,
)

logger = logging.getLogger(__name__)

# Timestamps may jitter by a few milliseconds around the nominal 0.1 s step
_TIMING_TOLERANCE = 0.02


class WindowLedger(BaseModel):
    """Totals over assembled windows and categorized rejections"""
    n_plays_seen: int = 0
    n_windows: int = 0
    rejections: Dict[str, int] = Field(default_factory=dict)
    # Frames counted once per play, and once per (play, rusher) pair
    total_play_frames: int = 0
    total_rusher_frames: int = 0
    n_rusher_attempts: int = 0
    # Plays with tracking but no plays-file context
    n_without_context: int = 0
    rusher_counts: Dict[int, int] = Field(default_factory=dict)

    def record_rejection(self, reason: RejectionReason) -> None:
        self.rejections[reason.value] = self.rejections.get(reason.value, 0) + 1

    def record_window(self, window: PlayWindow) -> None:
        self.n_windows += 1
        self.total_play_frames += window.n_frames
        self.total_rusher_frames += window.n_frames * len(window.rusher_ids)
        self.n_rusher_attempts += len(window.rusher_ids)
        n_rushers = len(window.rusher_ids)
        self.rusher_counts[n_rushers] = self.rusher_counts.get(n_rushers, 0) + 1


@dataclass
class WindowSet:
    windows: List[PlayWindow] = field(default_factory=list)
    rejections: List[WindowRejection] = field(default_factory=list)
    ledger: WindowLedger = field(default_factory=WindowLedger)
    file_ledgers: Dict[str, FileLedger] = field(default_factory=dict)


def _frame_events(frames: pd.DataFrame) -> Dict[int, List[str]]:
    """frame_id -> distinct event annotations seen on any row of that frame"""
    events: Dict[int, List[str]] = {}
    annotated = frames[frames["event"].map(lambda e: isinstance(e, str))]
    for frame_id, event in zip(annotated["frame_id"], annotated["event"]):
        bucket = events.setdefault(int(frame_id), [])
        if event not in bucket:
            bucket.append(event)
    return events


def _find_window_bounds(events: Dict[int, List[str]]) -> Tuple[Optional[int], Optional[int], Optional[str]]:
    snap_frames = sorted(f for f, evs in events.items() if SNAP_EVENT in evs)
    if not snap_frames:
        return None, None, None
    snap = snap_frames[0]
    for frame_id in sorted(events):
        if frame_id <= snap:
            continue
        for event in events[frame_id]:
            canonical = END_EVENT_ALIASES.get(event)
            if canonical is not None:
                return snap, frame_id, canonical.value
    return snap, None, None


def _timing_is_regular(frames: pd.DataFrame, dt: float) -> bool:
    if "time" not in frames.columns:
        return True
    stamps = frames.drop_duplicates("frame_id").sort_values("frame_id")
    times = stamps["time"]
    if times.isna().any() or len(times) < 2:
        return True
    steps = np.diff(times.to_numpy().astype("datetime64[ns]").astype(np.int64)) / 1e9
    frame_steps = np.diff(stamps["frame_id"].to_numpy())
    return bool(np.all(np.abs(steps - frame_steps * dt) <= _TIMING_TOLERANCE))


def _track(player_frames: pd.DataFrame, player_id: int, position: Optional[str]) -> PlayerTrack:
    return PlayerTrack(
        player_id=player_id,
        team=str(player_frames["team"].iloc[0]),
        position=position,
        frame_ids=player_frames["frame_id"].astype(int).tolist(),
        x=player_frames["x"].astype(float).tolist(),
        y=player_frames["y"].astype(float).tolist(),
    )


def build_play_window(
    frames: pd.DataFrame,
    context: Optional[PlayContext],
    roles: List[PlayerPlayRole],
    players: Optional[Dict[int, PlayerInfo]] = None,
    dt: float = STRAIN_FRAME_DT,
) -> Union[PlayWindow, WindowRejection]:
    """
    Cut one play's frames to the snap-to-throw window and identify its players

    Args:
        frames: Validated tracking records for a single (game, play)
        context: Play context (only used for identifiers when present)
        roles: Scouting roles for the play
        players: Roster used to spot quarterbacks on the field
        dt: Nominal frame step in seconds

    Returns:
        PlayWindow, or WindowRejection carrying the categorized reason
    """
    game_id = int(frames["game_id"].iloc[0])
    play_id = int(frames["play_id"].iloc[0])
    players = players or {}

    def reject(reason: RejectionReason, detail: Optional[str] = None) -> WindowRejection:
        logger.debug("play %s/%s rejected: %s %s", game_id, play_id, reason.value, detail or "")
        return WindowRejection(game_id=game_id, play_id=play_id, reason=reason, detail=detail)

    snap, end, end_event = _find_window_bounds(_frame_events(frames))
    if snap is None:
        return reject(RejectionReason.NO_SNAP)
    if end is None:
        return reject(RejectionReason.NO_END_EVENT)

    people = frames[frames["player_id"] != BALL_MARKER]
    tracked = set(int(p) for p in people["player_id"].unique())

    def position_of(player_id: int) -> Optional[str]:
        info = players.get(player_id)
        if info and info.position:
            return info.position
        for role in roles:
            if role.player_id == player_id:
                return role.position
        return None

    on_field_qbs = sorted(p for p in tracked if position_of(p) == QUARTERBACK_POSITION)
    if len(on_field_qbs) > 1:
        return reject(RejectionReason.MULTI_QB, f"quarterbacks {on_field_qbs}")
    passers = sorted(r.player_id for r in roles if r.role == Role.PASS and r.player_id in tracked)
    if len(passers) > 1:
        return reject(RejectionReason.MULTI_QB, f"passers {passers}")
    if passers:
        qb_id = passers[0]
    elif on_field_qbs:
        qb_id = on_field_qbs[0]
    else:
        return reject(RejectionReason.NO_QB)

    rusher_ids = sorted(r.player_id for r in roles if r.role == Role.PASS_RUSH and r.player_id in tracked)
    if not rusher_ids:
        return reject(RejectionReason.NO_RUSHER)
    blocker_ids = sorted(r.player_id for r in roles if r.role == Role.PASS_BLOCK)

    in_window = people[(people["frame_id"] >= snap) & (people["frame_id"] <= end)]
    if not _timing_is_regular(frames[(frames["frame_id"] >= snap) & (frames["frame_id"] <= end)], dt):
        return reject(RejectionReason.FRAME_GAP, "irregular timestamps")

    tracks: Dict[int, PlayerTrack] = {}
    for player_id, player_frames in in_window.groupby("player_id", sort=True):
        player_id = int(player_id)
        if player_id == qb_id or player_id in rusher_ids or player_id in blocker_ids:
            tracks[player_id] = _track(player_frames, player_id, position_of(player_id))

    for player_id in [qb_id] + rusher_ids:
        track = tracks.get(player_id)
        missing = track.missing_frames(snap, end) if track else list(range(snap, end + 1))
        if missing:
            return reject(RejectionReason.FRAME_GAP, f"player {player_id} missing frames {missing[:5]}")

    credits = {}
    blocked_by: Dict[int, List[int]] = {rid: [] for rid in rusher_ids}
    for role in roles:
        if role.role == Role.PASS_RUSH and role.player_id in rusher_ids:
            credits[role.player_id] = RusherCredits(
                hit=role.credited_hit, hurry=role.credited_hurry, sack=role.credited_sack,
            )
        elif role.role == Role.PASS_BLOCK:
            for target in role.blocked_player_ids:
                if target in blocked_by and role.player_id not in blocked_by[target]:
                    blocked_by[target].append(role.player_id)

    directions = frames["play_direction"].dropna() if "play_direction" in frames.columns else []
    return PlayWindow(
        game_id=game_id,
        play_id=play_id,
        snap_frame=snap,
        end_frame=end,
        end_event=end_event,
        qb_id=qb_id,
        rusher_ids=rusher_ids,
        blocker_ids=blocker_ids,
        tracks=tracks,
        credits=credits,
        blocked_by={rid: sorted(b) for rid, b in blocked_by.items()},
        play_direction=str(directions.iloc[0]) if len(directions) else None,
    )


def iter_play_frames(records: pd.DataFrame) -> Iterator[Tuple[Tuple[int, int], pd.DataFrame]]:
    """Yield ((game_id, play_id), frames) in key order"""
    for key, frames in records.groupby(["game_id", "play_id"], sort=True):
        yield (int(key[0]), int(key[1])), frames


def assemble_windows(corpus: Corpus) -> WindowSet:
    """
    Build windows for every play in the corpus, one tracking file at a time

    Args:
        corpus: Loaded corpus

    Returns:
        WindowSet with windows ordered by (game_id, play_id) and a rejection ledger
    """
    result = WindowSet()
    for path in corpus.tracking_paths:
        table = parse_tracking(path, error_budget=corpus.error_budget)
        result.file_ledgers[path.name] = FileLedger(rows_read=table.rows_read, rows_skipped=table.rows_skipped)
        for key, frames in iter_play_frames(table.records):
            context = corpus.plays.get(key)
            if context is None:
                result.ledger.n_without_context += 1
                continue
            result.ledger.n_plays_seen += 1
            outcome = build_play_window(frames, context, corpus.roles.get(key, []), corpus.players)
            if isinstance(outcome, WindowRejection):
                result.rejections.append(outcome)
                result.ledger.record_rejection(outcome.reason)
            else:
                result.windows.append(outcome)
                result.ledger.record_window(outcome)
        logger.info("%s: %d windows so far, %d rejections", path.name,
                    len(result.windows), len(result.rejections))

    result.windows.sort(key=lambda w: w.key)
    result.rejections.sort(key=lambda r: (r.game_id, r.play_id))
    return result


__all__ = [
    "WindowLedger",
    "WindowSet",
    "build_play_window",
    "iter_play_frames",
    "assemble_windows",
]
