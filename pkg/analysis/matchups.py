"""Nearest-blocker assignment and model-ready observation rows"""
import logging
import math
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Tuple, Union

from pydantic import BaseModel, Field

from config.positions import BLOCKER_POSITION_GROUPS, RUSHER_POSITION_GROUPS
from models.observation import (
    BlockerPosition,
    ExclusionReason,
    ObservationExclusion,
    PlayObservation,
    RusherPosition,
)
from models.strain import StrainSeries
from models.tracking import PlayContext, PlayWindow, Role
from utils.errors import UnknownPositionError

logger = logging.getLogger(__name__)

_ROLE_ALIASES = {
    Role.PASS_RUSH: Role.PASS_RUSH,
    Role.PASS_BLOCK: Role.PASS_BLOCK,
    "rush": Role.PASS_RUSH,
    "block": Role.PASS_BLOCK,
}


def position_group(raw_position: Optional[str], role: Union[Role, str]) -> Union[RusherPosition, BlockerPosition]:
    """
    Map an official position code to its model grouping

    Args:
        raw_position: Position code such as "MLB" or "RB"
        role: Role.PASS_RUSH / Role.PASS_BLOCK (or "rush" / "block")

    Raises:
        UnknownPositionError: If the code has no grouping for that role
    """
    normalized = _ROLE_ALIASES.get(role)
    if normalized is None:
        raise ValueError(f"position groups exist only for rushers and blockers, not {role!r}")
    table = RUSHER_POSITION_GROUPS if normalized == Role.PASS_RUSH else BLOCKER_POSITION_GROUPS
    code = raw_position.strip().upper() if raw_position else None
    if code not in table:
        raise UnknownPositionError(raw_position, "rusher" if normalized == Role.PASS_RUSH else "blocker")
    return table[code]


def _position_at(window: PlayWindow, player_id: int, frame_id: int) -> Optional[Tuple[float, float]]:
    track = window.tracks.get(player_id)
    if track is None:
        return None
    try:
        i = track.frame_ids.index(frame_id)
    except ValueError:
        return None
    return track.x[i], track.y[i]


def nearest_blocker(window: PlayWindow, rusher_id: int) -> Optional[int]:
    """
    Blocker closest to the rusher at the snap frame

    Ties go to the smaller player id. Blockers without a snap-frame position are skipped.

    Returns:
        Blocker id, or None when the play has no locatable blocker
    """
    rusher = _position_at(window, rusher_id, window.snap_frame)
    if rusher is None:
        return None
    candidates = []
    for blocker_id in window.blocker_ids:
        where = _position_at(window, blocker_id, window.snap_frame)
        if where is not None:
            candidates.append((math.hypot(where[0] - rusher[0], where[1] - rusher[1]), blocker_id))
    if not candidates:
        return None
    return min(candidates)[1]


def build_observation(
    window: PlayWindow,
    context: PlayContext,
    rusher_id: int,
    series: StrainSeries,
) -> Union[PlayObservation, ObservationExclusion]:
    """
    Build the covariate row of one (play, rusher) pair

    Args:
        window: Play window the series was computed on
        context: Situation of the play
        rusher_id: Rusher on the play
        series: The rusher's STRAIN series for the play

    Returns:
        PlayObservation, or ObservationExclusion when no blocker is found or a position is unmapped
    """
    def exclude(reason: ExclusionReason, detail: str) -> ObservationExclusion:
        return ObservationExclusion(
            game_id=window.game_id, play_id=window.play_id, rusher_id=rusher_id,
            reason=reason, detail=detail,
        )

    blocker_id = nearest_blocker(window, rusher_id)
    if blocker_id is None:
        return exclude(ExclusionReason.NO_BLOCKERS, "no pass blocker located at the snap")

    try:
        rusher_pos = position_group(window.tracks[rusher_id].position, Role.PASS_RUSH)
        blocker_pos = position_group(window.tracks[blocker_id].position, Role.PASS_BLOCK)
    except UnknownPositionError as e:
        logger.warning("play %s/%s rusher %s: %s", window.game_id, window.play_id, rusher_id, e)
        return exclude(ExclusionReason.UNKNOWN_POSITION, str(e))

    return PlayObservation(
        game_id=window.game_id,
        play_id=window.play_id,
        drive_key=context.drive_key,
        week=context.week,
        response=series.play_average,
        rusher_id=rusher_id,
        blocker_id=blocker_id,
        defense_team=context.defense_team,
        offense_team=context.possession_team,
        n_blockers=len(window.blocker_ids),
        yards_to_go=context.yards_to_go,
        yardline=context.yardline,
        down=context.down,
        rusher_pos=rusher_pos,
        blocker_pos=blocker_pos,
        unblocked=not window.blocked_by.get(rusher_id),
    )


class ObservationLedger(BaseModel):
    """Pairs considered, kept and excluded; kept + excluded == pairs"""
    n_pairs: int = 0
    n_observations: int = 0
    excluded: Dict[str, int] = Field(default_factory=dict)
    # Kept rows where no blocker's scouting record names the rusher
    n_unblocked: int = 0

    @property
    def n_excluded(self) -> int:
        return sum(self.excluded.values())


@dataclass
class ObservationSet:
    observations: List[PlayObservation] = field(default_factory=list)
    exclusions: List[ObservationExclusion] = field(default_factory=list)
    ledger: ObservationLedger = field(default_factory=ObservationLedger)


def build_observations(
    windows: Iterable[PlayWindow],
    series: Iterable[StrainSeries],
    plays: Dict[Tuple[int, int], PlayContext],
) -> ObservationSet:
    """
    Observation rows for every (play, rusher) series

    Args:
        windows: Play windows
        series: Series computed on those windows
        plays: Play contexts keyed by (game_id, play_id)

    Returns:
        ObservationSet ordered by (game_id, play_id, rusher_id)
    """
    by_key = {w.key: w for w in windows}
    result = ObservationSet()
    for s in sorted(series, key=lambda s: (s.game_id, s.play_id, s.rusher_id)):
        result.ledger.n_pairs += 1
        key = (s.game_id, s.play_id)
        window, context = by_key.get(key), plays.get(key)
        if window is None or context is None:
            outcome = ObservationExclusion(
                game_id=s.game_id, play_id=s.play_id, rusher_id=s.rusher_id,
                reason=ExclusionReason.NO_CONTEXT, detail="play window or context missing",
            )
        else:
            outcome = build_observation(window, context, s.rusher_id, s)

        if isinstance(outcome, ObservationExclusion):
            result.exclusions.append(outcome)
            reason = outcome.reason.value
            result.ledger.excluded[reason] = result.ledger.excluded.get(reason, 0) + 1
        else:
            result.observations.append(outcome)
            result.ledger.n_observations += 1
            result.ledger.n_unblocked += int(outcome.unblocked)

    logger.info(
        "%d observations from %d (play, rusher) pairs; %d excluded, %d unblocked rushers kept",
        result.ledger.n_observations, result.ledger.n_pairs,
        result.ledger.n_excluded, result.ledger.n_unblocked,
    )
    return result


__all__ = [
    "position_group",
    "nearest_blocker",
    "build_observation",
    "ObservationLedger",
    "ObservationSet",
    "build_observations",
]
