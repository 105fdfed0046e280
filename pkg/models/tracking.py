"""Tracking, play-context and play-window models"""
from enum import Enum
from typing import Dict, List, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

# Ball rows carry no nflId; they are tagged with this marker instead.
BALL_MARKER = 0

FIELD_LENGTH = 120.0
FIELD_WIDTH = 53.3


class Role(str, Enum):
    """Scouting role of a player on one play"""
    PASS_RUSH = "pass-rush"
    PASS_BLOCK = "pass-block"
    PASS = "pass"
    OTHER = "other"


class Down(str, Enum):
    """Down of a play; two-point tries are their own level"""
    FIRST = "1"
    SECOND = "2"
    THIRD = "3"
    FOURTH = "4"
    TWO_POINT = "two-point"


class EndEvent(str, Enum):
    """Canonical events closing a snap-to-throw window"""
    PASS_FORWARD = "pass_forward"
    QB_SACK = "qb_sack"


class Outcome(str, Enum):
    """Pressure outcome credited to a rusher, highest priority first"""
    SACK = "sack"
    HIT = "hit"
    HURRY = "hurry"
    NONE = "none"


class RejectionReason(str, Enum):
    """Why a play did not produce a window"""
    NO_SNAP = "no_snap"
    NO_END_EVENT = "no_end_event"
    MULTI_QB = "multi_qb"
    FRAME_GAP = "frame_gap"
    NO_QB = "no_qb"
    NO_RUSHER = "no_rusher"


class RowIssue(BaseModel):
    """One malformed input row, skipped and logged"""
    file: str
    line: int
    column: Optional[str] = None
    value: Optional[str] = None
    message: str


class TrackingFrame(BaseModel):
    """One player (or ball) observation at one frame"""
    game_id: int
    play_id: int
    frame_id: int = Field(ge=1)
    player_id: int
    team: str
    x: float
    y: float
    speed: float
    accel: float
    dist_traveled: float
    orientation: Optional[float] = None
    direction: Optional[float] = None
    event: Optional[str] = None
    play_direction: Optional[str] = None
    out_of_bounds: bool = False

    model_config = ConfigDict(
        json_schema_extra={
            "example": {
                "game_id": 2021101708,
                "play_id": 2374,
                "frame_id": 7,
                "player_id": 47889,
                "team": "LV",
                "x": 67.68,
                "y": 29.89,
                "speed": 0.34,
                "accel": 1.57,
                "dist_traveled": 0.04,
                "orientation": 124.86,
                "direction": 88.21,
                "event": "ball_snap",
            }
        }
    )

    @property
    def is_ball(self) -> bool:
        return self.player_id == BALL_MARKER


class PlayContext(BaseModel):
    """Game situation of one passing play"""
    game_id: int
    play_id: int
    possession_team: str
    defense_team: str
    down: Down
    yards_to_go: int = Field(ge=0)
    # Distance from the possession team's own goal line
    yardline: int = Field(ge=1, le=99)
    drive_key: str = Field(min_length=1)
    week: Optional[int] = Field(default=None, ge=1, le=8)

    @model_validator(mode="after")
    def _check_distance(self) -> "PlayContext":
        if self.down != Down.TWO_POINT and self.yards_to_go < 1:
            raise ValueError(f"yards_to_go must be >= 1 on down {self.down.value}")
        return self


class PlayExclusion(BaseModel):
    """A plays-file record that could not become a PlayContext"""
    game_id: Optional[int] = None
    play_id: Optional[int] = None
    line: int
    reason: str


class PlayerPlayRole(BaseModel):
    """Scouting record for one player on one play"""
    game_id: int
    play_id: int
    player_id: int
    role: Role
    position: Optional[str] = None
    credited_hit: bool = False
    credited_hurry: bool = False
    credited_sack: bool = False
    blocked_player_ids: List[int] = Field(default_factory=list)


class PlayerInfo(BaseModel):
    """Roster entry from the players file"""
    player_id: int
    display_name: str
    position: Optional[str] = None


class GameInfo(BaseModel):
    """Schedule entry from the games file"""
    game_id: int
    week: int = Field(ge=1)
    home_team: Optional[str] = None
    visitor_team: Optional[str] = None


class RusherCredits(BaseModel):
    hit: bool = False
    hurry: bool = False
    sack: bool = False

    @property
    def outcome(self) -> Outcome:
        if self.sack:
            return Outcome.SACK
        if self.hit:
            return Outcome.HIT
        if self.hurry:
            return Outcome.HURRY
        return Outcome.NONE


class PlayerTrack(BaseModel):
    """Positions of one player over the frames of a window"""
    player_id: int
    team: str
    position: Optional[str] = None
    frame_ids: List[int]
    x: List[float]
    y: List[float]

    @model_validator(mode="after")
    def _check_lengths(self) -> "PlayerTrack":
        if not (len(self.frame_ids) == len(self.x) == len(self.y)):
            raise ValueError(f"track for player {self.player_id} has ragged columns")
        return self

    def missing_frames(self, start: int, end: int) -> List[int]:
        present = set(self.frame_ids)
        return [f for f in range(start, end + 1) if f not in present]


class PlayWindow(BaseModel):
    """Validated snap-to-end slice of one play"""
    game_id: int
    play_id: int
    snap_frame: int
    end_frame: int
    end_event: EndEvent
    qb_id: int
    rusher_ids: List[int]
    blocker_ids: List[int] = Field(default_factory=list)
    tracks: Dict[int, PlayerTrack]
    credits: Dict[int, RusherCredits] = Field(default_factory=dict)
    # rusher id -> blockers the scouting data lists as engaging that rusher
    blocked_by: Dict[int, List[int]] = Field(default_factory=dict)
    play_direction: Optional[str] = None

    @model_validator(mode="after")
    def _check_window(self) -> "PlayWindow":
        if self.end_frame <= self.snap_frame:
            raise ValueError(
                f"window end {self.end_frame} must follow snap {self.snap_frame}"
            )
        if self.qb_id not in self.tracks:
            raise ValueError(f"quarterback {self.qb_id} has no track")
        if not self.rusher_ids:
            raise ValueError("window has no rushers")
        return self

    @property
    def key(self) -> tuple:
        return (self.game_id, self.play_id)

    @property
    def n_frames(self) -> int:
        return self.end_frame - self.snap_frame + 1

    def outcome(self, rusher_id: int) -> Outcome:
        credits = self.credits.get(rusher_id)
        return credits.outcome if credits else Outcome.NONE


class WindowRejection(BaseModel):
    """A play dropped during window assembly, with its category"""
    game_id: int
    play_id: int
    reason: RejectionReason
    detail: Optional[str] = None


__all__ = [
    "BALL_MARKER",
    "FIELD_LENGTH",
    "FIELD_WIDTH",
    "Role",
    "Down",
    "EndEvent",
    "Outcome",
    "RejectionReason",
    "RowIssue",
    "TrackingFrame",
    "PlayContext",
    "PlayExclusion",
    "PlayerPlayRole",
    "PlayerInfo",
    "GameInfo",
    "RusherCredits",
    "PlayerTrack",
    "PlayWindow",
    "WindowRejection",
]
