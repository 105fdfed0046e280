"""Position groupings and model-ready observation rows"""
from enum import Enum
from typing import Optional

from pydantic import BaseModel, ConfigDict, Field

from models.tracking import Down


class RusherPosition(str, Enum):
    """Pass-rush position groups; DE is the reference level"""
    DE = "DE"
    DT = "DT"
    NT = "NT"
    OLB = "OLB"
    INTERIOR_LB = "interior-LB"
    SECONDARY = "secondary"


class BlockerPosition(str, Enum):
    """Pass-block position groups; T is the reference level"""
    T = "T"
    C = "C"
    G = "G"
    OTHER = "other"


class ExclusionReason(str, Enum):
    NO_BLOCKERS = "no_blockers"
    UNKNOWN_POSITION = "unknown_position"
    NO_CONTEXT = "no_context"


class PlayObservation(BaseModel):
    """One (play, rusher) row for the multilevel model"""
    game_id: int
    play_id: int
    drive_key: str = Field(min_length=1)
    week: Optional[int] = None
    response: float
    rusher_id: int
    blocker_id: int
    defense_team: str
    offense_team: str
    n_blockers: int = Field(ge=0)
    yards_to_go: int = Field(ge=0)
    yardline: int = Field(ge=1, le=99)
    down: Down
    rusher_pos: RusherPosition
    blocker_pos: BlockerPosition
    # True when no blocker's scouting record names this rusher
    unblocked: bool = False
    # Distinguishes copies of one drive drawn more than once by the bootstrap
    replicate_tag: Optional[str] = None

    model_config = ConfigDict(
        json_schema_extra={
            "example": {
                "game_id": 2021101708,
                "play_id": 2374,
                "drive_key": "2021101708-DEN-007",
                "response": 1.27,
                "rusher_id": 47889,
                "blocker_id": 44955,
                "defense_team": "LV",
                "offense_team": "DEN",
                "n_blockers": 5,
                "yards_to_go": 8,
                "yardline": 25,
                "down": "3",
                "rusher_pos": "DE",
                "blocker_pos": "T",
            }
        }
    )

    @property
    def sort_key(self) -> tuple:
        return (self.game_id, self.play_id, self.rusher_id, self.replicate_tag or "")


class ObservationExclusion(BaseModel):
    """A (play, rusher) pair that did not become an observation"""
    game_id: int
    play_id: int
    rusher_id: int
    reason: ExclusionReason
    detail: Optional[str] = None


__all__ = [
    "RusherPosition",
    "BlockerPosition",
    "ExclusionReason",
    "PlayObservation",
    "ObservationExclusion",
]
