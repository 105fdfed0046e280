"""STRAIN samples, per-play series, player aggregates and curves"""
from typing import List, Optional

from pydantic import BaseModel, Field

from models.observation import RusherPosition
from models.tracking import Outcome


class StrainSample(BaseModel):
    """STRAIN of one rusher at one window frame"""
    frame_index: int = Field(ge=2)
    distance: float = Field(ge=0.0)
    # Positive when the rusher is closing on the quarterback
    closing_velocity: float
    strain: float


class StrainSeries(BaseModel):
    """Per-frame STRAIN for one rusher within one play"""
    game_id: int
    play_id: int
    rusher_id: int
    team: Optional[str] = None
    position: Optional[str] = None
    position_group: Optional[RusherPosition] = None
    week: Optional[int] = None
    outcome: Outcome = Outcome.NONE
    credited_hit: bool = False
    credited_hurry: bool = False
    credited_sack: bool = False
    samples: List[StrainSample]
    play_average: float

    @property
    def n_frames(self) -> int:
        return len(self.samples)

    def strains(self) -> List[float]:
        return [s.strain for s in self.samples]


class PlayerAggregate(BaseModel):
    """Frame-weighted STRAIN summary for one rusher"""
    player_id: int
    display_name: Optional[str] = None
    position: Optional[str] = None
    position_group: Optional[RusherPosition] = None
    team: Optional[str] = None
    snaps: int = Field(ge=0)
    total_frames: int = Field(ge=0)
    strain_sum: float = 0.0
    avg_strain: float
    hits: int = 0
    hurries: int = 0
    sacks: int = 0


class CurvePoint(BaseModel):
    frame_index: int
    seconds_after_snap: float
    mean_strain: Optional[float] = None
    n_samples: int = 0


class StrainCurve(BaseModel):
    """Mean STRAIN per window frame for one stratum"""
    label: str
    position_group: Optional[RusherPosition] = None
    outcome: Optional[Outcome] = None
    points: List[CurvePoint] = Field(default_factory=list)

    @property
    def is_empty(self) -> bool:
        return not self.points

    def values(self) -> List[Optional[float]]:
        return [p.mean_strain for p in self.points]


__all__ = [
    "StrainSample",
    "StrainSeries",
    "PlayerAggregate",
    "CurvePoint",
    "StrainCurve",
]
