"""Leaderboard, correlation and run-manifest models"""
from datetime import datetime
from typing import Dict, List, Optional

from pydantic import BaseModel, Field


class LeaderboardRow(BaseModel):
    rank: int
    player_id: int
    player: str
    team: Optional[str] = None
    position: Optional[str] = None
    snaps: int
    hits: int
    hurries: int
    sacks: int
    avg_strain: float


class PairedValue(BaseModel):
    player_id: int
    x: float
    y: float


class CorrelationReport(BaseModel):
    """Pearson correlation between two per-player quantities"""
    name: str
    x_label: str
    y_label: str
    pairs: List[PairedValue] = Field(default_factory=list)
    # None when either side has zero variance
    pearson_r: Optional[float] = None
    n_players: int = 0
    min_snaps: int
    filter_variant: str = "full_sample"


class CheckResult(BaseModel):
    """Outcome of one built-in numerical self-check"""
    name: str
    passed: bool
    detail: str = ""


class RunManifest(BaseModel):
    """What produced a set of output files"""
    command: str
    created_at: datetime = Field(default_factory=datetime.now)
    config: Dict[str, object] = Field(default_factory=dict)
    input_hashes: Dict[str, str] = Field(default_factory=dict)
    versions: Dict[str, str] = Field(default_factory=dict)
    outputs: List[str] = Field(default_factory=list)
    # record type -> JSON schema of its serialized lines
    schemas: Dict[str, dict] = Field(default_factory=dict)


__all__ = ["LeaderboardRow", "PairedValue", "CorrelationReport", "CheckResult", "RunManifest"]
