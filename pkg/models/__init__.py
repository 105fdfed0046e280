"""Data models module"""
from models.tracking import (
    BALL_MARKER,
    Role,
    Down,
    EndEvent,
    Outcome,
    RejectionReason,
    RowIssue,
    TrackingFrame,
    PlayContext,
    PlayExclusion,
    PlayerPlayRole,
    PlayerInfo,
    GameInfo,
    RusherCredits,
    PlayerTrack,
    PlayWindow,
    WindowRejection,
)
from models.observation import (
    RusherPosition,
    BlockerPosition,
    ExclusionReason,
    PlayObservation,
    ObservationExclusion,
)
from models.strain import StrainSample, StrainSeries, PlayerAggregate, CurvePoint, StrainCurve
from models.fit import (
    GroupingBlock,
    DesignSystem,
    FixedEffect,
    VarianceComponent,
    RandomIntercept,
    ModelFit,
    RankedLevel,
)
from models.bootstrap import BootstrapConfig, EffectDistribution, BootstrapResult
from models.report import LeaderboardRow, PairedValue, CorrelationReport, CheckResult, RunManifest

__all__ = [
    "BALL_MARKER",
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
    "RusherPosition",
    "BlockerPosition",
    "ExclusionReason",
    "PlayObservation",
    "ObservationExclusion",
    "StrainSample",
    "StrainSeries",
    "PlayerAggregate",
    "CurvePoint",
    "StrainCurve",
    "GroupingBlock",
    "DesignSystem",
    "FixedEffect",
    "VarianceComponent",
    "RandomIntercept",
    "ModelFit",
    "RankedLevel",
    "BootstrapConfig",
    "EffectDistribution",
    "BootstrapResult",
    "LeaderboardRow",
    "PairedValue",
    "CorrelationReport",
    "CheckResult",
    "RunManifest",
]
