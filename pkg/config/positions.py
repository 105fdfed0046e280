"""Position groupings, role normalization and event aliases"""
from typing import Dict, FrozenSet

from models.observation import BlockerPosition, RusherPosition
from models.tracking import Down, EndEvent, Role


# Pass-rush positions (officialPosition codes) -> model position group
RUSHER_POSITION_GROUPS: Dict[str, RusherPosition] = {
    "DE": RusherPosition.DE,
    "DT": RusherPosition.DT,
    "NT": RusherPosition.NT,
    "OLB": RusherPosition.OLB,
    "MLB": RusherPosition.INTERIOR_LB,
    "ILB": RusherPosition.INTERIOR_LB,
    "LB": RusherPosition.INTERIOR_LB,
    "CB": RusherPosition.SECONDARY,
    "FS": RusherPosition.SECONDARY,
    "SS": RusherPosition.SECONDARY,
    "S": RusherPosition.SECONDARY,
    "DB": RusherPosition.SECONDARY,
}

# Pass-block positions -> model position group
BLOCKER_POSITION_GROUPS: Dict[str, BlockerPosition] = {
    "T": BlockerPosition.T,
    "C": BlockerPosition.C,
    "G": BlockerPosition.G,
    "TE": BlockerPosition.OTHER,
    "RB": BlockerPosition.OTHER,
    "FB": BlockerPosition.OTHER,
    "WR": BlockerPosition.OTHER,
}

EDGE_POSITIONS: FrozenSet[RusherPosition] = frozenset({RusherPosition.OLB, RusherPosition.DE})
INTERIOR_POSITIONS: FrozenSet[RusherPosition] = frozenset({RusherPosition.DT, RusherPosition.NT})

LEADERBOARD_GROUPS: Dict[str, FrozenSet[RusherPosition]] = {
    "edge": EDGE_POSITIONS,
    "interior": INTERIOR_POSITIONS,
}

QUARTERBACK_POSITION = "QB"

# Scouting role strings, lower-cased
SCOUTING_ROLES: Dict[str, Role] = {
    "pass rush": Role.PASS_RUSH,
    "pass block": Role.PASS_BLOCK,
    "pass": Role.PASS,
    "pass route": Role.OTHER,
    "coverage": Role.OTHER,
}

SNAP_EVENT = "ball_snap"

# Raw event annotation -> canonical window end event.
# Any other annotation never closes a window.
END_EVENT_ALIASES: Dict[str, EndEvent] = {
    "pass_forward": EndEvent.PASS_FORWARD,
    "autoevent_passforward": EndEvent.PASS_FORWARD,
    "qb_sack": EndEvent.QB_SACK,
    "qb_strip_sack": EndEvent.QB_SACK,
}

# Plays-file down codes; two-point tries are recorded with down 0
DOWN_CODES: Dict[int, Down] = {
    0: Down.TWO_POINT,
    1: Down.FIRST,
    2: Down.SECOND,
    3: Down.THIRD,
    4: Down.FOURTH,
}

__all__ = [
    "RUSHER_POSITION_GROUPS",
    "BLOCKER_POSITION_GROUPS",
    "EDGE_POSITIONS",
    "INTERIOR_POSITIONS",
    "LEADERBOARD_GROUPS",
    "QUARTERBACK_POSITION",
    "SCOUTING_ROLES",
    "SNAP_EVENT",
    "END_EVENT_ALIASES",
    "DOWN_CODES",
]
