"""Configuration module"""
from config.positions import (
    RUSHER_POSITION_GROUPS,
    BLOCKER_POSITION_GROUPS,
    EDGE_POSITIONS,
    INTERIOR_POSITIONS,
    LEADERBOARD_GROUPS,
    SCOUTING_ROLES,
    END_EVENT_ALIASES,
    DOWN_CODES,
)

__all__ = [
    "RUSHER_POSITION_GROUPS",
    "BLOCKER_POSITION_GROUPS",
    "EDGE_POSITIONS",
    "INTERIOR_POSITIONS",
    "LEADERBOARD_GROUPS",
    "SCOUTING_ROLES",
    "END_EVENT_ALIASES",
    "DOWN_CODES",
]
