"""Tracking ingest module"""
from ingest.tracking_reader import (
    Corpus,
    IngestLedger,
    parse_tracking,
    parse_plays,
    parse_scouting,
    parse_players,
    parse_games,
    load_corpus,
)
from ingest.play_windows import WindowLedger, WindowSet, build_play_window, assemble_windows

__all__ = [
    "Corpus",
    "IngestLedger",
    "parse_tracking",
    "parse_plays",
    "parse_scouting",
    "parse_players",
    "parse_games",
    "load_corpus",
    "WindowLedger",
    "WindowSet",
    "build_play_window",
    "assemble_windows",
]
