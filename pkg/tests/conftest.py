"""Shared fixtures: a tiny competition-format corpus written to tmp_path"""
from datetime import datetime, timedelta

import pandas as pd
import pytest

from ingest.play_windows import assemble_windows
from ingest.tracking_reader import load_corpus

GAME_WEEK1 = 2021090900
GAME_WEEK5 = 2021101000

QB = 10
EDGE = 20
INTERIOR = 21
TACKLE = 30
GUARD = 31
RECEIVER = 40

SNAP_FRAME = 2
# Rusher 20 starts 8 yards from the QB and closes at 5 yd/s
EDGE_START_DISTANCE = 8.0
EDGE_SPEED = 5.0

# (game, play) -> (sampled frames after the snap, end event, credits for the edge rusher)
WINDOW_PLAYS = {
    (GAME_WEEK1, 1): (10, "pass_forward", {"pff_hurry": "1"}),
    (GAME_WEEK1, 2): (6, "qb_sack", {"pff_sack": "1"}),
    (GAME_WEEK5, 1): (8, "autoevent_passforward", {}),
}
NO_END_PLAY = (GAME_WEEK1, 3)

_START = datetime(2021, 9, 10, 0, 15, 0)


def edge_distance(frame_index: int) -> float:
    """Edge rusher to QB distance at window frame index (1 = snap)"""
    return EDGE_START_DISTANCE - EDGE_SPEED * 0.1 * (frame_index - 1)


def _positions(frame_id: int):
    moved = max(frame_id - SNAP_FRAME, 0)
    qb = (30.0, 26.65)
    return {
        QB: ("TB", qb),
        EDGE: ("DAL", (qb[0] + EDGE_START_DISTANCE - EDGE_SPEED * 0.1 * moved, qb[1])),
        INTERIOR: ("DAL", (33.0, 30.0)),
        TACKLE: ("TB", (31.5, 26.65)),
        GUARD: ("TB", (31.5, 29.0)),
        RECEIVER: ("TB", (30.0, 10.0)),
    }


def tracking_rows(game_id, play_id, n_sampled, end_event="pass_forward", skip=None):
    """
    Tracking rows for one play: one pre-snap frame, the window, one trailing frame

    Args:
        n_sampled: Frames after the snap inside the window
        end_event: Event closing the window, or None for no end event
        skip: Optional (player_id, frame_id) row to leave out
    """
    end_frame = SNAP_FRAME + n_sampled
    rows = []
    for frame_id in range(1, end_frame + 2):
        event = "NA"
        if frame_id == SNAP_FRAME:
            event = "ball_snap"
        elif frame_id == end_frame and end_event:
            event = end_event
        stamp = (_START + timedelta(seconds=0.1 * (frame_id - 1))).isoformat(timespec="milliseconds")
        players = _positions(frame_id)
        for player_id, (team, (x, y)) in players.items():
            if skip == (player_id, frame_id):
                continue
            rows.append(_row(game_id, play_id, str(player_id), frame_id, stamp, team, x, y, event))
        rows.append(_row(game_id, play_id, "NA", frame_id, stamp, "football", 30.5, 26.65, event))
    return rows


def _row(game_id, play_id, nfl_id, frame_id, stamp, team, x, y, event):
    return {
        "gameId": game_id, "playId": play_id, "nflId": nfl_id, "frameId": frame_id,
        "time": stamp, "team": team, "playDirection": "left",
        "x": round(x, 4), "y": round(y, 4), "s": 0.5, "a": 0.1, "dis": 0.05,
        "o": 90.0, "dir": 270.0, "event": event,
    }


def scouting_rows(game_id, play_id, edge_credits=None):
    edge_credits = edge_credits or {}
    base = {"gameId": game_id, "playId": play_id, "pff_hit": "0", "pff_hurry": "0", "pff_sack": "0",
            "pff_nflIdBlockedPlayer": "NA", "pff_positionLinedUp": "NA"}
    return [
        {**base, "nflId": QB, "pff_role": "Pass"},
        {**base, "nflId": EDGE, "pff_role": "Pass Rush", **edge_credits},
        {**base, "nflId": INTERIOR, "pff_role": "Pass Rush"},
        {**base, "nflId": TACKLE, "pff_role": "Pass Block", "pff_nflIdBlockedPlayer": str(EDGE)},
        {**base, "nflId": GUARD, "pff_role": "Pass Block"},
        {**base, "nflId": RECEIVER, "pff_role": "Pass Route"},
    ]


def write_csv(path, rows):
    pd.DataFrame(rows).to_csv(path, index=False)
    return path


def write_corpus(data_dir, extra_week1_rows=()):
    data_dir.mkdir(parents=True, exist_ok=True)
    write_csv(data_dir / "games.csv", [
        {"gameId": GAME_WEEK1, "week": 1, "homeTeamAbbr": "TB", "visitorTeamAbbr": "DAL"},
        {"gameId": GAME_WEEK5, "week": 5, "homeTeamAbbr": "TB", "visitorTeamAbbr": "DAL"},
    ])
    write_csv(data_dir / "players.csv", [
        {"nflId": QB, "displayName": "Quinn Passer", "officialPosition": "QB"},
        {"nflId": EDGE, "displayName": "Eddie Edge", "officialPosition": "DE"},
        {"nflId": INTERIOR, "displayName": "Ivan Inside", "officialPosition": "DT"},
        {"nflId": TACKLE, "displayName": "Tom Tackle", "officialPosition": "T"},
        {"nflId": GUARD, "displayName": "Gus Guard", "officialPosition": "G"},
        {"nflId": RECEIVER, "displayName": "Rick Route", "officialPosition": "WR"},
    ])
    plays = []
    for (game_id, play_id) in list(WINDOW_PLAYS) + [NO_END_PLAY]:
        plays.append({"gameId": game_id, "playId": play_id, "down": 1 if play_id != 2 else 3,
                      "yardsToGo": 10 if play_id != 2 else 4, "possessionTeam": "TB",
                      "defensiveTeam": "DAL", "yardlineSide": "TB" if play_id != 2 else "DAL",
                      "yardlineNumber": 25 if play_id != 2 else 40})
    plays.append({"gameId": GAME_WEEK1, "playId": 4, "down": 9, "yardsToGo": 10, "possessionTeam": "TB",
                  "defensiveTeam": "DAL", "yardlineSide": "TB", "yardlineNumber": 30})
    write_csv(data_dir / "plays.csv", plays)

    scouting = []
    for (game_id, play_id), (_, _, credits) in WINDOW_PLAYS.items():
        scouting += scouting_rows(game_id, play_id, credits)
    scouting += scouting_rows(*NO_END_PLAY)
    write_csv(data_dir / "pffScoutingData.csv", scouting)

    week1, week5 = [], []
    for (game_id, play_id), (n_sampled, end_event, _) in WINDOW_PLAYS.items():
        target = week1 if game_id == GAME_WEEK1 else week5
        target += tracking_rows(game_id, play_id, n_sampled, end_event)
    week1 += tracking_rows(*NO_END_PLAY, 5, end_event=None)
    week1 += list(extra_week1_rows)
    write_csv(data_dir / "week1.csv", week1)
    write_csv(data_dir / "week5.csv", week5)
    return data_dir


@pytest.fixture
def data_dir(tmp_path):
    return write_corpus(tmp_path / "data")


@pytest.fixture
def corpus(data_dir):
    return load_corpus(data_dir)


@pytest.fixture
def window_set(corpus):
    return assemble_windows(corpus)


@pytest.fixture
def windows_by_key(window_set):
    return {w.key: w for w in window_set.windows}
