import pandas as pd
import pytest
from pydantic import ValidationError

from ingest.tracking_reader import (
    find_tracking_files,
    iter_tracking_frames,
    load_corpus,
    parse_plays,
    parse_scouting,
    parse_tracking,
)
from models.tracking import BALL_MARKER, Down, PlayContext, Role
from utils.errors import ErrorBudgetExceeded, SchemaError

from tests.conftest import EDGE, GAME_WEEK1, GAME_WEEK5, TACKLE, tracking_rows, write_corpus, write_csv


def test_parse_tracking_marks_ball_rows_and_sorts(data_dir):
    table = parse_tracking(data_dir / "week1.csv", error_budget=0.0)

    records = table.records
    assert table.rows_skipped == 0
    assert (records.loc[records["team"] == "football", "player_id"] == BALL_MARKER).all()
    keys = list(zip(records["game_id"], records["play_id"], records["frame_id"], records["player_id"]))
    assert keys == sorted(keys)
    assert "time" in records.columns


def test_parse_tracking_skips_malformed_rows_within_budget(tmp_path):
    rows = tracking_rows(GAME_WEEK1, 1, 10)
    rows[3] = {**rows[3], "x": "abc"}
    path = write_csv(tmp_path / "week1.csv", rows)

    table = parse_tracking(path, error_budget=0.05)

    assert table.rows_read == len(rows)
    assert table.rows_skipped == 1
    assert table.issues[0].column == "x"
    assert table.issues[0].line == 5
    assert len(table.records) == len(rows) - 1


def test_parse_tracking_aborts_over_error_budget(tmp_path):
    rows = tracking_rows(GAME_WEEK1, 1, 10)
    rows[0] = {**rows[0], "frameId": "1.5"}
    path = write_csv(tmp_path / "week1.csv", rows)

    with pytest.raises(ErrorBudgetExceeded):
        parse_tracking(path, error_budget=0.0)


def test_parse_tracking_drops_duplicate_frames(tmp_path):
    rows = tracking_rows(GAME_WEEK1, 1, 10)
    rows.append(dict(rows[0]))
    path = write_csv(tmp_path / "week1.csv", rows)

    table = parse_tracking(path, error_budget=0.05)

    assert table.rows_skipped == 1
    assert table.issues[0].message == "duplicate frame for player"
    assert not table.records.duplicated(["game_id", "play_id", "player_id", "frame_id"]).any()


def test_parse_tracking_requires_columns(tmp_path):
    frame = pd.DataFrame(tracking_rows(GAME_WEEK1, 1, 4)).drop(columns=["dis"])
    path = tmp_path / "week1.csv"
    frame.to_csv(path, index=False)

    with pytest.raises(SchemaError, match="dis"):
        parse_tracking(path)


def test_iter_tracking_frames_yields_models(data_dir):
    table = parse_tracking(data_dir / "week5.csv")
    frames = list(iter_tracking_frames(table.records))

    assert len(frames) == len(table.records)
    ball = [f for f in frames if f.is_ball]
    assert ball and all(f.team == "football" for f in ball)
    assert {f.event for f in frames} >= {"ball_snap", "autoevent_passforward"}


def test_parse_plays_converts_yardline_and_excludes_unknown_down(data_dir):
    contexts, exclusions = parse_plays(data_dir / "plays.csv", weeks={GAME_WEEK1: 1, GAME_WEEK5: 5})
    by_key = {(c.game_id, c.play_id): c for c in contexts}

    assert by_key[(GAME_WEEK1, 1)].yardline == 25
    # Ball on the defense's 40 is 60 yards from the offense's own goal line
    assert by_key[(GAME_WEEK1, 2)].yardline == 60
    assert by_key[(GAME_WEEK1, 2)].down == Down.THIRD
    assert by_key[(GAME_WEEK5, 1)].week == 5
    assert [(e.game_id, e.play_id) for e in exclusions] == [(GAME_WEEK1, 4)]
    assert "down" in exclusions[0].reason


def test_parse_plays_assigns_drive_keys_per_possession(tmp_path):
    rows = [
        {"gameId": 1, "playId": p, "down": 1, "yardsToGo": 10, "possessionTeam": team,
         "defensiveTeam": "X", "yardlineSide": team, "yardlineNumber": 30}
        for p, team in [(1, "A"), (2, "A"), (3, "B"), (4, "A")]
    ]
    path = write_csv(tmp_path / "plays.csv", rows)

    contexts, _ = parse_plays(path)

    assert [c.drive_key for c in contexts] == ["1-A-001", "1-A-001", "1-B-002", "1-A-003"]


@pytest.mark.parametrize("yardline", [0, 100])
def test_play_context_rejects_goal_line_yardline(yardline):
    with pytest.raises(ValidationError):
        PlayContext(game_id=1, play_id=1, possession_team="A", defense_team="B", down=Down.FIRST,
                    yards_to_go=10, yardline=yardline, drive_key="1-A-001")


def test_parse_plays_excludes_yardline_on_goal_line(tmp_path):
    rows = [
        {"gameId": 1, "playId": p, "down": 1, "yardsToGo": 10, "possessionTeam": "A",
         "defensiveTeam": "B", "yardlineSide": side, "yardlineNumber": number}
        for p, side, number in [(1, "A", 30), (2, "A", 0), (3, "B", 0)]
    ]
    path = write_csv(tmp_path / "plays.csv", rows)

    contexts, exclusions = parse_plays(path)

    assert [c.play_id for c in contexts] == [1]
    assert [e.play_id for e in exclusions] == [2, 3]
    assert all("invalid play context" in e.reason for e in exclusions)



def test_parse_scouting_normalizes_roles_and_blocks(data_dir):
    roles, issues = parse_scouting(data_dir / "pffScoutingData.csv")

    assert issues == []
    tackle = next(r for r in roles if r.player_id == TACKLE and r.game_id == GAME_WEEK1 and r.play_id == 1)
    edge = next(r for r in roles if r.player_id == EDGE and r.game_id == GAME_WEEK1 and r.play_id == 1)
    assert tackle.role == Role.PASS_BLOCK
    assert tackle.blocked_player_ids == [EDGE]
    assert edge.role == Role.PASS_RUSH
    assert edge.credited_hurry and not edge.credited_sack


def test_find_tracking_files_orders_weeks(tmp_path):
    for name in ["week10.csv", "week2.csv", "week1.csv", "notes.csv"]:
        (tmp_path / name).write_text("x\n")

    assert [p.name for p in find_tracking_files(tmp_path)] == ["week1.csv", "week2.csv", "week10.csv"]
    assert [p.name for p in find_tracking_files(tmp_path, weeks=[2])] == ["week2.csv"]


def test_load_corpus_builds_ledger(corpus):
    assert corpus.ledger.n_plays == 4
    assert corpus.ledger.n_plays_excluded == 1
    assert corpus.ledger.n_games == 2
    assert corpus.ledger.n_pass_rush_records == 8
    assert [p.name for p in corpus.tracking_paths] == ["week1.csv", "week5.csv"]


def test_load_corpus_filters_weeks(data_dir):
    corpus = load_corpus(data_dir, weeks=[5])

    assert [p.name for p in corpus.tracking_paths] == ["week5.csv"]
    assert set(corpus.plays) == {(GAME_WEEK5, 1)}


def test_load_corpus_missing_directory(tmp_path):
    with pytest.raises(SchemaError):
        load_corpus(tmp_path / "nowhere")


def test_load_corpus_without_tracking_files(tmp_path):
    data_dir = write_corpus(tmp_path / "data")
    for path in data_dir.glob("week*.csv"):
        path.unlink()

    with pytest.raises(SchemaError, match="tracking"):
        load_corpus(data_dir)
