"""Readers for the tracking, plays, scouting, players and games files"""
import logging
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from pydantic import BaseModel, Field, ValidationError

from config.positions import DOWN_CODES, SCOUTING_ROLES
from config.settings import STRAIN_ERROR_BUDGET
from models.tracking import (
    BALL_MARKER,
    GameInfo,
    PlayContext,
    PlayerInfo,
    PlayerPlayRole,
    PlayExclusion,
    Role,
    RowIssue,
    TrackingFrame,
)
from utils.errors import SchemaError
from utils.validators import (
    check_error_budget,
    is_missing,
    numeric_column,
    out_of_bounds,
    parse_flag,
    parse_id_list,
    parse_int,
    require_columns,
    sanitize_text,
)

logger = logging.getLogger(__name__)

TRACKING_REQUIRED = [
    "gameId", "playId", "nflId", "frameId", "x", "y", "s", "a", "dis", "o", "dir", "event", "team",
]
PLAYS_REQUIRED = [
    "gameId", "playId", "down", "yardsToGo", "possessionTeam", "defensiveTeam",
    "yardlineSide", "yardlineNumber",
]
SCOUTING_REQUIRED = ["gameId", "playId", "nflId", "pff_role", "pff_hit", "pff_hurry", "pff_sack"]
PLAYERS_REQUIRED = ["nflId", "displayName", "officialPosition"]
GAMES_REQUIRED = ["gameId", "week"]

BALL_TEAM = "football"
TRACKING_FILE_PATTERN = re.compile(r"week(\d+)\.csv$")

# Warnings per file before switching to a summary line
_MAX_LOGGED_ISSUES = 10


@dataclass
class ParsedTable:
    """Validated rows of one tracking file plus what was skipped"""
    path: str
    records: pd.DataFrame
    issues: List[RowIssue] = field(default_factory=list)
    rows_read: int = 0

    @property
    def rows_skipped(self) -> int:
        return len({issue.line for issue in self.issues})


class FileLedger(BaseModel):
    rows_read: int = 0
    rows_skipped: int = 0


class IngestLedger(BaseModel):
    """Counts collected while loading a corpus"""
    files: Dict[str, FileLedger] = Field(default_factory=dict)
    n_games: int = 0
    n_plays: int = 0
    n_plays_excluded: int = 0
    n_scouting_records: int = 0
    n_pass_rush_records: int = 0
    n_scouting_excluded: int = 0


@dataclass
class Corpus:
    """Everything but the tracking frames, which are streamed week by week"""
    data_dir: Path
    tracking_paths: List[Path]
    plays: Dict[Tuple[int, int], PlayContext]
    roles: Dict[Tuple[int, int], List[PlayerPlayRole]]
    players: Dict[int, PlayerInfo]
    games: Dict[int, GameInfo]
    ledger: IngestLedger
    play_exclusions: List[PlayExclusion] = field(default_factory=list)
    error_budget: float = STRAIN_ERROR_BUDGET

    def input_paths(self) -> List[Path]:
        names = ["plays.csv", "pffScoutingData.csv", "players.csv", "games.csv"]
        return [self.data_dir / name for name in names] + list(self.tracking_paths)


def _read_text_csv(path: Path, label: str) -> pd.DataFrame:
    """Read a CSV keeping every cell as text so validation sees the raw value"""
    path = Path(path)
    if not path.exists():
        raise SchemaError(f"{label} file not found: {path}")
    try:
        return pd.read_csv(path, dtype=str, keep_default_na=False)
    except (pd.errors.ParserError, pd.errors.EmptyDataError, UnicodeDecodeError) as e:
        raise SchemaError(f"{label} file {path} could not be read: {e}") from e


def _line_number(index: int) -> int:
    # Header is line 1
    return int(index) + 2


def _log_issues(issues: List[RowIssue], label: str) -> None:
    for issue in issues[:_MAX_LOGGED_ISSUES]:
        logger.warning("%s line %d: %s (%s=%r)", label, issue.line, issue.message, issue.column, issue.value)
    if len(issues) > _MAX_LOGGED_ISSUES:
        logger.warning("%s: %d further row issues not shown", label, len(issues) - _MAX_LOGGED_ISSUES)


def parse_tracking(path, error_budget: float = STRAIN_ERROR_BUDGET) -> ParsedTable:
    """
    Parse and validate one weekly tracking file

    Args:
        path: Path to a weekN.csv file
        error_budget: Largest tolerated share of malformed rows

    Returns:
        ParsedTable whose records are sorted by (game_id, play_id, frame_id, player_id)

    Raises:
        SchemaError: If the file or a required column is missing
        ErrorBudgetExceeded: If too many rows are malformed
    """
    path = Path(path)
    name = path.name
    raw = _read_text_csv(path, "tracking")
    require_columns(raw.columns, TRACKING_REQUIRED, name)

    issues: List[RowIssue] = []
    bad = pd.Series(False, index=raw.index)

    def flag(mask: pd.Series, column: str, message: str) -> None:
        nonlocal bad
        new = mask & ~bad
        for idx in raw.index[new.to_numpy()]:
            issues.append(RowIssue(
                file=name, line=_line_number(idx), column=column,
                value=raw.at[idx, column], message=message,
            ))
        bad = bad | mask

    parsed: Dict[str, pd.Series] = {}
    for column in ("gameId", "playId", "frameId"):
        numbers, _ = numeric_column(raw[column])
        flag(numbers.isna() | (numbers % 1 != 0), column, "identifier is not an integer")
        parsed[column] = numbers

    for column in ("x", "y", "s", "a", "dis"):
        numbers, malformed = numeric_column(raw[column])
        flag(malformed, column, "non-numeric value")
        flag(numbers.isna(), column, "missing value")
        parsed[column] = numbers

    for column in ("o", "dir"):
        numbers, malformed = numeric_column(raw[column])
        flag(malformed, column, "non-numeric value")
        parsed[column] = numbers

    team = raw["team"].astype(str).str.strip()
    is_ball = team.str.lower() == BALL_TEAM
    player_numbers, _ = numeric_column(raw["nflId"])
    flag(~is_ball & (player_numbers.isna() | (player_numbers % 1 != 0)), "nflId", "player id is not an integer")
    player_ids = player_numbers.where(~is_ball, BALL_MARKER)

    keep = ~bad
    event = raw["event"].astype(str).str.strip()
    records = pd.DataFrame({
        "game_id": parsed["gameId"][keep].astype(np.int64),
        "play_id": parsed["playId"][keep].astype(np.int64),
        "frame_id": parsed["frameId"][keep].astype(np.int64),
        "player_id": player_ids[keep].astype(np.int64),
        "team": team[keep],
        "x": parsed["x"][keep],
        "y": parsed["y"][keep],
        "speed": parsed["s"][keep],
        "accel": parsed["a"][keep],
        "dist_traveled": parsed["dis"][keep],
        "orientation": parsed["o"][keep],
        "direction": parsed["dir"][keep],
        "event": event[keep].where(~event[keep].isin(["", "NA", "None", "nan"]), None),
    })
    if "playDirection" in raw.columns:
        records["play_direction"] = raw["playDirection"][keep].astype(str).str.strip()
    else:
        records["play_direction"] = None
    if "time" in raw.columns:
        records["time"] = pd.to_datetime(raw["time"][keep], errors="coerce")
    records["out_of_bounds"] = out_of_bounds(records["x"], records["y"])

    key = ["game_id", "play_id", "player_id", "frame_id"]
    records = records.sort_values(key, kind="mergesort")
    duplicated = records.duplicated(key, keep="first")
    for idx in records.index[duplicated.to_numpy()]:
        issues.append(RowIssue(
            file=name, line=_line_number(idx), column="frameId",
            value=raw.at[idx, "frameId"], message="duplicate frame for player",
        ))
    records = records[~duplicated]
    records = records.sort_values(["game_id", "play_id", "frame_id", "player_id"], kind="mergesort")
    records = records.reset_index(drop=True)

    n_oob = int(records["out_of_bounds"].sum())
    if n_oob:
        logger.warning("%s: %d rows outside the field flagged out_of_bounds", name, n_oob)

    table = ParsedTable(path=str(path), records=records, issues=issues, rows_read=len(raw))
    _log_issues(issues, name)
    check_error_budget(table.rows_skipped, table.rows_read, error_budget, name)
    logger.info("%s: %d rows read, %d skipped", name, table.rows_read, table.rows_skipped)
    return table


def _optional(value) -> Optional[float]:
    if value is None:
        return None
    try:
        return None if np.isnan(value) else float(value)
    except TypeError:
        return value


def iter_tracking_frames(records: pd.DataFrame) -> Iterator[TrackingFrame]:
    """Yield TrackingFrame models for validated tracking records"""
    for row in records.itertuples(index=False):
        yield TrackingFrame(
            game_id=row.game_id,
            play_id=row.play_id,
            frame_id=row.frame_id,
            player_id=row.player_id,
            team=row.team,
            x=row.x,
            y=row.y,
            speed=row.speed,
            accel=row.accel,
            dist_traveled=row.dist_traveled,
            orientation=_optional(row.orientation),
            direction=_optional(row.direction),
            event=row.event if isinstance(row.event, str) else None,
            play_direction=row.play_direction if isinstance(row.play_direction, str) else None,
            out_of_bounds=bool(row.out_of_bounds),
        )


def _yardline_from_own_goal(side: str, number: Optional[int], possession: str) -> Optional[int]:
    """Convert the 50-yard split convention to distance from the offense's own goal line"""
    if number is None:
        return None
    if number == 50 or is_missing(side):
        return number
    return number if side.strip() == possession else 100 - number


def _assign_drive_keys(rows: List[dict]) -> None:
    """Consecutive runs of plays by the same possession team within a game"""
    rows.sort(key=lambda r: (r["game_id"], r["play_id"]))
    current_game, current_team, counter = None, None, 0
    for row in rows:
        if row["game_id"] != current_game:
            current_game, current_team, counter = row["game_id"], None, 0
        if row["possession_team"] != current_team:
            current_team = row["possession_team"]
            counter += 1
        row["drive_key"] = f"{row['game_id']}-{current_team}-{counter:03d}"


def parse_plays(path, weeks: Optional[Dict[int, int]] = None) -> Tuple[List[PlayContext], List[PlayExclusion]]:
    """
    Parse the plays file into PlayContext records

    Args:
        path: Path to plays.csv
        weeks: Optional game_id -> week map from the games file

    Returns:
        (contexts sorted by game and play, excluded records with reasons)
    """
    path = Path(path)
    raw = _read_text_csv(path, "plays")
    require_columns(raw.columns, PLAYS_REQUIRED, path.name)

    rows: List[dict] = []
    exclusions: List[PlayExclusion] = []
    for idx, rec in zip(raw.index, raw.itertuples(index=False)):
        line = _line_number(idx)
        game_id, play_id = parse_int(rec.gameId), parse_int(rec.playId)
        if game_id is None or play_id is None:
            exclusions.append(PlayExclusion(line=line, reason="malformed game or play id"))
            continue
        down_code = parse_int(rec.down)
        if down_code not in DOWN_CODES:
            exclusions.append(PlayExclusion(
                game_id=game_id, play_id=play_id, line=line,
                reason=f"unknown down code {rec.down!r}",
            ))
            continue
        possession = rec.possessionTeam.strip()
        yards_to_go = parse_int(rec.yardsToGo)
        yardline = _yardline_from_own_goal(rec.yardlineSide, parse_int(rec.yardlineNumber), possession)
        if yards_to_go is None or yardline is None:
            exclusions.append(PlayExclusion(
                game_id=game_id, play_id=play_id, line=line, reason="missing distance or yardline",
            ))
            continue
        rows.append({
            "line": line,
            "game_id": game_id,
            "play_id": play_id,
            "possession_team": possession,
            "defense_team": rec.defensiveTeam.strip(),
            "down": DOWN_CODES[down_code],
            "yards_to_go": yards_to_go,
            "yardline": yardline,
            "week": weeks.get(game_id) if weeks else None,
        })

    _assign_drive_keys(rows)
    contexts: List[PlayContext] = []
    for row in rows:
        line = row.pop("line")
        try:
            contexts.append(PlayContext(**row))
        except ValidationError as e:
            exclusions.append(PlayExclusion(
                game_id=row["game_id"], play_id=row["play_id"], line=line,
                reason=f"invalid play context: {e.errors()[0]['msg']}",
            ))

    for exclusion in exclusions:
        logger.warning("plays line %d excluded: %s", exclusion.line, exclusion.reason)
    logger.info("%s: %d plays parsed, %d excluded", path.name, len(contexts), len(exclusions))
    return contexts, exclusions


def parse_scouting(path, positions: Optional[Dict[int, str]] = None) -> Tuple[List[PlayerPlayRole], List[RowIssue]]:
    """
    Parse the scouting file into normalized roles and credits

    Args:
        path: Path to pffScoutingData.csv
        positions: Optional player_id -> official position map from the players file

    Returns:
        (role records, rows excluded for unrecognized roles or ids)
    """
    path = Path(path)
    raw = _read_text_csv(path, "scouting")
    require_columns(raw.columns, SCOUTING_REQUIRED, path.name)
    has_blocked = "pff_nflIdBlockedPlayer" in raw.columns
    has_lined_up = "pff_positionLinedUp" in raw.columns

    roles: List[PlayerPlayRole] = []
    issues: List[RowIssue] = []
    for idx, rec in zip(raw.index, raw.itertuples(index=False)):
        line = _line_number(idx)
        game_id, play_id, player_id = parse_int(rec.gameId), parse_int(rec.playId), parse_int(rec.nflId)
        if game_id is None or play_id is None or player_id is None:
            issues.append(RowIssue(file=path.name, line=line, column="nflId", value=rec.nflId,
                                   message="malformed identifier"))
            continue
        role = SCOUTING_ROLES.get(sanitize_text(rec.pff_role).lower())
        if role is None:
            issues.append(RowIssue(file=path.name, line=line, column="pff_role", value=rec.pff_role,
                                   message="unrecognized role"))
            continue
        position = positions.get(player_id) if positions else None
        if position is None and has_lined_up and not is_missing(rec.pff_positionLinedUp):
            position = rec.pff_positionLinedUp.strip()
        roles.append(PlayerPlayRole(
            game_id=game_id,
            play_id=play_id,
            player_id=player_id,
            role=role,
            position=position,
            credited_hit=parse_flag(rec.pff_hit),
            credited_hurry=parse_flag(rec.pff_hurry),
            credited_sack=parse_flag(rec.pff_sack),
            blocked_player_ids=parse_id_list(rec.pff_nflIdBlockedPlayer) if has_blocked else [],
        ))

    _log_issues(issues, path.name)
    logger.info("%s: %d role records, %d excluded", path.name, len(roles), len(issues))
    return roles, issues


def parse_players(path) -> Dict[int, PlayerInfo]:
    """Parse the players file into a player_id -> PlayerInfo map"""
    path = Path(path)
    raw = _read_text_csv(path, "players")
    require_columns(raw.columns, PLAYERS_REQUIRED, path.name)
    players: Dict[int, PlayerInfo] = {}
    for rec in raw.itertuples(index=False):
        player_id = parse_int(rec.nflId)
        if player_id is None:
            continue
        players[player_id] = PlayerInfo(
            player_id=player_id,
            display_name=sanitize_text(rec.displayName),
            position=None if is_missing(rec.officialPosition) else rec.officialPosition.strip(),
        )
    return players


def parse_games(path) -> Dict[int, GameInfo]:
    """Parse the games file into a game_id -> GameInfo map"""
    path = Path(path)
    raw = _read_text_csv(path, "games")
    require_columns(raw.columns, GAMES_REQUIRED, path.name)
    games: Dict[int, GameInfo] = {}
    for rec in raw.itertuples(index=False):
        game_id, week = parse_int(rec.gameId), parse_int(rec.week)
        if game_id is None or week is None:
            continue
        games[game_id] = GameInfo(
            game_id=game_id,
            week=week,
            home_team=getattr(rec, "homeTeamAbbr", None),
            visitor_team=getattr(rec, "visitorTeamAbbr", None),
        )
    return games


def find_tracking_files(data_dir, weeks: Optional[Sequence[int]] = None) -> List[Path]:
    """weekN.csv files in week order, optionally restricted to some weeks"""
    found = []
    for path in Path(data_dir).glob("week*.csv"):
        match = TRACKING_FILE_PATTERN.search(path.name)
        if match and (weeks is None or int(match.group(1)) in weeks):
            found.append((int(match.group(1)), path))
    return [path for _, path in sorted(found)]


def load_corpus(data_dir, weeks: Optional[Sequence[int]] = None,
                error_budget: float = STRAIN_ERROR_BUDGET) -> Corpus:
    """
    Load the play, scouting, player and game tables and locate tracking files

    Args:
        data_dir: Directory with the competition files
        weeks: Optional subset of weeks
        error_budget: Malformed-row share tolerated per tracking file

    Returns:
        Corpus bundle with an ingest ledger

    Raises:
        SchemaError: If a file or required column is missing
    """
    data_dir = Path(data_dir)
    if not data_dir.is_dir():
        raise SchemaError(f"data directory not found: {data_dir}")

    games = parse_games(data_dir / "games.csv")
    players = parse_players(data_dir / "players.csv")
    week_map = {gid: g.week for gid, g in games.items()}
    contexts, play_exclusions = parse_plays(data_dir / "plays.csv", weeks=week_map)
    positions = {pid: p.position for pid, p in players.items() if p.position}
    role_records, scouting_issues = parse_scouting(data_dir / "pffScoutingData.csv", positions=positions)

    tracking_paths = find_tracking_files(data_dir, weeks)
    if not tracking_paths:
        raise SchemaError(f"no weekN.csv tracking files found in {data_dir}")

    if weeks is not None:
        contexts = [c for c in contexts if c.week in set(weeks)]

    plays = {(c.game_id, c.play_id): c for c in contexts}
    roles: Dict[Tuple[int, int], List[PlayerPlayRole]] = {}
    for record in role_records:
        roles.setdefault((record.game_id, record.play_id), []).append(record)

    ledger = IngestLedger(
        n_games=len({c.game_id for c in contexts}),
        n_plays=len(contexts),
        n_plays_excluded=len(play_exclusions),
        n_scouting_records=len(role_records),
        n_pass_rush_records=sum(1 for r in role_records if r.role == Role.PASS_RUSH),
        n_scouting_excluded=len(scouting_issues),
    )
    logger.info("corpus: %d passing plays across %d games, %d pass-rush records",
                ledger.n_plays, ledger.n_games, ledger.n_pass_rush_records)
    return Corpus(
        data_dir=data_dir,
        tracking_paths=tracking_paths,
        plays=plays,
        roles=roles,
        players=players,
        games=games,
        ledger=ledger,
        play_exclusions=play_exclusions,
        error_budget=error_budget,
    )


__all__ = [
    "ParsedTable",
    "FileLedger",
    "IngestLedger",
    "Corpus",
    "parse_tracking",
    "iter_tracking_frames",
    "parse_plays",
    "parse_scouting",
    "parse_players",
    "parse_games",
    "find_tracking_files",
    "load_corpus",
]
