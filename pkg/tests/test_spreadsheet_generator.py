import json

import pandas as pd
import pytest

from models.report import LeaderboardRow
from utils.spreadsheet_generator import (
    export_records_jsonl,
    export_to_csv,
    export_to_excel,
    file_sha256,
    records_to_dataframe,
    write_manifest,
)


def _row(rank, avg):
    return LeaderboardRow(rank=rank, player_id=rank, player=f"P{rank}", snaps=10, hits=0, hurries=1,
                          sacks=0, avg_strain=avg)


def test_records_to_dataframe_orders_columns():
    frame = records_to_dataframe([{"b": 1, "a": 2}], columns=["a", "b", "c"])

    assert list(frame.columns) == ["a", "b", "c"]
    assert frame["c"].isna().all()


def test_export_to_csv_rounds_to_significant_digits(tmp_path):
    path = export_to_csv([_row(1, 1.23456789), _row(2, 0.000123456)], tmp_path / "board", sig_digits=4)

    assert path.endswith("board.csv")
    text = open(path, encoding="utf-8").read().splitlines()
    assert text[0].startswith("rank,player_id,player")
    assert text[1].endswith(",1.235")
    assert text[2].endswith(",0.0001235")


def test_export_to_csv_keeps_empty_column_order(tmp_path):
    path = export_to_csv([], tmp_path / "empty.csv", columns=list(LeaderboardRow.model_fields))

    assert pd.read_csv(path).columns.tolist() == list(LeaderboardRow.model_fields)


def test_export_to_excel_writes_sheets(tmp_path):
    path = export_to_excel(
        {"edge": [_row(1, 1.5)], "interior/DT": pd.DataFrame({"x": [1.0]})},
        tmp_path / "boards.csv",
    )

    assert path.endswith("boards.xlsx")
    sheets = pd.read_excel(path, sheet_name=None)
    assert set(sheets) == {"edge", "interior_DT"}
    assert sheets["edge"].loc[0, "player"] == "P1"


def test_export_to_excel_requires_sheets(tmp_path):
    with pytest.raises(ValueError):
        export_to_excel({}, tmp_path / "none.xlsx")


def test_export_records_jsonl(tmp_path):
    path = export_records_jsonl([_row(1, 1.0), _row(2, 0.5)], tmp_path / "rows.jsonl")

    lines = open(path, encoding="utf-8").read().splitlines()
    assert [json.loads(line)["player"] for line in lines] == ["P1", "P2"]


def test_write_manifest_hashes_inputs(tmp_path):
    data = tmp_path / "plays.csv"
    data.write_text("gameId,playId\n1,1\n", encoding="utf-8")

    path = write_manifest(tmp_path / "out", "ingest", {"weeks": [1]},
                          inputs=[data, tmp_path / "missing.csv"], outputs=[str(tmp_path / "out" / "b.csv"), "a.csv"])

    manifest = json.loads(open(path, encoding="utf-8").read())
    assert manifest["command"] == "ingest"
    assert manifest["config"] == {"weeks": [1]}
    assert manifest["input_hashes"] == {"plays.csv": file_sha256(data)}
    assert manifest["outputs"] == ["a.csv", "b.csv"]
    assert {"python", "numpy", "pandas"} <= set(manifest["versions"])
