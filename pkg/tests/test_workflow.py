import json

from analysis.mixed_model import FIXED_EFFECT_COLUMNS
from models.tracking import PlayWindow
from strain_workflow import StrainWorkflow

from tests.conftest import EDGE, WINDOW_PLAYS


def test_ingest_writes_reloadable_windows(data_dir, windows_by_key, tmp_path):
    StrainWorkflow(data_dir, output_dir=tmp_path / "out").run_ingest()

    lines = (tmp_path / "out" / "ingest" / "windows.jsonl").read_text(encoding="utf-8").splitlines()
    windows = [PlayWindow.model_validate_json(line) for line in lines]

    assert sorted(w.key for w in windows) == sorted(WINDOW_PLAYS)
    for window in windows:
        original = windows_by_key[window.key]
        assert window.rusher_ids == original.rusher_ids
        assert window.tracks[EDGE].x == original.tracks[EDGE].x
        assert window.blocked_by == original.blocked_by
        assert window.end_event == original.end_event
    manifest = json.loads((tmp_path / "out" / "ingest" / "manifest.json").read_text(encoding="utf-8"))
    assert "windows.jsonl" in manifest["outputs"]


def test_ingest_is_byte_identical_across_runs(data_dir, tmp_path):
    for name in ["a", "b"]:
        StrainWorkflow(data_dir, output_dir=tmp_path / name).run_ingest()

    for output in ["windows.jsonl", "windows.csv", "rejections.csv"]:
        first = (tmp_path / "a" / "ingest" / output).read_bytes()
        assert first == (tmp_path / "b" / "ingest" / output).read_bytes()


def test_strain_manifest_records_observation_layout(data_dir, tmp_path):
    StrainWorkflow(data_dir, output_dir=tmp_path / "out").run_strain()

    manifest = json.loads((tmp_path / "out" / "strain" / "manifest.json").read_text(encoding="utf-8"))

    assert manifest["config"]["fixed_effect_columns"] == FIXED_EFFECT_COLUMNS
    properties = manifest["schemas"]["observations"]["properties"]
    assert {
        "response", "rusher_id", "blocker_id", "defense_team", "offense_team", "n_blockers",
        "yards_to_go", "yardline", "down", "rusher_pos", "blocker_pos", "replicate_tag",
    } <= set(properties)
    assert properties["yardline"]["minimum"] == 1 and properties["yardline"]["maximum"] == 99


def test_ingest_manifest_has_no_schemas(data_dir, tmp_path):
    StrainWorkflow(data_dir, output_dir=tmp_path / "out").run_ingest()

    manifest = json.loads((tmp_path / "out" / "ingest" / "manifest.json").read_text(encoding="utf-8"))

    assert manifest["schemas"] == {}
