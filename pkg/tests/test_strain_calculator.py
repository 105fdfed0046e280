import math

import numpy as np
import pytest

from analysis.strain_calculator import (
    aggregate_players,
    compute_series,
    curves_to_dataframe,
    curves_to_wide,
    distance_series,
    outcome_curves,
    overall_curve,
    play_feature_table,
    play_strain_series,
    player_average_strain,
    positional_curve,
    rusher_qb_distance,
    strain_at_frame,
)
from analysis.synthetic import RUSHER_ID, analytic_strain, gen_linear_approach, rigid_transform
from models.observation import RusherPosition
from models.tracking import Outcome
from utils.errors import InsufficientDataError, PlayWindowError

from tests.conftest import EDGE, EDGE_SPEED, GAME_WEEK1, GAME_WEEK5, INTERIOR, WINDOW_PLAYS, edge_distance


def test_rusher_qb_distance():
    assert rusher_qb_distance((3.0, 4.0), (0.0, 0.0)) == pytest.approx(5.0)


def test_strain_at_frame_sign_and_floor():
    assert strain_at_frame(4.0, 4.5) == pytest.approx(5.0 / 4.0)
    assert strain_at_frame(4.5, 4.0) == pytest.approx(-5.0 / 4.5)
    # Below the floor the denominator is clamped
    assert strain_at_frame(0.1, 0.3) == pytest.approx(2.0 / 0.5)
    assert strain_at_frame(0.1, 0.3, distance_floor=0.05) == pytest.approx(2.0 / 0.1)


def test_strain_scales_inversely_with_frame_step():
    assert strain_at_frame(4.0, 4.5, dt=0.2) == pytest.approx(0.5 * strain_at_frame(4.0, 4.5, dt=0.1), abs=1e-12)

    window = gen_linear_approach(5.0, 1.0, 20)
    coarse = play_strain_series(window, RUSHER_ID, dt=0.2).strains()
    fine = play_strain_series(window, RUSHER_ID, dt=0.1).strains()
    np.testing.assert_allclose(coarse, 0.5 * np.asarray(fine), rtol=0, atol=1e-12)



def test_constant_closing_matches_time_to_contact():
    window = gen_linear_approach(5.0, 1.0, 30)
    series = play_strain_series(window, RUSHER_ID)

    np.testing.assert_allclose(series.strains(), analytic_strain(5.0, 1.0, 30), rtol=0, atol=1e-12)
    assert [s.frame_index for s in series.samples] == list(range(2, 31))


def test_approach_is_truncated_before_contact():
    window = gen_linear_approach(2.0, 5.0, 40)

    assert window.n_frames == 4
    assert play_strain_series(window, RUSHER_ID).n_frames == 3


def test_strain_is_invariant_to_rigid_motion():
    window = gen_linear_approach(7.5, 2.3, 25, heading_deg=33.0)
    moved = rigid_transform(window, 71.0, (12.5, -3.25))

    np.testing.assert_allclose(
        play_strain_series(moved, RUSHER_ID).strains(),
        play_strain_series(window, RUSHER_ID).strains(),
        atol=1e-9,
    )


def test_stationary_rusher_has_zero_strain(windows_by_key):
    series = play_strain_series(windows_by_key[(GAME_WEEK1, 1)], INTERIOR)

    assert series.strains() == pytest.approx([0.0] * 10)
    assert series.play_average == pytest.approx(0.0)


def test_series_from_tracking_files(windows_by_key):
    window = windows_by_key[(GAME_WEEK1, 1)]

    series = play_strain_series(window, EDGE, week=1)

    expected = [EDGE_SPEED / edge_distance(t) for t in range(2, 12)]
    assert series.strains() == pytest.approx(expected)
    assert series.play_average == pytest.approx(math.fsum(expected) / len(expected))
    assert series.position_group == RusherPosition.DE
    assert series.outcome == Outcome.HURRY
    assert series.credited_hurry and not series.credited_sack
    assert series.team == "DAL"
    assert series.week == 1


def test_distance_series_raises_on_gap(windows_by_key):
    window = windows_by_key[(GAME_WEEK1, 1)]
    track = window.tracks[EDGE]
    gapped = track.model_copy(update={
        "frame_ids": track.frame_ids[:3] + track.frame_ids[4:],
        "x": track.x[:3] + track.x[4:],
        "y": track.y[:3] + track.y[4:],
    })
    broken = window.model_copy(update={"tracks": {**window.tracks, EDGE: gapped}})

    with pytest.raises(PlayWindowError):
        distance_series(broken, EDGE)


def test_compute_series_is_ordered(window_set, corpus):
    series = compute_series(reversed(window_set.windows), corpus.plays)

    keys = [(s.game_id, s.play_id, s.rusher_id) for s in series]
    assert keys == sorted(keys)
    assert len(series) == 6
    assert {s.week for s in series} == {1, 5}


def test_player_average_is_frame_weighted(window_set, corpus):
    series = [s for s in compute_series(window_set.windows, corpus.plays) if s.rusher_id == EDGE]

    agg = player_average_strain(series, corpus.players[EDGE])

    all_strains = [v for s in series for v in s.strains()]
    assert agg.total_frames == sum(n for n, _, _ in WINDOW_PLAYS.values())
    assert agg.avg_strain == pytest.approx(math.fsum(all_strains) / len(all_strains))
    # Plays have different lengths, so the mean of play averages differs
    assert agg.avg_strain != pytest.approx(np.mean([s.play_average for s in series]))
    assert (agg.snaps, agg.hurries, agg.sacks, agg.hits) == (3, 1, 1, 0)
    assert agg.display_name == "Eddie Edge"
    assert agg.position_group == RusherPosition.DE


def test_player_average_needs_series():
    with pytest.raises(InsufficientDataError):
        player_average_strain([])


def test_aggregate_players_by_week(window_set, corpus):
    series = compute_series(window_set.windows, corpus.plays)

    everything = aggregate_players(series, corpus.players)
    first_half = aggregate_players(series, corpus.players, weeks=[1, 2, 3, 4])

    assert [a.player_id for a in everything] == [EDGE, INTERIOR]
    assert [a.snaps for a in everything] == [3, 3]
    assert [a.snaps for a in first_half] == [2, 2]
    assert aggregate_players(series, corpus.players, weeks=[8]) == []


def test_positional_curve_means_per_frame(window_set, corpus):
    series = compute_series(window_set.windows, corpus.plays)

    curve = positional_curve(series, RusherPosition.DE, max_frame=12)

    assert [p.frame_index for p in curve.points] == list(range(2, 14))
    assert curve.points[0].seconds_after_snap == pytest.approx(0.1)
    # Every edge series shares the same approach, so each frame mean is the common value
    for point in curve.points:
        if point.n_samples:
            assert point.mean_strain == pytest.approx(EDGE_SPEED / edge_distance(point.frame_index))
    counts = {p.frame_index: p.n_samples for p in curve.points}
    assert counts[2] == 3 and counts[7] == 3 and counts[8] == 2 and counts[10] == 1 and counts[11] == 1
    assert counts[12] == 0 and curve.points[-2].mean_strain is None


def test_empty_positional_curve(window_set, corpus, caplog):
    series = compute_series(window_set.windows, corpus.plays)

    curve = positional_curve(series, "NT")

    assert curve.is_empty
    assert "no series" in caplog.text


def test_outcome_curves_split_by_credit(window_set, corpus):
    series = compute_series(window_set.windows, corpus.plays)

    curves = outcome_curves(series, RusherPosition.DE, max_frame=5)

    assert set(curves) == set(Outcome)
    assert curves[Outcome.SACK].points[0].n_samples == 1
    assert curves[Outcome.HURRY].points[0].n_samples == 1
    assert curves[Outcome.NONE].points[0].n_samples == 1
    assert curves[Outcome.HIT].is_empty


def test_curves_to_dataframe(window_set, corpus):
    series = compute_series(window_set.windows, corpus.plays)

    frame = curves_to_dataframe([overall_curve(series, max_frame=4), positional_curve(series, "DT", max_frame=4)])

    assert list(frame["label"].unique()) == ["all", "DT"]
    assert len(frame) == 8
    assert frame.loc[frame["label"] == "DT", "mean_strain"].tolist() == pytest.approx([0.0] * 4)


def test_curves_to_wide(window_set, corpus):
    series = compute_series(window_set.windows, corpus.plays)
    curves = [overall_curve(series, max_frame=4), positional_curve(series, "DT", max_frame=4)]

    wide = curves_to_wide(curves)

    assert list(wide.columns) == ["frame_index", "seconds_after_snap", "all", "DT"]
    assert wide["frame_index"].tolist() == [2, 3, 4, 5]
    assert wide["seconds_after_snap"].tolist() == pytest.approx([0.1, 0.2, 0.3, 0.4])
    long = curves_to_dataframe(curves)
    assert wide["all"].tolist() == pytest.approx(long.loc[long["label"] == "all", "mean_strain"].tolist())
    assert wide["DT"].tolist() == pytest.approx([0.0] * 4)


def test_curves_to_wide_without_curves():
    wide = curves_to_wide([])

    assert wide.empty
    assert list(wide.columns) == ["frame_index", "seconds_after_snap"]



def test_play_feature_table(windows_by_key):
    table = play_feature_table(windows_by_key[(GAME_WEEK5, 1)])

    assert len(table) == 2 * 8
    assert list(table["rusher_id"].unique()) == [EDGE, INTERIOR]
    edge = table[table["rusher_id"] == EDGE]
    assert edge["distance"].tolist() == pytest.approx([edge_distance(t) for t in range(2, 10)])
    assert edge["closing_velocity"].tolist() == pytest.approx([EDGE_SPEED] * 8)
