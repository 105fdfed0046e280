from collections import Counter

import numpy as np
import pytest
from pydantic import ValidationError

import analysis.bootstrap as bootstrap_module
from analysis.bootstrap import bootstrap_effects, drive_cells, resample_drives
from analysis.mixed_model import assemble_design, fit_reml
from analysis.synthetic import bootstrap_coverage, gen_play_observations
from models.bootstrap import BootstrapConfig
from utils.errors import BootstrapFailure, ConvergenceError


@pytest.fixture(scope="module")
def league():
    beta = np.zeros(16)
    beta[0] = 1.0
    observations, _ = gen_play_observations(beta, {"rusher": 1.0}, 0.05, seed=2, n_teams=4)
    return observations, fit_reml(assemble_design(observations))


@pytest.mark.parametrize("n_replicates", [0, -5])
def test_bootstrap_config_needs_a_replicate(n_replicates):
    with pytest.raises(ValidationError):
        BootstrapConfig(n_replicates=n_replicates)


def test_drive_cells_group_by_game_and_offense(league):
    observations, _ = league

    cells = drive_cells(observations)

    # Four teams play six games, each with two offenses of four drives
    assert len(cells) == 12
    assert all(len(drives) == 4 for drives in cells.values())
    for (game_id, offense), drives in cells.items():
        for plays in drives.values():
            assert {(o.game_id, o.offense_team) for o in plays} == {(game_id, offense)}


def test_resample_preserves_drive_counts_per_cell(league):
    observations, _ = league

    sample = resample_drives(observations, np.random.default_rng([7, 0]))

    tags = {}
    for obs in sample:
        tags.setdefault((obs.game_id, obs.offense_team), set()).add(obs.replicate_tag)
    assert {cell: len(t) for cell, t in tags.items()} == {cell: 4 for cell in drive_cells(observations)}
    assert len(sample) == len(observations)


def test_resampled_drives_enter_whole(league):
    observations, _ = league
    sizes = Counter(o.drive_key for o in observations)

    sample = resample_drives(observations, np.random.default_rng([3, 1]))

    per_tag = Counter(o.replicate_tag for o in sample)
    for tag, n in per_tag.items():
        drive_key, slot = tag.rsplit("#", 1)
        assert n == sizes[drive_key]
        assert 0 <= int(slot) < 4


def test_resample_is_reproducible(league):
    observations, _ = league

    first = resample_drives(observations, np.random.default_rng([7, 0]))
    again = resample_drives(observations, np.random.default_rng([7, 0]))
    other = resample_drives(observations, np.random.default_rng([7, 1]))

    assert [o.model_dump() for o in first] == [o.model_dump() for o in again]
    assert [o.replicate_tag for o in first] != [o.replicate_tag for o in other]


def test_resample_ignores_input_order(league):
    observations, _ = league

    forward = resample_drives(observations, np.random.default_rng([5, 2]))
    backward = resample_drives(list(reversed(observations)), np.random.default_rng([5, 2]))

    assert [o.sort_key for o in forward] == [o.sort_key for o in backward]


def test_bootstrap_collects_distributions(league):
    observations, base = league

    result = bootstrap_effects(observations, BootstrapConfig(n_replicates=4, seed=9, parallelism=1), base)

    assert (result.n_succeeded, result.n_failed) == (4, 0)
    assert set(result.distributions) == {"rusher", "blocker", "defense", "offense"}
    rushers = result.distributions["rusher"]
    assert [d.level_id for d in rushers] == sorted(d.level_id for d in rushers)
    for dist in rushers:
        assert dist.replicates == [0, 1, 2, 3]
        assert dist.lower <= dist.median <= dist.upper
    assert len(result.long_records()) == sum(len(d.samples) for ds in result.distributions.values() for d in ds)


def test_bootstrap_is_reproducible(league):
    observations, base = league
    config = BootstrapConfig(n_replicates=3, seed=21, parallelism=1)

    first = bootstrap_effects(observations, config, base)
    again = bootstrap_effects(observations, config, base)

    assert first.long_records() == again.long_records()


def test_bootstrap_workers_match_inline_run(league):
    observations, base = league

    inline = bootstrap_effects(observations, BootstrapConfig(n_replicates=4, seed=5, parallelism=1), base)
    pooled = bootstrap_effects(observations, BootstrapConfig(n_replicates=4, seed=5, parallelism=2), base)

    a, b = inline.long_records(), pooled.long_records()
    assert [(r["grouping"], r["level"], r["replicate"]) for r in a] == \
        [(r["grouping"], r["level"], r["replicate"]) for r in b]
    assert [r["estimate"] for r in b] == pytest.approx([r["estimate"] for r in a], abs=1e-10)


def _failing_fit(*args, **kwargs):
    raise ConvergenceError("no progress", trace=[(0, 1.0)])


def test_bootstrap_failure_over_budget(league, monkeypatch):
    observations, base = league
    monkeypatch.setattr(bootstrap_module, "fit_reml", _failing_fit)

    with pytest.raises(BootstrapFailure, match="3 of 3"):
        bootstrap_effects(observations, BootstrapConfig(n_replicates=3, seed=1, parallelism=1,
                                                        max_failure_share=0.5), base)


def test_bootstrap_failures_within_budget_are_dropped(league, monkeypatch, caplog):
    observations, base = league
    monkeypatch.setattr(bootstrap_module, "fit_reml", _failing_fit)

    result = bootstrap_effects(observations, BootstrapConfig(n_replicates=2, seed=1, parallelism=1,
                                                             max_failure_share=1.0), base)

    assert (result.n_succeeded, result.n_failed) == (0, 2)
    assert result.distributions["rusher"] == []
    assert "replicate 0 dropped" in caplog.text


@pytest.mark.slow
def test_bootstrap_interval_coverage():
    assert bootstrap_coverage(range(20), n_replicates=40) >= 0.9
