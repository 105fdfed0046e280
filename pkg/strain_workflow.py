"""Main orchestration workflow for the STRAIN pipeline"""
import json
import logging
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import pandas as pd

from analysis.bootstrap import bootstrap_effects
from analysis.matchups import ObservationSet, build_observations
from analysis.mixed_model import FIXED_EFFECT_COLUMNS, assemble_design, fit_reml, rank_random_intercepts
from analysis.reports import (
    FILTER_VARIANTS,
    FIRST_HALF_WEEKS,
    SECOND_HALF_WEEKS,
    bootstrap_summary_table,
    coefficient_table,
    correlation_analyses,
    icc_table,
    leaderboard,
    player_table,
    random_intercept_table,
    rusher_count_distribution,
    variance_table,
)
from analysis.strain_calculator import (
    aggregate_players,
    compute_series,
    curves_to_dataframe,
    curves_to_wide,
    outcome_curves,
    overall_curve,
    play_feature_table,
    positional_curve,
)
from config.positions import LEADERBOARD_GROUPS
from config.settings import (
    STRAIN_DISTANCE_FLOOR,
    STRAIN_ERROR_BUDGET,
    STRAIN_FRAME_DT,
    STRAIN_LEADERBOARD_TOP_K,
    STRAIN_MAX_FRAME,
    STRAIN_MIN_SNAPS,
    STRAIN_OUTPUT_DIR,
    STRAIN_SIG_DIGITS,
)
from ingest.play_windows import WindowSet, assemble_windows
from ingest.tracking_reader import Corpus, load_corpus
from models.bootstrap import BootstrapConfig, BootstrapResult
from models.fit import ModelFit
from models.observation import PlayObservation, RusherPosition
from models.report import LeaderboardRow
from models.strain import PlayerAggregate, StrainSeries
from utils.errors import InsufficientDataError
from utils.spreadsheet_generator import (
    export_records_jsonl,
    export_to_csv,
    export_to_excel,
    write_manifest,
)

logger = logging.getLogger(__name__)

# Positions ranked separately by predicted rusher intercept
RANKED_POSITIONS = ["DE", "OLB", "DT", "NT"]
RANKING_TOP_K = 10


class StrainWorkflow:
    """
    Runs ingest, STRAIN, curves, leaderboards, model fit and bootstrap stages

    Intermediate results are cached, so later stages reuse earlier ones
    within one workflow instance.
    """

    def __init__(
        self,
        data_dir: str,
        output_dir: str = STRAIN_OUTPUT_DIR,
        weeks: Optional[Sequence[int]] = None,
        distance_floor: float = STRAIN_DISTANCE_FLOOR,
        max_frame: int = STRAIN_MAX_FRAME,
        min_snaps: int = STRAIN_MIN_SNAPS,
        top_k: int = STRAIN_LEADERBOARD_TOP_K,
        dt: float = STRAIN_FRAME_DT,
        sig_digits: int = STRAIN_SIG_DIGITS,
        error_budget: float = STRAIN_ERROR_BUDGET,
    ):
        self.data_dir = Path(data_dir)
        self.output_dir = Path(output_dir)
        self.weeks = list(weeks) if weeks else None
        self.distance_floor = distance_floor
        self.max_frame = max_frame
        self.min_snaps = min_snaps
        self.top_k = top_k
        self.dt = dt
        self.sig_digits = sig_digits
        self.error_budget = error_budget

        self._corpus: Optional[Corpus] = None
        self._windows: Optional[WindowSet] = None
        self._series: Optional[List[StrainSeries]] = None
        self._observations: Optional[ObservationSet] = None
        self._fit: Optional[ModelFit] = None

    def config(self) -> Dict[str, object]:
        return {
            "data_dir": str(self.data_dir),
            "weeks": self.weeks,
            "distance_floor": self.distance_floor,
            "max_frame": self.max_frame,
            "min_snaps": self.min_snaps,
            "top_k": self.top_k,
            "dt": self.dt,
            "sig_digits": self.sig_digits,
            "error_budget": self.error_budget,
        }

    # Cached intermediate results

    def corpus(self) -> Corpus:
        if self._corpus is None:
            self._corpus = load_corpus(self.data_dir, self.weeks, self.error_budget)
        return self._corpus

    def windows(self) -> WindowSet:
        if self._windows is None:
            self._windows = assemble_windows(self.corpus())
        return self._windows

    def series(self) -> List[StrainSeries]:
        if self._series is None:
            self._series = compute_series(self.windows().windows, self.corpus().plays,
                                          dt=self.dt, distance_floor=self.distance_floor)
        return self._series

    def aggregates(self, weeks: Optional[Sequence[int]] = None) -> List[PlayerAggregate]:
        return aggregate_players(self.series(), self.corpus().players, weeks)

    def observations(self) -> ObservationSet:
        if self._observations is None:
            self._observations = build_observations(self.windows().windows, self.series(), self.corpus().plays)
        return self._observations

    def fit(self) -> ModelFit:
        if self._fit is None:
            observations = self.observations().observations
            print(f"🧮 Fitting mixed model on {len(observations)} observations...")
            self._fit = fit_reml(assemble_design(observations))
            print(f"✓ Converged after {self._fit.n_evaluations} deviance evaluations")
        return self._fit

    # Stages

    def _stage_dir(self, stage: str) -> Path:
        path = self.output_dir / stage
        path.mkdir(parents=True, exist_ok=True)
        return path

    def _finish(self, stage: str, outputs: List[str], extra: Optional[dict] = None,
                schemas: Optional[Dict[str, dict]] = None) -> List[str]:
        config = self.config()
        config.update(extra or {})
        inputs = self.corpus().input_paths() if self._corpus is not None else []
        manifest = write_manifest(self._stage_dir(stage), stage, config, inputs, outputs, schemas)
        print(f"✓ {stage}: {len(outputs)} files written to {self.output_dir / stage}")
        return outputs + [manifest]

    def run_ingest(self) -> List[str]:
        """Window assembly with rejection ledger and rusher-count distribution"""
        print(f"\n{'='*60}")
        print(f"📥 INGEST: {self.data_dir}")
        print(f"{'='*60}")
        corpus, window_set = self.corpus(), self.windows()
        out = self._stage_dir("ingest")

        summary = [{
            "game_id": w.game_id,
            "play_id": w.play_id,
            "snap_frame": w.snap_frame,
            "end_frame": w.end_frame,
            "end_event": w.end_event.value,
            "qb_id": w.qb_id,
            "n_rushers": len(w.rusher_ids),
            "n_blockers": len(w.blocker_ids),
            "n_frames": w.n_frames,
        } for w in window_set.windows]
        counts = rusher_count_distribution(window_set.windows)
        ledger = {
            "corpus": corpus.ledger.model_dump(),
            "windows": window_set.ledger.model_dump(),
            "tracking_files": {k: v.model_dump() for k, v in window_set.file_ledgers.items()},
        }
        ledger_path = out / "ingest_ledger.json"
        ledger_path.write_text(json.dumps(ledger, indent=2, sort_keys=True), encoding="utf-8")

        outputs = [
            export_to_csv(summary, out / "windows", self.sig_digits),
            export_records_jsonl(window_set.windows, out / "windows.jsonl"),
            export_to_csv(window_set.rejections, out / "rejections", self.sig_digits,
                          columns=["game_id", "play_id", "reason", "detail"]),
            export_to_csv(corpus.play_exclusions, out / "play_exclusions", self.sig_digits,
                          columns=["game_id", "play_id", "line", "reason"]),
            export_to_csv([{"n_rushers": k, "n_plays": v} for k, v in counts.items()],
                          out / "rusher_counts", self.sig_digits, columns=["n_rushers", "n_plays"]),
            str(ledger_path),
        ]
        print(f"📊 {corpus.ledger.n_plays} passing plays across {corpus.ledger.n_games} games")
        print(f"✅ {window_set.ledger.n_windows} windows, {sum(window_set.ledger.rejections.values())} rejected")
        print(f"⏱️  {window_set.ledger.total_play_frames} play frames, "
              f"{window_set.ledger.total_rusher_frames} rusher frames")
        return self._finish("ingest", outputs)

    def run_strain(self, play: Optional[Tuple[int, int]] = None) -> List[str]:
        """
        Series, player aggregates and model observations

        Args:
            play: Optional (game_id, play_id) for the single-play feature table
        """
        print(f"\n{'='*60}")
        print("📈 STRAIN: per-frame series and player averages")
        print(f"{'='*60}")
        out = self._stage_dir("strain")
        series = self.series()
        observation_set = self.observations()

        play_rows = [{
            "game_id": s.game_id,
            "play_id": s.play_id,
            "rusher_id": s.rusher_id,
            "team": s.team,
            "position": s.position,
            "position_group": s.position_group.value if s.position_group else None,
            "week": s.week,
            "outcome": s.outcome.value,
            "n_frames": s.n_frames,
            "play_average": s.play_average,
        } for s in series]

        outputs = [
            export_records_jsonl(series, out / "series.jsonl"),
            export_to_csv(play_rows, out / "play_averages", self.sig_digits),
            export_to_csv(player_table(self.aggregates()), out / "player_aggregates", self.sig_digits),
            export_records_jsonl(observation_set.observations, out / "observations.jsonl"),
            export_to_csv(observation_set.observations, out / "observations", self.sig_digits),
            export_to_csv(observation_set.exclusions, out / "observation_exclusions", self.sig_digits,
                          columns=["game_id", "play_id", "rusher_id", "reason", "detail"]),
        ]
        ledger_path = out / "observation_ledger.json"
        ledger_path.write_text(observation_set.ledger.model_dump_json(indent=2), encoding="utf-8")
        outputs.append(str(ledger_path))

        if play is not None:
            window = next((w for w in self.windows().windows if w.key == tuple(play)), None)
            if window is None:
                logger.warning("play %s/%s has no window; case study skipped", *play)
            else:
                table = play_feature_table(window, self.dt, self.distance_floor)
                outputs.append(export_to_csv(table, out / f"play_{play[0]}_{play[1]}", self.sig_digits))

        print(f"✅ {len(series)} rusher series, {observation_set.ledger.n_observations} model observations")
        return self._finish(
            "strain", outputs,
            {"play": list(play) if play else None, "fixed_effect_columns": list(FIXED_EFFECT_COLUMNS)},
            schemas={"observations": PlayObservation.model_json_schema()},
        )

    def run_curves(self) -> List[str]:
        """Positional, outcome and overall curves as one long table"""
        print(f"\n{'='*60}")
        print(f"📉 CURVES: first {self.max_frame} frames after the snap")
        print(f"{'='*60}")
        series = self.series()
        curves = [overall_curve(series, self.max_frame, self.dt)]
        for group in RusherPosition:
            curves.append(positional_curve(series, group, self.max_frame, self.dt))
            curves.extend(outcome_curves(series, group, self.max_frame, self.dt).values())
        out = self._stage_dir("curves")
        outputs = [export_to_csv(curves_to_dataframe(curves), out / "curves", self.sig_digits),
                   export_to_csv(curves_to_wide(curves), out / "curves_wide", self.sig_digits)]
        return self._finish("curves", outputs)

    def run_leaderboard(self) -> List[str]:
        """Edge and interior leaderboards as CSV plus one workbook"""
        print(f"\n{'='*60}")
        print(f"🏆 LEADERBOARDS: at least {self.min_snaps} snaps, top {self.top_k}")
        print(f"{'='*60}")
        aggregates = self.aggregates()
        out = self._stage_dir("leaderboard")
        sheets, outputs = {}, []
        for group in LEADERBOARD_GROUPS:
            rows = leaderboard(aggregates, group, self.min_snaps, self.top_k)
            sheets[group] = rows
            outputs.append(export_to_csv(rows, out / f"leaderboard_{group}", self.sig_digits,
                                         columns=list(LeaderboardRow.model_fields)))
            print(f"🏅 {group}: {len(rows)} qualifying rushers")
        if any(sheets.values()):
            outputs.append(export_to_excel(sheets, out / "leaderboards", self.sig_digits))
        return self._finish("leaderboard", outputs)

    def run_correlations(self) -> List[str]:
        """Full-sample and half-season correlations under both snap filters"""
        print(f"\n{'='*60}")
        print("🔗 CORRELATIONS: weeks 1-4 vs weeks 5-8")
        print(f"{'='*60}")
        full = self.aggregates()
        first, second = self.aggregates(FIRST_HALF_WEEKS), self.aggregates(SECOND_HALF_WEEKS)
        out = self._stage_dir("correlations")
        summary, pairs = [], []
        for variant in FILTER_VARIANTS:
            try:
                reports = correlation_analyses(full, first, second, self.min_snaps, variant)
            except InsufficientDataError as e:
                print(f"⚠️  {variant}: {e}")
                continue
            for report in reports:
                summary.append({
                    "name": report.name,
                    "filter_variant": report.filter_variant,
                    "x": report.x_label,
                    "y": report.y_label,
                    "pearson_r": report.pearson_r,
                    "n_players": report.n_players,
                    "min_snaps": report.min_snaps,
                })
                pairs.extend({"name": report.name, "filter_variant": variant, **p.model_dump()}
                             for p in report.pairs)
                print(f"  {variant:<12} {report.name:<28} r = {report.pearson_r}")
        if not summary:
            raise InsufficientDataError(f"no correlation report has enough players with {self.min_snaps}+ snaps")
        outputs = [
            export_to_csv(summary, out / "correlations", self.sig_digits),
            export_to_csv(pairs, out / "correlation_pairs", self.sig_digits),
        ]
        return self._finish("correlations", outputs)

    def _rusher_positions(self) -> Dict[str, str]:
        return {str(a.player_id): a.position for a in self.aggregates() if a.position}

    def run_fit(self) -> List[str]:
        """Coefficient, variance, ICC and random-intercept tables"""
        print(f"\n{'='*60}")
        print("🧮 MODEL FIT: four crossed random intercepts by REML")
        print(f"{'='*60}")
        fit = self.fit()
        out = self._stage_dir("fit")
        fit_path = out / "fit.json"
        fit_path.write_text(fit.model_dump_json(indent=2), encoding="utf-8")
        positions = self._rusher_positions()
        rankings = []
        for position in RANKED_POSITIONS:
            rankings.extend(rank_random_intercepts(fit, "rusher", positions, [position], RANKING_TOP_K))
        outputs = [
            export_to_csv(coefficient_table(fit), out / "coefficients", self.sig_digits),
            export_to_csv(variance_table(fit), out / "variance_components", self.sig_digits),
            export_to_csv(icc_table(fit), out / "icc", self.sig_digits),
            export_to_csv(random_intercept_table(fit, self.corpus().players), out / "random_intercepts",
                          self.sig_digits),
            export_to_csv(rankings, out / "rusher_rankings", self.sig_digits),
            str(fit_path),
        ]
        for share_name, share in fit.icc.items():
            print(f"  ICC {share_name:<9} {share:.4f}")
        return self._finish("fit", outputs)

    def run_bootstrap(self, config: BootstrapConfig) -> List[str]:
        """Drive bootstrap of the random intercepts"""
        print(f"\n{'='*60}")
        print(f"🔁 BOOTSTRAP: {config.n_replicates} drive resamples")
        print(f"{'='*60}")
        fit = self.fit()
        result: BootstrapResult = bootstrap_effects(self.observations().observations, config, fit)
        out = self._stage_dir("bootstrap")
        rankings = []
        positions = self._rusher_positions()
        distributions = result.distributions.get("rusher", [])
        for position in RANKED_POSITIONS:
            rankings.extend(rank_random_intercepts(fit, "rusher", positions, [position], RANKING_TOP_K,
                                                   distributions))
        outputs = [
            export_to_csv(pd.DataFrame(result.long_records(), columns=["grouping", "level", "replicate", "estimate"]),
                          out / "bootstrap_samples", self.sig_digits),
            export_to_csv(bootstrap_summary_table(result), out / "bootstrap_summary", self.sig_digits),
            export_to_csv(rankings, out / "rusher_rankings_bootstrap", self.sig_digits),
        ]
        return self._finish("bootstrap", outputs, {"bootstrap": config.model_dump()})

    def run_report(self, bootstrap: Optional[BootstrapConfig] = None,
                   play: Optional[Tuple[int, int]] = None) -> List[str]:
        """Every stage end to end"""
        outputs = []
        outputs += self.run_ingest()
        outputs += self.run_strain(play)
        outputs += self.run_curves()
        outputs += self.run_leaderboard()
        outputs += self.run_correlations()
        outputs += self.run_fit()
        if bootstrap is not None:
            outputs += self.run_bootstrap(bootstrap)

        print(f"\n{'='*60}")
        print("🎉 REPORT COMPLETE!")
        print(f"{'='*60}")
        print(f"✅ Files written: {len(outputs)}")
        print(f"📁 Output directory: {self.output_dir}")
        print(f"{'='*60}\n")
        return outputs


__all__ = ["StrainWorkflow"]
