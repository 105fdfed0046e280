"""Synthetic plays and model data with known answers, plus the self-check suite"""
import itertools
import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from analysis.bootstrap import bootstrap_effects, drive_cells, resample_drives
from analysis.mixed_model import covariate_row, design_from_arrays, fit_reml, profiled_reml_deviance
from analysis.strain_calculator import play_strain_series, player_average_strain
from config.settings import STRAIN_DISTANCE_FLOOR, STRAIN_FRAME_DT
from models.bootstrap import BootstrapConfig
from models.fit import DesignSystem
from models.observation import BlockerPosition, PlayObservation, RusherPosition
from models.report import CheckResult
from models.tracking import Down, EndEvent, PlayerTrack, PlayWindow, RusherCredits

logger = logging.getLogger(__name__)

QB_ID = 1
RUSHER_ID = 2
BLOCKER_ID = 3


def _approach_distances(initial_distance: float, speed: float, n_frames: int, dt: float) -> np.ndarray:
    if initial_distance <= 0:
        raise ValueError(f"initial distance must be positive, got {initial_distance}")
    if speed < 0:
        raise ValueError(f"speed must be non-negative, got {speed}")
    if n_frames < 2:
        raise ValueError("a window needs at least two frames")
    distances = initial_distance - speed * dt * np.arange(n_frames)
    contact = np.flatnonzero(distances <= 0)
    if contact.size:
        distances = distances[:contact[0]]
    if distances.shape[0] < 2:
        raise ValueError("rusher reaches the quarterback before the second frame")
    return distances


def gen_linear_approach(
    initial_distance: float,
    speed: float,
    n_frames: int,
    dt: float = STRAIN_FRAME_DT,
    heading_deg: float = 0.0,
    qb_xy: Tuple[float, float] = (40.0, 26.65),
    game_id: int = 1,
    play_id: int = 1,
    with_blocker: bool = True,
) -> PlayWindow:
    """
    Rusher running straight at a stationary quarterback at constant speed

    Args:
        initial_distance: Rusher-QB distance at the snap (yards)
        speed: Closing speed (yards/second)
        n_frames: Frames requested; the window stops before contact
        dt: Frame step in seconds
        heading_deg: Direction from the QB to the rusher's start
        qb_xy: Quarterback position
        with_blocker: Add a blocker halfway between them at the snap

    Returns:
        PlayWindow whose analytic STRAIN at each frame is speed / distance
    """
    distances = _approach_distances(initial_distance, speed, n_frames, dt)
    n = distances.shape[0]
    ux, uy = math.cos(math.radians(heading_deg)), math.sin(math.radians(heading_deg))
    frames = list(range(1, n + 1))
    qx, qy = qb_xy
    tracks = {
        QB_ID: PlayerTrack(player_id=QB_ID, team="OFF", position="QB", frame_ids=frames,
                           x=[qx] * n, y=[qy] * n),
        RUSHER_ID: PlayerTrack(player_id=RUSHER_ID, team="DEF", position="DE", frame_ids=frames,
                               x=(qx + distances * ux).tolist(), y=(qy + distances * uy).tolist()),
    }
    blockers = []
    if with_blocker:
        half = initial_distance / 2
        tracks[BLOCKER_ID] = PlayerTrack(player_id=BLOCKER_ID, team="OFF", position="T", frame_ids=frames,
                                         x=[qx + half * ux] * n, y=[qy + half * uy] * n)
        blockers = [BLOCKER_ID]
    return PlayWindow(
        game_id=game_id,
        play_id=play_id,
        snap_frame=1,
        end_frame=n,
        end_event=EndEvent.PASS_FORWARD,
        qb_id=QB_ID,
        rusher_ids=[RUSHER_ID],
        blocker_ids=blockers,
        tracks=tracks,
        credits={RUSHER_ID: RusherCredits()},
        blocked_by={RUSHER_ID: blockers},
    )


def analytic_strain(
    initial_distance: float,
    speed: float,
    n_frames: int,
    dt: float = STRAIN_FRAME_DT,
    distance_floor: float = STRAIN_DISTANCE_FLOOR,
) -> np.ndarray:
    """speed / max(distance, floor) at window frames 2..T of gen_linear_approach"""
    distances = _approach_distances(initial_distance, speed, n_frames, dt)
    return speed / np.maximum(distances[1:], distance_floor)


def rigid_transform(window: PlayWindow, angle_deg: float, shift: Tuple[float, float]) -> PlayWindow:
    """Rotate every track about the origin, then translate"""
    c, s = math.cos(math.radians(angle_deg)), math.sin(math.radians(angle_deg))
    tracks = {}
    for pid, track in window.tracks.items():
        x, y = np.asarray(track.x), np.asarray(track.y)
        tracks[pid] = track.model_copy(update={
            "x": (c * x - s * y + shift[0]).tolist(),
            "y": (s * x + c * y + shift[1]).tolist(),
        })
    return window.model_copy(update={"tracks": tracks})


@dataclass
class SyntheticDesign:
    """Simulated design with the effects it was generated from"""
    design: DesignSystem
    beta: np.ndarray
    variances: Dict[str, float]
    sigma2: float
    effects: Dict[str, Dict[str, float]] = field(default_factory=dict)


def gen_mixed_model_data(
    beta: Sequence[float],
    variances: Dict[str, float],
    level_counts: Dict[str, int],
    n_obs: int,
    sigma2: float = 1.0,
    seed: int = 0,
    orthogonal_noise: bool = False,
) -> SyntheticDesign:
    """
    Simulate y = X beta + sum of crossed random intercepts + noise

    Args:
        beta: Intercept followed by slopes of standard-normal covariates
        variances: Grouping name -> random-intercept variance
        level_counts: Grouping name -> number of levels
        n_obs: Observations
        sigma2: Residual variance
        seed: Generator seed
        orthogonal_noise: Project the noise off the span of X and Z. With all
            variances zero this makes the REML optimum sit exactly on the
            boundary and the fixed effects equal least squares.

    Returns:
        SyntheticDesign
    """
    rng = np.random.default_rng(seed)
    beta = np.asarray(beta, dtype=float)
    p = beta.shape[0]
    X = np.column_stack([np.ones(n_obs)] + [rng.normal(size=n_obs) for _ in range(p - 1)])
    names = ["Intercept"] + [f"x{j}" for j in range(1, p)]

    groups: Dict[str, List[str]] = {}
    effects: Dict[str, Dict[str, float]] = {}
    signal = X @ beta
    indicators = []
    for name, variance in variances.items():
        n_levels = level_counts[name]
        if n_levels > n_obs:
            raise ValueError(f"{name}: {n_levels} levels cannot all appear in {n_obs} rows")
        codes = rng.integers(0, n_levels, size=n_obs)
        codes[:n_levels] = np.arange(n_levels)
        values = rng.normal(0.0, math.sqrt(variance), size=n_levels) if variance > 0 else np.zeros(n_levels)
        labels = [f"{name}{code:03d}" for code in codes]
        groups[name] = labels
        effects[name] = {f"{name}{i:03d}": float(v) for i, v in enumerate(values)}
        signal = signal + values[codes]
        indicator = np.zeros((n_obs, n_levels))
        indicator[np.arange(n_obs), codes] = 1.0
        indicators.append(indicator)

    noise = rng.normal(0.0, math.sqrt(sigma2), size=n_obs)
    if orthogonal_noise:
        basis = np.column_stack([X] + indicators)
        coef, *_ = np.linalg.lstsq(basis, noise, rcond=None)
        projected = noise - basis @ coef
        noise = projected * (np.linalg.norm(noise) / np.linalg.norm(projected))

    design = design_from_arrays(signal + noise, X, names, groups)
    return SyntheticDesign(design=design, beta=beta, variances=dict(variances), sigma2=sigma2, effects=effects)


@dataclass
class OneWayOracle:
    """Closed-form REML answers for a balanced one-way layout"""
    grand_mean: float
    msb: float
    msw: float
    sigma2: float
    sigma2_group: float
    group_means: Dict[str, float]
    per_group: int

    @property
    def theta(self) -> float:
        return self.sigma2_group / self.sigma2

    def blup(self, level: str) -> float:
        shrink = self.per_group * self.theta / (1.0 + self.per_group * self.theta)
        return shrink * (self.group_means[level] - self.grand_mean)


def gen_balanced_one_way(
    n_groups: int,
    per_group: int,
    sigma2_group: float,
    sigma2: float,
    seed: int = 0,
    mean: float = 0.0,
) -> Tuple[DesignSystem, OneWayOracle]:
    """
    Balanced single-grouping data and its sums-of-squares REML solution

    Returns:
        (design with an intercept-only X, oracle values)
    """
    if n_groups < 2 or per_group < 2:
        raise ValueError("need at least two groups of at least two observations")
    rng = np.random.default_rng(seed)
    effects = rng.normal(0.0, math.sqrt(sigma2_group), size=n_groups)
    codes = np.repeat(np.arange(n_groups), per_group)
    y = mean + effects[codes] + rng.normal(0.0, math.sqrt(sigma2), size=codes.shape[0])
    labels = [f"g{c:03d}" for c in codes]

    table = y.reshape(n_groups, per_group)
    group_means = table.mean(axis=1)
    grand = float(y.mean())
    msb = per_group * float(np.sum((group_means - grand) ** 2)) / (n_groups - 1)
    msw = float(np.sum((table - group_means[:, None]) ** 2)) / (n_groups * (per_group - 1))
    if msb > msw:
        s2, s2g = msw, (msb - msw) / per_group
    else:
        # Boundary: the group variance is zero and REML pools every row
        s2, s2g = float(np.sum((y - grand) ** 2)) / (y.shape[0] - 1), 0.0

    design = design_from_arrays(y, np.ones((y.shape[0], 1)), ["Intercept"], {"group": labels})
    oracle = OneWayOracle(
        grand_mean=grand, msb=msb, msw=msw, sigma2=s2, sigma2_group=s2g,
        group_means={f"g{i:03d}": float(m) for i, m in enumerate(group_means)},
        per_group=per_group,
    )
    return design, oracle


def gen_play_observations(
    beta: Sequence[float],
    variances: Dict[str, float],
    sigma2: float,
    seed: int = 0,
    n_teams: int = 6,
    rushers_per_team: int = 4,
    blockers_per_team: int = 5,
    drives_per_cell: int = 4,
    plays_per_drive: int = 3,
) -> Tuple[List[PlayObservation], Dict[str, Dict[str, float]]]:
    """
    Full observation rows simulated from the pass-rush model

    Every team meets every other team once; on each play all rushers of the
    defense appear, each matched to a random offensive blocker.

    Args:
        beta: Sixteen fixed effects in coefficient-table order
        variances: Variance of the rusher, blocker, defense and offense intercepts
        sigma2: Residual variance
        seed: Generator seed

    Returns:
        (observations, true effects per grouping and level)
    """
    rng = np.random.default_rng(seed)
    beta = np.asarray(beta, dtype=float)
    teams = [f"T{i:02d}" for i in range(n_teams)]
    rushers = {t: [100 + 10 * i + k for k in range(rushers_per_team)] for i, t in enumerate(teams)}
    blockers = {t: [500 + 10 * i + k for k in range(blockers_per_team)] for i, t in enumerate(teams)}

    def draw(grouping: str, levels: List) -> Dict[str, float]:
        sd = math.sqrt(variances.get(grouping, 0.0))
        return {str(level): float(rng.normal(0.0, sd)) if sd > 0 else 0.0 for level in levels}

    truth = {
        "rusher": draw("rusher", sorted(itertools.chain.from_iterable(rushers.values()))),
        "blocker": draw("blocker", sorted(itertools.chain.from_iterable(blockers.values()))),
        "defense": draw("defense", teams),
        "offense": draw("offense", teams),
    }

    downs = list(Down)
    rusher_positions = list(RusherPosition)
    blocker_positions = list(BlockerPosition)
    observations: List[PlayObservation] = []
    game_id = 2021090900
    for home, away in itertools.combinations(teams, 2):
        game_id += 1
        play_id = 0
        for offense, defense in ((home, away), (away, home)):
            for drive in range(1, drives_per_cell + 1):
                drive_key = f"{game_id}-{offense}-{drive:03d}"
                for _ in range(plays_per_drive):
                    play_id += 1
                    down = downs[int(rng.integers(len(downs)))]
                    n_blockers = int(rng.integers(4, 8))
                    yards_to_go = int(rng.integers(1, 16))
                    yardline = int(rng.integers(1, 100))
                    for rusher_id in rushers[defense]:
                        blocker_id = blockers[offense][int(rng.integers(blockers_per_team))]
                        rusher_pos = rusher_positions[int(rng.integers(len(rusher_positions)))]
                        blocker_pos = blocker_positions[int(rng.integers(len(blocker_positions)))]
                        x = covariate_row(n_blockers, yards_to_go, yardline, down, rusher_pos, blocker_pos)
                        response = (
                            float(x @ beta)
                            + truth["rusher"][str(rusher_id)]
                            + truth["blocker"][str(blocker_id)]
                            + truth["defense"][defense]
                            + truth["offense"][offense]
                            + float(rng.normal(0.0, math.sqrt(sigma2)))
                        )
                        observations.append(PlayObservation(
                            game_id=game_id, play_id=play_id, drive_key=drive_key,
                            response=response, rusher_id=rusher_id, blocker_id=blocker_id,
                            defense_team=defense, offense_team=offense, n_blockers=n_blockers,
                            yards_to_go=yards_to_go, yardline=yardline, down=down,
                            rusher_pos=rusher_pos, blocker_pos=blocker_pos,
                        ))
    return observations, truth


def centered(effects: Dict[str, float]) -> Dict[str, float]:
    """Effects shifted to mean zero, the scale on which intercepts are predicted"""
    mean = float(np.mean(list(effects.values()))) if effects else 0.0
    return {k: v - mean for k, v in effects.items()}


def bootstrap_coverage(
    seeds: Sequence[int],
    n_replicates: int = 50,
    rusher_variance: float = 1.0,
    sigma2: float = 0.05,
    workers: int = 1,
) -> float:
    """
    Share of rushers whose centered true effect lies inside the 95% interval

    Each seed simulates a fresh league and runs a drive bootstrap on it.
    Rushers are nested in their defense, so the interval is taken over the
    per-replicate sum of the rusher and defense intercepts.
    """
    beta = np.zeros(16)
    beta[0] = 1.0
    covered = total = 0
    for seed in seeds:
        observations, truth = gen_play_observations(
            beta, {"rusher": rusher_variance}, sigma2, seed=seed,
        )
        result = bootstrap_effects(
            observations,
            BootstrapConfig(n_replicates=n_replicates, seed=seed, parallelism=workers),
        )
        target = centered(truth["rusher"])
        teams = {str(o.rusher_id): o.defense_team for o in observations}
        defense = {d.level_id: dict(zip(d.replicates, d.samples)) for d in result.distributions.get("defense", [])}
        for dist in result.distributions.get("rusher", []):
            team = defense.get(teams[dist.level_id], {})
            sums = [v + team.get(r, 0.0) for r, v in zip(dist.replicates, dist.samples)]
            lower, upper = np.percentile(sums, [2.5, 97.5])
            total += 1
            covered += int(lower <= target[dist.level_id] <= upper)
    return covered / total if total else 0.0


def _check(name: str, fn) -> CheckResult:
    try:
        passed, detail = fn()
    except Exception as e:  # a crashing check is a failed check
        return CheckResult(name=name, passed=False, detail=f"{type(e).__name__}: {e}")
    return CheckResult(name=name, passed=bool(passed), detail=detail)


def _time_to_contact():
    window = gen_linear_approach(5.0, 1.0, 30)
    series = play_strain_series(window, RUSHER_ID)
    err = float(np.max(np.abs(np.asarray(series.strains()) - analytic_strain(5.0, 1.0, 30))))
    return err <= 1e-12, f"max abs error {err:.3e}"


def _rigid_motion():
    window = gen_linear_approach(7.5, 2.3, 25, heading_deg=33.0)
    moved = rigid_transform(window, 71.0, (12.5, -3.25))
    a = np.asarray(play_strain_series(window, RUSHER_ID).strains())
    b = np.asarray(play_strain_series(moved, RUSHER_ID).strains())
    err = float(np.max(np.abs(a - b)))
    return err <= 1e-9, f"max abs difference {err:.3e}"


def _frame_weighting():
    plays = [play_strain_series(gen_linear_approach(d, v, n, play_id=i), RUSHER_ID)
             for i, (d, v, n) in enumerate([(6.0, 1.5, 12), (9.0, 2.0, 31), (4.0, 0.5, 20)], start=1)]
    agg = player_average_strain(plays)
    flat = math.fsum(itertools.chain.from_iterable(s.strains() for s in plays))
    flat /= sum(s.n_frames for s in plays)
    err = abs(agg.avg_strain - flat)
    return err <= 1e-12, f"abs difference {err:.3e}"


def _one_way():
    design, oracle = gen_balanced_one_way(8, 25, 4.0, 1.0, seed=11)
    fit = fit_reml(design)
    errs = [abs(fit.sigma2 - oracle.sigma2) / oracle.sigma2,
            abs(fit.group_variance("group") - oracle.sigma2_group) / oracle.sigma2_group]
    return max(errs) <= 1e-6, f"relative errors {errs[0]:.2e}, {errs[1]:.2e}"


def _degenerate():
    data = gen_mixed_model_data([1.0, 0.5, -0.25], {"a": 0.0, "b": 0.0}, {"a": 8, "b": 6},
                                n_obs=160, seed=5, orthogonal_noise=True)
    fit = fit_reml(data.design)
    ols, *_ = np.linalg.lstsq(data.design.X, data.design.y, rcond=None)
    err = float(np.max(np.abs(np.asarray(list(fit.beta.values())) - ols)))
    boundary = all(vc.boundary for vc in fit.variance_components)
    return err <= 1e-6 and boundary, f"max beta error {err:.2e}, all boundary {boundary}"


def _stationarity():
    data = gen_mixed_model_data([0.5, 1.0], {"a": 2.0, "b": 1.5}, {"a": 12, "b": 10}, n_obs=300, seed=3)
    fit = fit_reml(data.design)
    if any(vc.boundary for vc in fit.variance_components):
        return False, "optimum on the boundary"
    h = 1e-4
    grads = []
    for g in range(len(fit.log_theta)):
        up, down = list(fit.log_theta), list(fit.log_theta)
        up[g] += h
        down[g] -= h
        grads.append((profiled_reml_deviance(data.design, up) - profiled_reml_deviance(data.design, down)) / (2 * h))
    worst = max(abs(v) for v in grads)
    return worst < 1e-3, f"largest gradient {worst:.2e}"


def _scale_equivariance():
    data = gen_mixed_model_data([0.5, 1.0], {"a": 2.0, "b": 1.5}, {"a": 12, "b": 10}, n_obs=300, seed=3)
    base = fit_reml(data.design)
    scaled_design = design_from_arrays(2.0 * data.design.y, data.design.X, data.design.column_names,
                                       {b.name: [b.levels[c] for c in b.codes] for b in data.design.groupings})
    scaled = fit_reml(scaled_design)
    beta_err = max(abs(scaled.beta[k] - 2.0 * v) / max(abs(v), 1e-12) for k, v in base.beta.items())
    icc_err = max(abs(scaled.icc[k] - v) for k, v in base.icc.items())
    return beta_err <= 1e-8 and icc_err <= 1e-10, f"beta rel error {beta_err:.2e}, icc error {icc_err:.2e}"


def _drive_counts():
    beta = np.zeros(16)
    beta[0] = 1.0
    observations, _ = gen_play_observations(beta, {"rusher": 1.0}, 0.5, seed=2, n_teams=4)
    original = {cell: len(drives) for cell, drives in drive_cells(observations).items()}
    first = resample_drives(observations, np.random.default_rng([7, 0]))
    again = resample_drives(observations, np.random.default_rng([7, 0]))
    draws: Dict[tuple, set] = {}
    for obs in first:
        draws.setdefault((obs.game_id, obs.offense_team), set()).add(obs.replicate_tag)
    preserved = all(len(draws.get(cell, ())) == n for cell, n in original.items())
    identical = [o.model_dump() for o in first] == [o.model_dump() for o in again]
    return preserved and identical, f"drive counts preserved {preserved}, reproducible {identical}"


def run_selfcheck(include_bootstrap: bool = False, coverage_seeds: Optional[Sequence[int]] = None) -> List[CheckResult]:
    """
    Run the numerical self-checks

    Args:
        include_bootstrap: Also run the bootstrap coverage Monte Carlo
        coverage_seeds: Seeds for the coverage run (default 100 seeds)

    Returns:
        One CheckResult per check
    """
    checks = [
        ("time_to_contact_identity", _time_to_contact),
        ("rigid_motion_invariance", _rigid_motion),
        ("frame_weighted_average", _frame_weighting),
        ("balanced_one_way_reml", _one_way),
        ("zero_variance_matches_ols", _degenerate),
        ("profiled_deviance_stationary", _stationarity),
        ("scale_equivariance", _scale_equivariance),
        ("drive_counts_preserved", _drive_counts),
    ]
    results = [_check(name, fn) for name, fn in checks]
    if include_bootstrap:
        seeds = list(coverage_seeds) if coverage_seeds is not None else list(range(100))

        def coverage():
            share = bootstrap_coverage(seeds)
            return share >= 0.9, f"coverage {share:.3f} over {len(seeds)} seeds"

        results.append(_check("bootstrap_coverage", coverage))
    for r in results:
        logger.info("selfcheck %s: %s (%s)", r.name, "pass" if r.passed else "FAIL", r.detail)
    return results


__all__ = [
    "gen_linear_approach",
    "analytic_strain",
    "rigid_transform",
    "SyntheticDesign",
    "gen_mixed_model_data",
    "OneWayOracle",
    "gen_balanced_one_way",
    "gen_play_observations",
    "centered",
    "bootstrap_coverage",
    "run_selfcheck",
]
