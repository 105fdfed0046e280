"""Drive-level bootstrap of the mixed model's random intercepts"""
import logging
from concurrent.futures import ProcessPoolExecutor
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from analysis.mixed_model import assemble_design, fit_reml
from models.bootstrap import BootstrapConfig, BootstrapResult, EffectDistribution
from models.fit import ModelFit
from models.observation import PlayObservation
from utils.errors import BootstrapFailure, StrainError

logger = logging.getLogger(__name__)

# Replicate outcome: level estimates per grouping, or the failure message
ReplicateOutcome = Tuple[Optional[Dict[str, Dict[str, float]]], Optional[str]]

_WORKER_STATE: dict = {}


def drive_cells(observations: Sequence[PlayObservation]) -> Dict[Tuple[int, str], Dict[str, List[PlayObservation]]]:
    """(game_id, offense_team) -> drive_key -> observations of that drive"""
    cells: Dict[Tuple[int, str], Dict[str, List[PlayObservation]]] = {}
    for obs in sorted(observations, key=lambda o: o.sort_key):
        cell = cells.setdefault((obs.game_id, obs.offense_team), {})
        cell.setdefault(obs.drive_key, []).append(obs)
    return cells


def resample_drives(observations: Sequence[PlayObservation], rng: np.random.Generator) -> List[PlayObservation]:
    """
    Redraw each (game, offense) cell's drives with replacement

    Every cell gets as many draws as it has drives; all plays of a drawn drive
    enter together and each draw is tagged so repeated drives stay distinct.

    Args:
        observations: Observations carrying drive_key
        rng: Random generator for this replicate

    Returns:
        Resampled observation list
    """
    resampled: List[PlayObservation] = []
    cells = drive_cells(observations)
    for cell in sorted(cells):
        drives = cells[cell]
        keys = sorted(drives)
        draws = rng.integers(0, len(keys), size=len(keys))
        for slot, pick in enumerate(draws):
            drive_key = keys[int(pick)]
            tag = f"{drive_key}#{slot}"
            resampled.extend(obs.model_copy(update={"replicate_tag": tag}) for obs in drives[drive_key])
    return resampled


def _replicate_rng(seed: int, replicate: int) -> np.random.Generator:
    return np.random.default_rng([seed, replicate])


def _fit_replicate(observations: Sequence[PlayObservation], seed: int, replicate: int,
                   start: Optional[List[float]]) -> ReplicateOutcome:
    sample = resample_drives(observations, _replicate_rng(seed, replicate))
    try:
        fit = fit_reml(assemble_design(sample), starts=[start] if start else None)
    except (StrainError, np.linalg.LinAlgError) as e:
        return None, f"{type(e).__name__}: {e}"
    return {g: fit.intercepts(g) for g in fit.random_intercepts}, None


def _init_worker(observations: List[PlayObservation], seed: int, start: Optional[List[float]]) -> None:
    _WORKER_STATE["observations"] = observations
    _WORKER_STATE["seed"] = seed
    _WORKER_STATE["start"] = start


def _run_replicate(replicate: int) -> ReplicateOutcome:
    return _fit_replicate(_WORKER_STATE["observations"], _WORKER_STATE["seed"], replicate,
                          _WORKER_STATE["start"])


def _summarize(dist: EffectDistribution) -> EffectDistribution:
    samples = np.asarray(dist.samples)
    dist.median = float(np.median(samples))
    dist.lower, dist.upper = (float(v) for v in np.percentile(samples, [2.5, 97.5]))
    return dist


def bootstrap_effects(
    observations: Sequence[PlayObservation],
    config: Optional[BootstrapConfig] = None,
    base_fit: Optional[ModelFit] = None,
) -> BootstrapResult:
    """
    Refit the model on drive-resampled datasets and collect level estimates

    Args:
        observations: Model observations
        config: Replicate count, seed, workers and failure budget
        base_fit: Fit on the full data; computed when omitted. Its variance
            ratios seed every replicate's search.

    Returns:
        BootstrapResult with per-level distributions in replicate order

    Raises:
        BootstrapFailure: If the failed share exceeds the budget
    """
    config = config or BootstrapConfig()
    observations = list(observations)
    if base_fit is None:
        base_fit = fit_reml(assemble_design(observations))
    start = list(base_fit.log_theta) or None

    print(f"🔁 Bootstrap: {config.n_replicates} replicates, seed {config.seed}, {config.parallelism} worker(s)")
    replicates = range(config.n_replicates)
    if config.parallelism > 1:
        chunksize = max(1, config.n_replicates // (config.parallelism * 4))
        with ProcessPoolExecutor(max_workers=config.parallelism, initializer=_init_worker,
                                 initargs=(observations, config.seed, start)) as pool:
            outcomes = list(pool.map(_run_replicate, replicates, chunksize=chunksize))
    else:
        outcomes = [_fit_replicate(observations, config.seed, r, start) for r in replicates]

    failures = [(r, msg) for r, (_, msg) in enumerate(outcomes) if msg is not None]
    share = len(failures) / config.n_replicates
    if share > config.max_failure_share:
        detail = "; ".join(f"replicate {r}: {msg}" for r, msg in failures[:5])
        raise BootstrapFailure(
            f"{len(failures)} of {config.n_replicates} replicates failed "
            f"({share:.1%} > {config.max_failure_share:.1%}): {detail}"
        )
    for r, msg in failures:
        logger.warning("bootstrap replicate %d dropped: %s", r, msg)

    collected: Dict[str, Dict[str, EffectDistribution]] = {g: {} for g in base_fit.random_intercepts}
    for r, (estimates, _) in enumerate(outcomes):
        if estimates is None:
            continue
        for grouping, levels in estimates.items():
            bucket = collected.setdefault(grouping, {})
            for level, value in levels.items():
                dist = bucket.get(level)
                if dist is None:
                    dist = bucket[level] = EffectDistribution(
                        grouping=grouping, level_id=level, samples=[], replicates=[],
                    )
                dist.samples.append(value)
                dist.replicates.append(r)

    distributions = {
        grouping: [_summarize(levels[level]) for level in sorted(levels)]
        for grouping, levels in collected.items()
    }
    n_failed = len(failures)
    print(f"✓ Bootstrap complete: {config.n_replicates - n_failed} succeeded, {n_failed} failed")
    return BootstrapResult(
        config=config,
        n_succeeded=config.n_replicates - n_failed,
        n_failed=n_failed,
        distributions=distributions,
    )


__all__ = ["drive_cells", "resample_drives", "bootstrap_effects"]
