"""Bootstrap configuration and random-effect distributions"""
from typing import Dict, List, Optional

from pydantic import BaseModel, Field

from config.settings import (
    STRAIN_BOOTSTRAP_MAX_FAILURE,
    STRAIN_BOOTSTRAP_REPLICATES,
    STRAIN_BOOTSTRAP_SEED,
    STRAIN_WORKERS,
)


class BootstrapConfig(BaseModel):
    n_replicates: int = Field(default=STRAIN_BOOTSTRAP_REPLICATES, ge=1)
    seed: int = Field(default=STRAIN_BOOTSTRAP_SEED, ge=0, lt=2**64)
    parallelism: int = Field(default=STRAIN_WORKERS, ge=1)
    max_failure_share: float = Field(default=STRAIN_BOOTSTRAP_MAX_FAILURE, ge=0.0, le=1.0)


class EffectDistribution(BaseModel):
    """Fitted intercepts of one level across the replicates it appeared in"""
    grouping: str
    level_id: str
    samples: List[float]
    replicates: List[int]
    median: Optional[float] = None
    lower: Optional[float] = None
    upper: Optional[float] = None

    @property
    def effective_replicates(self) -> int:
        return len(self.samples)

    @property
    def strictly_positive(self) -> bool:
        return self.lower is not None and self.lower > 0


class BootstrapResult(BaseModel):
    config: BootstrapConfig
    n_succeeded: int
    n_failed: int
    distributions: Dict[str, List[EffectDistribution]]

    def long_records(self) -> List[dict]:
        """(grouping, level, replicate, estimate) rows"""
        rows = []
        for grouping, dists in self.distributions.items():
            for dist in dists:
                for replicate, estimate in zip(dist.replicates, dist.samples):
                    rows.append({
                        "grouping": grouping,
                        "level": dist.level_id,
                        "replicate": replicate,
                        "estimate": estimate,
                    })
        return rows


__all__ = ["BootstrapConfig", "EffectDistribution", "BootstrapResult"]
