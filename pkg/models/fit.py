"""Design matrices and fitted multilevel model results"""
from dataclasses import dataclass, field
from typing import Dict, List, Optional

import numpy as np
import scipy.sparse as sps
from pydantic import BaseModel, Field


@dataclass
class GroupingBlock:
    """Random-intercept grouping: level labels and per-row level codes"""
    name: str
    levels: List[str]
    codes: np.ndarray

    @property
    def n_levels(self) -> int:
        return len(self.levels)

    def counts(self) -> np.ndarray:
        return np.bincount(self.codes, minlength=self.n_levels)


@dataclass
class DesignSystem:
    """Response, fixed-effect design and sparse random-effect indicators"""
    y: np.ndarray
    X: np.ndarray
    column_names: List[str]
    groupings: List[GroupingBlock]
    Z: sps.csc_matrix = field(repr=False)
    row_keys: List[tuple] = field(default_factory=list, repr=False)

    @property
    def n_obs(self) -> int:
        return int(self.y.shape[0])

    @property
    def n_fixed(self) -> int:
        return int(self.X.shape[1])

    @property
    def grouping_names(self) -> List[str]:
        return [g.name for g in self.groupings]

    def block_slices(self) -> List[slice]:
        """Column range of each grouping inside Z"""
        slices, start = [], 0
        for block in self.groupings:
            slices.append(slice(start, start + block.n_levels))
            start += block.n_levels
        return slices


class FixedEffect(BaseModel):
    name: str
    estimate: float
    se: float
    t_statistic: float
    p_value: float
    ci_low: float
    ci_high: float


class VarianceComponent(BaseModel):
    grouping: str
    variance: float = Field(ge=0.0)
    # Variance ratio to the residual variance
    theta: float = Field(ge=0.0)
    boundary: bool = False
    n_levels: int = 0


class RandomIntercept(BaseModel):
    grouping: str
    level: str
    estimate: float
    n_obs: int


class ModelFit(BaseModel):
    """Fixed effects, variance components, ICCs and level predictions"""
    fixed_effects: List[FixedEffect]
    sigma2: float = Field(ge=0.0)
    variance_components: List[VarianceComponent]
    random_intercepts: Dict[str, List[RandomIntercept]]
    icc: Dict[str, float]
    reml_deviance: float
    converged: bool
    n_obs: int
    n_evaluations: int = 0
    log_theta: List[float] = Field(default_factory=list)

    @property
    def beta(self) -> Dict[str, float]:
        return {fe.name: fe.estimate for fe in self.fixed_effects}

    def coefficient(self, name: str) -> FixedEffect:
        for fe in self.fixed_effects:
            if fe.name == name:
                return fe
        raise KeyError(f"No fixed effect named {name!r}")

    def group_variance(self, grouping: str) -> float:
        for vc in self.variance_components:
            if vc.grouping == grouping:
                return vc.variance
        raise KeyError(f"No grouping named {grouping!r}")

    def intercepts(self, grouping: str) -> Dict[str, float]:
        return {ri.level: ri.estimate for ri in self.random_intercepts.get(grouping, [])}


class RankedLevel(BaseModel):
    rank: int
    grouping: str
    level: str
    estimate: float
    position: Optional[str] = None
    n_obs: int = 0
    median: Optional[float] = None
    lower: Optional[float] = None
    upper: Optional[float] = None


__all__ = [
    "GroupingBlock",
    "DesignSystem",
    "FixedEffect",
    "VarianceComponent",
    "RandomIntercept",
    "ModelFit",
    "RankedLevel",
]
