"""
File: experiment_schema.py
Description: Pydantic schema definitions for the replicate-level experiment
             runner: the configuration grid, per-replicate work items and the
             result rows written to CSV.
"""

from enum import Enum
from typing import List, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

from disct.core.config import settings
from disct.schemas.graph_schema import MetricMode
from disct.schemas.synth_schema import NoiseFamily, Nonlinearity, PairType, ScenarioKind


class TesterName(str, Enum):
    dct = "dct"
    fisherz = "fisherz"
    chisq = "chisq"
    oracle = "oracle"  # d-separation on the known truth graph


# Discovery arm: Fisher-Z on the data before discretization.
FISHERZ_NODIS = "fisherz_nodis"


class ExperimentConfig(BaseModel):
    """Scenario grid plus replicate counts for all experiment runners."""

    tests: List[TesterName] = Field(
        default_factory=lambda: [TesterName.dct, TesterName.fisherz, TesterName.chisq]
    )
    pair_types: List[PairType] = Field(default_factory=lambda: list(PairType))
    n_values: List[int] = Field(default_factory=lambda: [2000])
    cond_dims: List[int] = Field(default_factory=lambda: [1])
    levels: List[int] = Field(default_factory=lambda: [4])
    p_values: List[int] = Field(default_factory=lambda: [8])
    edge_counts: List[int] = Field(
        default_factory=list, description="Empty means p − 1 edges per graph"
    )
    discovery_levels: int = Field(2, ge=2)
    noise: NoiseFamily = NoiseFamily.gaussian
    nonlinearity: Nonlinearity = Nonlinearity.none
    modes: List[MetricMode] = Field(default_factory=lambda: list(MetricMode))
    include_upper_bound: bool = True
    max_depth: Optional[int] = Field(default_factory=lambda: settings.pc_max_depth)
    replicates: int = Field(default_factory=lambda: settings.replicates, ge=1)
    calibration_replicates: int = Field(
        default_factory=lambda: settings.calibration_replicates, ge=1
    )
    discovery_seeds: int = Field(default_factory=lambda: settings.discovery_seeds, ge=1)
    alpha: float = Field(default_factory=lambda: settings.alpha, gt=0.0, lt=1.0)
    base_seed: int = Field(default_factory=lambda: settings.base_seed, ge=0)
    workers: int = Field(default_factory=lambda: settings.workers, ge=1)

    model_config = ConfigDict(frozen=True)

    @model_validator(mode="after")
    def _check_grid(self) -> "ExperimentConfig":
        if any(n < 4 for n in self.n_values):
            raise ValueError("every n must be at least 4")
        if any(d < 1 for d in self.cond_dims):
            raise ValueError("conditioning dimensions must be at least 1")
        if any(k < 2 for k in self.levels):
            raise ValueError("discretization needs at least 2 levels")
        if any(p < 2 for p in self.p_values):
            raise ValueError("discovery graphs need at least 2 nodes")
        return self


class ScenarioCell(BaseModel):
    """One point of the Type I / Type II grid."""

    pair_type: PairType
    n: int
    cond_dim: int
    levels: int

    model_config = ConfigDict(frozen=True)


class ReplicateTask(BaseModel):
    """Everything one worker needs to simulate and test one replicate."""

    test: TesterName
    kind: ScenarioKind
    cell: ScenarioCell
    seed: int
    alpha: float

    model_config = ConfigDict(frozen=True)


class DiscoveryTask(BaseModel):
    p: int
    n: int
    edges: int
    seed_index: int
    seed: int
    config: ExperimentConfig

    model_config = ConfigDict(frozen=True)


class Type1Row(BaseModel):
    model_config = ConfigDict(frozen=True, populate_by_name=True)

    test: str
    pair_type: PairType
    n: int
    cond_dim: int = Field(..., serialization_alias="D")
    levels: int = Field(..., serialization_alias="K")
    rejection_rate: float
    mc_stderr: float
    failures: int = 0


class PowerRow(BaseModel):
    model_config = ConfigDict(frozen=True, populate_by_name=True)

    test: str
    pair_type: PairType
    n: int
    cond_dim: int = Field(..., serialization_alias="D")
    levels: int = Field(..., serialization_alias="K")
    threshold: float
    calibrated_type2_rate: float
    failures: int = 0
    calibration_failures: int = 0


class DiscoveryRow(BaseModel):
    model_config = ConfigDict(frozen=True)

    test: str
    p: int
    n: int
    edges: int
    mode: MetricMode
    f1: Optional[float] = None
    precision: Optional[float] = None
    recall: Optional[float] = None
    shd: Optional[int] = None
    seed: int
    status: str = "ok"


class ChainDemoRow(BaseModel):
    model_config = ConfigDict(frozen=True)

    test: str
    n: int
    replicates: int
    rejection_rate: float
    mc_stderr: float
    failures: int = 0
