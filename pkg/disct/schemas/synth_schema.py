"""
File: synth_schema.py
Description: Pydantic schema definitions for synthetic data generation: linear
             (optionally nonlinear) SEMs on DAGs, discretization operators and the
             conditional-independence scenarios used by the experiments.
"""

from enum import Enum
from typing import Dict, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator

from disct.schemas.graph_schema import Graph


class NoiseFamily(str, Enum):
    gaussian = "gaussian"
    student_t3 = "student_t3"
    uniform = "uniform"
    exponential = "exponential"
    shifted_gaussian = "shifted_gaussian"  # per-node mean U(-2, 2), variance U(0, 3)


class Nonlinearity(str, Enum):
    none = "none"
    sin = "sin"
    cube = "cube"
    tanh = "tanh"
    relu = "relu"
    random = "random"  # one function per node drawn from the four above


class MonotoneTransform(str, Enum):
    identity = "identity"
    exp = "exp"
    cube = "cube"


class ScenarioKind(str, Enum):
    null = "null"
    alt = "alt"


class PairType(str, Enum):
    """Observation type of the tested pair (Y, W); conditioning columns are always discretized."""

    continuous = "continuous"
    mixed = "mixed"
    discrete = "discrete"


class SemSpec(BaseModel):
    dag: Graph
    weights: Dict[Tuple[int, int], float] = Field(default_factory=dict)
    noise: NoiseFamily = NoiseFamily.gaussian
    nonlinearity: Nonlinearity = Nonlinearity.none
    seed: int = Field(0, ge=0)

    model_config = ConfigDict(frozen=True)

    @model_validator(mode="after")
    def _check_dag(self) -> "SemSpec":
        if not self.dag.is_dag():
            raise ValueError("SEM graph must be a DAG")
        missing = self.dag.directed - set(self.weights)
        if missing:
            raise ValueError(f"missing weights for edges {sorted(missing)}")
        return self


class DiscretizeSpec(BaseModel):
    """K-level thresholding after a monotone transform.

    `boundaries` maps column index to its K−1 sorted cut points (on the
    transformed scale); None draws them uniformly from each column's range.
    """

    levels: int = Field(2, ge=2)
    boundaries: Optional[Dict[int, List[float]]] = None
    monotone_g: MonotoneTransform = MonotoneTransform.identity

    model_config = ConfigDict(frozen=True)

    @model_validator(mode="after")
    def _check_boundaries(self) -> "DiscretizeSpec":
        for column, cuts in (self.boundaries or {}).items():
            if len(cuts) != self.levels - 1:
                raise ValueError(
                    f"column {column}: {len(cuts)} boundaries given for {self.levels} levels"
                )
            if any(b <= a for a, b in zip(cuts, cuts[1:])):
                raise ValueError(f"column {column}: boundaries must be strictly increasing")
        return self
