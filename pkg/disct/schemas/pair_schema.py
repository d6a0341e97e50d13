"""
File: pair_schema.py
Description: Pydantic schema definitions for single-pair inference: orthant
             arguments, pair kinds, bridge-equation parameter estimates and the
             result of an unconditional independence test.
"""

import math
from enum import Enum
from typing import Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator

from disct.schemas.data_schema import ColumnKind


class OrthantArgs(BaseModel):
    """Thresholds and correlation of a standard bivariate normal upper orthant."""

    h1: float = Field(..., description="First threshold (standardized units)")
    h2: float = Field(..., description="Second threshold (standardized units)")
    rho: float = Field(..., gt=-1.0, lt=1.0, description="Latent correlation")

    model_config = ConfigDict(frozen=True)

    @field_validator("h1", "h2")
    @classmethod
    def _finite(cls, value: float) -> float:
        if not math.isfinite(value):
            raise ValueError("thresholds must be finite")
        return value


class PairKind(str, Enum):
    both_discrete = "both_discrete"
    mixed_continuous_first = "mixed_continuous_first"
    mixed_discrete_first = "mixed_discrete_first"
    both_continuous = "both_continuous"

    @property
    def psi_dim(self) -> int:
        """Number of components of the criterion vector for this pair kind."""
        return 1 if self == PairKind.both_continuous else 3

    def side_kinds(self) -> Tuple[ColumnKind, ColumnKind]:
        c, d = ColumnKind.continuous, ColumnKind.discretized
        return {
            PairKind.both_discrete: (d, d),
            PairKind.mixed_continuous_first: (c, d),
            PairKind.mixed_discrete_first: (d, c),
            PairKind.both_continuous: (c, c),
        }[self]


class PairTheta(BaseModel):
    """Bridge-equation estimates for one pair: σ̂ plus the auxiliary τ̂ and ĥ."""

    kind: PairKind
    sigma_hat: float = Field(..., ge=-1.0, le=1.0)
    h1_hat: float = 0.0
    h2_hat: float = 0.0
    tau1_hat: float = Field(0.0, ge=0.0, le=1.0)
    tau2_hat: float = Field(0.0, ge=0.0, le=1.0)
    tau12_hat: float = Field(0.0, ge=0.0, le=1.0)

    model_config = ConfigDict(frozen=True)


class PairInference(BaseModel):
    """Outcome of the unconditional independence test for one pair."""

    theta: PairTheta
    xi: np.ndarray = Field(..., description="Influence samples, one per observation")
    variance: float = Field(..., ge=0.0, description="Null variance of σ̂ (already / n)")
    z: float
    p_value: float = Field(..., ge=0.0, le=1.0)
    alpha: float = Field(..., gt=0.0, lt=1.0)

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    @property
    def dependent(self) -> bool:
        return self.p_value <= self.alpha
