"""
File: ci_schema.py
Description: Pydantic schema definitions for conditional-independence testing:
             the assembled latent correlation model of a variable subset and the
             result row of one test.
"""

from typing import List

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from disct.schemas.pair_schema import PairKind


class CovModel(BaseModel):
    """Estimated latent correlation matrix of a variable subset plus influence samples.

    `xi[q, k]` holds the n influence samples of σ̂_{q,k}; the diagonal is zero.
    `sigma_pd` is `sigma_hat` after positive-definiteness repair (identical when
    no repair was needed).
    """

    columns: List[int] = Field(..., description="Original column index of each row")
    sigma_hat: np.ndarray
    sigma_pd: np.ndarray
    xi: np.ndarray
    pair_kinds: List[List[PairKind | None]]
    pd_repaired: bool = False

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    @model_validator(mode="after")
    def _check_consistency(self) -> "CovModel":
        p = len(self.columns)
        if self.sigma_hat.shape != (p, p) or self.sigma_pd.shape != (p, p):
            raise ValueError("covariance shape does not match the subset size")
        if self.xi.ndim != 3 or self.xi.shape[:2] != (p, p):
            raise ValueError("influence tensor must have shape (p, p, n)")
        if not np.allclose(self.sigma_hat, self.sigma_hat.T):
            raise ValueError("covariance must be symmetric")
        if not np.all(np.diag(self.sigma_hat) == 1.0):
            raise ValueError("covariance diagonal must be exactly 1")
        return self

    @property
    def p(self) -> int:
        return len(self.columns)

    @property
    def n(self) -> int:
        return self.xi.shape[2]

    def xi_pair(self, q: int, k: int) -> np.ndarray:
        return self.xi[q, k]


class CiResult(BaseModel):
    """Decision and statistics of one conditional-independence test."""

    i: int
    j: int
    cond_set: List[int] = Field(default_factory=list)
    beta_hat: float
    variance: float = Field(..., ge=0.0)
    z: float
    p_value: float = Field(..., ge=0.0, le=1.0)
    alpha: float = Field(..., gt=0.0, lt=1.0)
    pd_repaired: bool = False

    model_config = ConfigDict(frozen=True)

    @property
    def independent(self) -> bool:
        return self.p_value > self.alpha
