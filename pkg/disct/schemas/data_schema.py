"""
File: data_schema.py
Description: Pydantic schema for observation tables: per-column kinds and the
             immutable n×p sample matrix every test consumes.
"""

from enum import Enum
from typing import List

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator


class ColumnKind(str, Enum):
    continuous = "continuous"
    discretized = "discretized"


class DataMatrix(BaseModel):
    """An n×p table of observations with one ColumnKind per column."""

    values: np.ndarray = Field(..., description="n×p sample table")
    kinds: List[ColumnKind] = Field(..., description="Kind of each column")
    names: List[str] = Field(default_factory=list, description="Column names")

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    @model_validator(mode="before")
    @classmethod
    def _coerce_values(cls, data):
        if isinstance(data, dict) and "values" in data:
            values = np.array(data["values"], dtype=np.float64, copy=True)
            if values.ndim == 1:
                values = values[:, None]
            values.setflags(write=False)
            data = {**data, "values": values}
            if not data.get("names") and values.ndim == 2:
                data["names"] = [f"X{j}" for j in range(values.shape[1])]
        return data

    @model_validator(mode="after")
    def _check_shape(self) -> "DataMatrix":
        if self.values.ndim != 2:
            raise ValueError("values must be a 2-D table")
        n, p = self.values.shape
        if n < 2 or p < 1:
            raise ValueError(f"need n >= 2 and p >= 1, got n={n}, p={p}")
        if len(self.kinds) != p:
            raise ValueError(f"{len(self.kinds)} kinds given for {p} columns")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("missing or non-finite values are not supported")
        if self.names and len(self.names) != p:
            raise ValueError(f"{len(self.names)} names given for {p} columns")
        for j, kind in enumerate(self.kinds):
            if kind == ColumnKind.discretized and np.unique(self.values[:, j]).size < 2:
                raise ValueError(
                    f"discretized column {self.names[j]} needs at least 2 levels"
                )
        return self

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def p(self) -> int:
        return self.values.shape[1]

    def column(self, j: int) -> np.ndarray:
        return self.values[:, j]

    def is_discrete(self, j: int) -> bool:
        return self.kinds[j] == ColumnKind.discretized

    def index_of(self, name: str) -> int:
        """Resolve a column name (or a bare integer index) to its position."""
        if name in self.names:
            return self.names.index(name)
        if name.isdigit() and int(name) < self.p:
            return int(name)
        raise KeyError(f"unknown column {name!r}")

    def select(self, columns: List[int]) -> "DataMatrix":
        """Return a new DataMatrix restricted to (and ordered by) `columns`."""
        return DataMatrix(
            values=self.values[:, columns],
            kinds=[self.kinds[j] for j in columns],
            names=[self.names[j] for j in columns],
        )
