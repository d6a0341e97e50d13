"""
File: data_service.py
Description: Service functions for ingesting observation tables, classifying
             columns as continuous or discretized, and standardizing continuous
             columns to zero mean and unit variance.
"""

import logging
from pathlib import Path
from typing import Dict, List, Optional, Sequence

import numpy as np
import pandas as pd
from pydantic import ValidationError

from disct.core.config import settings
from disct.core.exceptions import DataFormatError, DegenerateColumnError
from disct.schemas.data_schema import ColumnKind, DataMatrix

logger = logging.getLogger(__name__)


def standardize(column: np.ndarray) -> np.ndarray:
    """Center and scale a column to mean 0 and standard deviation 1 (denominator n)."""
    column = np.asarray(column, dtype=np.float64)
    if column.size < 2:
        raise DegenerateColumnError("standardization needs at least 2 values")
    centered = column - column.mean()
    std = np.sqrt(np.mean(centered * centered))
    if not std > 0.0:
        raise DegenerateColumnError("column has zero standard deviation")
    return centered / std


def infer_kind(column: np.ndarray, threshold: Optional[int] = None) -> ColumnKind:
    """A column with at most `threshold` distinct values is treated as discretized."""
    limit = settings.discrete_threshold if threshold is None else threshold
    if np.unique(column).size <= limit:
        return ColumnKind.discretized
    return ColumnKind.continuous


def build_data_matrix(
    values: np.ndarray,
    kinds: Sequence[ColumnKind],
    names: Optional[List[str]] = None,
) -> DataMatrix:
    """Validate a raw table and standardize its continuous columns."""
    values = np.array(values, dtype=np.float64, copy=True)
    if values.ndim != 2 or values.shape[0] == 0 or values.shape[1] == 0:
        raise DataFormatError("empty table")
    for j, kind in enumerate(kinds):
        if kind == ColumnKind.continuous:
            try:
                values[:, j] = standardize(values[:, j])
            except DegenerateColumnError as e:
                label = names[j] if names else j
                raise DegenerateColumnError(f"column {label}: {e.detail}")
    try:
        return DataMatrix(values=values, kinds=list(kinds), names=names or [])
    except ValidationError as e:
        raise DataFormatError(str(e))


def load_csv(
    path: str | Path,
    declared_kinds: Optional[Dict[str, ColumnKind]] = None,
    discrete_threshold: Optional[int] = None,
) -> DataMatrix:
    """Load a header-row CSV into a DataMatrix.

    With `declared_kinds`, named columns take the declared kind and the rest are
    continuous. Without it, every column is classified by `infer_kind`.
    """
    logger.info("Loading observations from %s", path)
    try:
        frame = pd.read_csv(path, encoding="utf-8")
    except pd.errors.EmptyDataError:
        raise DataFormatError(f"{path}: empty table")
    except pd.errors.ParserError as e:
        raise DataFormatError(f"{path}: ragged or malformed rows ({e})")

    if frame.shape[0] == 0 or frame.shape[1] == 0:
        raise DataFormatError(f"{path}: empty table")

    try:
        numeric = frame.apply(pd.to_numeric, errors="raise")
    except (ValueError, TypeError) as e:
        raise DataFormatError(f"{path}: non-numeric cell ({e})")
    if numeric.isna().to_numpy().any():
        raise DataFormatError(f"{path}: missing values or ragged rows")

    names = [str(c) for c in frame.columns]
    values = numeric.to_numpy(dtype=np.float64)

    if declared_kinds is not None:
        unknown = set(declared_kinds) - set(names)
        if unknown:
            raise DataFormatError(f"declared kinds for unknown columns: {sorted(unknown)}")
        kinds = [declared_kinds.get(name, ColumnKind.continuous) for name in names]
    else:
        kinds = [infer_kind(values[:, j], discrete_threshold) for j in range(len(names))]

    logger.info(
        "Loaded n=%d, p=%d (%d discretized)",
        values.shape[0],
        values.shape[1],
        sum(k == ColumnKind.discretized for k in kinds),
    )
    return build_data_matrix(values, kinds, names)


def parse_discrete_cols(flag: Optional[str]) -> Dict[str, ColumnKind]:
    """Translate a `--discrete-cols a,b` flag into a kind declaration."""
    return {
        c.strip(): ColumnKind.discretized for c in (flag or "").split(",") if c.strip()
    }
