# tests/conftest.py

from typing import Tuple

import numpy as np
import pytest

from disct.schemas.data_schema import ColumnKind, DataMatrix
from disct.services.data_service import build_data_matrix


def latent_pair(n: int, sigma: float, seed: int) -> Tuple[np.ndarray, np.ndarray]:
    """Standard bivariate normal sample with correlation sigma."""
    rng = np.random.default_rng(seed)
    z = rng.standard_normal((n, 2))
    x1 = z[:, 0]
    x2 = sigma * z[:, 0] + np.sqrt(1.0 - sigma**2) * z[:, 1]
    return x1, x2


def binarize(column: np.ndarray, cut: float = 0.0) -> np.ndarray:
    return 1.0 + (column > cut)


def make_pair_data(
    n: int, sigma: float, seed: int, discrete: Tuple[bool, bool], cuts=(0.3, -0.4)
) -> DataMatrix:
    x1, x2 = latent_pair(n, sigma, seed)
    columns, kinds = [], []
    for x, cut, is_discrete in zip((x1, x2), cuts, discrete):
        columns.append(binarize(x, cut) if is_discrete else x)
        kinds.append(ColumnKind.discretized if is_discrete else ColumnKind.continuous)
    return build_data_matrix(np.column_stack(columns), kinds, ["A", "B"])


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


@pytest.fixture
def mixed_table(rng):
    """n=400 table: two continuous columns, one 3-level and one binary column."""
    latent = rng.multivariate_normal(
        np.zeros(4),
        [
            [1.0, 0.4, 0.3, 0.2],
            [0.4, 1.0, 0.25, 0.1],
            [0.3, 0.25, 1.0, 0.3],
            [0.2, 0.1, 0.3, 1.0],
        ],
        size=400,
    )
    values = latent.copy()
    values[:, 2] = 1.0 + np.searchsorted([-0.5, 0.6], latent[:, 2])
    values[:, 3] = binarize(latent[:, 3], 0.2)
    kinds = [
        ColumnKind.continuous,
        ColumnKind.continuous,
        ColumnKind.discretized,
        ColumnKind.discretized,
    ]
    return build_data_matrix(values, kinds, ["A", "B", "C", "D"])
