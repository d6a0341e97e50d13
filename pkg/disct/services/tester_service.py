"""
File: tester_service.py
Description: Service functions for the conditional-independence testers the PC
             search can plug in: the discretization-aware DCT test, the Fisher-Z
             partial-correlation baseline, the stratified chi-square baseline for
             discrete data, and a d-separation oracle on a known graph.
"""

import logging
from typing import Optional, Protocol, Sequence

import networkx as nx
import numpy as np
from scipy import stats

from disct.core.exceptions import (
    DegenerateStrataError,
    InsufficientSamplesError,
    NonDiscreteColumnError,
    SingularCovarianceError,
)
from disct.schemas.data_schema import DataMatrix
from disct.schemas.experiment_schema import TesterName
from disct.schemas.graph_schema import Graph
from disct.services.ci_service import SINGULAR_FLOOR, dct_test
from disct.services.pair_service import two_sided_p_value

logger = logging.getLogger(__name__)

CORRELATION_CLIP = 1.0 - 1e-12


class CiTester(Protocol):
    name: str

    def test(
        self, data: DataMatrix, i: int, j: int, cond_set: Sequence[int], alpha: float
    ) -> float: ...


def fisher_z(
    data: DataMatrix, i: int, j: int, cond_set: Sequence[int] = (), alpha: float = 0.05
) -> float:
    """p-value of the partial correlation of columns i, j given cond_set."""
    cond_set = list(cond_set)
    n = data.n
    if n <= len(cond_set) + 3:
        raise InsufficientSamplesError(
            f"Fisher-Z needs n > |S| + 3, got n={n}, |S|={len(cond_set)}"
        )

    corr = np.corrcoef(data.values[:, [i, j, *cond_set]], rowvar=False)
    if not np.all(np.isfinite(corr)):
        raise SingularCovarianceError("correlation matrix has a constant column")
    if cond_set:
        if np.linalg.eigvalsh(corr).min() < SINGULAR_FLOOR:
            raise SingularCovarianceError(
                f"correlation matrix of {[i, j, *cond_set]} is singular"
            )
        precision = np.linalg.inv(corr)
        r = -precision[0, 1] / np.sqrt(precision[0, 0] * precision[1, 1])
    else:
        r = corr[0, 1]

    r = float(np.clip(r, -CORRELATION_CLIP, CORRELATION_CLIP))
    z = np.sqrt(n - len(cond_set) - 3) * np.arctanh(r)
    return two_sided_p_value(z)


def chi_square(
    data: DataMatrix, i: int, j: int, cond_set: Sequence[int] = (), alpha: float = 0.05
) -> float:
    """Stratified Pearson chi-square test; degenerate strata are skipped."""
    cond_set = list(cond_set)
    for col in [i, j, *cond_set]:
        if not data.is_discrete(col):
            raise NonDiscreteColumnError(
                f"chi-square needs discretized columns, {data.names[col]} is continuous"
            )

    x_levels, x_codes = np.unique(data.column(i), return_inverse=True)
    y_levels, y_codes = np.unique(data.column(j), return_inverse=True)
    if cond_set:
        _, strata = np.unique(data.values[:, cond_set], axis=0, return_inverse=True)
        strata = np.asarray(strata).ravel()
    else:
        strata = np.zeros(data.n, dtype=int)

    statistic, dof, skipped = 0.0, 0, 0
    for stratum in np.unique(strata):
        mask = strata == stratum
        table = np.zeros((x_levels.size, y_levels.size))
        np.add.at(table, (x_codes[mask], y_codes[mask]), 1.0)
        table = table[table.sum(axis=1) > 0][:, table.sum(axis=0) > 0]
        if table.shape[0] < 2 or table.shape[1] < 2:
            skipped += 1
            continue
        chi2, _, stratum_dof, _ = stats.chi2_contingency(table, correction=False)
        statistic += float(chi2)
        dof += int(stratum_dof)

    if dof == 0:
        raise DegenerateStrataError(
            f"every stratum of {data.names[i]}~{data.names[j]} | {cond_set} is degenerate"
        )
    if skipped:
        logger.debug("Chi-square %d~%d | %s: skipped %d degenerate strata", i, j, cond_set, skipped)
    return float(stats.chi2.sf(statistic, dof))


class DctTester:
    name = TesterName.dct.value

    def test(self, data, i, j, cond_set, alpha):
        return dct_test(data, i, j, cond_set, alpha).p_value


class FisherZTester:
    name = TesterName.fisherz.value

    def test(self, data, i, j, cond_set, alpha):
        return fisher_z(data, i, j, cond_set, alpha)


class ChiSquareTester:
    name = TesterName.chisq.value

    def test(self, data, i, j, cond_set, alpha):
        return chi_square(data, i, j, cond_set, alpha)


class DSeparationOracle:
    """Returns 1.0 when i and j are d-separated by cond_set in `truth`, else 0.0."""

    name = TesterName.oracle.value

    def __init__(self, truth: Graph):
        self.truth = truth
        self._graph = truth.to_networkx()

    def test(self, data, i, j, cond_set, alpha):
        separated = nx.is_d_separator(self._graph, {i}, {j}, set(cond_set))
        return 1.0 if separated else 0.0


def build_tester(name: TesterName | str, truth: Optional[Graph] = None) -> CiTester:
    """Tester for a CLI/config name; the oracle needs the truth graph."""
    name = TesterName(name)
    if name == TesterName.dct:
        return DctTester()
    if name == TesterName.fisherz:
        return FisherZTester()
    if name == TesterName.chisq:
        return ChiSquareTester()
    if truth is None:
        raise ValueError("the d-separation oracle needs a truth graph")
    return DSeparationOracle(truth)
