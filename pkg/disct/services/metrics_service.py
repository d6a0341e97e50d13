"""
File: metrics_service.py
Description: Service functions comparing an estimated graph with the truth:
             precision, recall, F1 and structural Hamming distance on either the
             skeleton or the oriented edges.
"""

from typing import Dict, Set, Tuple

from disct.core.exceptions import NodeCountMismatchError
from disct.schemas.graph_schema import Edge, Graph, MetricMode, StructureMetrics


def _marks(graph: Graph) -> Dict[Edge, Tuple[int, int] | None]:
    """Unordered pair -> (tail, head), or None for an undirected edge."""
    marks: Dict[Edge, Tuple[int, int] | None] = {}
    for a, b in graph.directed:
        marks[(min(a, b), max(a, b))] = (a, b)
    for edge in graph.undirected:
        marks[edge] = None
    return marks


def _scores(tp: int, n_est: int, n_true: int) -> Tuple[float, float, float]:
    if n_est == 0 and n_true == 0:
        return 1.0, 1.0, 1.0
    precision = tp / n_est if n_est else 0.0
    recall = tp / n_true if n_true else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall > 0 else 0.0
    return precision, recall, f1


def structure_metrics(estimated: Graph, truth: Graph, mode: MetricMode) -> StructureMetrics:
    """Compare graphs. In DAG mode a reversed edge counts 1 towards SHD and is
    not a true positive; an undirected edge is never a true positive."""
    if estimated.p != truth.p:
        raise NodeCountMismatchError(
            f"estimated graph has {estimated.p} nodes, truth has {truth.p}"
        )
    mode = MetricMode(mode)

    if mode == MetricMode.skeleton:
        est: Set[Edge] = estimated.skeleton()
        true: Set[Edge] = truth.skeleton()
        tp = len(est & true)
        shd = len(est ^ true)
        n_est, n_true = len(est), len(true)
    else:
        est_marks, true_marks = _marks(estimated), _marks(truth)
        tp = sum(
            1
            for pair, mark in est_marks.items()
            if mark is not None and true_marks.get(pair) == mark
        )
        shd = len(set(est_marks) ^ set(true_marks)) + sum(
            1
            for pair in set(est_marks) & set(true_marks)
            if est_marks[pair] != true_marks[pair]
        )
        n_est, n_true = len(est_marks), len(true_marks)

    precision, recall, f1 = _scores(tp, n_est, n_true)
    return StructureMetrics(mode=mode, f1=f1, precision=precision, recall=recall, shd=shd)
