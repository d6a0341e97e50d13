import pytest

from disct.core.exceptions import NodeCountMismatchError
from disct.schemas.graph_schema import Graph, MetricMode
from disct.services.metrics_service import structure_metrics

CHAIN = Graph.from_edge_list(3, [(0, 1), (1, 2)])


@pytest.mark.parametrize("mode", list(MetricMode))
def test_identical_graphs(mode):
    metrics = structure_metrics(CHAIN, CHAIN, mode)
    assert (metrics.f1, metrics.precision, metrics.recall, metrics.shd) == (1.0, 1.0, 1.0, 0)


def test_complete_skeleton_against_chain():
    complete = Graph(p=3, undirected={(0, 1), (0, 2), (1, 2)})
    metrics = structure_metrics(complete, CHAIN, MetricMode.skeleton)
    assert metrics.precision == pytest.approx(2 / 3)
    assert metrics.recall == 1.0
    assert metrics.f1 == pytest.approx(0.8)
    assert metrics.shd == 1


def test_reversed_edge_counts_once():
    estimated = Graph.from_edge_list(3, [(1, 0), (1, 2)])
    metrics = structure_metrics(estimated, CHAIN, MetricMode.dag)
    assert metrics.precision == 0.5
    assert metrics.recall == 0.5
    assert metrics.shd == 1
    assert structure_metrics(estimated, CHAIN, MetricMode.skeleton).shd == 0


def test_undirected_edge_is_never_a_true_positive():
    estimated = Graph(p=3, undirected={(0, 1)}, directed={(1, 2)})
    metrics = structure_metrics(estimated, CHAIN, MetricMode.dag)
    assert metrics.precision == 0.5
    assert metrics.shd == 1
    assert structure_metrics(estimated, CHAIN, MetricMode.skeleton).f1 == 1.0


def test_missing_and_extra_edges():
    estimated = Graph.from_edge_list(3, [(0, 1), (0, 2)])
    metrics = structure_metrics(estimated, CHAIN, MetricMode.dag)
    assert metrics.shd == 2
    assert metrics.f1 == 0.5


def test_both_empty_is_perfect():
    metrics = structure_metrics(Graph.empty(4), Graph.empty(4), MetricMode.dag)
    assert (metrics.f1, metrics.shd) == (1.0, 0)


def test_empty_estimate_of_nonempty_truth():
    metrics = structure_metrics(Graph.empty(3), CHAIN, MetricMode.skeleton)
    assert (metrics.precision, metrics.recall, metrics.f1, metrics.shd) == (0.0, 0.0, 0.0, 2)


def test_node_count_mismatch():
    with pytest.raises(NodeCountMismatchError):
        structure_metrics(Graph.empty(4), CHAIN, MetricMode.dag)
