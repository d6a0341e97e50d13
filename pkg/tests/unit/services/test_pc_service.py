from itertools import combinations

import numpy as np
import pytest

from disct.core.exceptions import (
    InsufficientSamplesError,
    PairEstimationError,
    SingularJacobianError,
)
from disct.schemas.data_schema import ColumnKind, DataMatrix
from disct.schemas.graph_schema import Graph, MetricMode
from disct.schemas.synth_schema import DiscretizeSpec
from disct.services.metrics_service import structure_metrics
from disct.services.pc_service import orient, pc_skeleton, run_pc
from disct.services.synth_service import discretize, gen_dag_bp, make_sem_spec, sample_sem
from disct.services.tester_service import DctTester, DSeparationOracle, FisherZTester


def _placeholder(p, n=10):
    """The oracle never reads the data; PC only needs p."""
    values = np.random.default_rng(p).standard_normal((n, p))
    return DataMatrix(values=values, kinds=[ColumnKind.continuous] * p)


def _v_structures(graph):
    found = set()
    for k in range(graph.p):
        parents = graph.parents(k)
        for a, b in combinations(parents, 2):
            if (a, b) not in graph.skeleton() and (b, a) not in graph.skeleton():
                found.add((a, k, b))
    return found


class _Constant:
    name = "constant"

    def __init__(self, p_value):
        self.p_value = p_value
        self.calls = []

    def test(self, data, i, j, cond_set, alpha):
        self.calls.append((i, j, tuple(cond_set)))
        return self.p_value


def test_chain_recovers_skeleton_and_sepset():
    truth = Graph.from_edge_list(3, [(0, 1), (1, 2)])
    skeleton, sepsets = pc_skeleton(_placeholder(3), DSeparationOracle(truth))
    assert skeleton.undirected == {(0, 1), (1, 2)}
    assert sepsets == {(0, 2): (1,)}


def test_collider_is_oriented():
    truth = Graph.from_edge_list(3, [(0, 2), (1, 2)])
    skeleton, dag = run_pc(_placeholder(3), DSeparationOracle(truth))
    assert skeleton.undirected == {(0, 2), (1, 2)}
    assert dag.directed == truth.directed


def test_meek_rule_one_propagates_collider():
    truth = Graph.from_edge_list(4, [(0, 2), (1, 2), (2, 3)])
    _, dag = run_pc(_placeholder(4), DSeparationOracle(truth))
    assert dag.directed == truth.directed


def test_orient_unshielded_collider():
    skeleton = Graph(p=3, undirected={(0, 1), (1, 2)})
    dag = orient(skeleton, {(0, 2): ()})
    assert dag.directed == {(0, 1), (2, 1)}


def test_orient_non_collider_keeps_skeleton():
    skeleton = Graph(p=3, undirected={(0, 1), (1, 2)})
    dag = orient(skeleton, {(0, 2): (1,)})
    assert dag.is_dag()
    assert dag.skeleton() == {(0, 1), (1, 2)}
    assert _v_structures(dag) == set()


def test_conflicting_colliders_keep_first_orientation(mocker):
    capture = mocker.patch("disct.services.pc_service.capture_message")
    skeleton = Graph(p=4, undirected={(0, 1), (1, 2), (2, 3)})
    dag = orient(skeleton, {(0, 2): (), (1, 3): (), (0, 3): ()})
    assert dag.directed == {(0, 1), (2, 1), (3, 2)}
    capture.assert_called()


@pytest.mark.parametrize("seed", range(50))
def test_oracle_pc_on_random_dags(seed):
    rng = np.random.default_rng(seed)
    p = int(rng.integers(2, 8))
    truth = gen_dag_bp(p, int(rng.integers(0, p * (p - 1) // 2 + 1)), seed)
    skeleton, dag = run_pc(_placeholder(p), DSeparationOracle(truth))

    assert structure_metrics(skeleton, truth, MetricMode.skeleton).shd == 0
    assert dag.is_dag()
    assert dag.skeleton() == truth.skeleton()
    assert _v_structures(dag) == _v_structures(truth)


def test_always_independent_tester_empties_graph():
    skeleton, sepsets = pc_skeleton(_placeholder(4), _Constant(1.0))
    assert skeleton.undirected == set()
    assert set(sepsets.values()) == {()}
    assert len(sepsets) == 6


def test_always_dependent_tester_gives_complete_dag():
    skeleton, dag = run_pc(_placeholder(4), _Constant(0.0))
    assert len(skeleton.undirected) == 6
    assert dag.is_dag()
    assert len(dag.directed) == 6


def test_max_depth_limits_conditioning():
    truth = Graph.from_edge_list(3, [(0, 1), (1, 2)])
    skeleton, sepsets = pc_skeleton(_placeholder(3), DSeparationOracle(truth), max_depth=0)
    assert len(skeleton.undirected) == 3
    assert sepsets == {}


def test_visit_order_is_ascending_and_lexicographic():
    tester = _Constant(0.0)
    pc_skeleton(_placeholder(4), tester, max_depth=2)
    depth_zero = [call for call in tester.calls if not call[2]]
    assert depth_zero[:3] == [(0, 1, ()), (0, 2, ()), (0, 3, ())]
    given_for_0_1 = [call[2] for call in tester.calls if call[:2] == (0, 1)]
    assert given_for_0_1 == [(), (2,), (3,), (2, 3)]


def test_tester_failure_names_the_pair(mocker):
    tester = mocker.Mock()
    tester.name = "dct"
    tester.test.side_effect = InsufficientSamplesError("too few rows")
    with pytest.raises(PairEstimationError) as exc:
        pc_skeleton(_placeholder(3), tester)
    assert exc.value.pair == (0, 1)
    assert exc.value.__cause__ is not None


def test_degenerate_estimate_keeps_the_edge(mocker):
    capture = mocker.patch("disct.services.pc_service.capture_message")
    tester = mocker.Mock()
    tester.name = "dct"
    tester.test.side_effect = SingularJacobianError("bridge derivative vanishes")
    skeleton, sepsets = pc_skeleton(_placeholder(3), tester, max_depth=0)
    assert skeleton.undirected == {(0, 1), (0, 2), (1, 2)}
    assert sepsets == {}
    capture.assert_called()


def test_wrapped_degenerate_estimate_keeps_the_edge(mocker):
    mocker.patch("disct.services.pc_service.capture_message")
    wrapped = PairEstimationError("pair 0~1 failed", (0, 1))
    wrapped.__cause__ = SingularJacobianError("bridge derivative vanishes")
    tester = mocker.Mock()
    tester.name = "dct"
    tester.test.side_effect = wrapped
    skeleton, _ = pc_skeleton(_placeholder(2), tester)
    assert skeleton.undirected == {(0, 1)}


def _chain_table(discretized):
    truth = Graph.from_edge_list(5, [(0, 1), (1, 2), (2, 3), (1, 4)])
    data = sample_sem(make_sem_spec(truth, seed=7), 2000)
    if discretized:
        data = discretize(data, [1, 3], DiscretizeSpec(levels=3), seed=7)
    return data


@pytest.mark.parametrize(
    "tester, discretized", [(FisherZTester(), False), (DctTester(), True)]
)
def test_skeleton_ignores_row_order(tester, discretized):
    data = _chain_table(discretized)
    order = np.random.default_rng(11).permutation(data.n)
    shuffled = DataMatrix(values=data.values[order], kinds=data.kinds, names=data.names)

    original, original_sepsets = pc_skeleton(data, tester)
    permuted, permuted_sepsets = pc_skeleton(shuffled, tester)
    assert permuted.undirected == original.undirected
    assert permuted_sepsets == original_sepsets
