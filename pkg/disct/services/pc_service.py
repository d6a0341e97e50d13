"""
File: pc_service.py
Description: Service functions for constraint-based causal discovery: the stable
             PC skeleton search over a pluggable CI tester, collider orientation,
             Meek rules and the Dor-Tarsi extension of the resulting CPDAG to a DAG.
"""

import logging
from itertools import combinations
from typing import Dict, List, Optional, Set, Tuple

import numpy as np
from sentry_sdk import capture_message

from disct.core.exceptions import DegenerateEstimateError, DisctError, PairEstimationError
from disct.schemas.data_schema import DataMatrix
from disct.schemas.graph_schema import Edge, Graph
from disct.services.tester_service import CiTester

logger = logging.getLogger(__name__)

SepSets = Dict[Edge, Tuple[int, ...]]


def _key(a: int, b: int) -> Edge:
    return (min(a, b), max(a, b))


def _is_degenerate(error: DisctError) -> bool:
    if isinstance(error, PairEstimationError):
        return error.degenerate
    return isinstance(error, DegenerateEstimateError)


def _p_value(
    tester: CiTester, data: DataMatrix, i: int, j: int, cond_set: List[int], alpha: float
) -> float:
    """Tester p-value; a degenerate estimate counts as dependence so the edge stays."""
    try:
        return tester.test(data, i, j, cond_set, alpha)
    except DisctError as e:
        if not _is_degenerate(e):
            raise PairEstimationError(
                f"{tester.name} test given {cond_set} failed: {e.detail}", (i, j)
            ) from e
        logger.warning(
            "%s test %d~%d given %s is degenerate (%s); keeping the edge",
            tester.name, i, j, cond_set, e.detail,
        )
        capture_message(f"Degenerate {tester.name} test kept edge {i}-{j}", level="warning")
        return 0.0


def pc_skeleton(
    data: DataMatrix,
    tester: CiTester,
    alpha: float = 0.05,
    max_depth: Optional[int] = None,
) -> Tuple[Graph, SepSets]:
    """Stable PC skeleton search.

    Adjacency sets are snapshotted at the start of every depth; pairs are
    visited in ascending node order and conditioning sets in lexicographic
    order. An edge is removed on the first p-value above alpha and its
    separating set is recorded under the (low, high) key.
    """
    p = data.p
    if p < 2:
        raise ValueError("PC needs at least 2 variables")

    adjacency = np.ones((p, p), dtype=bool)
    np.fill_diagonal(adjacency, False)
    sepsets: SepSets = {}
    depth = 0

    while max_depth is None or depth <= max_depth:
        snapshot = {i: [int(v) for v in np.flatnonzero(adjacency[i])] for i in range(p)}
        if all(len(snapshot[i]) - 1 < depth for i in range(p)):
            break
        logger.info("PC depth %d: %d edges remain", depth, int(adjacency.sum()) // 2)

        for i in range(p):
            for j in snapshot[i]:
                if not adjacency[i, j]:
                    continue
                candidates = [k for k in snapshot[i] if k != j]
                if len(candidates) < depth:
                    continue
                for cond_set in combinations(candidates, depth):
                    p_value = _p_value(tester, data, i, j, list(cond_set), alpha)
                    if p_value > alpha:
                        adjacency[i, j] = adjacency[j, i] = False
                        sepsets[_key(i, j)] = tuple(cond_set)
                        logger.debug("Removed %d-%d given %s (p=%.4g)", i, j, cond_set, p_value)
                        break
        depth += 1

    edges = {(i, j) for i in range(p) for j in range(i + 1, p) if adjacency[i, j]}
    return Graph(p=p, undirected=edges), sepsets


class _PartialDag:
    """Mutable PDAG used while orienting."""

    def __init__(self, skeleton: Graph):
        self.p = skeleton.p
        self.directed: Set[Edge] = set(skeleton.directed)
        self.undirected: Set[Edge] = set(skeleton.undirected)

    def adjacent(self, a: int, b: int) -> bool:
        return (a, b) in self.directed or (b, a) in self.directed or _key(a, b) in self.undirected

    def is_undirected(self, a: int, b: int) -> bool:
        return _key(a, b) in self.undirected

    def neighbours(self, a: int) -> List[int]:
        return [b for b in range(self.p) if b != a and self.adjacent(a, b)]

    def orient(self, a: int, b: int) -> None:
        self.undirected.discard(_key(a, b))
        self.directed.add((a, b))


def _orient_colliders(pdag: _PartialDag, sepsets: SepSets) -> None:
    for k in range(pdag.p):
        for i, j in combinations(pdag.neighbours(k), 2):
            if pdag.adjacent(i, j) or k in sepsets.get(_key(i, j), ()):
                continue
            for a in (i, j):
                if (k, a) in pdag.directed:
                    logger.warning(
                        "Collider %d->%d<-%d conflicts with existing %d->%d; keeping the first",
                        i, k, j, k, a,
                    )
                    capture_message(f"Collider conflict at node {k}", level="warning")
                elif pdag.is_undirected(a, k):
                    pdag.orient(a, k)


def _apply_meek_rules(pdag: _PartialDag) -> None:
    changed = True
    while changed:
        changed = False
        for a, b in sorted(pdag.undirected):
            for x, y in ((a, b), (b, a)):
                if not pdag.is_undirected(x, y):
                    break
                others = [c for c in range(pdag.p) if c not in (x, y)]
                # R1: c -> x - y, c not adjacent to y
                r1 = any((c, x) in pdag.directed and not pdag.adjacent(c, y) for c in others)
                # R2: x -> c -> y
                r2 = any((x, c) in pdag.directed and (c, y) in pdag.directed for c in others)
                # R3: x - c -> y, x - d -> y, c and d not adjacent
                middles = [
                    c for c in others if pdag.is_undirected(x, c) and (c, y) in pdag.directed
                ]
                r3 = any(not pdag.adjacent(c, d) for c, d in combinations(middles, 2))
                if r1 or r2 or r3:
                    pdag.orient(x, y)
                    changed = True


def _extend_to_dag(pdag: _PartialDag) -> Set[Edge]:
    """Dor-Tarsi: repeatedly remove a sink whose undirected neighbours are
    adjacent to all its other neighbours, pointing its remaining edges into it."""
    remaining = set(range(pdag.p))
    result: Set[Edge] = set()

    def _eligible(x: int) -> bool:
        if any((x, y) in pdag.directed for y in remaining):
            return False
        neighbours = [y for y in pdag.neighbours(x) if y in remaining]
        for y in neighbours:
            if pdag.is_undirected(x, y) and any(
                z != y and not pdag.adjacent(y, z) for z in neighbours
            ):
                return False
        return True

    while remaining:
        sink = next((x for x in sorted(remaining) if _eligible(x)), None)
        if sink is None:
            sink = min(remaining)
            logger.warning("CPDAG has no consistent extension; forcing node %d as sink", sink)
            capture_message("CPDAG extension fell back to a forced sink", level="warning")
        for y in pdag.neighbours(sink):
            if y in remaining:
                result.add((y, sink))
        remaining.discard(sink)
    return result


def orient(skeleton: Graph, sepsets: SepSets) -> Graph:
    """Orient a PC skeleton into a DAG: colliders, Meek closure, DAG extension."""
    pdag = _PartialDag(skeleton)
    _orient_colliders(pdag, sepsets)
    _apply_meek_rules(pdag)
    logger.debug(
        "CPDAG: %d directed, %d undirected edges", len(pdag.directed), len(pdag.undirected)
    )
    return Graph(p=skeleton.p, directed=_extend_to_dag(pdag))


def run_pc(
    data: DataMatrix,
    tester: CiTester,
    alpha: float = 0.05,
    max_depth: Optional[int] = None,
) -> Tuple[Graph, Graph]:
    """Skeleton and oriented DAG in one call."""
    skeleton, sepsets = pc_skeleton(data, tester, alpha, max_depth)
    return skeleton, orient(skeleton, sepsets)
