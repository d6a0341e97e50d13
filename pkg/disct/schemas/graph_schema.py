"""
File: graph_schema.py
Description: Pydantic schema definitions for graphs over p nodes (truth DAGs,
             PC skeletons, CPDAGs and their DAG extensions) and for structure
             comparison metrics.
"""

from enum import Enum
from typing import Iterable, List, Set, Tuple

import networkx as nx
import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

Edge = Tuple[int, int]


class MetricMode(str, Enum):
    skeleton = "skeleton"
    dag = "dag"


class Graph(BaseModel):
    """Mixed graph: `directed` holds (tail, head), `undirected` holds (low, high)."""

    p: int = Field(..., ge=1, description="Number of nodes")
    directed: Set[Edge] = Field(default_factory=set)
    undirected: Set[Edge] = Field(default_factory=set)

    model_config = ConfigDict(frozen=True)

    @field_validator("undirected", mode="after")
    @classmethod
    def _sort_undirected(cls, edges: Set[Edge]) -> Set[Edge]:
        return {(min(a, b), max(a, b)) for a, b in edges}

    @model_validator(mode="after")
    def _check_edges(self) -> "Graph":
        seen: Set[Edge] = set()
        for a, b in list(self.directed) + list(self.undirected):
            if a == b:
                raise ValueError(f"self-loop on node {a}")
            if not (0 <= a < self.p and 0 <= b < self.p):
                raise ValueError(f"edge ({a}, {b}) out of range for p={self.p}")
            key = (min(a, b), max(a, b))
            if key in seen:
                raise ValueError(f"more than one edge between {key[0]} and {key[1]}")
            seen.add(key)
        return self

    @classmethod
    def empty(cls, p: int) -> "Graph":
        return cls(p=p)

    @classmethod
    def from_adjacency(cls, matrix: np.ndarray) -> "Graph":
        """A[i, j] = A[j, i] = 1 is undirected; A[i, j] = 1 alone is i → j."""
        matrix = np.asarray(matrix)
        p = matrix.shape[0]
        directed, undirected = set(), set()
        for i in range(p):
            for j in range(i + 1, p):
                if matrix[i, j] and matrix[j, i]:
                    undirected.add((i, j))
                elif matrix[i, j]:
                    directed.add((i, j))
                elif matrix[j, i]:
                    directed.add((j, i))
        return cls(p=p, directed=directed, undirected=undirected)

    @classmethod
    def from_edge_list(cls, p: int, edges: Iterable[Edge]) -> "Graph":
        return cls(p=p, directed={(int(a), int(b)) for a, b in edges})

    def adjacency(self) -> np.ndarray:
        matrix = np.zeros((self.p, self.p), dtype=int)
        for a, b in self.directed:
            matrix[a, b] = 1
        for a, b in self.undirected:
            matrix[a, b] = matrix[b, a] = 1
        return matrix

    def skeleton_adjacency(self) -> np.ndarray:
        matrix = self.adjacency()
        return np.maximum(matrix, matrix.T)

    def skeleton(self) -> Set[Edge]:
        return {(min(a, b), max(a, b)) for a, b in self.directed} | set(self.undirected)

    def to_networkx(self) -> nx.DiGraph:
        """Directed part as a networkx DiGraph over all p nodes."""
        graph = nx.DiGraph()
        graph.add_nodes_from(range(self.p))
        graph.add_edges_from(self.directed)
        return graph

    def is_dag(self) -> bool:
        return not self.undirected and nx.is_directed_acyclic_graph(self.to_networkx())

    def parents(self, node: int) -> List[int]:
        return sorted(a for a, b in self.directed if b == node)

    def topological_order(self) -> List[int]:
        return list(nx.lexicographical_topological_sort(self.to_networkx()))


class StructureMetrics(BaseModel):
    """Comparison of an estimated graph with the truth."""

    mode: MetricMode
    f1: float = Field(..., ge=0.0, le=1.0)
    precision: float = Field(..., ge=0.0, le=1.0)
    recall: float = Field(..., ge=0.0, le=1.0)
    shd: int = Field(..., ge=0)
