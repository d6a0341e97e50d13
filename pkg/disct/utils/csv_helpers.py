"""
File: csv_helpers.py
Description: CSV persistence shared by the CLI and the experiment runners:
             result rows, data tables, adjacency matrices and "from,to" edge lists.
"""

import logging
from pathlib import Path
from typing import Sequence

import numpy as np
import pandas as pd
from pydantic import BaseModel

from disct.core.exceptions import DataFormatError
from disct.schemas.data_schema import DataMatrix
from disct.schemas.graph_schema import Graph

logger = logging.getLogger(__name__)


def rows_to_frame(rows: Sequence[BaseModel]) -> pd.DataFrame:
    """One column per model field, using serialization aliases as headers."""
    return pd.DataFrame([row.model_dump(mode="json", by_alias=True) for row in rows])


def write_rows(rows: Sequence[BaseModel], path: str | Path) -> None:
    rows_to_frame(rows).to_csv(path, index=False)
    logger.info("Wrote %d rows to %s", len(rows), path)


def write_data(data: DataMatrix, path: str | Path) -> None:
    frame = pd.DataFrame(data.values, columns=data.names)
    for j in range(data.p):
        if data.is_discrete(j):
            frame[data.names[j]] = frame[data.names[j]].astype(int)
    frame.to_csv(path, index=False)
    logger.info("Wrote n=%d, p=%d table to %s", data.n, data.p, path)


def write_adjacency(graph: Graph, path: str | Path) -> None:
    """Plain 0/1 matrix without labels; an undirected edge sets both entries."""
    pd.DataFrame(graph.adjacency()).to_csv(path, index=False, header=False)


def write_edge_list(graph: Graph, path: str | Path) -> None:
    edges = sorted(graph.directed)
    pd.DataFrame(edges, columns=["from", "to"]).to_csv(path, index=False)


def read_edge_list(path: str | Path, p: int) -> Graph:
    """Read a "from,to" CSV of directed edges over nodes 0..p-1."""
    try:
        frame = pd.read_csv(path)
    except pd.errors.EmptyDataError:
        return Graph.empty(p)
    if list(frame.columns) != ["from", "to"]:
        raise DataFormatError(f"{path}: expected header 'from,to', got {list(frame.columns)}")
    try:
        return Graph.from_edge_list(p, frame.to_numpy(dtype=np.int64).tolist())
    except ValueError as e:
        raise DataFormatError(f"{path}: {e}")
