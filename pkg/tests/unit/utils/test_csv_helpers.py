import numpy as np
import pandas as pd
import pytest

from disct.core.exceptions import DataFormatError
from disct.schemas.data_schema import ColumnKind, DataMatrix
from disct.schemas.experiment_schema import Type1Row
from disct.schemas.graph_schema import Graph
from disct.schemas.synth_schema import PairType
from disct.utils.csv_helpers import (
    read_edge_list,
    rows_to_frame,
    write_adjacency,
    write_data,
    write_edge_list,
    write_rows,
)


def test_rows_use_serialization_aliases(tmp_path):
    row = Type1Row(
        test="dct",
        pair_type=PairType.mixed,
        n=100,
        cond_dim=1,
        levels=4,
        rejection_rate=0.05,
        mc_stderr=0.01,
    )
    frame = rows_to_frame([row])
    assert list(frame.columns) == [
        "test", "pair_type", "n", "D", "K", "rejection_rate", "mc_stderr", "failures"
    ]
    assert frame.loc[0, "pair_type"] == "mixed"

    path = tmp_path / "rows.csv"
    write_rows([row], path)
    assert pd.read_csv(path).loc[0, "D"] == 1


def test_edge_list_round_trip(tmp_path):
    graph = Graph(p=4, directed={(0, 1), (2, 1), (1, 3)})
    path = tmp_path / "truth.csv"
    write_edge_list(graph, path)
    assert path.read_text().splitlines()[0] == "from,to"
    assert read_edge_list(path, 4) == graph


def test_read_edge_list_rejects_wrong_header(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("a,b\n0,1\n")
    with pytest.raises(DataFormatError):
        read_edge_list(path, 3)


def test_read_edge_list_rejects_out_of_range_nodes(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("from,to\n0,5\n")
    with pytest.raises(DataFormatError):
        read_edge_list(path, 3)


def test_write_adjacency_is_a_plain_matrix(tmp_path):
    path = tmp_path / "adj.csv"
    write_adjacency(Graph(p=3, directed={(0, 1)}, undirected={(1, 2)}), path)
    assert path.read_text().splitlines() == ["0,1,0", "0,0,1", "0,1,0"]


def test_write_data_keeps_level_codes_integral(tmp_path):
    data = DataMatrix(
        values=np.array([[0.5, 1.0], [-0.5, 2.0], [1.5, 1.0]]),
        kinds=[ColumnKind.continuous, ColumnKind.discretized],
        names=["x", "code"],
    )
    path = tmp_path / "data.csv"
    write_data(data, path)
    assert path.read_text().splitlines()[1] == "0.5,1"
