"""
File: discovery.py
Description: `disct discover`: PC structure learning on a CSV table with a chosen
             CI test, writing the estimated adjacency matrix and, when a truth
             graph is supplied, the structure metrics.
"""

import logging
from pathlib import Path
from typing import Annotated, Optional

import pandas as pd
import typer

from disct.commands.common import (
    DiscreteColsOption,
    InferKindsOption,
    LogLevelOption,
    cli_errors,
    configure,
    emit,
    load_table,
)
from disct.core.config import settings
from disct.core.exceptions import DataFormatError
from disct.schemas.experiment_schema import TesterName
from disct.schemas.graph_schema import MetricMode
from disct.services.metrics_service import structure_metrics
from disct.services.pc_service import run_pc
from disct.services.tester_service import build_tester
from disct.utils.csv_helpers import read_edge_list, write_adjacency

logger = logging.getLogger(__name__)


def discover_command(
    data: Annotated[Path, typer.Option("--data", exists=True, dir_okay=False)],
    test: Annotated[TesterName, typer.Option("--test")] = TesterName.dct,
    alpha: Annotated[Optional[float], typer.Option(min=0.0, max=1.0)] = None,
    mode: Annotated[MetricMode, typer.Option("--mode")] = MetricMode.dag,
    truth: Annotated[
        Optional[Path],
        typer.Option("--truth", exists=True, dir_okay=False, help='Edge-list CSV "from,to"'),
    ] = None,
    out: Annotated[Path, typer.Option("--out", help="Adjacency CSV")] = Path("adjacency.csv"),
    metrics_out: Annotated[
        Optional[Path], typer.Option("--metrics-out", help="Metrics CSV (stdout if omitted)")
    ] = None,
    max_depth: Annotated[Optional[int], typer.Option(min=0)] = None,
    discrete_cols: DiscreteColsOption = None,
    infer_kinds: InferKindsOption = True,
    log_level: LogLevelOption = None,
) -> None:
    """Run PC and write the skeleton (mode=skeleton) or oriented DAG (mode=dag)."""
    configure(log_level)
    alpha = settings.alpha if alpha is None else alpha
    max_depth = settings.pc_max_depth if max_depth is None else max_depth
    with cli_errors():
        table = load_table(data, discrete_cols, infer_kinds)
        truth_graph = read_edge_list(truth, table.p) if truth else None
        if test == TesterName.oracle and truth_graph is None:
            raise DataFormatError("--test oracle needs a --truth graph")

        skeleton, dag = run_pc(table, build_tester(test, truth_graph), alpha, max_depth)
        estimate = skeleton if mode == MetricMode.skeleton else dag
        write_adjacency(estimate, out)
        logger.info("PC (%s) found %d edges; adjacency written to %s", test.value, len(estimate.skeleton()), out)

        if truth_graph is not None:
            metrics = structure_metrics(estimate, truth_graph, mode)
            emit(pd.DataFrame([{"test": test.value, **metrics.model_dump(mode="json")}]), metrics_out)
