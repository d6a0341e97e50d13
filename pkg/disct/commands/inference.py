"""
File: inference.py
Description: `disct test` and `disct citest`: one unconditional or conditional
             independence test on a CSV table, reported as a single CSV row.
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
    resolve_columns,
    split_names,
)
from disct.core.config import settings
from disct.core.exceptions import DataFormatError
from disct.services.bridge_service import pair_kind_of
from disct.services.ci_service import dct_test
from disct.services.pair_service import independence_test

logger = logging.getLogger(__name__)

DataOption = Annotated[
    Path, typer.Option("--data", exists=True, dir_okay=False, help="Input CSV with a header row")
]


def pair_command(
    data: DataOption,
    pair: Annotated[str, typer.Option("--pair", help="Two column names, e.g. A,B")],
    alpha: Annotated[Optional[float], typer.Option(min=0.0, max=1.0)] = None,
    discrete_cols: DiscreteColsOption = None,
    infer_kinds: InferKindsOption = True,
    out: Annotated[Optional[Path], typer.Option(help="Output CSV (stdout if omitted)")] = None,
    log_level: LogLevelOption = None,
) -> None:
    """Latent independence test of two columns: σ̂, variance, z, p-value."""
    configure(log_level)
    alpha = settings.alpha if alpha is None else alpha
    with cli_errors():
        table = load_table(data, discrete_cols, infer_kinds)
        names = split_names(pair)
        if len(names) != 2:
            raise DataFormatError(f"--pair needs exactly two column names, got {pair!r}")
        a, b = resolve_columns(table, names)
        kind = pair_kind_of(table.kinds[a], table.kinds[b])
        result = independence_test(table.column(a), table.column(b), kind, alpha)
        logger.info("Tested %s ~ %s (%s): p=%.4g", names[0], names[1], kind.value, result.p_value)
        emit(
            pd.DataFrame(
                [
                    {
                        "a": names[0],
                        "b": names[1],
                        "pair_kind": kind.value,
                        "sigma_hat": result.theta.sigma_hat,
                        "variance": result.variance,
                        "z": result.z,
                        "p_value": result.p_value,
                        "decision": "dependent" if result.dependent else "independent",
                    }
                ]
            ),
            out,
        )


def citest_command(
    data: DataOption,
    i: Annotated[str, typer.Option("--i", help="First tested column")],
    j: Annotated[str, typer.Option("--j", help="Second tested column")],
    cond: Annotated[Optional[str], typer.Option("--cond", help="Comma-separated conditioning columns")] = None,
    alpha: Annotated[Optional[float], typer.Option(min=0.0, max=1.0)] = None,
    discrete_cols: DiscreteColsOption = None,
    infer_kinds: InferKindsOption = True,
    out: Annotated[Optional[Path], typer.Option(help="Output CSV (stdout if omitted)")] = None,
    log_level: LogLevelOption = None,
) -> None:
    """Discretization-aware test of X_i ⊥ X_j | X_cond."""
    configure(log_level)
    alpha = settings.alpha if alpha is None else alpha
    with cli_errors():
        table = load_table(data, discrete_cols, infer_kinds)
        first, second = resolve_columns(table, [i, j])
        cond_set = resolve_columns(table, split_names(cond))
        result = dct_test(table, first, second, cond_set, alpha)
        emit(
            pd.DataFrame(
                [
                    {
                        "beta_hat": result.beta_hat,
                        "variance": result.variance,
                        "z": result.z,
                        "p_value": result.p_value,
                        "decision": "independent" if result.independent else "dependent",
                        "pd_repair_flag": result.pd_repaired,
                    }
                ]
            ),
            out,
        )
