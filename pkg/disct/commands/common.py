"""
File: common.py
Description: Shared plumbing for CLI commands: the --log-level option, loading
             CSV input with declared or inferred column kinds, CSV output and the
             DisctError to exit-status mapping.
"""

import logging
from contextlib import contextmanager
from pathlib import Path
from typing import Annotated, Iterator, List, Optional, Sequence

import pandas as pd
import typer
from pydantic import ValidationError

from disct.core.config import settings
from disct.core.exceptions import DataFormatError, DisctError
from disct.schemas.data_schema import DataMatrix
from disct.services.data_service import load_csv, parse_discrete_cols
from disct.utils.logger import setup_logging

logger = logging.getLogger(__name__)

LogLevelOption = Annotated[
    Optional[str], typer.Option("--log-level", help="DEBUG, INFO, WARNING or ERROR")
]
DiscreteColsOption = Annotated[
    Optional[str],
    typer.Option("--discrete-cols", help="Comma-separated names of discretized columns"),
]
InferKindsOption = Annotated[
    bool,
    typer.Option(
        "--infer-kinds/--no-infer-kinds",
        help="Classify undeclared columns by their number of distinct values",
    ),
]


def configure(log_level: Optional[str]) -> None:
    if log_level:
        setup_logging(log_level)


@contextmanager
def cli_errors() -> Iterator[None]:
    """Print `Error: <detail>` to stderr and exit 1 on domain or validation errors."""
    try:
        yield
    except DisctError as e:
        logger.debug("Command failed", exc_info=True)
        typer.echo(f"Error: {e.detail}", err=True)
        raise typer.Exit(code=1)
    except ValidationError as e:
        typer.echo(f"Error: {e}", err=True)
        raise typer.Exit(code=1)


def load_table(path: Path, discrete_cols: Optional[str], infer_kinds: bool) -> DataMatrix:
    declared = parse_discrete_cols(discrete_cols)
    if declared:
        return load_csv(path, declared_kinds=declared)
    if infer_kinds:
        return load_csv(path, discrete_threshold=settings.discrete_threshold)
    return load_csv(path, declared_kinds={})


def resolve_columns(data: DataMatrix, names: Sequence[str]) -> List[int]:
    try:
        return [data.index_of(name.strip()) for name in names if name.strip()]
    except KeyError as e:
        raise DataFormatError(str(e.args[0]))


def split_names(flag: Optional[str]) -> List[str]:
    return [name.strip() for name in (flag or "").split(",") if name.strip()]


def emit(frame: pd.DataFrame, out: Optional[Path]) -> None:
    """Write a result frame to `out`, or to stdout when no path is given."""
    if out is None:
        typer.echo(frame.to_csv(index=False), nl=False)
    else:
        frame.to_csv(out, index=False)
        logger.info("Wrote %d rows to %s", len(frame), out)
