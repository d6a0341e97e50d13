"""
File: experiments.py
Description: Experiment commands: `disct type1`, `disct power`,
             `disct discover-sweep` and `disct demo-chain`. Each writes a tidy CSV.
"""

import logging
from pathlib import Path
from typing import Annotated, Any, Dict, List, Optional

import typer

from disct.commands.common import LogLevelOption, cli_errors, configure
from disct.core.config import settings
from disct.schemas.experiment_schema import ExperimentConfig, TesterName
from disct.schemas.synth_schema import NoiseFamily, Nonlinearity, PairType
from disct.services.experiment_service import (
    run_chain_demo,
    run_discovery,
    run_power,
    run_type1,
)
from disct.utils.csv_helpers import write_rows

logger = logging.getLogger(__name__)

OutOption = Annotated[Path, typer.Option("--out", help="Result CSV")]
SeedOption = Annotated[Optional[int], typer.Option("--seed", min=0)]
ReplicatesOption = Annotated[Optional[int], typer.Option("--replicates", min=1)]
WorkersOption = Annotated[Optional[int], typer.Option("--workers", min=1)]
AlphaOption = Annotated[Optional[float], typer.Option("--alpha", min=0.0, max=1.0)]
TestsOption = Annotated[Optional[List[TesterName]], typer.Option("--test", help="Repeatable")]
PairTypesOption = Annotated[Optional[List[PairType]], typer.Option("--pair-type", help="Repeatable")]
NOption = Annotated[Optional[List[int]], typer.Option("--n", help="Repeatable sample sizes")]
CondDimOption = Annotated[Optional[List[int]], typer.Option("--cond-dim", help="Repeatable D values")]
LevelsOption = Annotated[Optional[List[int]], typer.Option("--levels", help="Repeatable K values")]


def _config(**overrides: Any) -> ExperimentConfig:
    """ExperimentConfig from the flags that were given; the rest fall back to settings."""
    given: Dict[str, Any] = {
        key: list(value) if isinstance(value, (list, tuple)) else value
        for key, value in overrides.items()
        if value is not None and value != [] and value != ()
    }
    return ExperimentConfig(**given)


def type1_command(
    out: OutOption,
    test: TestsOption = None,
    pair_type: PairTypesOption = None,
    n: NOption = None,
    cond_dim: CondDimOption = None,
    levels: LevelsOption = None,
    replicates: ReplicatesOption = None,
    alpha: AlphaOption = None,
    seed: SeedOption = None,
    workers: WorkersOption = None,
    log_level: LogLevelOption = None,
) -> None:
    """Type I error of each test on null scenarios."""
    configure(log_level)
    with cli_errors():
        config = _config(
            tests=test,
            pair_types=pair_type,
            n_values=n,
            cond_dims=cond_dim,
            levels=levels,
            replicates=replicates,
            alpha=alpha,
            base_seed=seed,
            workers=workers,
        )
        write_rows(run_type1(config), out)


def power_command(
    out: OutOption,
    test: TestsOption = None,
    pair_type: PairTypesOption = None,
    n: NOption = None,
    cond_dim: CondDimOption = None,
    levels: LevelsOption = None,
    replicates: ReplicatesOption = None,
    calibration_replicates: Annotated[
        Optional[int], typer.Option("--calibration-replicates", min=1)
    ] = None,
    alpha: AlphaOption = None,
    seed: SeedOption = None,
    workers: WorkersOption = None,
    log_level: LogLevelOption = None,
) -> None:
    """Calibrated Type II error of each test on alternative scenarios."""
    configure(log_level)
    with cli_errors():
        config = _config(
            tests=test,
            pair_types=pair_type,
            n_values=n,
            cond_dims=cond_dim,
            levels=levels,
            replicates=replicates,
            calibration_replicates=calibration_replicates,
            alpha=alpha,
            base_seed=seed,
            workers=workers,
        )
        write_rows(run_power(config), out)


def discover_sweep_command(
    out: OutOption,
    test: TestsOption = None,
    p: Annotated[Optional[List[int]], typer.Option("--p", help="Repeatable node counts")] = None,
    edges: Annotated[Optional[List[int]], typer.Option("--edges", help="Repeatable edge counts")] = None,
    n: NOption = None,
    levels: Annotated[int, typer.Option("--levels", min=2)] = 2,
    noise: Annotated[NoiseFamily, typer.Option("--noise")] = NoiseFamily.gaussian,
    nonlinearity: Annotated[Nonlinearity, typer.Option("--nonlinearity")] = Nonlinearity.none,
    replicates: Annotated[Optional[int], typer.Option("--replicates", min=1, help="Graph instances")] = None,
    alpha: AlphaOption = None,
    max_depth: Annotated[Optional[int], typer.Option("--max-depth", min=0)] = None,
    seed: SeedOption = None,
    workers: WorkersOption = None,
    log_level: LogLevelOption = None,
) -> None:
    """PC structure recovery on random DAGs with fully discretized data."""
    configure(log_level)
    with cli_errors():
        config = _config(
            tests=test,
            p_values=p,
            edge_counts=edges,
            n_values=n or [10000],
            discovery_levels=levels,
            noise=noise,
            nonlinearity=nonlinearity,
            discovery_seeds=replicates,
            alpha=alpha,
            max_depth=max_depth if max_depth is not None else settings.pc_max_depth,
            base_seed=seed,
            workers=workers,
        )
        write_rows(run_discovery(config), out)


def demo_chain_command(
    out: OutOption,
    n: Annotated[int, typer.Option("--n", min=4)] = 5000,
    replicates: Annotated[int, typer.Option("--replicates", min=1)] = 200,
    alpha: AlphaOption = None,
    seed: Annotated[int, typer.Option("--seed", min=0)] = 0,
    workers: WorkersOption = None,
    log_level: LogLevelOption = None,
) -> None:
    """Rejection rates of Y ⊥ W | Z̃ on Y → Z → W with Z binarized."""
    configure(log_level)
    with cli_errors():
        rows = run_chain_demo(
            n,
            replicates,
            seed,
            settings.alpha if alpha is None else alpha,
            workers or settings.workers,
        )
        write_rows(rows, out)
