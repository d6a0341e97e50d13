"""
File: synth.py
Description: `disct gen`: write a synthetic table (null/alternative CI scenario or
             a random-DAG SEM) and optionally its truth graph.
"""

import logging
from enum import Enum
from pathlib import Path
from typing import Annotated, Optional

import typer

from disct.commands.common import LogLevelOption, cli_errors, configure
from disct.schemas.synth_schema import (
    DiscretizeSpec,
    NoiseFamily,
    Nonlinearity,
    PairType,
    ScenarioKind,
)
from disct.services.synth_service import (
    discretize,
    gen_dag_bp,
    gen_scenario,
    make_sem_spec,
    sample_sem,
    scenario_sem,
)
from disct.utils.csv_helpers import write_data, write_edge_list
from disct.utils.rng import child_seed

logger = logging.getLogger(__name__)


class Scenario(str, Enum):
    null = "null"
    alt = "alt"
    dag = "dag"


def gen_command(
    scenario: Annotated[Scenario, typer.Option("--scenario")],
    out: Annotated[Path, typer.Option("--out", help="Data CSV")],
    n: Annotated[int, typer.Option("--n", min=4)] = 2000,
    p: Annotated[int, typer.Option("--p", min=2, help="Nodes of the random DAG")] = 8,
    edges: Annotated[Optional[int], typer.Option("--edges", help="Defaults to p - 1")] = None,
    cond_dim: Annotated[int, typer.Option("--cond-dim", min=1, help="D for null/alt")] = 1,
    pair_type: Annotated[PairType, typer.Option("--pair-type")] = PairType.continuous,
    levels: Annotated[int, typer.Option("--levels", min=0, help="K; 0 keeps a DAG table continuous")] = 2,
    noise: Annotated[NoiseFamily, typer.Option("--noise")] = NoiseFamily.gaussian,
    nonlinearity: Annotated[Nonlinearity, typer.Option("--nonlinearity")] = Nonlinearity.none,
    seed: Annotated[int, typer.Option("--seed", min=0)] = 0,
    truth_out: Annotated[Optional[Path], typer.Option("--truth-out", help='Edge-list CSV "from,to"')] = None,
    log_level: LogLevelOption = None,
) -> None:
    """Generate a synthetic data set."""
    configure(log_level)
    with cli_errors():
        if scenario == Scenario.dag:
            truth = gen_dag_bp(p, p - 1 if edges is None else edges, seed)
            spec = make_sem_spec(truth, noise=noise, nonlinearity=nonlinearity, seed=child_seed(seed, 1))
            data = sample_sem(spec, n)
            if levels >= 2:
                data = discretize(data, list(range(p)), DiscretizeSpec(levels=levels), child_seed(seed, 2))
        else:
            kind = ScenarioKind(scenario.value)
            data, independent = gen_scenario(kind, n, cond_dim, pair_type, seed, max(levels, 2))
            truth = scenario_sem(kind, cond_dim, seed).dag
            logger.info("Scenario %s: Y and W are %s given Z", kind.value, "independent" if independent else "dependent")

        write_data(data, out)
        if truth_out is not None:
            write_edge_list(truth, truth_out)
