"""
File: experiment_service.py
Description: Service functions for the replicate-level experiments: Type I error
             grids, calibrated Type II (power) grids, causal-discovery sweeps and
             the binarized-chain demonstration. Replicates are seeded by their grid
             position, so results do not depend on the worker count.
"""

import logging
from concurrent.futures import ProcessPoolExecutor
from itertools import product
from typing import Callable, Iterable, List, Optional, Sequence, Tuple, TypeVar

import numpy as np
from sentry_sdk import capture_exception

from disct.core.exceptions import DisctError
from disct.schemas.experiment_schema import (
    FISHERZ_NODIS,
    ChainDemoRow,
    DiscoveryRow,
    DiscoveryTask,
    ExperimentConfig,
    PowerRow,
    ReplicateTask,
    ScenarioCell,
    TesterName,
    Type1Row,
)
from disct.schemas.graph_schema import Graph, MetricMode
from disct.schemas.synth_schema import DiscretizeSpec, PairType, ScenarioKind
from disct.services.metrics_service import structure_metrics
from disct.services.pc_service import run_pc
from disct.services.synth_service import (
    discretize,
    gen_dag_bp,
    gen_scenario,
    make_sem_spec,
    sample_sem,
    scenario_sem,
)
from disct.services.tester_service import build_tester
from disct.utils.rng import child_seed

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")

# Independent seed streams per experiment family.
TYPE1_STREAM = 0
CALIBRATION_STREAM = 1
POWER_STREAM = 2
DISCOVERY_STREAM = 3
CHAIN_STREAM = 4

_PAIR_CODES = {pair_type: code for code, pair_type in enumerate(PairType)}


def parallel_map(fn: Callable[[T], R], tasks: Sequence[T], workers: int = 1) -> List[R]:
    """Map in submission order; serial when workers == 1."""
    if workers <= 1 or len(tasks) <= 1:
        return [fn(task) for task in tasks]
    chunksize = max(1, len(tasks) // (4 * workers))
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, tasks, chunksize=chunksize))


def _cell_seed(base_seed: int, stream: int, cell: ScenarioCell, replicate: int) -> int:
    return child_seed(
        base_seed,
        stream,
        _PAIR_CODES[cell.pair_type],
        cell.n,
        cell.cond_dim,
        cell.levels,
        replicate,
    )


def scenario_p_value(task: ReplicateTask) -> Optional[float]:
    """Simulate one scenario replicate and test Y ⊥ W | Z; None on failure."""
    cell = task.cell
    try:
        data, _ = gen_scenario(
            task.kind, cell.n, cell.cond_dim, cell.pair_type, task.seed, cell.levels
        )
        truth = None
        if task.test == TesterName.oracle:
            truth = scenario_sem(task.kind, cell.cond_dim, task.seed).dag
        tester = build_tester(task.test, truth)
        return tester.test(data, 0, 1, list(range(2, 2 + cell.cond_dim)), task.alpha)
    except DisctError as e:
        logger.warning("Replicate %s/%s seed=%d failed: %s", task.test.value, cell, task.seed, e.detail)
        capture_exception(e)
        return None


def _cells(config: ExperimentConfig) -> Iterable[ScenarioCell]:
    for pair_type, n, cond_dim, levels in product(
        config.pair_types, config.n_values, config.cond_dims, config.levels
    ):
        yield ScenarioCell(pair_type=pair_type, n=n, cond_dim=cond_dim, levels=levels)


def _applicable(test: TesterName, cell: ScenarioCell) -> bool:
    return test != TesterName.chisq or cell.pair_type == PairType.discrete


def _collect_p_values(
    test: TesterName,
    kind: ScenarioKind,
    cell: ScenarioCell,
    count: int,
    stream: int,
    config: ExperimentConfig,
) -> Tuple[np.ndarray, int]:
    tasks = [
        ReplicateTask(
            test=test,
            kind=kind,
            cell=cell,
            seed=_cell_seed(config.base_seed, stream, cell, r),
            alpha=config.alpha,
        )
        for r in range(count)
    ]
    results = parallel_map(scenario_p_value, tasks, config.workers)
    p_values = np.array([p for p in results if p is not None], dtype=np.float64)
    return p_values, count - p_values.size


def rejection_summary(p_values: np.ndarray, alpha: float) -> Tuple[float, float]:
    """Rejection rate r = mean(p ≤ alpha) and its binomial standard error."""
    if p_values.size == 0:
        return float("nan"), float("nan")
    rate = float(np.mean(p_values <= alpha))
    return rate, float(np.sqrt(rate * (1.0 - rate) / p_values.size))


def run_type1(config: ExperimentConfig) -> List[Type1Row]:
    """Null-scenario rejection rates per grid cell and test."""
    rows: List[Type1Row] = []
    for cell in _cells(config):
        for test in config.tests:
            if not _applicable(test, cell):
                logger.info("Skipping %s on %s pairs", test.value, cell.pair_type.value)
                p_values, failures = np.array([]), config.replicates
            else:
                logger.info("Type I: %s on %s", test.value, cell)
                p_values, failures = _collect_p_values(
                    test, ScenarioKind.null, cell, config.replicates, TYPE1_STREAM, config
                )
            rate, stderr = rejection_summary(p_values, config.alpha)
            rows.append(
                Type1Row(
                    test=test.value,
                    pair_type=cell.pair_type,
                    n=cell.n,
                    cond_dim=cell.cond_dim,
                    levels=cell.levels,
                    rejection_rate=rate,
                    mc_stderr=stderr,
                    failures=failures,
                )
            )
    return rows


def empirical_threshold(p_values: np.ndarray, alpha: float) -> float:
    """Empirical alpha-quantile of null p-values."""
    p_values = np.asarray(p_values, dtype=np.float64)
    if p_values.size == 0:
        return float("nan")
    return float(np.quantile(p_values, alpha))


def _calibrate(
    test: TesterName,
    null_cell: ScenarioCell,
    replicates: int,
    alpha: float,
    config: ExperimentConfig,
) -> Tuple[float, int]:
    p_values, failures = _collect_p_values(
        TesterName(test), ScenarioKind.null, null_cell, replicates, CALIBRATION_STREAM, config
    )
    threshold = empirical_threshold(p_values, alpha)
    logger.info(
        "Calibrated %s on %s: threshold=%.4g (%d failures)", test, null_cell, threshold, failures
    )
    return threshold, failures


def calibrate_threshold(
    test: TesterName,
    null_cell: ScenarioCell,
    replicates: int,
    alpha: float,
    config: Optional[ExperimentConfig] = None,
) -> float:
    """Decision threshold whose null rejection rate matches alpha."""
    threshold, _ = _calibrate(test, null_cell, replicates, alpha, config or ExperimentConfig())
    return threshold


def run_power(config: ExperimentConfig) -> List[PowerRow]:
    """Calibrated Type II error per grid cell and test."""
    rows: List[PowerRow] = []
    for cell in _cells(config):
        for test in config.tests:
            if not _applicable(test, cell):
                threshold, type2 = float("nan"), float("nan")
                failures, calibration_failures = config.replicates, config.calibration_replicates
            else:
                threshold, calibration_failures = _calibrate(
                    test, cell, config.calibration_replicates, config.alpha, config
                )
                p_values, failures = _collect_p_values(
                    test, ScenarioKind.alt, cell, config.replicates, POWER_STREAM, config
                )
                type2 = float(np.mean(p_values > threshold)) if p_values.size else float("nan")
            rows.append(
                PowerRow(
                    test=test.value,
                    pair_type=cell.pair_type,
                    n=cell.n,
                    cond_dim=cell.cond_dim,
                    levels=cell.levels,
                    threshold=threshold,
                    calibrated_type2_rate=type2,
                    failures=failures,
                    calibration_failures=calibration_failures,
                )
            )
    return rows


def _metric_rows(
    test: str, task: DiscoveryTask, skeleton: Graph, dag: Graph, truth: Graph
) -> List[DiscoveryRow]:
    rows = []
    for mode in task.config.modes:
        estimate = skeleton if mode == MetricMode.skeleton else dag
        metrics = structure_metrics(estimate, truth, mode)
        rows.append(
            DiscoveryRow(
                test=test,
                p=task.p,
                n=task.n,
                edges=task.edges,
                mode=mode,
                f1=metrics.f1,
                precision=metrics.precision,
                recall=metrics.recall,
                shd=metrics.shd,
                seed=task.seed_index,
            )
        )
    return rows


def _failed_rows(test: str, task: DiscoveryTask) -> List[DiscoveryRow]:
    return [
        DiscoveryRow(
            test=test,
            p=task.p,
            n=task.n,
            edges=task.edges,
            mode=mode,
            seed=task.seed_index,
            status="failed",
        )
        for mode in task.config.modes
    ]


def discovery_instance(task: DiscoveryTask) -> List[DiscoveryRow]:
    """One graph instance: simulate, discretize every column, run PC per test."""
    config = task.config
    arms = [test.value for test in config.tests]
    if config.include_upper_bound:
        arms.append(FISHERZ_NODIS)
    try:
        truth = gen_dag_bp(task.p, task.edges, task.seed)
        spec = make_sem_spec(
            truth,
            noise=config.noise,
            nonlinearity=config.nonlinearity,
            seed=child_seed(task.seed, 1),
        )
        continuous = sample_sem(spec, task.n)
        discrete = discretize(
            continuous,
            list(range(task.p)),
            DiscretizeSpec(levels=config.discovery_levels),
            child_seed(task.seed, 2),
        )
    except DisctError as e:
        logger.warning("Discovery instance p=%d seed=%d failed: %s", task.p, task.seed_index, e.detail)
        capture_exception(e)
        return [row for arm in arms for row in _failed_rows(arm, task)]

    rows: List[DiscoveryRow] = []
    for arm in arms:
        if arm == FISHERZ_NODIS:
            tester, data = build_tester(TesterName.fisherz), continuous
        else:
            tester, data = build_tester(arm, truth), discrete
        try:
            skeleton, dag = run_pc(data, tester, config.alpha, config.max_depth)
        except DisctError as e:
            logger.warning("PC with %s failed on seed %d: %s", arm, task.seed_index, e.detail)
            capture_exception(e)
            rows.extend(_failed_rows(arm, task))
            continue
        rows.extend(_metric_rows(arm, task, skeleton, dag, truth))
    return rows


def run_discovery(config: ExperimentConfig) -> List[DiscoveryRow]:
    """PC structure recovery per (p, edges, n, seed) and test arm."""
    tasks = []
    for p, n in product(config.p_values, config.n_values):
        for edges in config.edge_counts or [p - 1]:
            for s in range(config.discovery_seeds):
                tasks.append(
                    DiscoveryTask(
                        p=p,
                        n=n,
                        edges=edges,
                        seed_index=s,
                        seed=child_seed(config.base_seed, DISCOVERY_STREAM, p, edges, n, s),
                        config=config,
                    )
                )
    logger.info("Discovery sweep: %d graph instances", len(tasks))
    return [row for rows in parallel_map(discovery_instance, tasks, config.workers) for row in rows]


def chain_p_values(task: Tuple[int, int, float]) -> Tuple[Optional[float], Optional[float]]:
    """Fisher-Z and DCT p-values of Y ⊥ W | Z̃ on Y → Z → W with Z cut at 0."""
    n, seed, alpha = task
    truth = Graph(p=3, directed={(0, 2), (2, 1)})
    spec = make_sem_spec(truth, seed=seed)
    data = sample_sem(spec, n, ["Y", "W", "Z"])
    data = discretize(data, [2], DiscretizeSpec(levels=2, boundaries={2: [0.0]}))
    results: List[Optional[float]] = []
    for name in (TesterName.fisherz, TesterName.dct):
        try:
            results.append(build_tester(name).test(data, 0, 1, [2], alpha))
        except DisctError as e:
            logger.warning("Chain replicate seed=%d failed for %s: %s", seed, name.value, e.detail)
            capture_exception(e)
            results.append(None)
    return results[0], results[1]


def run_chain_demo(
    n: int,
    replicates: int,
    seed: int = 0,
    alpha: float = 0.05,
    workers: int = 1,
) -> List[ChainDemoRow]:
    """Rejection rates of Y ⊥ W | Z̃ when the middle of a chain is binarized."""
    tasks = [(n, child_seed(seed, CHAIN_STREAM, n, r), alpha) for r in range(replicates)]
    results = parallel_map(chain_p_values, tasks, workers)
    rows = []
    for index, name in enumerate((TesterName.fisherz, TesterName.dct)):
        p_values = np.array([r[index] for r in results if r[index] is not None])
        rate, stderr = rejection_summary(p_values, alpha)
        rows.append(
            ChainDemoRow(
                test=name.value,
                n=n,
                replicates=replicates,
                rejection_rate=rate,
                mc_stderr=stderr,
                failures=replicates - p_values.size,
            )
        )
    return rows
