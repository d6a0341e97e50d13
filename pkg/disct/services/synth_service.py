"""
File: synth_service.py
Description: Service functions for synthetic data: random DAGs, ancestral
             sampling of (non)linear SEMs with several noise families, monotone
             discretization operators, and the null/alternative designs used
             to measure Type I and Type II error.
"""

import logging
from typing import Callable, Dict, List, Optional, Sequence, Set, Tuple

import numpy as np
from sentry_sdk import capture_message

from disct.core.exceptions import (
    DiscretizationError,
    InfeasibleGraphError,
    InvalidConditioningSetError,
)
from disct.schemas.data_schema import ColumnKind, DataMatrix
from disct.schemas.graph_schema import Graph
from disct.schemas.synth_schema import (
    DiscretizeSpec,
    MonotoneTransform,
    NoiseFamily,
    Nonlinearity,
    PairType,
    ScenarioKind,
    SemSpec,
)
from disct.services.data_service import build_data_matrix
from disct.utils.rng import child_seed, make_rng

logger = logging.getLogger(__name__)

MAX_BOUNDARY_DRAWS = 10

_NONLINEAR: Dict[Nonlinearity, Callable[[np.ndarray], np.ndarray]] = {
    Nonlinearity.sin: np.sin,
    Nonlinearity.cube: lambda x: x**3,
    Nonlinearity.tanh: np.tanh,
    Nonlinearity.relu: lambda x: np.maximum(x, 0.0),
}

_MONOTONE: Dict[MonotoneTransform, Callable[[np.ndarray], np.ndarray]] = {
    MonotoneTransform.identity: lambda x: x,
    MonotoneTransform.exp: np.exp,
    MonotoneTransform.cube: lambda x: x**3,
}


def gen_dag_bp(p: int, edges: int, seed: int) -> Graph:
    """Random DAG with exactly `edges` edges over a random topological order.

    Nodes are paired one at a time with a uniformly chosen earlier node (a
    random tree when edges = p − 1); further edges are drawn uniformly from the
    remaining forward pairs.
    """
    max_edges = p * (p - 1) // 2
    if p < 1 or not 0 <= edges <= max_edges:
        raise InfeasibleGraphError(f"cannot place {edges} edges on {p} nodes")

    rng = make_rng(seed)
    order = [int(v) for v in rng.permutation(p)]
    chosen: Set[Tuple[int, int]] = set()
    for pos in range(1, p):
        if len(chosen) == edges:
            break
        chosen.add((order[int(rng.integers(0, pos))], order[pos]))

    remaining = [
        (order[a], order[b])
        for a in range(p)
        for b in range(a + 1, p)
        if (order[a], order[b]) not in chosen
    ]
    extra = edges - len(chosen)
    if extra > 0:
        for idx in sorted(rng.choice(len(remaining), size=extra, replace=False)):
            chosen.add(remaining[int(idx)])
    return Graph(p=p, directed=chosen)


def make_sem_spec(
    dag: Graph,
    weight_range: Tuple[float, float] = (0.5, 2.0),
    noise: NoiseFamily = NoiseFamily.gaussian,
    nonlinearity: Nonlinearity = Nonlinearity.none,
    seed: int = 0,
) -> SemSpec:
    """Attach uniformly drawn edge weights to a DAG."""
    rng = make_rng(seed, 0)
    edges = sorted(dag.directed)
    draws = rng.uniform(weight_range[0], weight_range[1], size=len(edges))
    return SemSpec(
        dag=dag,
        weights={edge: float(w) for edge, w in zip(edges, draws)},
        noise=noise,
        nonlinearity=nonlinearity,
        seed=seed,
    )


def _draw_noise(rng: np.random.Generator, family: NoiseFamily, n: int) -> np.ndarray:
    # Every family except shifted_gaussian is centered with unit variance.
    if family == NoiseFamily.gaussian:
        return rng.standard_normal(n)
    if family == NoiseFamily.student_t3:
        return rng.standard_t(3, size=n) / np.sqrt(3.0)
    if family == NoiseFamily.uniform:
        return rng.uniform(-np.sqrt(3.0), np.sqrt(3.0), size=n)
    if family == NoiseFamily.exponential:
        return rng.exponential(1.0, size=n) - 1.0
    mean = rng.uniform(-2.0, 2.0)
    variance = rng.uniform(0.0, 3.0)
    return mean + np.sqrt(variance) * rng.standard_normal(n)


def _node_functions(spec: SemSpec, rng: np.random.Generator) -> List[Nonlinearity]:
    if spec.nonlinearity == Nonlinearity.random:
        menu = list(_NONLINEAR)
        return [menu[int(i)] for i in rng.integers(0, len(menu), size=spec.dag.p)]
    return [spec.nonlinearity] * spec.dag.p


def sample_sem(spec: SemSpec, n: int, names: Optional[Sequence[str]] = None) -> DataMatrix:
    """Ancestral sampling X_i = f(Σ w·X_pa + noise); columns standardized afterwards."""
    rng = make_rng(spec.seed, 1)
    functions = _node_functions(spec, rng)
    values = np.zeros((n, spec.dag.p))
    for node in spec.dag.topological_order():
        signal = _draw_noise(rng, spec.noise, n)
        for parent in spec.dag.parents(node):
            signal = signal + spec.weights[(parent, node)] * values[:, parent]
        f = functions[node]
        values[:, node] = signal if f == Nonlinearity.none else _NONLINEAR[f](signal)
    return build_data_matrix(values, [ColumnKind.continuous] * spec.dag.p, list(names or []))


def analytic_covariance(spec: SemSpec) -> np.ndarray:
    """Population covariance of a linear SEM with unit-variance noise."""
    if spec.nonlinearity != Nonlinearity.none:
        raise ValueError("analytic covariance is only defined for linear SEMs")
    if spec.noise == NoiseFamily.shifted_gaussian:
        raise ValueError("shifted_gaussian noise variances are drawn at sampling time")
    p = spec.dag.p
    coefficients = np.zeros((p, p))
    for (parent, child), w in spec.weights.items():
        coefficients[child, parent] = w
    mixing = np.linalg.inv(np.eye(p) - coefficients)
    return mixing @ mixing.T


def _codes(x: np.ndarray, cuts: np.ndarray) -> np.ndarray:
    # Level 1 + number of cut points strictly below x.
    return 1.0 + np.searchsorted(cuts, x, side="left")


def discretize(
    data: DataMatrix, which: Sequence[int], spec: DiscretizeSpec, seed: int = 0
) -> DataMatrix:
    """Replace the selected columns by level codes 1..K of g(x) cut at the boundaries."""
    rng = make_rng(seed)
    values = np.array(data.values, copy=True)
    kinds = list(data.kinds)
    g = _MONOTONE[spec.monotone_g]

    for col in which:
        x = g(values[:, col])
        if spec.boundaries is not None:
            if col not in spec.boundaries:
                raise DiscretizationError(f"no boundaries given for column {col}")
            codes = _codes(x, np.asarray(spec.boundaries[col], dtype=np.float64))
        else:
            for attempt in range(MAX_BOUNDARY_DRAWS):
                cuts = np.sort(rng.uniform(x.min(), x.max(), size=spec.levels - 1))
                codes = _codes(x, cuts)
                if np.unique(codes).size == spec.levels:
                    break
                logger.debug("Column %d: boundary draw %d left a level empty", col, attempt + 1)
            else:
                capture_message(
                    f"Discretization of column {col} failed after {MAX_BOUNDARY_DRAWS} draws",
                    level="warning",
                )
                raise DiscretizationError(
                    f"column {col}: no boundary draw produced {spec.levels} levels "
                    f"in {MAX_BOUNDARY_DRAWS} attempts"
                )
        values[:, col] = codes
        kinds[col] = ColumnKind.discretized

    return DataMatrix(values=values, kinds=kinds, names=list(data.names))


def scenario_sem(
    kind: ScenarioKind,
    cond_dim: int,
    seed: int,
    coefficient_range: Tuple[float, float] = (0.5, 1.5),
) -> SemSpec:
    """SEM over nodes (Y, W, Z1..ZD).

    Null: every Z_i drives both Y and W, so Y ⊥ W | Z.
    Alternative: Y and W both drive every Z_i, so Y and W are dependent given Z.
    """
    if cond_dim < 1:
        raise InvalidConditioningSetError("conditional scenarios need at least one Z")
    rng = make_rng(seed, 0)
    a = rng.uniform(*coefficient_range, size=cond_dim)
    b = rng.uniform(*coefficient_range, size=cond_dim)
    weights: Dict[Tuple[int, int], float] = {}
    for i in range(cond_dim):
        z = 2 + i
        if kind == ScenarioKind.null:
            weights[(z, 0)] = float(a[i])
            weights[(z, 1)] = float(b[i])
        else:
            weights[(0, z)] = float(a[i])
            weights[(1, z)] = float(b[i])
    dag = Graph(p=2 + cond_dim, directed=set(weights))
    return SemSpec(dag=dag, weights=weights, seed=child_seed(seed, 1))


def gen_scenario(
    kind: ScenarioKind,
    n: int,
    cond_dim: int,
    pair_type: PairType,
    seed: int,
    levels: int = 2,
) -> Tuple[DataMatrix, bool]:
    """Columns (Y, W, Z̃1..Z̃D) and the ground truth "Y ⊥ W | Z" flag."""
    spec = scenario_sem(kind, cond_dim, seed)
    names = ["Y", "W", *[f"Z{i + 1}" for i in range(cond_dim)]]
    data = sample_sem(spec, n, names)

    which = list(range(2, 2 + cond_dim))
    if pair_type in (PairType.mixed, PairType.discrete):
        which.append(0)
    if pair_type == PairType.discrete:
        which.append(1)
    data = discretize(data, sorted(which), DiscretizeSpec(levels=levels), child_seed(seed, 2))
    return data, kind == ScenarioKind.null
