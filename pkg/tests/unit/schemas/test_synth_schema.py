import pytest
from pydantic import ValidationError

from disct.schemas.graph_schema import Graph
from disct.schemas.synth_schema import DiscretizeSpec, SemSpec


def test_sem_spec_requires_a_weight_per_edge():
    dag = Graph(p=2, directed={(0, 1)})
    with pytest.raises(ValidationError) as exc:
        SemSpec(dag=dag, weights={})
    assert "missing weights" in str(exc.value)


def test_sem_spec_rejects_cycles():
    chain = Graph(p=2, directed={(0, 1)})
    assert SemSpec(dag=chain, weights={(0, 1): 1.0}).dag == chain
    with pytest.raises(ValidationError):
        SemSpec(
            dag=Graph(p=3, directed={(0, 1), (1, 2), (2, 0)}),
            weights={(0, 1): 1.0, (1, 2): 1.0, (2, 0): 1.0},
        )


def test_discretize_spec_boundary_count():
    with pytest.raises(ValidationError):
        DiscretizeSpec(levels=3, boundaries={0: [0.0]})
    DiscretizeSpec(levels=3, boundaries={0: [-0.5, 0.5]})


def test_discretize_spec_boundaries_strictly_increasing():
    with pytest.raises(ValidationError):
        DiscretizeSpec(levels=3, boundaries={0: [0.5, 0.5]})


def test_discretize_spec_needs_two_levels():
    with pytest.raises(ValidationError):
        DiscretizeSpec(levels=1)
