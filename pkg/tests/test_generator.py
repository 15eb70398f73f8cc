import numpy as np
import pytest

from lru_design import generate, scale_edge_weights, validate_instance
from lru_design.errors import InfeasibleConfig, NonPositiveFactor
from lru_design.generator import GeneratorConfig
from lru_design.instance import connected_components


def test_edge_count_and_connectivity():
    inst = generate(GeneratorConfig(n_vertices=10, avg_degree=2.0, seed=7))
    assert inst.n_edges == 20
    assert len(connected_components(inst)) == 1


def test_same_seed_is_bit_identical():
    cfg = GeneratorConfig(n_vertices=12, avg_degree=2.5, avg_out_degree=1.0, seed=99)
    a, b = generate(cfg), generate(cfg)
    assert a.labels == b.labels
    assert a.edges == b.edges
    assert a.arcs == b.arcs
    assert (a.part_cost == b.part_cost).all()
    assert (a.failure_rate == b.failure_rate).all()
    assert (a.edge_cost == b.edge_cost).all()


def test_different_seeds_differ():
    a = generate(GeneratorConfig(n_vertices=12, seed=1))
    b = generate(GeneratorConfig(n_vertices=12, seed=2))
    assert a.edges != b.edges or (a.edge_cost != b.edge_cost).any()


@pytest.mark.parametrize("seed", range(0, 1000, 10))
def test_batch_always_validates(seed):
    inst = generate(
        GeneratorConfig(n_vertices=20, avg_degree=3.0, avg_out_degree=1.0, seed=seed)
    )
    validate_instance(inst)  # raises on any structural violation
    assert inst.n_edges == 60
    assert inst.n_arcs == 60
    assert len(connected_components(inst)) == 1
    # every arc joins adjacent edges and the arc set has no duplicates
    assert len(set(inst.arcs)) == inst.n_arcs
    for i, j in inst.arcs:
        assert len(set(inst.edges[i]) & set(inst.edges[j])) == 1


def test_arc_counts_match_config():
    inst = generate(
        GeneratorConfig(n_vertices=15, avg_degree=2.0, avg_out_degree=1.5, seed=5)
    )
    assert inst.n_arcs == round(1.5 * inst.n_edges)


def test_too_many_edges_rejected():
    with pytest.raises(InfeasibleConfig):
        generate(GeneratorConfig(n_vertices=4, avg_degree=3.0, seed=0))


def test_too_few_edges_rejected():
    with pytest.raises(InfeasibleConfig):
        generate(GeneratorConfig(n_vertices=10, avg_degree=0.5, seed=0))


def test_too_many_arcs_rejected():
    with pytest.raises(InfeasibleConfig):
        generate(
            GeneratorConfig(n_vertices=4, avg_degree=1.0, avg_out_degree=50.0, seed=0)
        )


def test_scale_identity_and_inverse():
    inst = generate(GeneratorConfig(n_vertices=8, avg_degree=2.0, seed=11))
    same = scale_edge_weights(inst, 1.0)
    assert (same.edge_cost == inst.edge_cost).all()
    round_trip = scale_edge_weights(scale_edge_weights(inst, 0.1), 10.0)
    assert np.abs(round_trip.edge_cost - inst.edge_cost).max() < 1e-12


def test_scale_laptop(laptop):
    scaled = scale_edge_weights(laptop, 10.0)
    assert scaled.edge_cost[laptop.edge("A", "L")] == pytest.approx(25.0)


def test_scale_rejects_non_positive(laptop):
    with pytest.raises(NonPositiveFactor):
        scale_edge_weights(laptop, 0.0)


def test_parameter_ranges_respected():
    cfg = GeneratorConfig(
        n_vertices=30,
        avg_degree=2.0,
        seed=4,
        rate_range=(0.2, 0.3),
        cost_range=(5.0, 6.0),
        weight_range=(2.0, 3.0),
        edge_scale=10.0,
    )
    inst = generate(cfg)
    assert ((inst.failure_rate >= 0.2) & (inst.failure_rate <= 0.3)).all()
    assert ((inst.part_cost >= 5.0) & (inst.part_cost <= 6.0)).all()
    assert ((inst.edge_cost >= 20.0) & (inst.edge_cost <= 30.0)).all()
    assert inst.meta["generator"]["seed"] == 4
