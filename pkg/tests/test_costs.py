import math

import pytest
from hypothesis import given, settings, strategies as st

from lru_design import (
    compute_successor_sets,
    design_cost,
    generate,
    is_connected_design,
    lru_cost,
    scale_edge_weights,
)
from lru_design.costs import design_to_dict
from lru_design.errors import EmptyLru, NotAPartition
from lru_design.generator import GeneratorConfig

from .oracles import naive_omega


def test_palm_rest_cost(laptop, laptop_closures):
    q = lru_cost(laptop, laptop_closures, laptop.vertices("E"))
    assert math.isclose(q.omega, 0.001 * (325.0 + 45.0), rel_tol=1e-12)
    assert q.rate == pytest.approx(0.001)
    assert q.purchase == pytest.approx(45.0)


def test_two_path_costs(two_path):
    closures = compute_successor_sets(two_path)
    assert lru_cost(two_path, closures, {0}).omega == pytest.approx(0.1 * 11.0)
    assert lru_cost(two_path, closures, {0, 1}).omega == pytest.approx(0.2 * 2.0)
    assert design_cost(two_path, closures, [{0}, {1}]).pi == pytest.approx(2.2)
    assert design_cost(two_path, closures, [{0, 1}]).pi == pytest.approx(0.4)


def test_whole_system_has_no_break_cost(laptop, laptop_closures):
    q = lru_cost(laptop, laptop_closures, set(range(13)))
    assert q.gamma == frozenset()
    lam = laptop.failure_rate.sum()
    ell = laptop.part_cost.sum()
    assert q.omega == pytest.approx(lam * ell)


def test_all_singletons_design(laptop, laptop_closures):
    design = design_cost(laptop, laptop_closures, [{v} for v in range(13)])
    singles = sum(lru_cost(laptop, laptop_closures, {v}).omega for v in range(13))
    assert design.pi == pytest.approx(singles)


def test_overlap_rejected(two_path):
    closures = compute_successor_sets(two_path)
    with pytest.raises(NotAPartition):
        design_cost(two_path, closures, [{0, 1}, {1}])


def test_uncovered_rejected(two_path):
    closures = compute_successor_sets(two_path)
    with pytest.raises(NotAPartition):
        design_cost(two_path, closures, [{0}])


def test_empty_block_rejected(two_path):
    closures = compute_successor_sets(two_path)
    with pytest.raises(EmptyLru):
        design_cost(two_path, closures, [{0, 1}, set()])


def test_connected_design_checks(laptop):
    al = laptop.vertices(["A", "L"])
    rest = [{v} for v in range(13) if v not in al]
    assert is_connected_design(laptop, [al] + rest)
    ak = laptop.vertices(["A", "K"])
    rest = [{v} for v in range(13) if v not in ak]
    assert not is_connected_design(laptop, [ak] + rest)
    assert is_connected_design(laptop, [{v} for v in range(13)])


def test_omega_matches_naive_oracle_random():
    for seed in range(20):
        inst = generate(GeneratorConfig(n_vertices=8, avg_degree=2.0, seed=seed))
        closures = compute_successor_sets(inst)
        for q_mask in range(1, 1 << 8, 11):
            members = {v for v in range(8) if (q_mask >> v) & 1}
            got = lru_cost(inst, closures, members).omega
            assert got == pytest.approx(naive_omega(inst, members), rel=1e-9)


def test_splitting_disconnected_block_strictly_helps():
    # a block made of two far-apart parts always costs more than its pieces
    for seed in range(25):
        inst = generate(GeneratorConfig(n_vertices=10, avg_degree=1.5, seed=seed))
        closures = compute_successor_sets(inst)
        pair = None
        for u in range(10):
            for v in range(u + 1, 10):
                if not inst.is_connected_set({u, v}):
                    pair = {u, v}
                    break
            if pair:
                break
        if pair is None:
            continue
        rest = [{v} for v in range(10) if v not in pair]
        merged = design_cost(inst, closures, [pair] + rest)
        split = design_cost(inst, closures, [{v} for v in range(10)])
        assert split.pi < merged.pi


@settings(max_examples=40, deadline=None)
@given(
    seed=st.integers(min_value=0, max_value=5000),
    factor=st.floats(min_value=0.05, max_value=50.0, allow_nan=False),
)
def test_scaling_scales_costs_linearly(seed, factor):
    inst = generate(GeneratorConfig(n_vertices=7, avg_degree=2.0, seed=seed))
    closures = compute_successor_sets(inst)
    base = design_cost(inst, closures, [{0, }, set(range(1, 7))])
    # scale both break and purchase costs by the same factor
    scaled_inst = scale_edge_weights(inst, factor)
    scaled_inst = scaled_inst.__class__(
        labels=scaled_inst.labels,
        edges=scaled_inst.edges,
        arcs=scaled_inst.arcs,
        part_cost=scaled_inst.part_cost * factor,
        failure_rate=scaled_inst.failure_rate.copy(),
        edge_cost=scaled_inst.edge_cost.copy(),
        meta={},
    )
    scaled = design_cost(scaled_inst, compute_successor_sets(scaled_inst), [{0}, set(range(1, 7))])
    assert scaled.pi == pytest.approx(base.pi * factor, rel=1e-9)


def test_omega_positive_random():
    inst = generate(GeneratorConfig(n_vertices=6, avg_degree=2.0, seed=3))
    closures = compute_successor_sets(inst)
    for q_mask in range(1, 1 << 6):
        assert lru_cost(inst, closures, q_mask).omega > 0


def test_design_json_shape(two_path):
    closures = compute_successor_sets(two_path)
    design = design_cost(two_path, closures, [{0}, {1}])
    doc = design_to_dict(two_path, design)
    assert doc["lrus"] == [["1"], ["2"]]
    assert doc["pi"] == pytest.approx(2.2)
    assert doc["per_lru"][0]["gamma"] == [["1", "2"]]
    assert doc["per_lru"][0]["omega"] == pytest.approx(1.1)
