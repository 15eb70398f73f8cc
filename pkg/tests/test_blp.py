import numpy as np
import pytest

from lru_design import build_instance, compute_successor_sets, design_cost, generate
from lru_design.blp import build_blp, encode_partition, solve_blp
from lru_design.colgen import solve_lru_design_colgen
from lru_design.generator import GeneratorConfig
from lru_design.milp import SolveLimits


def small_instance():
    return build_instance(
        vertices=[("a", 1.0, 0.1), ("b", 1.0, 0.1), ("c", 1.0, 0.1)],
        edges=[("a", "b", 1.0), ("b", "c", 1.0)],
    )


def test_variable_counts():
    inst = small_instance()
    closures = compute_successor_sets(inst)
    enc = build_blp(inst, closures)
    n, m = 3, 2
    assert enc.model.lp.n_cols == n * n + m * n + m * n * n + n * n * n
    assert enc.model.lp.n_cols == 9 + 6 + 18 + 27
    assert enc.model.binary == tuple(range(9 + 6))


def test_two_path_optimum(two_path):
    closures = compute_successor_sets(two_path)
    enc = build_blp(two_path, closures)
    res = solve_blp(enc, closures)
    assert res.status == "optimal"
    assert res.objective == pytest.approx(0.4)
    assert res.design.canonical() == ((0, 1),)


def test_single_vertex():
    inst = build_instance(vertices=[("v", 3.0, 0.5)], edges=[])
    closures = compute_successor_sets(inst)
    res = solve_blp(build_blp(inst, closures), closures)
    assert res.objective == pytest.approx(1.5)
    assert res.design.canonical() == ((0,),)


def test_encoding_prices_partitions_exactly():
    rng = np.random.default_rng(4)
    for seed in range(6):
        inst = generate(GeneratorConfig(n_vertices=6, avg_degree=1.5, seed=seed))
        closures = compute_successor_sets(inst)
        enc = build_blp(inst, closures)
        for _ in range(8):
            assignment = rng.integers(0, 3, size=6)
            blocks = [
                frozenset(v for v in range(6) if assignment[v] == b)
                for b in range(3)
                if (assignment == b).any()
            ]
            x = encode_partition(enc, closures, blocks)
            encoded = float(enc.model.lp.objective @ x)
            direct = design_cost(inst, closures, blocks).pi
            assert encoded == pytest.approx(direct, rel=1e-9)
            # the encoding is feasible for the program's rows
            lhs = enc.model.lp.rows @ x
            for row, sense, b in zip(lhs, enc.model.lp.senses, enc.model.lp.rhs):
                if sense == "=":
                    assert row == pytest.approx(b)
                else:
                    assert row <= b + 1e-9


def test_matches_colgen_on_random_instances():
    for seed in range(6):
        inst = generate(
            GeneratorConfig(
                n_vertices=6, avg_degree=1.5, edge_scale=(1.0, 6.0)[seed % 2], seed=seed
            )
        )
        closures = compute_successor_sets(inst)
        blp_res = solve_blp(build_blp(inst, closures), closures)
        cg_res = solve_lru_design_colgen(inst, closures)
        assert blp_res.status == "optimal"
        assert blp_res.objective == pytest.approx(cg_res.objective, abs=1e-6)


def test_fidelity_mode_agrees_with_symmetry_broken():
    inst = generate(GeneratorConfig(n_vertices=5, avg_degree=1.5, edge_scale=5.0, seed=9))
    closures = compute_successor_sets(inst)
    broken = solve_blp(build_blp(inst, closures, symmetry_breaking=True), closures)
    plain = solve_blp(build_blp(inst, closures, symmetry_breaking=False), closures)
    assert broken.objective == pytest.approx(plain.objective, abs=1e-6)


def test_slot_permutations_decode_identically():
    # fidelity mode may park blocks in any slots; the decoded design is
    # canonical regardless
    inst = generate(GeneratorConfig(n_vertices=5, avg_degree=1.5, edge_scale=5.0, seed=2))
    closures = compute_successor_sets(inst)
    a = solve_blp(build_blp(inst, closures, symmetry_breaking=True), closures)
    b = solve_blp(build_blp(inst, closures, symmetry_breaking=False), closures)
    assert a.design.canonical() == b.design.canonical()


def test_limit_reports_incumbent_or_none():
    inst = generate(GeneratorConfig(n_vertices=7, avg_degree=2.0, edge_scale=5.0, seed=3))
    closures = compute_successor_sets(inst)
    enc = build_blp(inst, closures)
    res = solve_blp(enc, closures, SolveLimits(node_cap=0))
    assert res.status in ("limit", "optimal")
    if res.status == "limit" and res.design is not None:
        # incumbent designs must still be valid partitions with true cost
        assert res.objective == pytest.approx(res.design.pi)
