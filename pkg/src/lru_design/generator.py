"""Seeded random instance generator.

Construction, for a target of round(delta * n) edges and
round(delta_e * |E|) arcs:

1. Grow a uniform random spanning tree attachment by attachment, so the
   connection graph is always connected.
2. Top up with uniformly sampled missing edges until the edge budget is
   reached (the tree edges count toward the budget).
3. Assign every edge a distinct random rank, then repeatedly sample an
   adjacent edge pair and orient the arc from the lower-ranked edge to
   the higher-ranked one.  Ranks only increase along arcs, so the
   precedence graph is acyclic by construction.  Duplicate draws are
   rejected; a long run of consecutive rejections aborts generation.

Rates, part costs and edge weights are drawn uniformly from the
configured ranges (defaults mirror the bundled laptop's magnitudes) and
edge weights are finally scaled by the factor q.

All randomness comes from a single PCG64 stream per instance, so equal
seeds give bit-identical instances on every platform.  Batch runs
derive per-run seeds as ``seed + run_index``.
"""
from __future__ import annotations

from dataclasses import dataclass, field, asdict

import numpy as np

from .errors import InfeasibleConfig, NonPositiveFactor
from .instance import SystemInstance, build_instance, validate_instance

__all__ = ["GeneratorConfig", "generate", "scale_edge_weights"]


@dataclass(frozen=True)
class GeneratorConfig:
    """Knobs for one random instance.

    ``avg_degree`` is the average vertex degree of the connection graph
    (|E| = round(avg_degree * n)); ``avg_out_degree`` the average
    out-degree of an edge in the precedence graph
    (|A| = round(avg_out_degree * |E|)).
    """

    n_vertices: int
    avg_degree: float = 3.0
    avg_out_degree: float = 1.0
    edge_scale: float = 1.0
    seed: int = 0
    rate_range: tuple[float, float] = (0.01, 0.5)
    cost_range: tuple[float, float] = (10.0, 300.0)
    weight_range: tuple[float, float] = (1.0, 120.0)


def _target_counts(config: GeneratorConfig) -> tuple[int, int]:
    n = config.n_vertices
    if n < 1:
        raise InfeasibleConfig(n, "need at least one vertex")
    n_edges = int(round(config.avg_degree * n))
    if n > 1 and n_edges < n - 1:
        raise InfeasibleConfig(
            config.avg_degree, f"{n_edges} edges cannot span {n} vertices"
        )
    if n_edges > n * (n - 1) // 2:
        raise InfeasibleConfig(
            config.avg_degree, f"{n_edges} edges exceed the simple-graph maximum"
        )
    n_arcs = int(round(config.avg_out_degree * n_edges))
    return n_edges, n_arcs


def generate(config: GeneratorConfig) -> SystemInstance:
    """Draw one validated instance; deterministic given the seed."""
    n = config.n_vertices
    n_edges, n_arcs = _target_counts(config)
    if config.edge_scale <= 0:
        raise NonPositiveFactor(config.edge_scale)
    rng = np.random.Generator(np.random.PCG64(config.seed))

    edges: list[tuple[int, int]] = []
    edge_set: set[tuple[int, int]] = set()

    def add_edge(u: int, v: int) -> None:
        pair = (min(u, v), max(u, v))
        edges.append(pair)
        edge_set.add(pair)

    if n > 1:
        considered = [0]
        remaining = list(range(1, n))
        while remaining:
            u = remaining.pop(int(rng.integers(len(remaining))))
            z = considered[int(rng.integers(len(considered)))]
            add_edge(u, z)
            considered.append(u)
        while len(edges) < n_edges:
            u = int(rng.integers(n))
            v = int(rng.integers(n))
            if u == v:
                continue
            pair = (min(u, v), max(u, v))
            if pair in edge_set:
                continue
            add_edge(*pair)

    adjacent_pairs: list[tuple[int, int]] = []
    for a in range(len(edges)):
        for b in range(a + 1, len(edges)):
            if len(set(edges[a]) & set(edges[b])) == 1:
                adjacent_pairs.append((a, b))
    if n_arcs > len(adjacent_pairs):
        raise InfeasibleConfig(
            config.avg_out_degree,
            f"{n_arcs} arcs requested but only {len(adjacent_pairs)} adjacent edge pairs exist",
        )

    rank = rng.permutation(len(edges))
    arcs: list[tuple[int, int]] = []
    arc_set: set[tuple[int, int]] = set()
    rejections = 0
    while len(arcs) < n_arcs:
        a, b = adjacent_pairs[int(rng.integers(len(adjacent_pairs)))]
        arc = (a, b) if rank[a] <= rank[b] else (b, a)
        if arc in arc_set:
            rejections += 1
            if rejections >= 10 * max(n_arcs, 1):
                raise InfeasibleConfig(
                    config.avg_out_degree,
                    "too many duplicate arc draws; lower avg_out_degree",
                )
            continue
        rejections = 0
        arcs.append(arc)
        arc_set.add(arc)

    rates = rng.uniform(*config.rate_range, size=n)
    costs = rng.uniform(*config.cost_range, size=n)
    weights = rng.uniform(*config.weight_range, size=len(edges)) * config.edge_scale

    labels = [str(v) for v in range(n)]
    inst = build_instance(
        vertices=[(labels[v], float(costs[v]), float(rates[v])) for v in range(n)],
        edges=[
            (labels[u], labels[v], float(weights[e]))
            for e, (u, v) in enumerate(edges)
        ],
        arcs=[
            (
                (labels[edges[i][0]], labels[edges[i][1]]),
                (labels[edges[j][0]], labels[edges[j][1]]),
            )
            for i, j in arcs
        ],
        meta={"generator": asdict(config)},
    )
    return inst


def scale_edge_weights(inst: SystemInstance, q: float) -> SystemInstance:
    """Copy of the instance with every edge weight multiplied by q > 0."""
    if q <= 0:
        raise NonPositiveFactor(q)
    meta = dict(inst.meta)
    meta["edge_scale_applied"] = meta.get("edge_scale_applied", 1.0) * q
    scaled = SystemInstance(
        labels=inst.labels,
        edges=inst.edges,
        arcs=inst.arcs,
        part_cost=inst.part_cost.copy(),
        failure_rate=inst.failure_rate.copy(),
        edge_cost=inst.edge_cost * q,
        meta=meta,
    )
    return validate_instance(scaled)
