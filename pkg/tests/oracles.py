"""Independent slow reference implementations used only by tests.

Everything here recomputes results from first principles (plain sets,
explicit DFS) so that the bitmask production code is checked against a
structurally different path.
"""
from __future__ import annotations

import itertools

from lru_design.instance import SystemInstance


def dfs_successors(inst: SystemInstance, e: int) -> set[int]:
    """Edges reachable from e in the precedence digraph, plus e."""
    out: dict[int, list[int]] = {k: [] for k in range(inst.n_edges)}
    for i, j in inst.arcs:
        out[i].append(j)
    seen = {e}
    stack = [e]
    while stack:
        cur = stack.pop()
        for nxt in out[cur]:
            if nxt not in seen:
                seen.add(nxt)
                stack.append(nxt)
    return seen


def naive_boundary(inst: SystemInstance, members: set[int]) -> set[int]:
    return {
        e
        for e, (u, v) in enumerate(inst.edges)
        if (u in members) != (v in members)
    }


def naive_removal(inst: SystemInstance, members: set[int]) -> set[int]:
    gamma: set[int] = set()
    for e in naive_boundary(inst, members):
        gamma |= dfs_successors(inst, e)
    return gamma


def naive_omega(inst: SystemInstance, members: set[int]) -> float:
    rate = sum(inst.failure_rate[v] for v in members)
    purchase = sum(inst.part_cost[v] for v in members)
    breaking = sum(inst.edge_cost[e] for e in naive_removal(inst, members))
    return rate * (breaking + purchase)


def naive_connected(inst: SystemInstance, members: set[int]) -> bool:
    members = set(members)
    if not members:
        return False
    seen = {next(iter(sorted(members)))}
    stack = list(seen)
    while stack:
        cur = stack.pop()
        for u, v in inst.edges:
            if u == cur and v in members and v not in seen:
                seen.add(v)
                stack.append(v)
            if v == cur and u in members and u not in seen:
                seen.add(u)
                stack.append(u)
    return seen == members


def all_partitions(items: list[int]):
    """Every partition of ``items`` into nonempty blocks (Bell-size)."""
    if not items:
        yield []
        return
    head, rest = items[0], items[1:]
    for part in all_partitions(rest):
        for i in range(len(part)):
            yield part[:i] + [part[i] | {head}] + part[i + 1 :]
        yield part + [{head}]


def connected_partitions(inst: SystemInstance):
    for part in all_partitions(list(range(inst.n_vertices))):
        if all(naive_connected(inst, block) for block in part):
            yield part


def naive_best_design(inst: SystemInstance):
    """Exhaustive minimum over every partition (not just connected ones)."""
    best = None
    best_part = None
    for part in all_partitions(list(range(inst.n_vertices))):
        cost = sum(naive_omega(inst, block) for block in part)
        if best is None or cost < best - 1e-12:
            best, best_part = cost, part
    return best, best_part


def all_subsets(items: list[int]):
    for r in range(1, len(items) + 1):
        yield from (set(c) for c in itertools.combinations(items, r))
