"""Exhaustive desk-scale solvers used as ground truth.

``bruteforce_design`` walks every partition of the parts into connected
blocks (disconnected blocks are strictly dominated by their components,
so nothing is lost) via subset-mask dynamic programming.
``bruteforce_price`` scans *all* nonempty vertex subsets, connected or
not, in Gray-code order so each step flips one vertex in and out of the
boundary.  Both exist to check the clever paths, so they stay simple.
"""
from __future__ import annotations

from functools import lru_cache

from .costs import LruDesign, design_cost
from .disassembly import SuccessorSets, edge_mask_weight, removal_mask
from .errors import InstanceTooLarge
from .instance import SystemInstance

__all__ = [
    "bruteforce_design",
    "bruteforce_price",
    "connected_subsets",
    "partition_blocks_dp",
]


def connected_subsets(inst: SystemInstance) -> list[int]:
    """All vertex masks inducing connected subgraphs, ascending."""
    n = inst.n_vertices
    return [mask for mask in range(1, 1 << n) if inst.is_connected_set(mask)]


def partition_blocks_dp(
    n_vertices: int, block_cost: dict[int, float]
) -> tuple[float, tuple[int, ...]]:
    """Minimum-cost partition of all vertices into the given blocks.

    ``block_cost`` maps vertex masks to their cost; the recursion always
    branches on the lowest uncovered vertex, so each state is visited
    once.  Exact float ties are broken toward the lexicographically
    smallest canonical block list, which makes results reproducible on
    symmetric inputs.
    """
    by_pivot: list[list[int]] = [[] for _ in range(n_vertices)]
    for mask in sorted(block_cost):
        by_pivot[(mask & -mask).bit_length() - 1].append(mask)

    @lru_cache(maxsize=None)
    def best(remaining: int) -> tuple[float, tuple[int, ...]]:
        if remaining == 0:
            return 0.0, ()
        pivot = (remaining & -remaining).bit_length() - 1
        best_cost = None
        best_blocks: tuple[int, ...] = ()
        for mask in by_pivot[pivot]:
            if mask & ~remaining:
                continue
            sub_cost, sub_blocks = best(remaining & ~mask)
            cost = block_cost[mask] + sub_cost
            blocks = tuple(sorted((mask, *sub_blocks)))
            if (
                best_cost is None
                or cost < best_cost
                or (cost == best_cost and blocks < best_blocks)
            ):
                best_cost, best_blocks = cost, blocks
        if best_cost is None:
            raise ValueError(f"no block covers vertex {pivot}")
        return best_cost, best_blocks

    result = best((1 << n_vertices) - 1)
    best.cache_clear()
    return result


def bruteforce_design(
    inst: SystemInstance, closures: SuccessorSets, cap: int = 13
) -> LruDesign:
    """Exact optimum by enumerating connected-block partitions."""
    if inst.n_vertices > cap:
        raise InstanceTooLarge(
            f"exhaustive design capped at {cap} vertices, got {inst.n_vertices}"
        )
    lam = inst.failure_rate
    ell = inst.part_cost
    costs: dict[int, float] = {}
    for mask in connected_subsets(inst):
        rate = 0.0
        purchase = 0.0
        rest = mask
        while rest:
            low = rest & -rest
            v = low.bit_length() - 1
            rate += lam[v]
            purchase += ell[v]
            rest ^= low
        breaking = edge_mask_weight(inst, removal_mask(inst, closures, mask))
        costs[mask] = rate * (breaking + purchase)
    _, blocks = partition_blocks_dp(inst.n_vertices, costs)
    return design_cost(inst, closures, list(blocks))


def bruteforce_price(
    inst: SystemInstance, closures: SuccessorSets, duals, cap: int = 18
) -> tuple[frozenset[int], float]:
    """Exact minimum reduced cost over every nonempty vertex subset."""
    n = inst.n_vertices
    if n > cap:
        raise InstanceTooLarge(
            f"exhaustive pricing capped at {cap} vertices, got {n}"
        )
    lam = [float(x) for x in inst.failure_rate]
    ell = [float(x) for x in inst.part_cost]
    r = [float(x) for x in duals]
    inc = inst.incident_mask
    h_masks = closures.masks

    best = None
    best_mask = 0
    mask = 0
    boundary = 0
    lam_q = ell_q = r_q = 0.0
    prev_gray = 0
    for k in range(1, 1 << n):
        gray = k ^ (k >> 1)
        flip = (gray ^ prev_gray).bit_length() - 1
        prev_gray = gray
        boundary ^= inc[flip]
        sign = 1.0 if (gray >> flip) & 1 else -1.0
        lam_q += sign * lam[flip]
        ell_q += sign * ell[flip]
        r_q += sign * r[flip]
        mask = gray

        gamma = 0
        rest = boundary
        while rest:
            low = rest & -rest
            gamma |= h_masks[low.bit_length() - 1]
            rest ^= low
        rc = lam_q * (edge_mask_weight(inst, gamma) + ell_q) - r_q
        if best is None or rc < best - 1e-15:
            best, best_mask = rc, mask
    members = frozenset(
        v for v in range(n) if (best_mask >> v) & 1
    )
    return members, float(best)
