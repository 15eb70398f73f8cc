"""Cost model for replaceable units and whole designs.

A unit Q fails at the summed rate of its members (failure rates are
additive here).  Each failure costs the break-and-reconnect weight of
the full removal set plus the purchase price of all members:

    omega(Q) = rate(Q) * (removal weight(Q) + purchase(Q))

A design is a partition of the parts; its yearly cost pi is the sum of
the member omegas.  Costs are plain float64; comparisons elsewhere use
a relative tolerance of 1e-9, which is generous for money-and-rate
magnitudes.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .disassembly import SuccessorSets, edge_mask_weight, removal_mask
from .errors import EmptyLru, NotAPartition
from .instance import SystemInstance

__all__ = [
    "Lru",
    "LruDesign",
    "lru_cost",
    "design_cost",
    "is_connected_design",
    "design_to_dict",
]

REL_TOL = 1e-9


@dataclass(frozen=True)
class Lru:
    """One replaceable unit with its cached cost ingredients."""

    members: frozenset[int]
    gamma: frozenset[int]
    rate: float
    purchase: float
    omega: float


@dataclass(frozen=True)
class LruDesign:
    """A partition of the parts into units, with the total yearly cost."""

    lrus: tuple[Lru, ...]
    pi: float

    def member_sets(self) -> list[frozenset[int]]:
        return [q.members for q in self.lrus]

    def canonical(self) -> tuple[tuple[int, ...], ...]:
        """Order-independent form used for comparisons and tie-breaks."""
        return tuple(sorted(tuple(sorted(q.members)) for q in self.lrus))


def lru_cost(
    inst: SystemInstance, closures: SuccessorSets, members: Iterable[int] | int
) -> Lru:
    """Evaluate one unit exactly; ``members`` may be an id set or bitmask."""
    mask = members if isinstance(members, int) else inst.vertex_mask(members)
    if mask == 0:
        raise EmptyLru(None, "a unit needs at least one part")
    gamma_mask = removal_mask(inst, closures, mask)
    rate = 0.0
    purchase = 0.0
    rest = mask
    ids = []
    while rest:
        low = rest & -rest
        v = low.bit_length() - 1
        ids.append(v)
        rate += inst.failure_rate[v]
        purchase += inst.part_cost[v]
        rest ^= low
    break_cost = edge_mask_weight(inst, gamma_mask)
    g = gamma_mask
    gamma_ids = []
    while g:
        low = g & -g
        gamma_ids.append(low.bit_length() - 1)
        g ^= low
    return Lru(
        members=frozenset(ids),
        gamma=frozenset(gamma_ids),
        rate=rate,
        purchase=purchase,
        omega=rate * (break_cost + purchase),
    )


def design_cost(
    inst: SystemInstance,
    closures: SuccessorSets,
    blocks: Sequence[Iterable[int] | int],
) -> LruDesign:
    """Evaluate a full design; blocks must partition the vertex set."""
    full = (1 << inst.n_vertices) - 1
    covered = 0
    lrus = []
    for block in blocks:
        mask = block if isinstance(block, int) else inst.vertex_mask(block)
        if mask == 0:
            raise EmptyLru(None, "designs may not contain empty units")
        overlap = covered & mask
        if overlap:
            v = (overlap & -overlap).bit_length() - 1
            raise NotAPartition(inst.labels[v], "part assigned to two units")
        covered |= mask
        lrus.append(lru_cost(inst, closures, mask))
    if covered != full:
        missing = full & ~covered
        v = (missing & -missing).bit_length() - 1
        raise NotAPartition(inst.labels[v], "part not covered by any unit")
    return LruDesign(lrus=tuple(lrus), pi=sum(q.omega for q in lrus))


def is_connected_design(
    inst: SystemInstance, blocks: Sequence[Iterable[int] | int]
) -> bool:
    """True iff every block induces a connected subgraph."""
    return all(inst.is_connected_set(b if isinstance(b, int) else inst.vertex_mask(b))
               for b in blocks)


def design_to_dict(inst: SystemInstance, design: LruDesign) -> dict:
    def edge_pair(e: int) -> list[str]:
        return sorted(inst.edge_labels(e))

    lrus_sorted = sorted(design.lrus, key=lambda q: sorted(q.members))
    return {
        "lrus": [sorted(inst.labels[v] for v in q.members) for q in lrus_sorted],
        "pi": design.pi,
        "per_lru": [
            {
                "members": sorted(inst.labels[v] for v in q.members),
                "omega": q.omega,
                "gamma": sorted(edge_pair(e) for e in q.gamma),
            }
            for q in lrus_sorted
        ],
    }
