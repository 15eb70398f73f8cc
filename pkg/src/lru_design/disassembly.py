"""Disassembly sets: successor closures, boundary edges, removal sets.

Breaking a connection can require breaking others first.  For each edge
e the *successor closure* H(e) collects every edge (including e itself)
that must come loose before or together with e, i.e. everything
reachable from e in the precedence graph.  Removing a vertex set Q then
requires breaking its boundary edges B(Q) plus all their successors:

    B(Q) = edges with exactly one endpoint in Q
    removal(Q) = union of H(e) over e in B(Q)

The removal set may contain edges with both endpoints inside Q; that is
a genuine physical effect (think of cutting a chain to lift it off two
cog wheels), not an artefact.

Closures are stored as int bitmasks over edge ids, so unions in the
pricing and enumeration loops are single big-int ORs.
"""
from __future__ import annotations

import graphlib
from dataclasses import dataclass
from typing import Iterable

from .errors import EmptyLru
from .instance import SystemInstance

__all__ = [
    "SuccessorSets",
    "compute_successor_sets",
    "boundary_mask",
    "boundary_edges",
    "removal_mask",
    "removal_set",
    "edge_mask_weight",
]


@dataclass(frozen=True)
class SuccessorSets:
    """Per-edge successor closures, as bitmasks over edge ids."""

    masks: tuple[int, ...]

    def __getitem__(self, e: int) -> frozenset[int]:
        mask = self.masks[e]
        return frozenset(_iter_bits(mask))

    def __len__(self) -> int:
        return len(self.masks)

    def mask(self, e: int) -> int:
        return self.masks[e]


def _iter_bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def compute_successor_sets(inst: SystemInstance) -> SuccessorSets:
    """Close every edge over its precedence successors.

    Edges are processed so that all successors of e are finished before
    e itself, which makes H(e) = {e} | union of H(z) over arcs (e, z) a
    single pass.  Requires an acyclic precedence graph, which validation
    guarantees.
    """
    succ: list[list[int]] = [[] for _ in range(inst.n_edges)]
    for i, j in inst.arcs:
        succ[i].append(j)

    sorter = graphlib.TopologicalSorter()
    for e in range(inst.n_edges):
        # list successors as predecessors so they are emitted first
        sorter.add(e, *succ[e])
    masks = [0] * inst.n_edges
    for e in sorter.static_order():
        mask = 1 << e
        for z in succ[e]:
            mask |= masks[z]
        masks[e] = mask
    return SuccessorSets(tuple(masks))


def _as_mask(inst: SystemInstance, members: Iterable[int] | int) -> int:
    if isinstance(members, int):
        return members
    return inst.vertex_mask(members)


def boundary_mask(inst: SystemInstance, q_mask: int) -> int:
    """Bitmask of edges with exactly one endpoint inside q_mask."""
    out = 0
    rest = q_mask
    while rest:
        low = rest & -rest
        out ^= inst.incident_mask[low.bit_length() - 1]
        rest ^= low
    # edges with both endpoints inside were toggled twice and cancel;
    # edges fully outside were never toggled
    return out


def boundary_edges(inst: SystemInstance, members: Iterable[int] | int) -> frozenset[int]:
    """Edges crossing the boundary of the nonempty vertex set ``members``."""
    q_mask = _as_mask(inst, members)
    if q_mask == 0:
        raise EmptyLru(None, "boundary of the empty set")
    return frozenset(_iter_bits(boundary_mask(inst, q_mask)))


def removal_mask(inst: SystemInstance, closures: SuccessorSets, q_mask: int) -> int:
    gamma = 0
    b = boundary_mask(inst, q_mask)
    masks = closures.masks
    while b:
        low = b & -b
        gamma |= masks[low.bit_length() - 1]
        b ^= low
    return gamma


def removal_set(
    inst: SystemInstance, closures: SuccessorSets, members: Iterable[int] | int
) -> frozenset[int]:
    """All edges that must be broken to take the set ``members`` out."""
    q_mask = _as_mask(inst, members)
    if q_mask == 0:
        raise EmptyLru(None, "removal set of the empty set")
    return frozenset(_iter_bits(removal_mask(inst, closures, q_mask)))


def edge_mask_weight(inst: SystemInstance, mask: int) -> float:
    """Total break cost of the edges in ``mask``."""
    total = 0.0
    w = inst.edge_cost
    while mask:
        low = mask & -mask
        total += w[low.bit_length() - 1]
        mask ^= low
    return total
