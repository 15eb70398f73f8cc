"""System description: parts, connections, and disassembly precedence.

A system is a weighted undirected *connection graph* (vertices are
parts, edges are physical connections) together with an acyclic
directed *precedence graph* whose nodes are the connection-graph edges.
An arc (i, j) means connection j has to be broken before connection i
can be broken.  Note the direction: prose often reads the other way
round, but the arc points from the edge that is blocked to the edge
that blocks it, matching the on-disk format documented below.

Vertices and edges are referred to internally by dense integer ids;
labels exist only at the JSON boundary.  Vertex subsets and edge
subsets are passed around as Python int bitmasks in the hot paths, so
the instance precomputes neighbour and incident-edge masks.

JSON schema::

    {"vertices": [{"id": "A", "cost": 180.0, "rate": 0.3}, ...],
     "edges":    [{"u": "A", "v": "L", "w": 2.5}, ...],
     "arcs":     [{"from": ["D", "L"], "to": ["D", "M"]}, ...],
     "meta":     {...}}                      # optional, echoed back

Edge endpoints are unordered and arcs refer to edges by endpoint pair.
``{"from": i, "to": j}`` means edge j must be broken before edge i.
"""
from __future__ import annotations

import graphlib
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    CyclicPrecedence,
    DuplicateArc,
    DuplicateEdge,
    DuplicateLabel,
    NonAdjacentArc,
    NonPositiveParameter,
    SelfLoop,
    UnknownElement,
    ValidationError,
)

__all__ = [
    "SystemInstance",
    "build_instance",
    "validate_instance",
    "connected_components",
    "load_instance",
    "dump_instance",
    "instance_to_dict",
]


@dataclass(frozen=True)
class SystemInstance:
    """Immutable system description with precomputed bitmask tables.

    ``edges[e]`` is the canonical (u, v) pair with u < v; ``arcs`` are
    (from_edge, to_edge) pairs of edge ids.  All operations treat the
    instance as read-only, so it is safe to share across workers.
    """

    labels: tuple[str, ...]
    edges: tuple[tuple[int, int], ...]
    arcs: tuple[tuple[int, int], ...]
    part_cost: np.ndarray
    failure_rate: np.ndarray
    edge_cost: np.ndarray
    meta: dict = field(default_factory=dict, compare=False)

    # derived tables, filled in __post_init__
    label_index: dict = field(init=False, repr=False, compare=False)
    edge_index: dict = field(init=False, repr=False, compare=False)
    adj_mask: tuple = field(init=False, repr=False, compare=False)
    incident_mask: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        for arr in (self.part_cost, self.failure_rate, self.edge_cost):
            arr.setflags(write=False)
        object.__setattr__(
            self, "label_index", {lab: v for v, lab in enumerate(self.labels)}
        )
        object.__setattr__(
            self, "edge_index", {uv: e for e, uv in enumerate(self.edges)}
        )
        n = len(self.labels)
        adj = [0] * n
        inc = [0] * n
        for e, (u, v) in enumerate(self.edges):
            adj[u] |= 1 << v
            adj[v] |= 1 << u
            inc[u] |= 1 << e
            inc[v] |= 1 << e
        object.__setattr__(self, "adj_mask", tuple(adj))
        object.__setattr__(self, "incident_mask", tuple(inc))

    @property
    def n_vertices(self) -> int:
        return len(self.labels)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @property
    def n_arcs(self) -> int:
        return len(self.arcs)

    def vertex(self, label: str) -> int:
        try:
            return self.label_index[label]
        except KeyError:
            raise UnknownElement(label, "no such vertex") from None

    def vertices(self, labels: Iterable[str]) -> frozenset[int]:
        return frozenset(self.vertex(lab) for lab in labels)

    def edge(self, u_label: str, v_label: str) -> int:
        u, v = self.vertex(u_label), self.vertex(v_label)
        try:
            return self.edge_index[(min(u, v), max(u, v))]
        except KeyError:
            raise UnknownElement((u_label, v_label), "no such edge") from None

    def edge_labels(self, e: int) -> frozenset[str]:
        u, v = self.edges[e]
        return frozenset((self.labels[u], self.labels[v]))

    def edge_set(self, pairs: Iterable[tuple[str, str]]) -> frozenset[int]:
        return frozenset(self.edge(u, v) for u, v in pairs)

    def vertex_mask(self, members: Iterable[int]) -> int:
        mask = 0
        for v in members:
            mask |= 1 << v
        return mask

    def is_connected_set(self, members: Iterable[int] | int) -> bool:
        """True iff the given vertex set induces a connected subgraph."""
        mask = members if isinstance(members, int) else self.vertex_mask(members)
        if mask == 0:
            return False
        reached = mask & -mask
        while True:
            frontier = reached
            grow = 0
            while frontier:
                low = frontier & -frontier
                grow |= self.adj_mask[low.bit_length() - 1]
                frontier ^= low
            new = reached | (grow & mask)
            if new == reached:
                break
            reached = new
        return reached == mask


def build_instance(
    vertices: Sequence[tuple[str, float, float]],
    edges: Sequence[tuple[str, str, float]],
    arcs: Sequence[tuple[tuple[str, str], tuple[str, str]]] = (),
    meta: dict | None = None,
) -> SystemInstance:
    """Assemble and validate an instance from labelled parts.

    ``vertices`` are (label, purchase_cost, failure_rate) triples,
    ``edges`` are (u, v, break_cost) triples, and ``arcs`` are
    ((u1, v1), (u2, v2)) pairs meaning the second edge must be broken
    before the first.
    """
    labels = tuple(lab for lab, _, _ in vertices)
    seen: set[str] = set()
    for lab in labels:
        if lab in seen:
            raise DuplicateLabel(lab)
        seen.add(lab)
    index = {lab: i for i, lab in enumerate(labels)}

    def vid(lab: str) -> int:
        if lab not in index:
            raise UnknownElement(lab, "edge endpoint is not a vertex")
        return index[lab]

    edge_pairs: list[tuple[int, int]] = []
    for u_lab, v_lab, _ in edges:
        u, v = vid(u_lab), vid(v_lab)
        if u == v:
            raise SelfLoop((u_lab, v_lab))
        edge_pairs.append((min(u, v), max(u, v)))

    edge_of = {}
    for e, pair in enumerate(edge_pairs):
        if pair in edge_of:
            raise DuplicateEdge(tuple(sorted((edges[e][0], edges[e][1]))))
        edge_of[pair] = e

    def eid(pair: tuple[str, str]) -> int:
        u, v = vid(pair[0]), vid(pair[1])
        key = (min(u, v), max(u, v))
        if key not in edge_of:
            raise UnknownElement(tuple(pair), "arc endpoint is not an edge")
        return edge_of[key]

    arc_pairs = tuple((eid(a), eid(b)) for a, b in arcs)

    inst = SystemInstance(
        labels=labels,
        edges=tuple(edge_pairs),
        arcs=arc_pairs,
        part_cost=np.array([c for _, c, _ in vertices], dtype=float),
        failure_rate=np.array([r for _, _, r in vertices], dtype=float),
        edge_cost=np.array([w for _, _, w in edges], dtype=float),
        meta=dict(meta or {}),
    )
    return validate_instance(inst)


def validate_instance(inst: SystemInstance) -> SystemInstance:
    """Check every structural invariant, returning the instance unchanged.

    Raises the error for the first violated rule: positive parameters,
    simple edges, arcs joining adjacent edges (sharing exactly one
    vertex), no duplicate arcs, and an acyclic precedence graph.
    """
    for v, lab in enumerate(inst.labels):
        if not inst.part_cost[v] > 0:
            raise NonPositiveParameter(lab, f"part cost {inst.part_cost[v]}")
        if not inst.failure_rate[v] > 0:
            raise NonPositiveParameter(lab, f"failure rate {inst.failure_rate[v]}")

    seen_edges: set[tuple[int, int]] = set()
    for e, (u, v) in enumerate(inst.edges):
        if u == v:
            raise SelfLoop(inst.labels[u])
        if not (0 <= u < inst.n_vertices and 0 <= v < inst.n_vertices):
            raise UnknownElement((u, v), "edge endpoint out of range")
        if u > v:
            raise ValidationError((u, v), "edge pair not canonical")
        if (u, v) in seen_edges:
            raise DuplicateEdge((inst.labels[u], inst.labels[v]))
        seen_edges.add((u, v))
        if not inst.edge_cost[e] > 0:
            raise NonPositiveParameter(
                (inst.labels[u], inst.labels[v]), f"edge cost {inst.edge_cost[e]}"
            )

    seen_arcs: set[tuple[int, int]] = set()
    for i, j in inst.arcs:
        if not (0 <= i < inst.n_edges and 0 <= j < inst.n_edges):
            raise UnknownElement((i, j), "arc endpoint out of range")
        shared = set(inst.edges[i]) & set(inst.edges[j])
        if i == j or len(shared) != 1:
            raise NonAdjacentArc(
                (tuple(inst.edge_labels(i)), tuple(inst.edge_labels(j))),
                "arcs must join distinct edges sharing exactly one vertex",
            )
        if (i, j) in seen_arcs:
            raise DuplicateArc((tuple(inst.edge_labels(i)), tuple(inst.edge_labels(j))))
        seen_arcs.add((i, j))

    sorter = graphlib.TopologicalSorter()
    for e in range(inst.n_edges):
        sorter.add(e)
    for i, j in inst.arcs:
        # j precedes i in any feasible breaking order
        sorter.add(i, j)
    try:
        sorter.prepare()
    except graphlib.CycleError as exc:
        cycle = [tuple(inst.edge_labels(e)) for e in exc.args[1]]
        raise CyclicPrecedence(cycle) from None
    return inst


def connected_components(inst: SystemInstance) -> list[SystemInstance]:
    """Split the connection graph into components with induced precedence.

    Arcs only join adjacent edges, so every arc stays inside a single
    component and the split loses nothing.  A connected instance comes
    back as the single component (a fresh but equal object).
    """
    n = inst.n_vertices
    unseen = (1 << n) - 1
    parts: list[int] = []
    while unseen:
        seed = unseen & -unseen
        mask = seed
        while True:
            frontier = mask
            grow = 0
            while frontier:
                low = frontier & -frontier
                grow |= inst.adj_mask[low.bit_length() - 1]
                frontier ^= low
            new = mask | grow
            if new == mask:
                break
            mask = new
        parts.append(mask)
        unseen &= ~mask

    out = []
    for mask in parts:
        verts = [v for v in range(n) if (mask >> v) & 1]
        vmap = {v: i for i, v in enumerate(verts)}
        edge_ids = [e for e, (u, v) in enumerate(inst.edges) if (mask >> u) & 1]
        emap = {e: i for i, e in enumerate(edge_ids)}
        sub = SystemInstance(
            labels=tuple(inst.labels[v] for v in verts),
            edges=tuple(
                (vmap[inst.edges[e][0]], vmap[inst.edges[e][1]]) for e in edge_ids
            ),
            arcs=tuple(
                (emap[i], emap[j]) for i, j in inst.arcs if i in emap and j in emap
            ),
            part_cost=inst.part_cost[verts].copy(),
            failure_rate=inst.failure_rate[verts].copy(),
            edge_cost=inst.edge_cost[edge_ids].copy(),
            meta=dict(inst.meta),
        )
        out.append(sub)
    return out


def instance_to_dict(inst: SystemInstance) -> dict:
    doc = {
        "vertices": [
            {
                "id": lab,
                "cost": float(inst.part_cost[v]),
                "rate": float(inst.failure_rate[v]),
            }
            for v, lab in enumerate(inst.labels)
        ],
        "edges": [
            {
                "u": inst.labels[u],
                "v": inst.labels[v],
                "w": float(inst.edge_cost[e]),
            }
            for e, (u, v) in enumerate(inst.edges)
        ],
        "arcs": [
            {
                "from": sorted(inst.edge_labels(i)),
                "to": sorted(inst.edge_labels(j)),
            }
            for i, j in inst.arcs
        ],
    }
    if inst.meta:
        doc["meta"] = inst.meta
    return doc


def dump_instance(inst: SystemInstance, path: str | Path) -> None:
    Path(path).write_text(json.dumps(instance_to_dict(inst), indent=2) + "\n")


def _require(doc: dict, key: str) -> object:
    if key not in doc:
        raise ValidationError(key, "missing required field")
    return doc[key]


def load_instance(source: str | Path | dict) -> SystemInstance:
    """Parse the JSON schema above and return a validated instance."""
    if isinstance(source, dict):
        doc = source
    else:
        text = Path(source).read_text()
        doc = json.loads(text)
    try:
        vertices = [
            (str(_require(v, "id")), float(_require(v, "cost")), float(_require(v, "rate")))
            for v in _require(doc, "vertices")
        ]
        edges = [
            (str(_require(e, "u")), str(_require(e, "v")), float(_require(e, "w")))
            for e in _require(doc, "edges")
        ]
        arcs = [
            (tuple(_require(a, "from")), tuple(_require(a, "to")))
            for a in doc.get("arcs", [])
        ]
    except (TypeError, ValueError) as exc:
        raise ValidationError(None, f"malformed instance document: {exc}") from None
    return build_instance(vertices, edges, arcs, meta=doc.get("meta"))
