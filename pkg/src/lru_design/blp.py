"""Monolithic binary linear program over unit slots.

The benchmark formulation assigns every part to one of n slots (empty
slots allowed), linearising the quadratic cost with per-slot McCormick
products: rho[e,v,i] = k[e,i]*y[v,i] carries the break cost of edge e
against the rate of part v, sigma[u,v,i] = y[u,i]*y[v,i] the purchase
cost of u against the rate of v.  Break indicators are forced up by the
boundary rows (one per edge orientation, per closure member, per slot).

Slots are interchangeable, which is brutal on branch-and-bound, so by
default each part may only occupy slots up to its own index (ordering
blocks by smallest member makes that lossless).  Fidelity mode keeps
the plain formulation.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .costs import LruDesign, design_cost
from .disassembly import SuccessorSets
from .instance import SystemInstance
from .milp import MilpModel, SolveLimits, solve_milp
from .simplex import LpModel

__all__ = ["BlpEncoding", "BlpResult", "build_blp", "solve_blp", "encode_partition"]


@dataclass
class BlpEncoding:
    """Index bookkeeping plus the assembled program."""

    inst: SystemInstance
    model: MilpModel
    n_slots: int
    symmetry_breaking: bool

    def y(self, v: int, i: int) -> int:
        return v * self.n_slots + i

    def k(self, e: int, i: int) -> int:
        n = self.inst.n_vertices
        return n * n + e * self.n_slots + i

    def rho(self, e: int, v: int, i: int) -> int:
        n, m = self.inst.n_vertices, self.inst.n_edges
        return n * n + m * n + (e * n + v) * self.n_slots + i

    def sigma(self, u: int, v: int, i: int) -> int:
        n, m = self.inst.n_vertices, self.inst.n_edges
        return n * n + m * n + m * n * n + (u * n + v) * self.n_slots + i


@dataclass
class BlpResult:
    status: str  # 'optimal' | 'limit' | 'infeasible'
    design: LruDesign | None
    objective: float | None
    bound: float | None
    node_count: int


def build_blp(
    inst: SystemInstance,
    closures: SuccessorSets,
    symmetry_breaking: bool = True,
) -> BlpEncoding:
    n, m = inst.n_vertices, inst.n_edges
    n_vars = n * n + m * n + m * n * n + n * n * n
    enc = BlpEncoding(inst=inst, model=None, n_slots=n, symmetry_breaking=symmetry_breaking)  # type: ignore[arg-type]

    obj = np.zeros(n_vars)
    for e in range(m):
        we = inst.edge_cost[e]
        for v in range(n):
            lam_v = inst.failure_rate[v]
            for i in range(n):
                obj[enc.rho(e, v, i)] = we * lam_v
    for u in range(n):
        lu = inst.part_cost[u]
        for v in range(n):
            lam_v = inst.failure_rate[v]
            for i in range(n):
                obj[enc.sigma(u, v, i)] = lu * lam_v

    rows_i: list[int] = []
    rows_j: list[int] = []
    rows_x: list[float] = []
    senses: list[str] = []
    rhs: list[float] = []

    def add_row(entries, sense, b):
        idx = len(rhs)
        for j, x in entries:
            rows_i.append(idx)
            rows_j.append(j)
            rows_x.append(x)
        senses.append(sense)
        rhs.append(b)

    for v in range(n):
        add_row([(enc.y(v, i), 1.0) for i in range(n)], "=", 1.0)
    for t, (u, v) in enumerate(inst.edges):
        for e in _bits(closures.mask(t)):
            for i in range(n):
                add_row(
                    [(enc.y(u, i), 1.0), (enc.y(v, i), -1.0), (enc.k(e, i), -1.0)],
                    "<=",
                    0.0,
                )
                add_row(
                    [(enc.y(v, i), 1.0), (enc.y(u, i), -1.0), (enc.k(e, i), -1.0)],
                    "<=",
                    0.0,
                )
    for e in range(m):
        for v in range(n):
            for i in range(n):
                r = enc.rho(e, v, i)
                add_row([(r, 1.0), (enc.y(v, i), -1.0)], "<=", 0.0)
                add_row([(r, 1.0), (enc.k(e, i), -1.0)], "<=", 0.0)
                add_row(
                    [(enc.y(v, i), 1.0), (enc.k(e, i), 1.0), (r, -1.0)], "<=", 1.0
                )
    for u in range(n):
        for v in range(n):
            for i in range(n):
                s = enc.sigma(u, v, i)
                add_row([(s, 1.0), (enc.y(u, i), -1.0)], "<=", 0.0)
                add_row([(s, 1.0), (enc.y(v, i), -1.0)], "<=", 0.0)
                add_row(
                    [(enc.y(u, i), 1.0), (enc.y(v, i), 1.0), (s, -1.0)], "<=", 1.0
                )

    lower = np.zeros(n_vars)
    upper = np.ones(n_vars)
    if symmetry_breaking:
        # a part may only sit in slots up to its own index
        for v in range(n):
            for i in range(v + 1, n):
                upper[enc.y(v, i)] = 0.0

    lp = LpModel(
        objective=obj,
        rows=sp.csr_matrix((rows_x, (rows_i, rows_j)), shape=(len(rhs), n_vars)),
        senses=senses,
        rhs=np.array(rhs),
        lower=lower,
        upper=upper,
    )
    binary = tuple(range(n * n + m * n))
    enc.model = MilpModel(lp, binary)
    return enc


def _bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def encode_partition(
    enc: BlpEncoding, closures: SuccessorSets, blocks: list[frozenset[int]]
) -> np.ndarray:
    """Feasible variable vector for a partition, products at their
    implied values; used to check that the encoding prices designs
    exactly like the cost model."""
    from .disassembly import removal_mask

    inst = enc.inst
    n = inst.n_vertices
    x = np.zeros(enc.model.lp.n_cols)
    order = sorted(blocks, key=min) if enc.symmetry_breaking else list(blocks)
    for i, block in enumerate(order):
        gamma = removal_mask(inst, closures, inst.vertex_mask(block))
        for v in block:
            x[enc.y(v, i)] = 1.0
        for e in _bits(gamma):
            x[enc.k(e, i)] = 1.0
            for v in block:
                x[enc.rho(e, v, i)] = 1.0
        for u in block:
            for v in block:
                x[enc.sigma(u, v, i)] = 1.0
    return x


def solve_blp(
    enc: BlpEncoding, closures: SuccessorSets, limits: SolveLimits | None = None
) -> BlpResult:
    """Branch-and-bound solve, decoding nonempty slots into a design."""
    sol = solve_milp(enc.model, limits)
    if sol.x is None:
        return BlpResult(
            status=sol.status,
            design=None,
            objective=None,
            bound=sol.bound,
            node_count=sol.node_count,
        )
    inst = enc.inst
    blocks = []
    for i in range(enc.n_slots):
        members = frozenset(
            v for v in range(inst.n_vertices) if sol.x[enc.y(v, i)] > 0.5
        )
        if members:
            blocks.append(members)
    design = design_cost(inst, closures, blocks)
    return BlpResult(
        status=sol.status,
        design=design,
        objective=design.pi,
        bound=sol.bound,
        node_count=sol.node_count,
    )
