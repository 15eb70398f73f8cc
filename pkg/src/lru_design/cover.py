"""Cover variant: replacement sets may overlap across units.

Each unit is a pair (replacement set R, failure set F) with F inside R.
Failure sets still partition the parts, so every failure triggers
exactly one replacement, but the replaced set may reach beyond the
failing parts and different units may replace overlapping regions:

    unit cost = (break cost of removal(R) + purchase(R)) * rate(F)

Any partition is a feasible cover (take R = F), so the optimal cover
never costs more than the optimal partition; the gap measures what the
partition constraint gives away.

The exhaustive mode enumerates failure-set partitions into connected
blocks and, independently per block, the cheapest connected replacement
superset.  Both restrictions are value-lossless: a disconnected failure
set splits into components at identical cost against the same
replacement, and dropping replacement components that miss the failure
set only removes boundary edges and purchase cost.  A full-power mode
searches all replacement supersets to test that argument empirically,
and a slot-indexed program mirrors the benchmark formulation.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sp

from .bruteforce import connected_subsets, partition_blocks_dp
from .disassembly import SuccessorSets, edge_mask_weight, removal_mask
from .errors import (
    EmptyLru,
    FailureOutsideReplacement,
    FailureSetsNotPartition,
    InstanceTooLarge,
)
from .instance import SystemInstance
from .milp import MilpModel, SolveLimits, solve_milp
from .simplex import LpModel

__all__ = ["CoverLru", "CoverDesign", "clru_cost", "solve_clru", "build_clru_milp"]


@dataclass(frozen=True)
class CoverLru:
    replacement: frozenset[int]
    failure: frozenset[int]
    omega: float


@dataclass(frozen=True)
class CoverDesign:
    lrus: tuple[CoverLru, ...]
    pi: float

    def canonical(self):
        return tuple(
            sorted(
                (tuple(sorted(q.failure)), tuple(sorted(q.replacement)))
                for q in self.lrus
            )
        )


def _unit_cost(
    inst: SystemInstance, closures: SuccessorSets, r_mask: int, f_mask: int
) -> float:
    breaking = edge_mask_weight(inst, removal_mask(inst, closures, r_mask))
    purchase = 0.0
    rest = r_mask
    while rest:
        low = rest & -rest
        purchase += inst.part_cost[low.bit_length() - 1]
        rest ^= low
    rate = 0.0
    rest = f_mask
    while rest:
        low = rest & -rest
        rate += inst.failure_rate[low.bit_length() - 1]
        rest ^= low
    return (breaking + purchase) * rate


def clru_cost(
    inst: SystemInstance,
    closures: SuccessorSets,
    design: Sequence[tuple[Iterable[int], Iterable[int]]],
) -> float:
    """Exact cost of a cover design given as (replacement, failure) pairs."""
    covered = 0
    total = 0.0
    for replacement, failure in design:
        r_mask = inst.vertex_mask(replacement)
        f_mask = inst.vertex_mask(failure)
        if r_mask == 0:
            raise EmptyLru(None, "replacement sets may not be empty")
        if f_mask & ~r_mask:
            v = (f_mask & ~r_mask).bit_length() - 1
            raise FailureOutsideReplacement(inst.labels[v])
        if f_mask & covered:
            v = (f_mask & covered & -(f_mask & covered)).bit_length() - 1
            raise FailureSetsNotPartition(inst.labels[v], "covered twice")
        covered |= f_mask
        total += _unit_cost(inst, closures, r_mask, f_mask)
    if covered != (1 << inst.n_vertices) - 1:
        missing = ~covered & ((1 << inst.n_vertices) - 1)
        v = (missing & -missing).bit_length() - 1
        raise FailureSetsNotPartition(inst.labels[v], "not covered")
    return total


def solve_clru(
    inst: SystemInstance,
    closures: SuccessorSets,
    cap: int = 8,
    connected_replacements: bool = True,
) -> CoverDesign:
    """Optimal cover by exhaustive search.

    Per connected candidate failure set the cheapest replacement
    superset is found first (connected supersets by default, every
    superset in full-power mode), then a partition of the parts into
    failure sets is chosen by the shared subset DP.
    """
    n = inst.n_vertices
    limit = cap if connected_replacements else min(cap, 6)
    if n > limit:
        raise InstanceTooLarge(f"exhaustive cover solve capped at {limit}, got {n}")

    lam = inst.failure_rate
    candidates = connected_subsets(inst)
    if connected_replacements:
        replacement_pool = candidates
    else:
        replacement_pool = list(range(1, 1 << n))
    # replacement cost is rate-independent, so compute it once per set
    r_cost = {}
    for mask in replacement_pool:
        breaking = edge_mask_weight(inst, removal_mask(inst, closures, mask))
        purchase = 0.0
        rest = mask
        while rest:
            low = rest & -rest
            purchase += inst.part_cost[low.bit_length() - 1]
            rest ^= low
        r_cost[mask] = breaking + purchase

    best_replacement: dict[int, tuple[float, int]] = {}
    for f_mask in candidates:
        best = None
        best_mask = 0
        for r_mask in replacement_pool:
            if f_mask & ~r_mask:
                continue
            c = r_cost[r_mask]
            if best is None or c < best - 1e-15 or (c <= best + 1e-15 and r_mask < best_mask):
                best, best_mask = c, r_mask
        best_replacement[f_mask] = (best, best_mask)

    block_cost = {}
    for f_mask in candidates:
        rate = 0.0
        rest = f_mask
        while rest:
            low = rest & -rest
            rate += lam[low.bit_length() - 1]
            rest ^= low
        block_cost[f_mask] = rate * best_replacement[f_mask][0]

    total, blocks = partition_blocks_dp(n, block_cost)
    lrus = []
    for f_mask in blocks:
        _, r_mask = best_replacement[f_mask]
        lrus.append(
            CoverLru(
                replacement=frozenset(_bits(r_mask)),
                failure=frozenset(_bits(f_mask)),
                omega=block_cost[f_mask],
            )
        )
    return CoverDesign(lrus=tuple(lrus), pi=total)


def _bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def build_clru_milp(inst: SystemInstance, closures: SuccessorSets) -> MilpModel:
    """Slot-indexed program for the cover problem.

    Mirrors the benchmark layout with an extra indicator family: f[v,i]
    puts part v's failure into slot i (partition rows), y[v,i] puts v
    into slot i's replacement set (f <= y), k[e,i] marks broken edges of
    the replacement set, and the products rho[e,v,i] = k[e,i]*f[v,i] and
    sigma[u,v,i] = y[u,i]*f[v,i] carry the bilinear cost terms.
    Failure slots are symmetry-broken by smallest member.
    """
    n, m = inst.n_vertices, inst.n_edges
    f0 = 0
    y0 = n * n
    k0 = 2 * n * n
    rho0 = k0 + m * n
    sigma0 = rho0 + m * n * n
    n_vars = sigma0 + n * n * n

    def f(v, i):
        return f0 + v * n + i

    def y(v, i):
        return y0 + v * n + i

    def k(e, i):
        return k0 + e * n + i

    def rho(e, v, i):
        return rho0 + (e * n + v) * n + i

    def sigma(u, v, i):
        return sigma0 + (u * n + v) * n + i

    obj = np.zeros(n_vars)
    for e in range(m):
        for v in range(n):
            for i in range(n):
                obj[rho(e, v, i)] = inst.edge_cost[e] * inst.failure_rate[v]
    for u in range(n):
        for v in range(n):
            for i in range(n):
                obj[sigma(u, v, i)] = inst.part_cost[u] * inst.failure_rate[v]

    rows_i: list[int] = []
    rows_j: list[int] = []
    rows_x: list[float] = []
    senses: list[str] = []
    rhs: list[float] = []

    def add_row(entries, sense, b):
        idx = len(rhs)
        for jj, x in entries:
            rows_i.append(idx)
            rows_j.append(jj)
            rows_x.append(x)
        senses.append(sense)
        rhs.append(b)

    for v in range(n):
        add_row([(f(v, i), 1.0) for i in range(n)], "=", 1.0)
    for v in range(n):
        for i in range(n):
            add_row([(f(v, i), 1.0), (y(v, i), -1.0)], "<=", 0.0)
    for t, (u, v) in enumerate(inst.edges):
        for e in _bits(closures.mask(t)):
            for i in range(n):
                add_row([(y(u, i), 1.0), (y(v, i), -1.0), (k(e, i), -1.0)], "<=", 0.0)
                add_row([(y(v, i), 1.0), (y(u, i), -1.0), (k(e, i), -1.0)], "<=", 0.0)
    for e in range(m):
        for v in range(n):
            for i in range(n):
                r = rho(e, v, i)
                add_row([(r, 1.0), (k(e, i), -1.0)], "<=", 0.0)
                add_row([(r, 1.0), (f(v, i), -1.0)], "<=", 0.0)
                add_row([(k(e, i), 1.0), (f(v, i), 1.0), (r, -1.0)], "<=", 1.0)
    for u in range(n):
        for v in range(n):
            for i in range(n):
                s = sigma(u, v, i)
                add_row([(s, 1.0), (y(u, i), -1.0)], "<=", 0.0)
                add_row([(s, 1.0), (f(v, i), -1.0)], "<=", 0.0)
                add_row([(y(u, i), 1.0), (f(v, i), 1.0), (s, -1.0)], "<=", 1.0)

    lower = np.zeros(n_vars)
    upper = np.ones(n_vars)
    for v in range(n):
        for i in range(v + 1, n):
            upper[f(v, i)] = 0.0

    lp = LpModel(
        objective=obj,
        rows=sp.csr_matrix((rows_x, (rows_i, rows_j)), shape=(len(rhs), n_vars)),
        senses=senses,
        rhs=np.array(rhs),
        lower=lower,
        upper=upper,
    )
    return MilpModel(lp, tuple(range(k0 + m * n)))


def solve_clru_milp(
    inst: SystemInstance,
    closures: SuccessorSets,
    limits: SolveLimits | None = None,
) -> CoverDesign:
    model = build_clru_milp(inst, closures)
    sol = solve_milp(model, limits)
    if sol.x is None:
        raise InstanceTooLarge(f"cover program came back {sol.status}")
    n = inst.n_vertices
    lrus = []
    total = 0.0
    for i in range(n):
        f_members = frozenset(v for v in range(n) if sol.x[v * n + i] > 0.5)
        if not f_members:
            continue
        y_members = frozenset(
            v for v in range(n) if sol.x[n * n + v * n + i] > 0.5
        )
        r_mask = inst.vertex_mask(y_members)
        f_mask = inst.vertex_mask(f_members)
        omega = _unit_cost(inst, closures, r_mask, f_mask)
        lrus.append(CoverLru(replacement=y_members, failure=f_members, omega=omega))
        total += omega
    return CoverDesign(lrus=tuple(lrus), pi=total)
