"""Column generation on the set-partitioning master.

The master chooses weights over candidate units (columns) so that every
part is covered exactly once at minimum total cost.  Starting from the
singleton columns, the loop alternates solving the restricted master
with finding the connected unit of most negative reduced cost

    rc(Q) = omega(Q) - sum of duals over Q

and terminates once no unit prices below zero.  Restricting pricing to
connected sets loses nothing: a disconnected set costs strictly more
than its components while its dual credit splits additively, so some
component always prices strictly better.

The final basic master optimum is integer (the no-overlap-cycle /
totally-balanced argument), so the design is read directly off the LP;
a fractional converged master is a bug, not a model property, and
raises ``IntegralityViolation``.

Pricing routes:

* ``price_enumeration``: exact scan over connected vertex sets, one
  canonical visit per set, with an additive lower-bound prune.  Inside
  the solver loop the scan first runs under small size caps (most
  improving units are small) and only certifies termination with the
  full exact pass.
* ``build_pricing_milp``: the linearised binary program over member
  indicators, break indicators and their McCormick products, solved by
  the branch-and-bound engine.  Used for cross-validation and available
  as the solver's pricing route via options.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np
import scipy.sparse as sp

from .costs import LruDesign, design_cost, lru_cost
from .disassembly import SuccessorSets, compute_successor_sets
from .errors import InstanceTooLarge, IntegralityViolation, NumericalFailure
from .instance import SystemInstance, connected_components
from .milp import MilpModel, MilpSolution, solve_milp
from .simplex import LpModel, solve_lp
from .structure import Certificate, solution_certificate

__all__ = [
    "ColumnPool",
    "FractionalSolution",
    "PricingResult",
    "SolveOptions",
    "ColgenResult",
    "solve_restricted_master",
    "price_enumeration",
    "build_pricing_milp",
    "decode_pricing_milp",
    "solve_lru_design_colgen",
]


@dataclass
class ColumnPool:
    """Distinct connected candidate units with cached costs."""

    columns: list[frozenset[int]] = field(default_factory=list)
    masks: list[int] = field(default_factory=list)
    omegas: list[float] = field(default_factory=list)
    _seen: set[int] = field(default_factory=set)

    @classmethod
    def singletons(cls, inst: SystemInstance, closures: SuccessorSets) -> "ColumnPool":
        pool = cls()
        for v in range(inst.n_vertices):
            pool.add(inst, closures, frozenset({v}))
        return pool

    def add(
        self, inst: SystemInstance, closures: SuccessorSets, members: frozenset[int]
    ) -> bool:
        mask = inst.vertex_mask(members)
        if mask in self._seen:
            return False
        self._seen.add(mask)
        self.columns.append(frozenset(members))
        self.masks.append(mask)
        self.omegas.append(lru_cost(inst, closures, mask).omega)
        return True

    def __len__(self) -> int:
        return len(self.columns)


@dataclass
class FractionalSolution:
    """A master solution: weights per column, objective, vertex duals."""

    columns: tuple[frozenset[int], ...]
    weights: np.ndarray
    objective: float
    duals: np.ndarray | None = None

    def support(self, tol: float = 1e-9) -> list[tuple[frozenset[int], float]]:
        return [
            (col, float(w))
            for col, w in zip(self.columns, self.weights)
            if w > tol
        ]

    def is_integral(self, tol: float = 1e-6) -> bool:
        return bool(np.all(np.abs(self.weights - np.round(self.weights)) <= tol))


@dataclass
class PricingResult:
    column: frozenset[int] | None
    reduced_cost: float
    method: str  # 'enumeration' | 'milp'
    exact: bool


@dataclass
class SolveOptions:
    pricing: str = "enumeration"  # or 'milp'
    enumeration_cap: int = 25
    size_ladder: tuple[int, ...] = (4, 8)
    max_iterations: int | None = None
    certify: bool = True


@dataclass
class ColgenResult:
    design: LruDesign | None
    objective: float
    iterations: int
    columns_generated: int
    converged: bool
    solution: FractionalSolution
    certificate: Certificate | None


def solve_restricted_master(
    inst: SystemInstance, closures: SuccessorSets, pool: ColumnPool
) -> FractionalSolution:
    """Solve the restricted master to a basic optimum with duals.

    Columns are nonnegative with no explicit upper bound: the cover
    rows already force every column weight to at most one, and leaving
    the redundant bound out keeps the termination rule `min reduced
    cost >= 0` exact.
    """
    n, k = inst.n_vertices, len(pool)
    z = np.zeros((n, k))
    for j, mask in enumerate(pool.masks):
        rest = mask
        while rest:
            low = rest & -rest
            z[low.bit_length() - 1, j] = 1.0
            rest ^= low
    model = LpModel(
        objective=np.array(pool.omegas),
        rows=z,
        senses=["="] * n,
        rhs=np.ones(n),
        lower=np.zeros(k),
        upper=np.full(k, np.inf),
    )
    sol = solve_lp(model)
    if not sol.optimal:
        raise NumericalFailure(f"restricted master came back {sol.status}")
    return FractionalSolution(
        columns=tuple(pool.columns),
        weights=sol.x,
        objective=sol.objective,
        duals=sol.duals,
    )


class _EnumerationPricer:
    """Reusable exact pricing scan over connected vertex sets.

    Every connected set is visited exactly once (grown from its lowest
    vertex, earlier-tried extensions banned for the subtree).  Subtrees
    are cut with a lower bound that combines the monotone part of the
    cost, the dual credit still collectable, and the boundary edges
    already locked in: edges from the current set to banned vertices
    stay boundary in every descendant, so their closures are a floor on
    the break cost.
    """

    def __init__(self, inst: SystemInstance, closures: SuccessorSets):
        self.inst = inst
        self.n = inst.n_vertices
        self.adj = inst.adj_mask
        self.inc = inst.incident_mask
        self.h_masks = closures.masks
        self.lam = [float(x) for x in inst.failure_rate]
        self.ell = [float(x) for x in inst.part_cost]
        # neighbour -> edge id pairs per vertex, for locked-boundary updates
        self.nbr_edges: list[list[tuple[int, int]]] = [[] for _ in range(self.n)]
        for e, (u, v) in enumerate(inst.edges):
            self.nbr_edges[u].append((v, e))
            self.nbr_edges[v].append((u, e))
        # 8-bit chunk tables turn weight-of-edge-mask into a few lookups
        w = [float(x) for x in inst.edge_cost]
        n_chunks = (inst.n_edges + 7) // 8
        tables = []
        for chunk in range(n_chunks):
            base = chunk * 8
            tab = [0.0] * 256
            for byte in range(256):
                total = 0.0
                bits = byte
                while bits:
                    low = bits & -bits
                    e = base + low.bit_length() - 1
                    if e < inst.n_edges:
                        total += w[e]
                    bits ^= low
                tab[byte] = total
            tables.append(tab)
        self.w_tables = tables

    def _mask_weight(self, mask: int) -> float:
        total = 0.0
        for tab in self.w_tables:
            byte = mask & 255
            if byte:
                total += tab[byte]
            mask >>= 8
            if not mask:
                break
        return total

    def price(
        self,
        duals: np.ndarray,
        max_size: int | None = None,
        rc_cutoff: float | None = None,
    ) -> PricingResult:
        """Best connected set by reduced cost.

        With ``rc_cutoff`` the scan only certifies whether any set
        prices below the cutoff (and returns the best one if so), which
        prunes far more aggressively.  Without it the true minimum is
        returned.  ``max_size`` caps the member count; the scan is
        exact only when uncapped.
        """
        n = self.n
        lam, ell = self.lam, self.ell
        adj, inc = self.adj, self.inc
        h_masks = self.h_masks
        nbr_edges = self.nbr_edges
        r = [float(x) for x in duals]
        cap = n if max_size is None else min(max_size, n)
        all_mask = (1 << n) - 1

        best = np.inf if rc_cutoff is None else float(rc_cutoff)
        best_set: frozenset[int] | None = None
        best_key: tuple | None = None
        # slack_v = max dual credit v can add beyond its own monotone cost
        slack0 = [max(r[v] - lam[v] * ell[v], 0.0) for v in range(n)]

        stack: list[tuple] = []
        banned_roots = 0
        for root in range(n):
            stack.append(
                (
                    1 << root,  # members
                    inc[root],  # boundary edge mask
                    adj[root] & ~banned_roots & ~(1 << root),  # extension
                    banned_roots,  # permanently excluded vertices
                    lam[root],
                    ell[root],
                    r[root],
                    0,  # locked removal mask
                    0.0,  # locked removal weight
                    1,  # member count
                )
            )
            banned_roots |= 1 << root

        while stack:
            (q, bmask, ext, banned, lam_q, ell_q, r_q, locked, w_locked, size) = stack.pop()

            gamma = locked
            rest = bmask
            while rest:
                low = rest & -rest
                gamma |= h_masks[low.bit_length() - 1]
                rest ^= low
            rc = lam_q * (self._mask_weight(gamma) + ell_q) - r_q
            if rc < best - 1e-15 or (
                rc < best + 1e-15
                and best_set is not None
                and (key := tuple(sorted(_bits(q)))) < best_key
            ):
                best = min(rc, best)
                best_set = frozenset(_bits(q))
                best_key = tuple(sorted(best_set))

            if size >= cap or not ext:
                continue

            local_banned = banned
            local_locked = locked
            local_w_locked = w_locked
            candidates = list(_bits(ext))
            for u in candidates:
                bit = 1 << u
                q2 = q | bit
                lam2 = lam_q + lam[u]
                ell2 = ell_q + ell[u]
                r2 = r_q + r[u]
                # edges from u to excluded vertices stay boundary forever
                # (members are never excluded, so internal edges stay out)
                add_locked = 0
                for v, e in nbr_edges[u]:
                    if (local_banned >> v) & 1:
                        add_locked |= h_masks[e]
                locked2 = local_locked | add_locked
                w_locked2 = local_w_locked + (
                    self._mask_weight(locked2 & ~local_locked) if add_locked else 0.0
                )

                # lower bound over the whole subtree rooted at q2
                bound = lam2 * (ell2 + w_locked2) - r2
                potential = all_mask & ~q2 & ~local_banned
                rest = potential
                while rest:
                    low = rest & -rest
                    v = low.bit_length() - 1
                    s = slack0[v]
                    if s > 0.0:
                        if w_locked2 > 0.0:
                            s = max(r[v] - lam[v] * (ell[v] + w_locked2), 0.0)
                        bound -= s
                    rest ^= low
                if bound < best - 1e-12:
                    stack.append(
                        (
                            q2,
                            bmask ^ inc[u],
                            (ext | adj[u]) & ~local_banned & ~q2,
                            local_banned,
                            lam2,
                            ell2,
                            r2,
                            locked2,
                            w_locked2,
                            size + 1,
                        )
                    )
                # u is now excluded for the remaining siblings; its edges
                # into the current set become locked boundary for them
                local_banned |= bit
                add_locked = 0
                for v, e in nbr_edges[u]:
                    if (q >> v) & 1:
                        add_locked |= h_masks[e]
                if add_locked & ~local_locked:
                    new = add_locked & ~local_locked
                    local_locked |= new
                    local_w_locked += self._mask_weight(new)

        exact = max_size is None or cap >= n
        if best_set is None:
            return PricingResult(None, np.inf, "enumeration", exact)
        return PricingResult(best_set, float(best), "enumeration", exact)


def _bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def price_enumeration(
    inst: SystemInstance,
    closures: SuccessorSets,
    duals: np.ndarray,
    max_size: int | None = None,
    cap: int = 25,
) -> PricingResult:
    """Exact pricing by connected-set enumeration (see _EnumerationPricer)."""
    if inst.n_vertices > cap:
        raise InstanceTooLarge(
            f"enumeration pricing capped at {cap} vertices, got {inst.n_vertices}"
        )
    return _EnumerationPricer(inst, closures).price(duals, max_size=max_size)


def compute_closures_if_needed(
    inst: SystemInstance, closures: SuccessorSets | None
) -> SuccessorSets:
    return closures if closures is not None else compute_successor_sets(inst)


def build_pricing_milp(
    inst: SystemInstance, closures: SuccessorSets, duals: np.ndarray
) -> MilpModel:
    """Linearised pricing program over one unit.

    Variables: member indicators g_v, break indicators k_e, and the
    McCormick products eta[e,v] = k_e*g_v and dlt[u,v] = g_u*g_v.  A
    break indicator is forced up whenever an edge crosses the member
    boundary and the edge hangs in its closure.  One covering row
    excludes the useless empty unit so the argmin is usable even at
    termination.
    """
    n, m = inst.n_vertices, inst.n_edges
    g0 = 0
    k0 = n
    eta0 = n + m
    dlt0 = n + m + m * n
    n_vars = n + m + m * n + n * n

    obj = np.zeros(n_vars)
    obj[g0 : g0 + n] = -np.asarray(duals, dtype=float)
    for e in range(m):
        we = inst.edge_cost[e]
        for v in range(n):
            obj[eta0 + e * n + v] = we * inst.failure_rate[v]
    for u in range(n):
        lu = inst.part_cost[u]
        for v in range(n):
            obj[dlt0 + u * n + v] = lu * inst.failure_rate[v]

    rows_i: list[int] = []
    rows_j: list[int] = []
    rows_x: list[float] = []
    senses: list[str] = []
    rhs: list[float] = []

    def add_row(entries: list[tuple[int, float]], sense: str, b: float) -> None:
        i = len(rhs)
        for j, x in entries:
            rows_i.append(i)
            rows_j.append(j)
            rows_x.append(x)
        senses.append(sense)
        rhs.append(b)

    for t, (u, v) in enumerate(inst.edges):
        closure = closures.mask(t)
        for e in _bits(closure):
            add_row([(g0 + u, 1.0), (g0 + v, -1.0), (k0 + e, -1.0)], "<=", 0.0)
            add_row([(g0 + v, 1.0), (g0 + u, -1.0), (k0 + e, -1.0)], "<=", 0.0)
    for e in range(m):
        for v in range(n):
            j = eta0 + e * n + v
            add_row([(j, 1.0), (k0 + e, -1.0)], "<=", 0.0)
            add_row([(j, 1.0), (g0 + v, -1.0)], "<=", 0.0)
            add_row([(k0 + e, 1.0), (g0 + v, 1.0), (j, -1.0)], "<=", 1.0)
    for u in range(n):
        for v in range(n):
            j = dlt0 + u * n + v
            add_row([(j, 1.0), (g0 + u, -1.0)], "<=", 0.0)
            add_row([(j, 1.0), (g0 + v, -1.0)], "<=", 0.0)
            add_row([(g0 + u, 1.0), (g0 + v, 1.0), (j, -1.0)], "<=", 1.0)
    add_row([(g0 + v, 1.0) for v in range(n)], ">=", 1.0)

    rows = sp.csr_matrix(
        (rows_x, (rows_i, rows_j)), shape=(len(rhs), n_vars)
    )
    lp = LpModel(
        objective=obj,
        rows=rows,
        senses=senses,
        rhs=np.array(rhs),
        lower=np.zeros(n_vars),
        upper=np.ones(n_vars),
    )
    binary = tuple(range(n + m))
    return MilpModel(lp, binary)


def decode_pricing_milp(
    inst: SystemInstance,
    closures: SuccessorSets,
    duals: np.ndarray,
    solution: MilpSolution,
) -> PricingResult:
    if solution.x is None:
        raise NumericalFailure(f"pricing program came back {solution.status}")
    members = frozenset(v for v in range(inst.n_vertices) if solution.x[v] > 0.5)
    rc = lru_cost(inst, closures, members).omega - float(
        sum(duals[v] for v in members)
    )
    return PricingResult(members, rc, "milp", solution.optimal)


@dataclass
class _ComponentRun:
    solution: FractionalSolution
    iterations: int
    generated: int
    converged: bool


def _run_component(
    inst: SystemInstance, closures: SuccessorSets, options: SolveOptions
) -> _ComponentRun:
    pool = ColumnPool.singletons(inst, closures)
    pricer = None
    if options.pricing == "enumeration":
        if inst.n_vertices > options.enumeration_cap:
            raise InstanceTooLarge(
                f"enumeration pricing capped at {options.enumeration_cap} vertices"
            )
        pricer = _EnumerationPricer(inst, closures)
    elif options.pricing != "milp":
        raise ValueError(f"unknown pricing route {options.pricing!r}")

    iterations = 0
    generated = 0
    while True:
        master = solve_restricted_master(inst, closures, pool)
        iterations += 1
        eps = 1e-7 * (1.0 + abs(master.objective))
        if options.max_iterations is not None and iterations > options.max_iterations:
            return _ComponentRun(master, iterations, generated, converged=False)

        if pricer is not None:
            found = None
            ladder = [c for c in options.size_ladder if c < inst.n_vertices]
            for size_cap in ladder:
                cand = pricer.price(master.duals, max_size=size_cap, rc_cutoff=-eps)
                if cand.column is not None:
                    found = cand
                    break
            if found is None:
                found = pricer.price(master.duals, rc_cutoff=-eps)
            if found.column is None:
                return _ComponentRun(master, iterations, generated, converged=True)
            priced = found
        else:
            milp_sol = solve_milp(build_pricing_milp(inst, closures, master.duals))
            priced = decode_pricing_milp(inst, closures, master.duals, milp_sol)
            if priced.reduced_cost >= -eps:
                return _ComponentRun(master, iterations, generated, converged=True)

        if not pool.add(inst, closures, priced.column):
            # numerically-noisy duplicate: nothing new to add, stop here
            return _ComponentRun(master, iterations, generated, converged=True)
        generated += 1


def solve_lru_design_colgen(
    inst: SystemInstance,
    closures: SuccessorSets | None = None,
    options: SolveOptions | None = None,
) -> ColgenResult:
    """Full solve: split into components, generate columns, read the design.

    The converged master is asserted integral; the selected columns are
    re-evaluated through the cost model and returned as a design along
    with structural certificates of the support.
    """
    options = options or SolveOptions()
    closures = compute_closures_if_needed(inst, closures)

    components = connected_components(inst)
    if len(components) == 1:
        runs = [(inst, _run_component(inst, closures, options))]
    else:
        runs = []
        for comp in components:
            comp_closures = compute_successor_sets(comp)
            runs.append((comp, _run_component(comp, comp_closures, options)))

    # merge component solutions back into instance-level vertex ids
    columns: list[frozenset[int]] = []
    weights: list[float] = []
    duals = np.zeros(inst.n_vertices)
    objective = 0.0
    iterations = 0
    generated = 0
    converged = True
    for comp, run in runs:
        to_global = [inst.vertex(lab) for lab in comp.labels]
        for col, w in zip(run.solution.columns, run.solution.weights):
            columns.append(frozenset(to_global[v] for v in col))
            weights.append(float(w))
        for local, glob in enumerate(to_global):
            duals[glob] = run.solution.duals[local]
        objective += run.solution.objective
        iterations += run.iterations
        generated += run.generated
        converged = converged and run.converged

    merged = FractionalSolution(
        columns=tuple(columns),
        weights=np.array(weights),
        objective=objective,
        duals=duals,
    )

    if not converged:
        return ColgenResult(
            design=None,
            objective=objective,
            iterations=iterations,
            columns_generated=generated,
            converged=False,
            solution=merged,
            certificate=None,
        )

    if not merged.is_integral(1e-6):
        raise IntegralityViolation(
            "converged master is fractional; this indicates an engine bug"
        )
    selected = [col for col, w in zip(merged.columns, merged.weights) if w > 0.5]
    design = design_cost(inst, closures, selected)

    certificate = None
    if options.certify:
        certificate = solution_certificate(
            inst, [(col, float(w)) for col, w in merged.support()]
        )
    return ColgenResult(
        design=design,
        objective=design.pi,
        iterations=iterations,
        columns_generated=generated,
        converged=True,
        solution=merged,
        certificate=certificate,
    )
