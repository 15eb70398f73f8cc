"""Binary linear programs on top of the shared model container.

The branch-and-bound search itself is delegated to HiGHS through
scipy.optimize.milp: these models (the linearised pricing problem and
the monolithic benchmark program) are exactly the kind of thing a
mature MILP solver dispatches in milliseconds, and the search is
deterministic for a fixed input.  The surface stays ours: callers build
an ``MilpModel`` (an LpModel plus the binary index set) and receive an
``MilpSolution`` with incumbent, bound and node count, including on
limit hits.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.optimize import Bounds, LinearConstraint, milp

from .simplex import LpModel

__all__ = ["MilpModel", "MilpSolution", "SolveLimits", "solve_milp"]


@dataclass
class MilpModel:
    lp: LpModel
    binary: tuple[int, ...]

    def __post_init__(self):
        lo = self.lp.lower
        up = self.lp.upper
        for j in self.binary:
            if lo[j] < -1e-12 or up[j] > 1.0 + 1e-12:
                raise ValueError(f"binary variable {j} must have bounds within [0, 1]")


@dataclass
class SolveLimits:
    node_cap: int | None = None
    time_cap: float | None = None
    gap: float = 1e-6


@dataclass
class MilpSolution:
    status: str  # 'optimal' | 'infeasible' | 'unbounded' | 'limit'
    x: np.ndarray | None = None
    objective: float | None = None
    bound: float | None = None
    node_count: int = 0
    limits: SolveLimits = field(default_factory=SolveLimits)

    @property
    def optimal(self) -> bool:
        return self.status == "optimal"


_STATUS = {0: "optimal", 1: "limit", 2: "infeasible", 3: "unbounded", 4: "limit"}


def solve_milp(model: MilpModel, limits: SolveLimits | None = None) -> MilpSolution:
    limits = limits or SolveLimits()
    lp = model.lp
    rows = lp.rows if sp.issparse(lp.rows) else np.asarray(lp.rows, dtype=float)

    row_lo = np.empty(lp.n_rows)
    row_up = np.empty(lp.n_rows)
    for i, sense in enumerate(lp.senses):
        if sense == "=":
            row_lo[i] = row_up[i] = lp.rhs[i]
        elif sense == "<=":
            row_lo[i], row_up[i] = -np.inf, lp.rhs[i]
        elif sense == ">=":
            row_lo[i], row_up[i] = lp.rhs[i], np.inf
        else:
            raise ValueError(f"unknown row sense {sense!r}")

    integrality = np.zeros(lp.n_cols)
    integrality[list(model.binary)] = 1

    options: dict = {"mip_rel_gap": limits.gap, "presolve": True}
    if limits.node_cap is not None:
        options["node_limit"] = limits.node_cap
    if limits.time_cap is not None:
        options["time_limit"] = limits.time_cap

    result = milp(
        c=lp.objective,
        constraints=LinearConstraint(rows, row_lo, row_up) if lp.n_rows else (),
        integrality=integrality,
        bounds=Bounds(lp.lower, lp.upper),
        options=options,
    )

    status = _STATUS.get(result.status, "limit")
    x = None
    objective = None
    if result.x is not None:
        x = np.asarray(result.x, dtype=float)
        x[list(model.binary)] = np.round(x[list(model.binary)])
        objective = float(lp.objective @ x)
    if status == "optimal" and x is None:
        status = "limit"
    bound = getattr(result, "mip_dual_bound", None)
    nodes = int(getattr(result, "mip_node_count", 0) or 0)
    return MilpSolution(
        status=status,
        x=x,
        objective=objective,
        bound=None if bound is None else float(bound),
        node_count=nodes,
        limits=limits,
    )
