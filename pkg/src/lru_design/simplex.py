"""Dense bounded-variable simplex with exact duals.

This is the engine underneath the restricted master and anything else
that needs a *basic* optimal solution: the integrality of the converged
master only materialises at vertices of the feasible polyhedron, so the
solver must never return an interior convex combination.  Desk-scale
masters stay below ~60 rows and a few hundred columns, which keeps a
dense representation simple and fast.

Method: two-phase primal simplex on the slack-extended system with
general `[lower, upper]` variable bounds.  Entering variables follow
Dantzig's rule (most violating reduced cost, lowest index on ties) and
fall back to Bland's rule after a run of degenerate pivots, which
guarantees termination on the degenerate set-partitioning masters this
engine exists for.  The basis is refactorised from scratch every
iteration; at these sizes that is cheaper than being clever.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
import scipy.sparse as sp

from .errors import NumericalFailure

__all__ = ["LpModel", "LpSolution", "solve_lp"]

_BASIC, _AT_LO, _AT_UP, _FREE = 0, 1, 2, 3


@dataclass
class LpModel:
    """min c.x  s.t.  A x (sense) b,  lower <= x <= upper.

    ``sense`` entries are '=', '<=' or '>='.  ``rows`` may be a dense
    array or any scipy sparse matrix (sparse inputs are only densified
    by this engine; the branch-and-bound wrapper keeps them sparse).
    """

    objective: np.ndarray
    rows: object
    senses: Sequence[str]
    rhs: np.ndarray
    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        self.objective = np.asarray(self.objective, dtype=float)
        self.rhs = np.asarray(self.rhs, dtype=float)
        self.lower = np.asarray(self.lower, dtype=float)
        self.upper = np.asarray(self.upper, dtype=float)
        if not np.all(self.lower <= self.upper):
            raise ValueError("every variable needs lower <= upper")
        if not np.all(np.isfinite(self.objective)):
            raise ValueError("objective coefficients must be finite")

    @property
    def n_rows(self) -> int:
        return len(self.rhs)

    @property
    def n_cols(self) -> int:
        return len(self.objective)

    def dense_rows(self) -> np.ndarray:
        if sp.issparse(self.rows):
            return np.asarray(self.rows.todense(), dtype=float)
        return np.asarray(self.rows, dtype=float)


@dataclass
class LpSolution:
    status: str  # 'optimal' | 'infeasible' | 'unbounded'
    x: np.ndarray | None = None
    duals: np.ndarray | None = None
    objective: float | None = None
    iterations: int = 0

    @property
    def optimal(self) -> bool:
        return self.status == "optimal"


def solve_lp(model: LpModel) -> LpSolution:
    """Solve to a basic optimum; duals are reported per original row.

    Dual sign convention: y satisfies rc = c - A^T y with rc >= 0 for
    variables at their lower bound (minimisation), so equality rows get
    free-signed duals and y.b equals the objective whenever all active
    bounds are zero.
    """
    A = model.dense_rows()
    m, n = (model.n_rows, model.n_cols)
    if A.shape != (m, n):
        raise ValueError(f"row matrix shape {A.shape} does not match ({m}, {n})")

    inf = np.inf
    # slack per row: '<=' -> [0, inf), '>=' -> (-inf, 0], '=' -> fixed 0
    slack_lo = np.empty(m)
    slack_up = np.empty(m)
    for i, sense in enumerate(model.senses):
        if sense == "<=":
            slack_lo[i], slack_up[i] = 0.0, inf
        elif sense == ">=":
            slack_lo[i], slack_up[i] = -inf, 0.0
        elif sense == "=":
            slack_lo[i], slack_up[i] = 0.0, 0.0
        else:
            raise ValueError(f"unknown row sense {sense!r}")

    ncols = n + m + m  # structural + slack + artificial
    ext = np.zeros((m, ncols))
    ext[:, :n] = A
    ext[:, n : n + m] = np.eye(m)
    lo = np.concatenate([model.lower, slack_lo, np.zeros(m)])
    up = np.concatenate([model.upper, slack_up, np.full(m, inf)])

    # nonbasic start: every non-artificial at its reference bound
    stat = np.empty(ncols, dtype=np.int8)
    x = np.zeros(ncols)
    for j in range(n + m):
        if np.isfinite(lo[j]):
            stat[j], x[j] = _AT_LO, lo[j]
        elif np.isfinite(up[j]):
            stat[j], x[j] = _AT_UP, up[j]
        else:
            stat[j], x[j] = _FREE, 0.0

    residual = model.rhs - ext[:, : n + m] @ x[: n + m]
    art_sign = np.where(residual >= 0.0, 1.0, -1.0)
    for i in range(m):
        ext[i, n + m + i] = art_sign[i]
        x[n + m + i] = abs(residual[i])
        stat[n + m + i] = _BASIC
    basis = list(range(n + m, n + m + m))

    phase1_cost = np.zeros(ncols)
    phase1_cost[n + m :] = 1.0

    state = _SimplexState(ext, lo, up, model.rhs, basis, stat, x)
    status, iters1 = state.run(phase1_cost, allow_unbounded=False)
    if status != "optimal":
        raise NumericalFailure(f"phase 1 ended with status {status}")
    if phase1_cost @ state.x > 1e-7 * (1.0 + np.abs(model.rhs).max(initial=0.0)):
        return LpSolution(status="infeasible", iterations=iters1)

    # artificials are pinned at zero for phase 2
    state.up[n + m :] = 0.0
    state.x[n + m :] = np.clip(state.x[n + m :], 0.0, 0.0)
    for j in range(n + m, ncols):
        if state.stat[j] != _BASIC:
            state.stat[j] = _AT_LO
            state.x[j] = 0.0

    phase2_cost = np.concatenate([model.objective, np.zeros(2 * m)])
    status, iters2 = state.run(phase2_cost, allow_unbounded=True)
    if status == "unbounded":
        return LpSolution(status="unbounded", iterations=iters1 + iters2)
    if status != "optimal":
        raise NumericalFailure(f"phase 2 ended with status {status}")

    x_out = state.x[:n].copy()
    feas = np.abs(A @ x_out + state.x[n : n + m] - model.rhs).max(initial=0.0)
    if feas > 1e-7 * (1.0 + np.abs(model.rhs).max(initial=0.0)):
        raise NumericalFailure(f"primal residual {feas:.3e} after optimality")
    duals = state.duals(phase2_cost)
    return LpSolution(
        status="optimal",
        x=x_out,
        duals=duals,
        objective=float(model.objective @ x_out),
        iterations=iters1 + iters2,
    )


class _SimplexState:
    """Mutable tableau-free simplex state shared by the two phases."""

    def __init__(self, ext, lo, up, rhs, basis, stat, x):
        self.ext = ext
        self.lo = lo
        self.up = up
        self.rhs = rhs
        self.basis = basis
        self.stat = stat
        self.x = x

    def _basis_matrix(self) -> np.ndarray:
        return self.ext[:, self.basis]

    def _refresh_basic_values(self) -> None:
        nb_value = np.where(self.stat == _BASIC, 0.0, self.x)
        rhs_eff = self.rhs - self.ext @ nb_value
        try:
            xb = np.linalg.solve(self._basis_matrix(), rhs_eff)
        except np.linalg.LinAlgError as exc:
            raise NumericalFailure(f"singular basis: {exc}") from None
        for pos, j in enumerate(self.basis):
            self.x[j] = xb[pos]

    def duals(self, cost: np.ndarray) -> np.ndarray:
        cb = cost[self.basis]
        try:
            return np.linalg.solve(self._basis_matrix().T, cb)
        except np.linalg.LinAlgError as exc:
            raise NumericalFailure(f"singular basis: {exc}") from None

    def run(self, cost: np.ndarray, allow_unbounded: bool) -> tuple[str, int]:
        m, ncols = self.ext.shape
        tol_rc = 1e-9 * (1.0 + np.abs(cost).max(initial=0.0))
        tol_piv = 1e-10
        bland_after = 10 * (m + ncols)
        max_iters = 2000 + 200 * (m + ncols)
        degenerate_run = 0
        bland = False
        self._refresh_basic_values()

        for iteration in range(max_iters):
            y = self.duals(cost)
            rc = cost - y @ self.ext

            enter = -1
            sigma = 0.0
            best_violation = tol_rc
            for j in range(ncols):
                s = self.stat[j]
                if s == _BASIC or self.lo[j] == self.up[j]:
                    continue
                if s == _AT_LO and rc[j] < -best_violation:
                    enter, sigma, violation = j, 1.0, -rc[j]
                elif s == _AT_UP and rc[j] > best_violation:
                    enter, sigma, violation = j, -1.0, rc[j]
                elif s == _FREE and abs(rc[j]) > best_violation:
                    enter, sigma, violation = j, -np.sign(rc[j]), abs(rc[j])
                else:
                    continue
                if bland:
                    break  # lowest eligible index
                best_violation = violation
            if enter < 0:
                return "optimal", iteration

            try:
                d = np.linalg.solve(self._basis_matrix(), self.ext[:, enter])
            except np.linalg.LinAlgError as exc:
                raise NumericalFailure(f"singular basis: {exc}") from None

            # step length limits: entering hits its far bound, or a basic
            # variable hits one of its own
            limit = np.inf
            if np.isfinite(self.lo[enter]) and np.isfinite(self.up[enter]):
                limit = self.up[enter] - self.lo[enter]
            leave_pos = -1
            leave_bound = 0.0
            for pos in range(m):
                rate = -sigma * d[pos]
                if abs(rate) <= tol_piv:
                    continue
                var = self.basis[pos]
                if rate < 0.0:
                    bound = self.lo[var]
                    if not np.isfinite(bound):
                        continue
                    t = (self.x[var] - bound) / -rate
                else:
                    bound = self.up[var]
                    if not np.isfinite(bound):
                        continue
                    t = (bound - self.x[var]) / rate
                if t < -1e-12:
                    t = 0.0
                better = t < limit - 1e-12
                tie = abs(t - limit) <= 1e-12 and leave_pos >= 0
                prefer = False
                if tie:
                    if bland:
                        prefer = self.basis[pos] < self.basis[leave_pos]
                    else:
                        prefer = abs(d[pos]) > abs(d[leave_pos]) + 1e-15
                if better or prefer:
                    limit = min(t, limit)
                    leave_pos = pos
                    leave_bound = bound

            if not np.isfinite(limit):
                if allow_unbounded:
                    return "unbounded", iteration
                raise NumericalFailure("unbounded direction in phase 1")

            step = max(limit, 0.0)
            degenerate_run = degenerate_run + 1 if step < 1e-12 else 0
            if degenerate_run > bland_after:
                bland = True

            # move the entering variable and update the basics it drags
            self.x[enter] = self.x[enter] + sigma * step
            for pos in range(m):
                var = self.basis[pos]
                self.x[var] -= sigma * step * d[pos]

            if leave_pos < 0:
                # pure bound flip, basis unchanged
                self.stat[enter] = _AT_UP if sigma > 0 else _AT_LO
                self.x[enter] = self.up[enter] if sigma > 0 else self.lo[enter]
            else:
                leave_var = self.basis[leave_pos]
                self.stat[leave_var] = (
                    _AT_LO if leave_bound == self.lo[leave_var] else _AT_UP
                )
                self.x[leave_var] = leave_bound
                self.basis[leave_pos] = enter
                self.stat[enter] = _BASIC
                self._refresh_basic_values()

        raise NumericalFailure(f"no convergence in {max_iters} simplex iterations")
