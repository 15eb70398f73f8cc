"""Batch experiment runner and CSV summariser.

One row per (generator config, method).  Rows are independent, so a
worker pool may fan them out; output order is fixed by the config key
regardless of completion order, and a rerun with the same seeds is
byte-identical except for the wall-time column.  Means and medians are
never computed inline: the raw per-seed rows are written as-is and a
separate summarise pass aggregates them.
"""
from __future__ import annotations

import csv
import io
import os
import statistics
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path

from .blp import build_blp, solve_blp
from .bruteforce import bruteforce_design
from .colgen import SolveOptions, solve_lru_design_colgen
from .disassembly import compute_successor_sets
from .errors import LruDesignError
from .generator import GeneratorConfig, generate
from .milp import SolveLimits

WORKERS_ENV = "LRU_DESIGN_WORKERS"

CSV_COLUMNS = [
    "n", "delta", "delta_e", "q", "seed", "method", "status",
    "objective", "n_lrus", "iterations", "nodes", "wall_ms",
    "cycle_free", "totally_balanced", "connected", "integral",
    "beta", "error",
]

__all__ = [
    "ExperimentRow",
    "expand_grid",
    "run_experiment",
    "rows_to_csv",
    "write_csv",
    "read_csv",
    "summarize",
    "summary_to_csv",
    "CSV_COLUMNS",
]


@dataclass
class ExperimentRow:
    n: int
    delta: float
    delta_e: float
    q: float
    seed: int
    method: str
    status: str = ""
    objective: float | None = None
    n_lrus: int | None = None
    iterations: int | None = None
    nodes: int | None = None
    wall_ms: float | None = None
    cycle_free: bool | None = None
    totally_balanced: bool | None = None
    connected: bool | None = None
    integral: bool | None = None
    beta: float | None = None
    error: str = ""

    def key(self):
        return (self.n, self.delta, self.delta_e, self.q, self.seed, self.method)


def expand_grid(
    n_values,
    deltas,
    delta_es,
    qs,
    n_seeds: int,
    seed0: int = 0,
    **ranges,
) -> list[GeneratorConfig]:
    """Cross product of settings with matched seeds seed0..seed0+n-1."""
    configs = []
    for n in n_values:
        for delta in deltas:
            for delta_e in delta_es:
                for q in qs:
                    for k in range(n_seeds):
                        configs.append(
                            GeneratorConfig(
                                n_vertices=n,
                                avg_degree=delta,
                                avg_out_degree=delta_e,
                                edge_scale=q,
                                seed=seed0 + k,
                                **ranges,
                            )
                        )
    return configs


def _solve_one(args) -> ExperimentRow:
    config, method, limits = args
    row = ExperimentRow(
        n=config.n_vertices,
        delta=config.avg_degree,
        delta_e=config.avg_out_degree,
        q=config.edge_scale,
        seed=config.seed,
        method=method,
    )
    start = time.perf_counter()
    try:
        inst = generate(config)
        closures = compute_successor_sets(inst)
        if method == "colgen":
            res = solve_lru_design_colgen(inst, closures)
            row.status = "optimal" if res.converged else "limit"
            row.objective = res.objective if res.converged else None
            row.n_lrus = len(res.design.lrus) if res.design else None
            row.iterations = res.iterations
            if res.certificate:
                row.cycle_free = res.certificate.cycle_free
                row.totally_balanced = res.certificate.totally_balanced
                row.connected = res.certificate.connected
                row.integral = res.certificate.integral
        elif method == "blp":
            res = solve_blp(build_blp(inst, closures), closures, limits)
            row.status = res.status
            row.objective = res.objective
            row.n_lrus = len(res.design.lrus) if res.design else None
            row.nodes = res.node_count
        elif method == "oracle":
            design = bruteforce_design(inst, closures)
            row.status = "optimal"
            row.objective = design.pi
            row.n_lrus = len(design.lrus)
        else:
            raise ValueError(f"unknown method {method!r}")
    except LruDesignError as exc:
        row.status = "error"
        row.error = f"{type(exc).__name__}: {exc}"
    row.wall_ms = round((time.perf_counter() - start) * 1e3, 3)
    return row


def run_experiment(
    configs,
    methods=("colgen",),
    limits: SolveLimits | None = None,
    workers: int | None = None,
) -> list[ExperimentRow]:
    jobs = [(config, method, limits) for config in configs for method in methods]
    if workers is None:
        workers = int(os.environ.get(WORKERS_ENV, "0") or 0) or (os.cpu_count() or 1)
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_solve_one, jobs, chunksize=4))
    else:
        rows = [_solve_one(job) for job in jobs]
    rows.sort(key=ExperimentRow.key)

    # objective gap of the benchmark against column generation, per run
    colgen_pi = {
        row.key()[:5]: row.objective
        for row in rows
        if row.method == "colgen" and row.objective is not None
    }
    for row in rows:
        if row.method == "blp" and row.objective is not None:
            base = colgen_pi.get(row.key()[:5])
            if base:
                row.beta = (row.objective - base) / base
    return rows


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, float):
        return repr(float(value))
    return str(value)


def rows_to_csv(rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for row in rows:
        writer.writerow([_cell(getattr(row, col)) for col in CSV_COLUMNS])
    return buf.getvalue()


def write_csv(rows, path) -> None:
    Path(path).write_text(rows_to_csv(rows))


def read_csv(path) -> list[ExperimentRow]:
    rows = []
    with open(path, newline="") as fh:
        for record in csv.DictReader(fh):
            rows.append(
                ExperimentRow(
                    n=int(record["n"]),
                    delta=float(record["delta"]),
                    delta_e=float(record["delta_e"]),
                    q=float(record["q"]),
                    seed=int(record["seed"]),
                    method=record["method"],
                    status=record["status"],
                    objective=float(record["objective"]) if record["objective"] else None,
                    n_lrus=int(record["n_lrus"]) if record["n_lrus"] else None,
                    iterations=int(record["iterations"]) if record["iterations"] else None,
                    nodes=int(record["nodes"]) if record["nodes"] else None,
                    wall_ms=float(record["wall_ms"]) if record["wall_ms"] else None,
                    cycle_free=_parse_flag(record["cycle_free"]),
                    totally_balanced=_parse_flag(record["totally_balanced"]),
                    connected=_parse_flag(record["connected"]),
                    integral=_parse_flag(record["integral"]),
                    beta=float(record["beta"]) if record["beta"] else None,
                    error=record["error"],
                )
            )
    return rows


def _parse_flag(text: str) -> bool | None:
    return None if text == "" else text == "1"


SUMMARY_COLUMNS = [
    "n", "delta", "delta_e", "q", "method", "runs", "solved",
    "mean_objective", "median_objective", "mean_n_lrus",
    "mean_iterations", "mean_wall_ms", "mean_beta", "max_beta",
    "certificates_ok",
]


def summarize(rows) -> list[dict]:
    groups: dict[tuple, list[ExperimentRow]] = {}
    for row in rows:
        groups.setdefault((row.n, row.delta, row.delta_e, row.q, row.method), []).append(row)
    out = []
    for key in sorted(groups):
        bunch = groups[key]
        solved = [r for r in bunch if r.objective is not None]
        betas = [r.beta for r in bunch if r.beta is not None]
        flags = [
            all((r.cycle_free, r.totally_balanced, r.connected, r.integral))
            for r in bunch
            if r.cycle_free is not None
        ]
        out.append(
            {
                "n": key[0],
                "delta": key[1],
                "delta_e": key[2],
                "q": key[3],
                "method": key[4],
                "runs": len(bunch),
                "solved": len(solved),
                "mean_objective": statistics.mean(r.objective for r in solved) if solved else None,
                "median_objective": statistics.median(r.objective for r in solved) if solved else None,
                "mean_n_lrus": statistics.mean(r.n_lrus for r in solved if r.n_lrus) if solved else None,
                "mean_iterations": statistics.mean(r.iterations for r in solved if r.iterations is not None) if any(r.iterations is not None for r in solved) else None,
                "mean_wall_ms": statistics.mean(r.wall_ms for r in bunch if r.wall_ms is not None),
                "mean_beta": statistics.mean(betas) if betas else None,
                "max_beta": max(betas) if betas else None,
                "certificates_ok": all(flags) if flags else None,
            }
        )
    return out


def summary_to_csv(summary: list[dict]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SUMMARY_COLUMNS)
    for entry in summary:
        writer.writerow([_cell(entry[col]) for col in SUMMARY_COLUMNS])
    return buf.getvalue()
