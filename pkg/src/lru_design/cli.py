"""Command-line surface.

Subcommands: gen, solve, clru, check, fixture, experiment, summarize.
Exit codes: 0 on success, 2 on validation problems, 3 when a limit was
hit (iteration/node/time caps, size caps).
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import fixtures
from .blp import build_blp, solve_blp
from .bruteforce import bruteforce_design
from .colgen import SolveOptions, solve_lru_design_colgen
from .costs import design_to_dict
from .cover import solve_clru, solve_clru_milp
from .disassembly import compute_successor_sets
from .errors import InstanceTooLarge, LruDesignError, ValidationError
from .experiments import (
    expand_grid,
    run_experiment,
    read_csv,
    rows_to_csv,
    summarize,
    summary_to_csv,
    write_csv,
)
from .generator import GeneratorConfig, generate
from .instance import dump_instance, instance_to_dict, load_instance
from .milp import SolveLimits

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_LIMIT = 3


def _emit(doc: dict, out: str | None) -> None:
    text = json.dumps(doc, indent=2) + "\n"
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _cmd_gen(args) -> int:
    config = GeneratorConfig(
        n_vertices=args.n,
        avg_degree=args.delta,
        avg_out_degree=args.delta_e,
        edge_scale=args.q,
        seed=args.seed,
    )
    inst = generate(config)
    if args.out:
        dump_instance(inst, args.out)
    else:
        _emit(instance_to_dict(inst), None)
    return EXIT_OK


def _cmd_solve(args) -> int:
    inst = load_instance(args.infile)
    closures = compute_successor_sets(inst)
    limits = SolveLimits(node_cap=args.node_cap, time_cap=args.time_cap)
    if args.method == "colgen":
        options = SolveOptions(
            pricing=args.pricing,
            max_iterations=args.max_iterations,
            certify=True,
        )
        res = solve_lru_design_colgen(inst, closures, options)
        if not res.converged:
            _emit({"status": "limit", "objective_bound": res.objective}, args.out)
            return EXIT_LIMIT
        doc = design_to_dict(inst, res.design)
        doc["status"] = "optimal"
        doc["iterations"] = res.iterations
        if args.certify:
            doc["certificate"] = res.certificate.to_dict()
        _emit(doc, args.out)
        return EXIT_OK
    if args.method == "blp":
        enc = build_blp(inst, closures, symmetry_breaking=not args.fidelity)
        res = solve_blp(enc, closures, limits)
        if res.design is None:
            _emit({"status": res.status, "bound": res.bound}, args.out)
            return EXIT_LIMIT
        doc = design_to_dict(inst, res.design)
        doc["status"] = res.status
        doc["bound"] = res.bound
        doc["nodes"] = res.node_count
        _emit(doc, args.out)
        return EXIT_OK if res.status == "optimal" else EXIT_LIMIT
    design = bruteforce_design(inst, closures, cap=args.cap)
    doc = design_to_dict(inst, design)
    doc["status"] = "optimal"
    _emit(doc, args.out)
    return EXIT_OK


def _cmd_clru(args) -> int:
    inst = load_instance(args.infile)
    closures = compute_successor_sets(inst)
    if args.mode == "milp":
        design = solve_clru_milp(inst, closures)
    else:
        design = solve_clru(inst, closures, cap=args.cap)
    _emit(
        {
            "pi": design.pi,
            "lrus": [
                {
                    "failure": sorted(inst.labels[v] for v in q.failure),
                    "replacement": sorted(inst.labels[v] for v in q.replacement),
                    "omega": q.omega,
                }
                for q in design.lrus
            ],
        },
        args.out,
    )
    return EXIT_OK


def _cmd_check(args) -> int:
    inst = load_instance(args.infile)
    res = solve_lru_design_colgen(inst, options=SolveOptions(certify=True))
    if not res.converged or res.certificate is None:
        _emit({"status": "limit"}, args.out)
        return EXIT_LIMIT
    _emit(res.certificate.to_dict(), args.out)
    return EXIT_OK


def _cmd_fixture(args) -> int:
    inst = fixtures.fixture(args.name)
    if args.out:
        dump_instance(inst, args.out)
    else:
        _emit(instance_to_dict(inst), None)
    return EXIT_OK


def _floats(text: str) -> list[float]:
    return [float(tok) for tok in text.split(",") if tok]


def _cmd_experiment(args) -> int:
    configs = expand_grid(
        n_values=[int(v) for v in args.n.split(",")],
        deltas=_floats(args.deltas),
        delta_es=_floats(args.delta_es),
        qs=_floats(args.qs),
        n_seeds=args.seeds,
        seed0=args.seed,
    )
    limits = SolveLimits(node_cap=args.node_cap, time_cap=args.time_cap)
    rows = run_experiment(
        configs,
        methods=tuple(args.methods.split(",")),
        limits=limits,
        workers=args.workers,
    )
    if args.out:
        write_csv(rows, args.out)
    else:
        sys.stdout.write(rows_to_csv(rows))
    failures = [r for r in rows if r.status == "error"]
    return EXIT_VALIDATION if len(failures) == len(rows) and rows else EXIT_OK


def _cmd_summarize(args) -> int:
    rows = read_csv(args.infile)
    text = summary_to_csv(summarize(rows))
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lru-design",
        description="Partition a system's parts into line replaceable units.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate a random instance")
    gen.add_argument("--n", type=int, required=True)
    gen.add_argument("--delta", type=float, default=3.0)
    gen.add_argument("--delta-e", dest="delta_e", type=float, default=1.0)
    gen.add_argument("--q", type=float, default=1.0)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out", default=None)
    gen.set_defaults(func=_cmd_gen)

    solve = sub.add_parser("solve", help="solve an instance")
    solve.add_argument("--method", choices=("colgen", "blp", "oracle"), default="colgen")
    solve.add_argument("--in", dest="infile", required=True)
    solve.add_argument("--out", default=None)
    solve.add_argument("--certify", action="store_true")
    solve.add_argument("--fidelity", action="store_true",
                       help="plain benchmark program without symmetry breaking")
    solve.add_argument("--pricing", choices=("enumeration", "milp"), default="enumeration")
    solve.add_argument("--max-iterations", type=int, default=None)
    solve.add_argument("--node-cap", type=int, default=None)
    solve.add_argument("--time-cap", type=float, default=None)
    solve.add_argument("--cap", type=int, default=13, help="size cap for the oracle")
    solve.set_defaults(func=_cmd_solve)

    clru = sub.add_parser("clru", help="solve the overlapping-replacement variant")
    clru.add_argument("--in", dest="infile", required=True)
    clru.add_argument("--mode", choices=("exhaustive", "milp"), default="exhaustive")
    clru.add_argument("--cap", type=int, default=8)
    clru.add_argument("--out", default=None)
    clru.set_defaults(func=_cmd_clru)

    check = sub.add_parser("check", help="solve and emit the structural certificate")
    check.add_argument("--in", dest="infile", required=True)
    check.add_argument("--out", default=None)
    check.set_defaults(func=_cmd_check)

    fix = sub.add_parser("fixture", help="write a bundled example instance")
    fix.add_argument("--name", choices=fixtures.FIXTURE_NAMES, required=True)
    fix.add_argument("--out", default=None)
    fix.set_defaults(func=_cmd_fixture)

    exp = sub.add_parser("experiment", help="run a seeded config grid")
    exp.add_argument("--n", default="20")
    exp.add_argument("--deltas", default="3")
    exp.add_argument("--delta-es", dest="delta_es", default="1")
    exp.add_argument("--qs", default="1")
    exp.add_argument("--seeds", type=int, default=10)
    exp.add_argument("--seed", type=int, default=0)
    exp.add_argument("--methods", default="colgen")
    exp.add_argument("--workers", type=int, default=None)
    exp.add_argument("--node-cap", type=int, default=None)
    exp.add_argument("--time-cap", type=float, default=None)
    exp.add_argument("--out", default=None)
    exp.set_defaults(func=_cmd_experiment)

    summ = sub.add_parser("summarize", help="aggregate an experiment CSV")
    summ.add_argument("--in", dest="infile", required=True)
    summ.add_argument("--out", default=None)
    summ.set_defaults(func=_cmd_summarize)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ValidationError as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except InstanceTooLarge as exc:
        print(f"limit: {exc}", file=sys.stderr)
        return EXIT_LIMIT
    except LruDesignError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
