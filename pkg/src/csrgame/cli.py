"""Command-line driver.

Exit codes: 0 ok, 1 input error, 2 a check failed, 3 step budget exhausted.
"""

from __future__ import annotations

import argparse
import datetime as _dt
import json
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import capacity, coloring, tree
from .dynamics import bound_report, radius_json, run_dynamics, trace_to_csv, trace_to_jsonl, unsatisfied_set
from .experiments import (
    ALL_CHECKS,
    ExperimentConfig,
    dumps,
    initial_profile,
    parse_generator_spec,
    run_checks,
    sweep,
)
from .game import is_equilibrium
from .graph import GraphError, generate, graph_stats, read_graph, write_graph

EXIT_OK, EXIT_INPUT, EXIT_CHECK, EXIT_BUDGET = 0, 1, 2, 3

_SCHED = {"lbr": "lbr", "min-index": "min_index", "min_index": "min_index", "random": "random"}
_INIT = {"all-one": "all_one", "all_one": "all_one", "random": "random", "file": "file"}


def _emit(obj: dict, out: Optional[str], timestamp: bool) -> None:
    if timestamp:
        obj = {**obj, "timestamp": _dt.datetime.now(_dt.timezone.utc).isoformat()}
    text = dumps(obj)
    if out:
        Path(out).write_text(text)
    sys.stdout.write(text)


def _load_graph(args):
    if getattr(args, "graph", None):
        return read_graph(args.graph)
    if getattr(args, "gen", None):
        spec = parse_generator_spec(args.gen)
        return generate(spec["kind"], spec["n"], p=spec["p"], seed=spec["seed"])
    raise GraphError("need --graph FILE or --gen SPEC")


def cmd_gen_graph(args) -> int:
    spec = parse_generator_spec(args.spec)
    g = generate(spec["kind"], spec["n"], p=spec["p"], seed=spec["seed"])
    if args.out:
        write_graph(g, args.out)
    else:
        sys.stdout.write(json.dumps(g.to_dict()) + "\n")
    sys.stderr.write(json.dumps(graph_stats(g).to_dict()) + "\n")
    return EXIT_OK


def _config(args) -> ExperimentConfig:
    overrides = {
        "graph": args.graph,
        "k": args.k,
        "scheduler": _SCHED[args.scheduler] if args.scheduler else None,
        "init": _INIT[args.init] if args.init else None,
        "profile_file": args.profile,
        "seed": args.seed,
        "max_steps": args.max_steps,
        "checks": tuple(args.checks.split(",")) if args.checks else None,
        "out": args.out,
        "workers": args.workers,
        "trials": getattr(args, "trials", None),
    }
    if getattr(args, "gen", None):
        spec = parse_generator_spec(args.gen)
        overrides.update(generator=spec["kind"], n=spec["n"], p=spec["p"])
        if getattr(args, "n_min", None) is not None:
            overrides["n_min"] = args.n_min
    if args.no_timestamp:
        overrides["timestamp"] = False
    if args.config:
        return ExperimentConfig.from_file(args.config, **overrides)
    return ExperimentConfig(**{k: v for k, v in overrides.items() if v is not None})


def cmd_run(args) -> int:
    cfg = _config(args)
    if cfg.graph:
        g = read_graph(cfg.graph)
    elif args.gen:
        spec = parse_generator_spec(args.gen)
        g = generate(spec["kind"], spec["n"], p=spec["p"], seed=spec["seed"])
    else:
        raise GraphError("need --graph FILE or --gen SPEC")
    p0 = initial_profile(g.n, cfg.k, cfg.init, cfg.seed, cfg.profile_file)
    trace = run_dynamics(g, p0, cfg.k, cfg.scheduler, cfg.max_steps, seed=cfg.seed)
    report = bound_report(trace)
    checks = run_checks(trace, cfg.checks)
    if cfg.out:
        Path(cfg.out).write_text(trace_to_jsonl(trace, report))
        Path(cfg.out).with_suffix(".csv").write_text(trace_to_csv(trace))
    _emit(
        {"bound_report": report.to_dict(), "checks": checks, "final_profile": list(trace.final_profile)},
        None,
        cfg.timestamp,
    )
    if not trace.terminated:
        return EXIT_BUDGET
    if any(v is False for v in checks.values()):
        return EXIT_CHECK
    return EXIT_OK


def cmd_sweep(args) -> int:
    cfg = _config(args)
    agg = sweep(cfg)
    _emit({"config": {k: v for k, v in cfg.to_dict().items() if k != "out"}, **agg}, cfg.out, cfg.timestamp)
    failed = any(slot["fail"] for slot in agg["checks"].values())
    if agg["terminated"] < agg["trials"]:
        return EXIT_BUDGET
    return EXIT_CHECK if failed else EXIT_OK


def cmd_tree(args) -> int:
    g = _load_graph(args)
    profile, order = tree.solve_tree(g, args.root, args.k)
    ok = is_equilibrium(g, profile, args.k)
    _emit({"profile": list(profile), **order.to_dict(), "equilibrium": ok}, args.out, not args.no_timestamp)
    return EXIT_OK if ok else EXIT_CHECK


def cmd_plan(args) -> int:
    g = _load_graph(args)
    plan = capacity.plan_capacity(g, args.k)
    _emit({**plan.to_dict(), "base_capacity": g.n, "k": args.k}, args.out, not args.no_timestamp)
    return EXIT_OK


def cmd_coloring(args) -> int:
    g = _load_graph(args)
    report = coloring.check_proposition1(g, args.k)
    _emit(report.to_dict(), args.out, not args.no_timestamp)
    return EXIT_CHECK if report.matched is False and not report.unbounded_determines else EXIT_OK


def cmd_verify(args) -> int:
    g = _load_graph(args)
    profile = initial_profile(g.n, args.k, "file", profile_file=args.profile)
    unsat = unsatisfied_set(g, profile, args.k)
    ok = not unsat
    _emit(
        {"equilibrium": ok, "unsatisfied": [[a, radius_json(r)] for a, r in unsat]},
        args.out,
        not args.no_timestamp,
    )
    return EXIT_OK if ok else EXIT_CHECK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="csrgame", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, k_required=True):
        p.add_argument("--graph", help="graph file (JSON or edge-list text)")
        p.add_argument("--gen", help='generator spec, e.g. "cycle 6" or "erdos_renyi 30 0.5 seed=7"')
        p.add_argument("--k", type=int, required=k_required, help="number of resources")
        p.add_argument("--out", help="output path")
        p.add_argument("--no-timestamp", action="store_true", help="omit the timestamp field")

    p = sub.add_parser("gen-graph", help="write a generated graph as JSON")
    p.add_argument("spec", nargs="+", help='e.g. "cycle 6" or "erdos_renyi 30 0.5 seed=7"')
    p.add_argument("--out")
    p.set_defaults(func=cmd_gen_graph)

    for name, func, helptext in (("run", cmd_run, "single dynamics run"), ("sweep", cmd_sweep, "seeded batch of runs")):
        p = sub.add_parser(name, help=helptext)
        common(p, k_required=False)
        p.add_argument("--config", help="JSON experiment config; flags override it")
        p.add_argument("--scheduler", choices=sorted(_SCHED))
        p.add_argument("--init", choices=sorted(_INIT))
        p.add_argument("--profile", help="JSON profile file for --init file")
        p.add_argument("--seed", type=int)
        p.add_argument("--max-steps", type=int)
        p.add_argument("--checks", help=f"comma-separated subset of {','.join(ALL_CHECKS)}")
        p.add_argument("--workers", type=int)
        if name == "sweep":
            p.add_argument("--trials", type=int)
            p.add_argument("--n-min", type=int, help="draw n uniformly from [n-min, n] per trial")
        p.set_defaults(func=func)

    p = sub.add_parser("tree", help="tree equilibrium construction")
    common(p)
    p.add_argument("--root", type=int, default=1)
    p.set_defaults(func=cmd_tree)

    p = sub.add_parser("plan", help="capacity augmentation plan")
    common(p)
    p.set_defaults(func=cmd_plan)

    p = sub.add_parser("coloring", help="graph-power coloring versus equilibrium radius")
    common(p)
    p.set_defaults(func=cmd_coloring)

    p = sub.add_parser("verify", help="check whether a profile file is an equilibrium")
    common(p)
    p.add_argument("--profile", required=True)
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "spec", None) is not None and isinstance(args.spec, list):
        args.spec = " ".join(args.spec)
    try:
        return args.func(args)
    except (ValueError, FileNotFoundError, KeyError, json.JSONDecodeError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
