"""Command-line front end: gen, check-plb, oracle, run, drift, report.

Exit codes: 0 success, 2 usage error, 3 refused instance (exact solver
limit), 4 I/O or malformed input.  All randomness flows from --seed.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .fitness import Problem
from .generators import GENERATOR_ID, GenSpec, generate
from .graph import load_graph_json, save_graph_json
from .harness import (
    ExperimentConfig,
    MalformedResults,
    measure_drift,
    read_results,
    run_experiment,
    summarize,
)
from .oracles import InstanceTooLarge, exact_solve, greedy_cds, greedy_mds, greedy_mis, size_bounds
from .plb import plb_report


def default_workers() -> int:
    return int(os.environ.get("PLBCOVER_WORKERS", "1"))


def _add_gen_opts(p: argparse.ArgumentParser) -> None:
    p.add_argument("--model", choices=["pa", "chung-lu"], help="generate instead of loading --graph")
    p.add_argument("--n", type=int, default=100)
    p.add_argument("--attach-m", type=int, default=2)
    p.add_argument("--beta-target", type=float, default=2.5)


def _resolve_gen(args) -> GenSpec:
    return GenSpec(model=args.model, n=args.n, attach_m=args.attach_m,
                   beta_target=args.beta_target, seed=args.seed)


def cmd_gen(args) -> int:
    spec = _resolve_gen(args)
    g = generate(spec)
    meta = {
        "model": spec.model,
        "params": {"n": spec.n, "attach_m": spec.attach_m, "beta_target": spec.beta_target},
        "seed": spec.seed,
        "generator": GENERATOR_ID,
    }
    save_graph_json(g, args.out, meta=meta)
    print(f"wrote {args.out}: n={g.n} m={g.m}")
    return 0


def cmd_check_plb(args) -> int:
    g = load_graph_json(args.graph)
    report = plb_report(g, beta=args.beta, t=args.t, c1=args.c1)
    text = json.dumps(report, indent=2, sort_keys=True)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    print(text)
    return 0


def cmd_oracle(args) -> int:
    g = load_graph_json(args.graph)
    problem = Problem(args.problem)
    if args.method == "exact":
        res = exact_solve(g, problem, limit=args.limit)
        doc = {
            "problem": problem.value,
            "method": "exact",
            "optimum_size": res.optimum_size,
            "witness": [int(v) for v in res.witness.nonzero()[0]],
        }
    elif args.method == "greedy":
        if problem is Problem.MDS:
            res = greedy_mds(g)
        elif problem is Problem.CDS:
            res = greedy_cds(g)
        elif problem is Problem.MIS:
            res = greedy_mis(g)
        else:
            raise ValueError("no greedy construction for MVC; use --method bounds")
        doc = {
            "problem": problem.value,
            "method": "greedy",
            "size": res.optimum_size,
            "witness": [int(v) for v in res.witness.nonzero()[0]],
            "trace": res.sequence_trace,
        }
    else:
        lower, upper = size_bounds(g, problem)
        doc = {"problem": problem.value, "method": "bounds", "lower": lower, "upper": upper}
    print(json.dumps(doc, sort_keys=True))
    return 0


def cmd_run(args) -> int:
    if (args.model is None) == (args.graph is None):
        raise ValueError("pass exactly one of --graph or --model")
    config = ExperimentConfig(
        problem=args.problem,
        algorithm=args.algo,
        gen=_resolve_gen(args) if args.model else None,
        graph_path=args.graph,
        max_evaluations=args.budget,
        target=args.target,
        stop_at_first_feasible=args.first_feasible,
        trials=args.trials,
        base_seed=args.seed,
        beta=args.beta,
        t=args.t,
        workers=args.workers,
        mvc_literal=args.mvc_literal,
        out=args.out,
    )
    rows = run_experiment(config)
    print(f"wrote {args.out}: {len(rows)} trials")
    return 0


def cmd_drift(args) -> int:
    if (args.model is None) == (args.graph is None):
        raise ValueError("pass exactly one of --graph or --model")
    g = generate(_resolve_gen(args)) if args.model else load_graph_json(args.graph)
    summary = measure_drift(g, Problem(args.problem), trials=args.trials,
                            base_seed=args.seed, max_evaluations=args.budget)
    text = summary.to_json()
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    print(text)
    flagged = summary.flagged(min_samples=args.min_samples)
    if flagged:
        print(f"warning: {len(flagged)} bins below the drift bound", file=sys.stderr)
    return 0


def cmd_report(args) -> int:
    rows = read_results(args.results)
    report = summarize(rows)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(report.to_json() + "\n")
    print(report.render_table())
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="plbcover",
                                     description="EA experiments on power-law bounded graphs")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a graph file")
    _add_gen_opts(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_gen)

    p = sub.add_parser("check-plb", help="certify the degree-bucket bound and report constants")
    p.add_argument("--graph", required=True)
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--t", type=float, default=0.0)
    p.add_argument("--c1", type=float, default=None, help="fixed c1 (default: fitted)")
    p.add_argument("--out")
    p.set_defaults(fn=cmd_check_plb)

    p = sub.add_parser("oracle", help="exact, greedy, or bound reference values")
    p.add_argument("--graph", required=True)
    p.add_argument("--problem", choices=[pr.value for pr in Problem], required=True)
    p.add_argument("--method", choices=["exact", "greedy", "bounds"], default="exact")
    p.add_argument("--limit", type=int, default=None)
    p.set_defaults(fn=cmd_oracle)

    p = sub.add_parser("run", help="run a seeded trial batch and write a results CSV")
    p.add_argument("--graph")
    _add_gen_opts(p)
    p.add_argument("--problem", choices=[pr.value for pr in Problem], required=True)
    p.add_argument("--algo", choices=["ea", "gsemo"], default="ea")
    p.add_argument("--budget", type=int, default=None)
    p.add_argument("--target", type=int, default=None)
    p.add_argument("--first-feasible", action="store_true",
                   help="stop each trial at the first feasible solution")
    p.add_argument("--trials", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--beta", type=float, default=3.0)
    p.add_argument("--t", type=float, default=0.0)
    p.add_argument("--workers", type=int, default=default_workers())
    p.add_argument("--mvc-literal", action="store_true",
                   help="use the domination penalty for MVC (comparison variant)")
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_run)

    p = sub.add_parser("drift", help="measure the per-potential penalty decrease of the EA")
    p.add_argument("--graph")
    _add_gen_opts(p)
    p.add_argument("--problem", choices=["mds", "cds"], default="mds")
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--budget", type=int, default=None)
    p.add_argument("--min-samples", type=int, default=100)
    p.add_argument("--out")
    p.set_defaults(fn=cmd_drift)

    p = sub.add_parser("report", help="aggregate a results CSV")
    p.add_argument("--results", required=True)
    p.add_argument("--out")
    p.set_defaults(fn=cmd_report)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except InstanceTooLarge as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except MalformedResults as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
