"""Command line entry point: ``lcis <subcommand> ...``.

Exit codes: 0 success, 1 a checked criterion failed, 2 usage or input error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from pathlib import Path

from .graph import GraphFormatError, GraphPair, load_graph, sample_pair
from .greedy import greedy_lcis
from .harness import ExperimentConfig, ExperimentError, run_experiment
from .iso import CapacityError, InvalidSolutionError, Solution, exact_lcis, find_violation
from .ogp import (
    ForbiddenStructureQuery,
    OgpParams,
    build_family,
    count_forbidden,
    estimate_events,
    exponent_report,
    run_family,
)
from .online import greedy_as_online, run_online, validate_transcript

STRATEGIES = {"greedy": greedy_as_online}


class UsageError(Exception):
    pass


def _emit(obj, out=None) -> None:
    text = json.dumps(obj, indent=2, sort_keys=True)
    print(text)
    if out:
        Path(out).write_text(text + "\n")


def _input_pair(args) -> GraphPair:
    if args.graph1 or args.graph2:
        if not (args.graph1 and args.graph2):
            raise UsageError("--graph1 and --graph2 must be given together")
        return GraphPair(load_graph(args.graph1), load_graph(args.graph2))
    if args.n is None:
        raise UsageError("give either --n or --graph1/--graph2")
    return sample_pair(args.n, args.seed)


def cmd_greedy(args) -> int:
    y = _input_pair(args)
    t0 = time.perf_counter()
    sol, tr = greedy_lcis(y, transcript=bool(args.emit_transcript))
    ms = (time.perf_counter() - t0) * 1e3
    if args.emit_transcript:
        tr.save(args.emit_transcript)
    _emit({"size": sol.size, "s1": list(sol.s1), "s2": list(sol.s2), "runtime_ms": ms}, args.out)
    return 0


def cmd_exact(args) -> int:
    y = _input_pair(args)
    res = exact_lcis(y, args.budget)
    sol = res.solution
    _emit({
        "size": sol.size,
        "s1": list(sol.s1),
        "s2": list(sol.s2),
        "mapping": {str(a): b for a, b in sol.mapping.items()},
        "flag": res.flag,
        "nodes": res.nodes,
    }, args.out)
    return 0


def cmd_online_sim(args) -> int:
    y = sample_pair(args.n, args.seed)
    sol, tr = run_online(STRATEGIES[args.strategy](), y, args.seed)
    summary = {"strategy": args.strategy, "n": args.n, "seed": args.seed,
               "size": sol.size, "s1": list(sol.s1), "s2": list(sol.s2), "rounds": len(tr.rounds)}
    code = 0
    if args.validate:
        v = validate_transcript(tr, y)
        summary["valid"] = v is None
        summary["violation"] = None if v is None else str(v)
        code = 0 if v is None else 1
    if args.emit_transcript:
        tr.save(args.emit_transcript)
        summary["transcript"] = args.emit_transcript
    _emit(summary, args.out)
    return code


def cmd_ogp_scan(args) -> int:
    report = exponent_report(args.eps, args.n, C=args.C)
    if args.n and args.seeds:
        est = estimate_events(STRATEGIES[args.strategy], args.n, args.eps, args.seeds, args.seed)
        report["events"] = est.to_json()
    _emit(report, args.out)
    return 0 if report["pass"] else 1


def _family(args):
    y = sample_pair(args.n, args.seed)
    _, tr = run_online(STRATEGIES[args.strategy](), y, args.seed)
    return build_family(y, tr, args.t, args.m, args.seed)


def cmd_ogp_census(args) -> int:
    if args.paper_params:
        if args.eps is None:
            raise UsageError("--paper-params needs --eps")
        query = ForbiddenStructureQuery.from_asymptotic(args.n, args.eps, args.t, args.m)
    else:
        if args.k_sol is None or args.k_ov is None:
            raise UsageError("--k-sol and --k-ov are required without --paper-params")
        query = ForbiddenStructureQuery(args.m, args.k_sol, args.k_ov, args.t, args.w_threshold)
    fam = _family(args)
    z, w = count_forbidden(fam, query)
    _emit({"z_count": z, "w_count": w, "m": query.m, "k_sol": query.k_sol,
           "k_ov": query.k_ov, "t": query.t,
           "w_threshold": None if math.isinf(query.w_threshold) else query.w_threshold}, args.out)
    return 0


def cmd_ogp_family(args) -> int:
    if args.threshold is not None:
        threshold = args.threshold
    else:
        threshold = OgpParams.from_eps(args.eps, args.n).large_size
    fam = _family(args)
    run = run_family(STRATEGIES[args.strategy](), fam, threshold, args.seed)
    _emit({"n": args.n, "t": args.t, "m": fam.m, "seed": args.seed, "threshold": threshold,
           "sizes": run.sizes, "S": run.success}, args.out)
    return 0


def cmd_experiment(args) -> int:
    try:
        cfg = ExperimentConfig.load(args.config)
    except (OSError, json.JSONDecodeError, TypeError, ValueError) as exc:
        raise UsageError(f"bad config {args.config}: {exc}") from exc
    if args.seed_given:
        cfg.master_seed = args.seed
    if args.out:
        cfg.out = args.out
    _, summary = run_experiment(cfg, jobs=args.jobs)
    print(json.dumps(summary, indent=2, sort_keys=True))
    return 0 if summary.get("pass", True) else 1


def cmd_verify(args) -> int:
    y = GraphPair(load_graph(args.graph1), load_graph(args.graph2))
    try:
        obj = json.loads(Path(args.solution).read_text())
        sol = Solution(obj["s1"], obj["s2"])
    except (OSError, json.JSONDecodeError, KeyError, TypeError) as exc:
        raise UsageError(f"bad solution file {args.solution}: {exc}") from exc
    try:
        bad = find_violation(y, sol)
    except InvalidSolutionError as exc:
        _emit({"valid": False, "size": sol.size, "violation": str(exc)}, args.out)
        return 1
    _emit({"valid": bad is None, "size": sol.size,
           "violation": None if bad is None else list(bad)}, args.out)
    return 0 if bad is None else 1


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    # SUPPRESS so a flag given before the subcommand is not reset by the subparser
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="master seed (default 0)")
    common.add_argument("--out", default=argparse.SUPPRESS, help="output file (directory for experiment)")
    common.add_argument("--jobs", type=int, default=argparse.SUPPRESS, help="worker processes (default 1)")

    p = argparse.ArgumentParser(prog="lcis", description="Common induced subgraphs of random graphs.",
                                parents=[common])
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, fn, help_):
        sp = sub.add_parser(name, help=help_, parents=[common])
        sp.set_defaults(func=fn)
        return sp

    def add_input(sp):
        sp.add_argument("--n", type=int)
        sp.add_argument("--graph1")
        sp.add_argument("--graph2")

    sp = add("greedy", cmd_greedy, "run the greedy algorithm")
    add_input(sp)
    sp.add_argument("--emit-transcript", metavar="PATH")

    sp = add("exact", cmd_exact, "branch-and-bound maximum common induced subgraph")
    add_input(sp)
    sp.add_argument("--budget", type=int, default=None, help="search node budget")

    sp = add("online-sim", cmd_online_sim, "run an online strategy under the rule checker")
    sp.add_argument("--strategy", choices=sorted(STRATEGIES), default="greedy")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--validate", action="store_true")
    sp.add_argument("--emit-transcript", metavar="PATH")

    sp = add("ogp-scan", cmd_ogp_scan, "exponent report, optionally with event frequencies")
    sp.add_argument("--eps", type=float, required=True)
    sp.add_argument("--n", type=int)
    sp.add_argument("--seeds", type=int, default=0, help="Monte Carlo trials (needs --n)")
    sp.add_argument("--C", type=float, default=0.0, help="constant of the C m log L slack")
    sp.add_argument("--strategy", choices=sorted(STRATEGIES), default="greedy")

    for name, fn, help_ in (("ogp-census", cmd_ogp_census, "count forbidden structures"),
                            ("ogp-family", cmd_ogp_family, "run a strategy on an interpolation family")):
        sp = add(name, fn, help_)
        sp.add_argument("--n", type=int, required=True)
        sp.add_argument("--t", type=int, required=True)
        sp.add_argument("--m", type=int, required=True)
        sp.add_argument("--strategy", choices=sorted(STRATEGIES), default="greedy")
        sp.add_argument("--eps", type=float, default=None if name == "ogp-census" else 1.0)
    census = sub.choices["ogp-census"]
    census.add_argument("--k-sol", type=int)
    census.add_argument("--k-ov", type=int)
    census.add_argument("--w-threshold", type=float, default=float("inf"))
    census.add_argument("--paper-params", action="store_true",
                        help="derive k_sol, k_ov and the W threshold from n and --eps")
    sub.choices["ogp-family"].add_argument("--threshold", type=float, default=None,
                                           help="size counted as large (default (2+eps) log2 n)")

    sp = add("experiment", cmd_experiment, "run a configured experiment")
    sp.add_argument("--config", required=True, metavar="FILE")

    sp = add("verify", cmd_verify, "check a solution file against two graphs")
    sp.add_argument("--graph1", required=True)
    sp.add_argument("--graph2", required=True)
    sp.add_argument("--solution", required=True, metavar="FILE", help='JSON {"s1": [...], "s2": [...]}')
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    args.seed_given = hasattr(args, "seed")
    args.seed = getattr(args, "seed", 0)
    args.out = getattr(args, "out", None)
    args.jobs = getattr(args, "jobs", 1)
    if args.jobs < 1:
        parser.error("--jobs must be >= 1")
    try:
        return args.func(args)
    except (UsageError, GraphFormatError, CapacityError, ExperimentError, ValueError, OSError) as exc:
        print(f"lcis {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
