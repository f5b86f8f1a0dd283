"""Command-line harness for trace replay, verification and benchmarks.

Exit codes: 0 success, 1 divergence or expectation failure, 2 parse or
usage error, 3 resource limit exceeded.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .bench import (DEFAULT_MEM_LIMIT, DEFAULT_TIME_LIMIT, ENGINE_NAMES,
                    STATUS_MEMOUT, STATUS_OK, STATUS_TIMEOUT,
                    bench as run_bench, replay, report_cactus, verify,
                    write_csv)
from .trace import TraceError, parse_trace, write_trace
from .workload import WorkloadSpec, generate, generate_adversarial

EXIT_OK = 0
EXIT_DIVERGENCE = 1
EXIT_PARSE = 2
EXIT_LIMIT = 3


def _read_trace(path: str):
    data = sys.stdin.buffer.read() if path == "-" else Path(path).read_bytes()
    return parse_trace(data, source=path)


def _cmd_replay(args) -> int:
    try:
        trace = _read_trace(args.file)
    except (TraceError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    result = replay(trace, args.engine, time_limit=args.time_limit,
                    mem_limit=args.mem_limit)
    print(f"instance:  {result.instance}")
    print(f"engine:    {result.engine}")
    print(f"status:    {result.status}")
    print(f"wall_time: {result.wall_time:.6f}s")
    print(f"ops:       {result.ops_executed} "
          f"(checks {result.checks}: {result.sat_checks} sat, "
          f"{result.unsat_checks} unsat)")
    print(f"memory:    peak {result.cells_peak} cells / "
          f"{result.entries_peak} map entries "
          f"({result.cells_allocated} cells allocated)")
    if result.detail:
        print(f"detail:    {result.detail}")
    if result.status == STATUS_OK:
        return EXIT_OK
    if result.status in (STATUS_TIMEOUT, STATUS_MEMOUT):
        return EXIT_LIMIT
    return EXIT_DIVERGENCE


def _cmd_verify(args) -> int:
    try:
        trace = _read_trace(args.file)
    except (TraceError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    report = verify(trace, deep=args.deep, audit=args.audit)
    print(f"instance: {report.instance}")
    print(f"compared: {report.checks_compared} checks, "
          f"{report.models_compared} model values")
    if report.ok:
        print("verdict:  engines agree")
        return EXIT_OK
    index, message = report.divergence
    print(f"verdict:  divergence at op {index}: {message}")
    return EXIT_DIVERGENCE


def _cmd_bench(args) -> int:
    engines = [e.strip() for e in args.engines.split(",") if e.strip()]
    for engine in engines:
        if engine not in ENGINE_NAMES:
            print(f"error: unknown engine {engine!r}", file=sys.stderr)
            return EXIT_PARSE
    rows = run_bench(args.files, engines, reps=args.reps,
                     time_limit=args.time_limit, mem_limit=args.mem_limit)
    if args.out:
        write_csv(rows, args.out)
        print(f"wrote {len(rows)} rows to {args.out}")
    else:
        write_csv(rows, sys.stdout)
    return EXIT_OK


def _cmd_gen(args) -> int:
    if args.kind == "fctp":
        spec = WorkloadSpec(
            seed=args.seed, depth=args.depth, branching=args.branching,
            adds_per_node=args.adds, new_tp_prob=args.new_tp_prob,
            contradiction_prob=args.contradiction_prob,
            bound_range=(args.bound_min, args.bound_max),
            total_order=args.total_order, root_adds=args.root_adds,
            model_probe_prob=args.model_probe_prob, op_cap=args.op_cap)
        try:
            trace = generate(spec)
        except ValueError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_PARSE
    else:
        kind = {"negcycle": "negcycle", "subsumption": "subsumption_chain",
                "chain": "deep_chain"}[args.kind]
        try:
            trace = generate_adversarial(kind, args.n, args.seed,
                                         chain_step=args.chain_step,
                                         check_every=args.check_every)
        except ValueError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_PARSE
    if args.out:
        with open(args.out, "wb") as handle:
            write_trace(trace, handle)
        print(f"wrote {len(trace)} ops to {args.out}")
    else:
        write_trace(trace, sys.stdout)
    return EXIT_OK


def _cmd_report(args) -> int:
    try:
        paths = report_cactus(args.csv, args.out_dir)
    except (OSError, ValueError, KeyError) as exc:
        print(f"error: malformed csv: {exc}", file=sys.stderr)
        return EXIT_PARSE
    for path in paths:
        print(path)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="stnkit",
        description="Replay, verify and benchmark STN operation traces.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("replay", help="replay a trace on one engine")
    p.add_argument("file", help="trace file, or - for stdin")
    p.add_argument("--engine", choices=ENGINE_NAMES, default="delta")
    p.add_argument("--time-limit", type=float, default=DEFAULT_TIME_LIMIT,
                   metavar="S")
    p.add_argument("--mem-limit", type=int, default=DEFAULT_MEM_LIMIT,
                   metavar="CELLS")
    p.set_defaults(func=_cmd_replay)

    p = sub.add_parser("verify", help="lockstep-compare both engines on a trace")
    p.add_argument("file")
    p.add_argument("--deep", action="store_true",
                   help="compare complete models after every sat check")
    p.add_argument("--audit", action="store_true",
                   help="run the incremental engine's structural audit")
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("bench", help="replay many traces, emit CSV")
    p.add_argument("files", nargs="+")
    p.add_argument("--engines", default="delta,baseline")
    p.add_argument("--reps", type=int, default=1)
    p.add_argument("--out", help="CSV output path (default: stdout)")
    p.add_argument("--time-limit", type=float, default=DEFAULT_TIME_LIMIT)
    p.add_argument("--mem-limit", type=int, default=DEFAULT_MEM_LIMIT)
    p.set_defaults(func=_cmd_bench)

    p = sub.add_parser("gen", help="generate a trace")
    p.add_argument("--kind", choices=["fctp", "negcycle", "subsumption", "chain"],
                   required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="output path (default: stdout)")
    p.add_argument("--depth", type=int, default=4)
    p.add_argument("--branching", type=int, default=2)
    p.add_argument("--adds", type=int, default=2)
    p.add_argument("--root-adds", type=int, default=0)
    p.add_argument("--new-tp-prob", type=float, default=0.7)
    p.add_argument("--contradiction-prob", type=float, default=0.0)
    p.add_argument("--bound-min", type=int, default=1)
    p.add_argument("--bound-max", type=int, default=10)
    p.add_argument("--total-order", action="store_true")
    p.add_argument("--model-probe-prob", type=float, default=0.0)
    p.add_argument("--op-cap", type=int, default=200_000)
    p.add_argument("--n", type=int, default=100,
                   help="size for negcycle/subsumption/chain")
    p.add_argument("--chain-step", type=int, default=1)
    p.add_argument("--check-every", type=int, default=0)
    p.set_defaults(func=_cmd_gen)

    p = sub.add_parser("report", help="cactus series files from a bench CSV")
    p.add_argument("--csv", required=True)
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=_cmd_report)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
