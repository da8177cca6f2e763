from __future__ import annotations

import argparse
import csv
import logging
import sys
import time
from pathlib import Path
from typing import List, Optional, Sequence

from busytime.adversary import run_adversary
from busytime.algorithms import MainAlgorithm
from busytime.analysis import check_valid_assignment, credit_audit, sigma
from busytime.documents import (
    REPORT_COLUMNS,
    RunReport,
    rational_str,
    read_instance,
    read_intervals,
    read_schedule,
    write_assignment,
    write_audit,
    write_instance,
    write_ledger,
    write_schedule,
)
from busytime.engine import StaticSource, run_online
from busytime.errors import BusyTimeError
from busytime.generators import SEPARATION_VARIANTS, gen_random, separation_instance, tight_example
from busytime.instance import NormalizedLadder, RealTypes, TypeSystem, normalize_types
from busytime.limits import OracleLimits, resolve_seed
from busytime.oracle import exact_opt
from busytime.registry import algorithm_names, build_algorithms, prepare
from busytime.schedule import realize_schedule, schedule_cost, validate_schedule

logger = logging.getLogger(__name__)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="busytime", description="Online busy-time scheduling experiments.")
    parser.add_argument("--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate an instance file")
    gen.add_argument("family", choices=["random", "agreeable", "appendixA", "separation", "tight"])
    gen.add_argument("-o", "--output", required=True)
    gen.add_argument("--n", type=int, default=10)
    gen.add_argument("--K", type=int, default=3)
    gen.add_argument("--window-max", type=int, default=5)
    gen.add_argument("--release-max", type=int, default=None)
    gen.add_argument("--ladder-menu", action="store_true", help="menu with costs 2^k and doubling capacities")
    gen.add_argument("--seed", type=int, default=None)
    gen.add_argument("--variant", choices=list(SEPARATION_VARIANTS), default="greedy")
    gen.add_argument("--q", type=int, default=2)

    run = sub.add_parser("run", help="run one algorithm on one instance")
    run.add_argument("--alg", required=True, choices=algorithm_names())
    run.add_argument("--instance", required=True)
    run.add_argument("--ladder", action="store_true", help="run on the normalized ladder (required for main)")
    run.add_argument("--oracle", choices=["exact", "none"], default="none")
    run.add_argument("--trace")
    run.add_argument("--ledger")
    run.add_argument("--schedule")
    run.add_argument("--audit", help="credit audit of the main ledger against the exact ladder optimum")
    run.add_argument("--report", required=True)
    run.add_argument("--json")
    run.add_argument("--seed", type=int, default=None)

    adv = sub.add_parser("adversary", help="run against the adaptive lower-bound source")
    adv.add_argument("--alg", required=True, choices=algorithm_names())
    adv.add_argument("--M", type=int, default=8)
    adv.add_argument("--report", required=True)
    adv.add_argument("--json")

    verify = sub.add_parser("verify", help="check a schedule or interval assignment")
    verify.add_argument("--what", required=True, choices=["schedule", "assignment"])
    verify.add_argument("--instance", required=True)
    verify.add_argument("--artifact", required=True)
    verify.add_argument("--ladder", action="store_true", help="read assignment types as ladder rungs")
    return parser


def write_reports(rows: Sequence[RunReport], csv_path: str, json_path: Optional[str] = None) -> None:
    with open(csv_path, "w", newline="", encoding="utf-8") as f:
        writer = csv.DictWriter(f, fieldnames=list(REPORT_COLUMNS))
        writer.writeheader()
        for row in rows:
            writer.writerow({k: ("" if v is None else v) for k, v in row.model_dump().items()})
    if json_path:
        Path(json_path).write_text(
            "[" + ",\n".join(r.model_dump_json() for r in rows) + "]\n",
            encoding="utf-8",
        )


def _cmd_gen(args: argparse.Namespace) -> int:
    seed = resolve_seed(args.seed)
    if args.family in ("random", "agreeable"):
        instance = gen_random(
            n=args.n,
            K=args.K,
            window_max=args.window_max,
            agreeable=args.family == "agreeable",
            seed=seed,
            release_max=args.release_max,
            ladder=args.ladder_menu,
        )
    elif args.family in ("appendixA", "separation"):
        instance = separation_instance(args.variant, args.K)
    else:
        example = tight_example(args.q)
        instance = example.instance
        out = Path(args.output)
        stem = out.with_suffix("") if out.suffix == ".json" else out
        write_assignment(example.assignment, f"{stem}.assignment.json")
        write_schedule(example.schedule, f"{stem}.schedule.json")
        print(f"sigma={example.sigma} cost={rational_str(example.cost)}")
    write_instance(instance, args.output)
    print(f"wrote {instance.n} jobs to {args.output}")
    return 0


def _cmd_run(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    spec = build_algorithms()[args.alg]
    if spec.type_system == "ladder" and not args.ladder:
        parser.error(f"--alg {args.alg} runs on the normalized ladder; pass --ladder")
    if spec.type_system == "real" and args.ladder:
        parser.error(f"--alg {args.alg} runs on the real machine menu; drop --ladder")
    if (args.ledger or args.audit) and spec.type_system != "ladder":
        parser.error("--ledger and --audit need --alg main")

    seed = resolve_seed(args.seed)
    instance = read_instance(args.instance).canonical()
    algorithm, types = prepare(args.alg, instance)
    started = time.perf_counter()
    result = run_online(StaticSource(instance), algorithm, types)
    elapsed = (time.perf_counter() - started) * 1000.0

    real = realize_schedule(result.schedule)
    problems = validate_schedule(instance, real)
    if problems:
        for v in problems:
            print(f"invalid run schedule: batch {v.batch_index} {v.rule}: {v.detail}", file=sys.stderr)
        return 1
    cost = schedule_cost(real)

    baseline_value = None
    if args.oracle == "exact":
        baseline_value = exact_opt(instance).cost

    if args.trace:
        Path(args.trace).write_text(result.trace.to_jsonl(), encoding="utf-8")
    if args.ledger and isinstance(algorithm, MainAlgorithm):
        write_ledger(algorithm.ledger.intervals(), args.ledger)
    if args.audit and isinstance(algorithm, MainAlgorithm) and isinstance(types, NormalizedLadder):
        virtual = types.virtual_machine_types()
        opt = exact_opt(instance, OracleLimits.from_env(max_types=len(virtual)), machine_types=virtual)
        write_audit(credit_audit(instance, opt.schedule, algorithm.ledger.intervals(), types), args.audit)
    if args.schedule:
        write_schedule(result.schedule, args.schedule)

    row = RunReport.build(
        instance_id=Path(args.instance).stem,
        algorithm=args.alg,
        type_system=types.kind,
        n=instance.n,
        cost=cost,
        baseline="exact_opt",
        baseline_value=baseline_value,
        wall_time_ms=elapsed,
        seed=seed,
    )
    write_reports([row], args.report, args.json)
    print(f"{args.alg}: cost={row.cost}" + (f" opt={row.baseline_value} ratio={row.ratio}" if row.ratio else ""))
    return 0


def _cmd_adversary(args: argparse.Namespace) -> int:
    started = time.perf_counter()
    outcome = run_adversary(args.alg, args.M)
    elapsed = (time.perf_counter() - started) * 1000.0
    row = RunReport.build(
        instance_id=f"adversary-M{args.M}",
        algorithm=args.alg,
        type_system=outcome.result.schedule.kind,
        n=len(outcome.result.jobs),
        cost=outcome.cost,
        baseline="adversary_bound",
        baseline_value=outcome.bounds.best,
        wall_time_ms=elapsed,
        seed=resolve_seed(),
    )
    write_reports([row], args.report, args.json)
    print(f"{args.alg}: groups={outcome.groups} cost={row.cost} bound={row.baseline_value} ratio={row.ratio}")
    return 0


def _cmd_verify(args: argparse.Namespace) -> int:
    instance = read_instance(args.instance)
    if args.what == "schedule":
        schedule = read_schedule(args.artifact, instance)
        problems = validate_schedule(instance, schedule)
        for v in problems:
            print(f"batch {v.batch_index} {v.rule}: {v.detail}")
        if problems:
            return 1
        print(f"valid {schedule.kind} schedule, cost={rational_str(schedule_cost(realize_schedule(schedule)))}")
        return 0

    canonical = instance.canonical()
    types: TypeSystem = normalize_types(canonical) if args.ladder else RealTypes(canonical.machine_types)
    intervals = read_intervals(args.artifact)
    problems = check_valid_assignment(instance, intervals, types)
    for v in problems:
        print(f"interval {v.batch_index} {v.rule}: {v.detail}")
    if problems:
        return 1
    print(f"valid assignment, sigma={sigma(intervals)}")
    return 0


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        if args.command == "gen":
            return _cmd_gen(args)
        if args.command == "run":
            return _cmd_run(args, parser)
        if args.command == "adversary":
            return _cmd_adversary(args)
        return _cmd_verify(args)
    except (BusyTimeError, OSError) as e:
        logger.debug("command failed", exc_info=True)
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
