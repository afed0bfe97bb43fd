"""Command-line interface.

Exit codes: 0 success, 1 a requested fairness check is false, 2 bad input,
3 internal error (a bug).
"""

from __future__ import annotations

import argparse
import json
import logging
import random
import statistics
import sys
import time
from pathlib import Path
from typing import Optional, Sequence

from .errors import BudgetError, InputError, InternalError
from .fairness import ALL_NOTIONS, Notion, verify
from .files import (
    ResultFile,
    dump_instance,
    dumps,
    instance_to_dict,
    load_allocation,
    load_instance,
    read_text,
)
from .generate import exhaustive_family, random_family, random_instance, random_instances
from .instance import require_valid
from .oracle import DEFAULT_MAX_ASSIGNMENTS, EnumerationBudget, existence_sweep
from .solver import solve_traced

EXIT_OK, EXIT_FALSE, EXIT_INPUT, EXIT_INTERNAL = 0, 1, 2, 3


def _notions(values: Optional[Sequence[str]], default: Sequence[Notion]) -> list[Notion]:
    if not values:
        return list(default)
    out: list[Notion] = []
    for v in values:
        for name in v.split(","):
            if name.strip().lower() == "all":
                out.extend(ALL_NOTIONS)
            elif name.strip():
                out.append(Notion.parse(name))
    return list(dict.fromkeys(out))


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_solve(args) -> int:
    inst = load_instance(read_text(args.instance))
    notions = [Notion.PROPAVG] + [n for n in _notions(args.also_verify, ()) if n is not Notion.PROPAVG]
    alloc, trace = solve_traced(inst, check_invariants=args.check_invariants)
    reports = [verify(inst, alloc, n) for n in notions]
    result = ResultFile.build(alloc, reports, trace.to_dict())
    _emit(result.dumps(), args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    inst = load_instance(read_text(args.instance))
    alloc = load_allocation(read_text(args.allocation))
    require_valid(inst, alloc)
    notions = _notions(args.notion, (Notion.PROPAVG,))
    reports = [verify(inst, alloc, n) for n in notions]
    ok = all(r.satisfied for r in reports)
    if args.json:
        doc = {
            "satisfied": ok,
            "notions": {
                r.notion.value: {"satisfied": r.satisfied, "certificates": [c.to_dict() for c in r.certificates]}
                for r in reports
            },
        }
        sys.stdout.write(dumps(doc))
    else:
        width = max(len(n.value) for n in notions)
        for r in reports:
            marks = " ".join("ok" if v else "NO" for v in r.verdicts)
            print(f"{r.notion.value:<{width}}  {'yes' if r.satisfied else 'no ':<3}  agents: {marks}")
    return EXIT_OK if ok else EXIT_FALSE


def cmd_gen(args) -> int:
    _positive(args, "agents", "count")
    if args.goods < 0 or args.max_value < 0:
        raise InputError("--goods and --max-value must be non-negative")
    instances = random_instances(args.agents, args.goods, args.max_value, args.count, args.seed)
    if args.out_dir:
        out = Path(args.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        for k, inst in enumerate(instances):
            (out / f"instance_{k:04d}.json").write_text(dump_instance(inst))
    elif args.count == 1:
        sys.stdout.write(dump_instance(instances[0]))
    else:
        # one compact document per line
        for inst in instances:
            print(json.dumps(instance_to_dict(inst), sort_keys=True))
    return EXIT_OK


def cmd_bench(args) -> int:
    _positive(args, "agents")
    if args.trials < 0 or args.goods < 0 or args.max_value < 0:
        raise InputError("--trials, --goods and --max-value must be non-negative")
    rng = random.Random(args.seed)
    times: list[float] = []
    iterations: list[int] = []
    failures: list[int] = []
    for k in range(args.trials):
        inst = random_instance(rng, args.agents, args.goods, args.max_value)
        t0 = time.perf_counter()
        alloc, trace = solve_traced(inst)
        times.append(time.perf_counter() - t0)
        iterations.append(trace.max_iterations)
        if not verify(inst, alloc, Notion.PROPAVG).satisfied:
            failures.append(k)
    stats = {
        "agents": args.agents,
        "goods": args.goods,
        "trials": args.trials,
        "seed": args.seed,
        "median_seconds": statistics.median(times) if times else None,
        "max_seconds": max(times) if times else None,
        "max_loop_iterations": max(iterations) if iterations else None,
        "failed_trials": failures,
    }
    if args.json:
        sys.stdout.write(dumps(stats))
    else:
        for key, value in stats.items():
            print(f"{key}: {value}")
    return EXIT_INTERNAL if failures else EXIT_OK


def cmd_sweep(args) -> int:
    _positive(args, "agents")
    notion = Notion.parse(args.notion)
    if args.random is not None:
        family = random_family([args.agents], [args.goods], args.max_value, args.random, args.seed)
    else:
        family = exhaustive_family(args.agents, args.goods, args.max_value)
    report = existence_sweep(family, notion, EnumerationBudget(args.budget))
    doc = {
        "notion": notion.value,
        "checked": report.checked,
        "skipped": len(report.skipped),
        "counterexamples": [instance_to_dict(i) for i in report.counterexamples],
    }
    if args.json:
        sys.stdout.write(dumps(doc))
    else:
        print(f"{notion.value}: checked {report.checked}, skipped {len(report.skipped)}, "
              f"instances without a satisfying allocation: {len(report.counterexamples)}")
        for inst in report.counterexamples[: args.show]:
            print("  ", [list(r) for r in inst.values])
    return EXIT_OK if report.clean else EXIT_FALSE


def _positive(args, *names: str) -> None:
    for name in names:
        if getattr(args, name) < 1:
            raise InputError(f"--{name.replace('_', '-')} must be positive")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", default=argparse.SUPPRESS,
                        help="machine-readable output")

    p = argparse.ArgumentParser(
        prog="propavg",
        description="Compute and verify PROPavg allocations of indivisible goods. "
        "Valuations are non-negative integers; scale rational values to integers first.",
    )
    p.add_argument("--json", action="store_true", help="machine-readable output")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve", parents=[common], help="compute a PROPavg allocation")
    s.add_argument("instance")
    s.add_argument("--out", help="write the result file here instead of stdout")
    s.add_argument("--also-verify", action="append", metavar="NOTIONS",
                   help="extra notions to certify, comma separated (or 'all')")
    s.add_argument("--check-invariants", action="store_true",
                   help="re-verify solver invariants at every step (slow)")
    s.set_defaults(func=cmd_solve)

    v = sub.add_parser("verify", parents=[common], help="check an allocation against fairness notions")
    v.add_argument("instance")
    v.add_argument("allocation")
    v.add_argument("--notion", action="append", metavar="NOTIONS",
                   help="notions to check, comma separated (default PROPAVG; 'all' for every notion)")
    v.set_defaults(func=cmd_verify)

    g = sub.add_parser("gen", parents=[common], help="generate random instances")
    g.add_argument("--agents", type=int, required=True)
    g.add_argument("--goods", type=int, required=True)
    g.add_argument("--max-value", type=int, required=True)
    g.add_argument("--seed", type=int, required=True)
    g.add_argument("--count", type=int, default=1)
    g.add_argument("--out-dir", help="write instance_NNNN.json files here")
    g.set_defaults(func=cmd_gen)

    b = sub.add_parser("bench", parents=[common], help="time the solver on random instances")
    b.add_argument("--agents", type=int, required=True)
    b.add_argument("--goods", type=int, required=True)
    b.add_argument("--trials", type=int, required=True)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--max-value", type=int, default=10**6)
    b.set_defaults(func=cmd_bench)

    w = sub.add_parser("sweep", parents=[common], help="search small instances for notions with no allocation")
    w.add_argument("--agents", type=int, required=True)
    w.add_argument("--goods", type=int, required=True)
    w.add_argument("--max-value", type=int, required=True)
    w.add_argument("--notion", default="PROPAVG")
    w.add_argument("--random", type=int, metavar="COUNT",
                   help="sample COUNT random instances instead of the exhaustive family")
    w.add_argument("--seed", type=int, default=0)
    w.add_argument("--budget", type=int, default=DEFAULT_MAX_ASSIGNMENTS,
                   help="maximum assignments enumerated per instance")
    w.add_argument("--show", type=int, default=5, help="counterexamples to print")
    w.set_defaults(func=cmd_sweep)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (InputError, BudgetError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except InternalError as exc:
        print(f"internal error (please report): {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
