"""Command-line entry point: ``run``, ``gen-matrix`` and ``bench``."""

from __future__ import annotations

import argparse
import sys

from .adaptive import AdaptiveConfig
from .bandit import DEFAULT_C
from .bench import (
    DEFAULT_DENSITY,
    DEFAULT_SEED,
    DESK_DEADEND_DEPTH,
    DESK_MATRIX_SIZE,
    FULL_DEADEND_DEPTH,
    FULL_MATRIX_SIZE,
    BenchmarkSpec,
    gen_matrix,
    report_json,
    run_benchmark,
    suite_step_limit,
)
from .engine import EngineError
from .parser import ParseError


def _budget(text: str):
    if text == "unlimited":
        return None
    n = int(text)
    if n < 1:
        raise argparse.ArgumentTypeError("episode budget must be >= 1 or 'unlimited'")
    return n


def _positive(text: str) -> int:
    n = int(text)
    if n < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return n


def _density(text: str) -> float:
    p = float(text)
    if not 0.0 <= p <= 1.0:
        raise argparse.ArgumentTypeError("density must lie in [0, 1]")
    return p


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="infogain-prolog", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="solve a query against a program file")
    run.add_argument("--program", required=True, metavar="PATH")
    run.add_argument("--query", required=True, metavar="TEXT")
    run.add_argument("--strategy", choices=("dfs", "adaptive"), default="adaptive")
    run.add_argument("--episode-budget", type=_budget, default=None, metavar="N|unlimited")
    run.add_argument("--budget-schedule", choices=("fixed", "doubling"), default="fixed")
    run.add_argument("--step-limit", type=_positive, default=50_000_000, metavar="N")
    run.add_argument("--exploration-constant", type=float, default=DEFAULT_C, metavar="FLOAT")
    run.add_argument("--seed", type=int, default=DEFAULT_SEED, metavar="N")
    run.add_argument("--json", metavar="PATH", help="write the report here ('-' for stdout)")

    gm = sub.add_parser("gen-matrix", help="write random upper-triangular parent/2 facts")
    gm.add_argument("--size", type=_positive, default=DESK_MATRIX_SIZE, metavar="N")
    gm.add_argument("--density", type=_density, default=DEFAULT_DENSITY, metavar="FLOAT")
    gm.add_argument("--seed", type=int, default=DEFAULT_SEED, metavar="N")
    gm.add_argument("--out", metavar="PATH", help="output file (default stdout)")

    b = sub.add_parser("bench", help="run one of the standard experiments")
    b.add_argument("--suite", choices=("small", "matrix"), required=True)
    b.add_argument("--deadend-depth", type=_positive, default=None, metavar="N")
    b.add_argument("--size", type=_positive, default=None, metavar="N")
    b.add_argument("--density", type=_density, default=DEFAULT_DENSITY, metavar="FLOAT")
    b.add_argument("--seed", type=int, default=DEFAULT_SEED, metavar="N")
    b.add_argument("--json", metavar="PATH", help="write the report here ('-' for stdout)")
    b.add_argument("--strategy", choices=("dfs", "adaptive"), default="adaptive")
    b.add_argument("--episode-budget", type=_budget, default=None, metavar="N|unlimited")
    b.add_argument("--step-limit", type=_positive, default=None, metavar="N")
    b.add_argument(
        "--full-scale",
        action="store_true",
        help=f"use depth {FULL_DEADEND_DEPTH} and size {FULL_MATRIX_SIZE} unless given explicitly",
    )
    return ap


def _emit(text: str, path: str | None) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _summary(report: dict) -> str:
    lines = list(report["answers"]) or ["no"]
    lines.append(
        f"% {report['resolution_steps']} steps, {report['wall_time']:.3f} s"
        + (" (step limit reached)" if report["limit_reached"] else "")
    )
    g = report.get("grouped_weights")
    if g:
        lines.append(
            f"% deadend weight {g['deadend_weight']}, informative weight {g['informative_weight']}"
        )
    return "\n".join(lines) + "\n"


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "gen-matrix":
            _emit(gen_matrix(args.size, args.density, args.seed), args.out)
            return 0
        if args.command == "run":
            cfg = AdaptiveConfig(
                episode_budget=args.episode_budget,
                budget_schedule=args.budget_schedule,
                global_step_limit=args.step_limit,
                exploration_constant=args.exploration_constant,
                seed=args.seed,
            )
            spec = BenchmarkSpec(
                program_path=args.program, query=args.query, strategy=args.strategy,
                seed=args.seed, config=cfg,
            )
        else:
            depth = args.deadend_depth or (FULL_DEADEND_DEPTH if args.full_scale else DESK_DEADEND_DEPTH)
            size = args.size or (FULL_MATRIX_SIZE if args.full_scale else DESK_MATRIX_SIZE)
            cfg = AdaptiveConfig(
                episode_budget=args.episode_budget,
                global_step_limit=args.step_limit or suite_step_limit(args.suite, depth, size),
                seed=args.seed,
            )
            spec = BenchmarkSpec(
                suite=args.suite, strategy=args.strategy, deadend_depth=depth, size=size,
                density=args.density, seed=args.seed, config=cfg,
            )
        report = run_benchmark(spec)
    except (OSError, ParseError, EngineError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if args.json:
        _emit(report_json(report), args.json)
    if args.json != "-":
        sys.stdout.write(_summary(report))
    return 0


if __name__ == "__main__":
    sys.exit(main())
