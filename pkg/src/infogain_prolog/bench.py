"""Benchmark data, the two standard experiments, and JSON reports."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field

from .adaptive import AdaptiveConfig, solve_adaptive
from .bandit import BanditRegistry
from .engine import solve_dfs
from .parser import parse_program, parse_query
from .terms import PredicateIndicator
from .traces import format_trace, hot_traces

MASK64 = (1 << 64) - 1

DESK_DEADEND_DEPTH = 100_000
DESK_MATRIX_SIZE = 200
FULL_DEADEND_DEPTH = 100_000_000
FULL_MATRIX_SIZE = 1000
DEFAULT_DENSITY = 0.125
DEFAULT_SEED = 0


class SplitMix64:
    """Steele, Lea and Flood's SplitMix64 generator (as used to seed xoshiro)."""

    def __init__(self, seed: int):
        self.state = seed & MASK64

    def next_u64(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
        return z ^ (z >> 31)

    def random(self) -> float:
        """Uniform double in [0, 1) from the top 53 bits."""
        return (self.next_u64() >> 11) * (1.0 / (1 << 53))


def matrix_edges(size: int, density: float, seed: int) -> list[tuple[int, int]]:
    """Edges ``i -> j`` (i < j); one draw per upper-triangle cell, row-major."""
    if size < 1:
        raise ValueError("size must be at least 1")
    if not (0.0 <= density <= 1.0) or math.isnan(density):
        raise ValueError(f"density must lie in [0, 1], got {density}")
    rng = SplitMix64(seed)
    edges = []
    for i in range(size):
        for j in range(i + 1, size):
            if rng.random() < density:
                edges.append((i, j))
    return edges


def gen_matrix(size: int, density: float, seed: int) -> str:
    return "".join(f"parent(n{i}, n{j}).\n" for i, j in matrix_edges(size, density, seed))


CONFOUNDED_RULES = """\
ancestor(A, B)   :- parent(A, B).
ancestor(A, B)   :- deadend(A, B).
deadend(A, B)    :- deadend(A, B,
                       {depth}).
deadend(A, B, N) :- N1 is N - 1, N > 0
                    -> deadend(A, B, N1);
                       fail.
ancestor(A, B)   :- parent(A, X),
                    ancestor(X, B).
"""

SMALL_FACTS = """\
parent(tom, fred).
parent(fred, jill).
"""


def make_confounded_program(depth: int) -> str:
    if depth < 1:
        raise ValueError("depth must be at least 1")
    return CONFOUNDED_RULES.format(depth=depth)


def descendants(edges, root: int) -> set[int]:
    """Transitive closure from ``root`` by graph search (the test oracle)."""
    succ: dict[int, list[int]] = {}
    for a, b in edges:
        succ.setdefault(a, []).append(b)
    seen: set[int] = set()
    stack = [root]
    while stack:
        for b in succ.get(stack.pop(), ()):
            if b not in seen:
                seen.add(b)
                stack.append(b)
    return seen


SUITES = ("small", "matrix")
HOT_TRACE_COUNT = 10


@dataclass
class BenchmarkSpec:
    suite: str | None = None  # "small", "matrix" or None for a program file
    program_path: str | None = None
    query: str | None = None
    strategy: str = "adaptive"
    deadend_depth: int = DESK_DEADEND_DEPTH
    size: int = DESK_MATRIX_SIZE
    density: float = DEFAULT_DENSITY
    seed: int = DEFAULT_SEED
    config: AdaptiveConfig = field(default_factory=AdaptiveConfig)

    def __post_init__(self):
        if self.suite is not None and self.suite not in SUITES:
            raise ValueError(f"unknown suite {self.suite!r}")
        if self.suite is None and (self.program_path is None or self.query is None):
            raise ValueError("a program path and a query are needed without a suite")
        if self.strategy not in ("dfs", "adaptive"):
            raise ValueError(f"unknown strategy {self.strategy!r}")
        if self.size < 1:
            raise ValueError("size must be at least 1")
        if not 0.0 <= self.density <= 1.0:
            raise ValueError("density must lie in [0, 1]")
        if self.deadend_depth < 1:
            raise ValueError("deadend_depth must be at least 1")

    def source(self) -> tuple[str, str]:
        """Program text and query text for this spec."""
        if self.suite == "small":
            text = make_confounded_program(self.deadend_depth) + SMALL_FACTS
            return text, self.query or "ancestor(tom, jill)."
        if self.suite == "matrix":
            text = make_confounded_program(self.deadend_depth) + gen_matrix(self.size, self.density, self.seed)
            return text, self.query or "ancestor(n0, X)."
        with open(self.program_path, encoding="utf-8") as fh:
            return fh.read(), self.query

    def echo(self) -> dict:
        d = asdict(self)
        d["config"] = asdict(self.config)
        return d


def suite_step_limit(suite: str, deadend_depth: int, size: int) -> int:
    """Default global step limit for a standard suite.

    The matrix query never exhausts (every path ends in a deadend
    alternative), so it runs until this limit: three steps per level of
    one deadend countdown plus room for informative work.
    """
    if suite == "small":
        return 10 * deadend_depth + 100_000
    return 3 * deadend_depth + 1500 * size


def grouped_weights(program, export: dict) -> dict | None:
    """Deadend and informative weights for ``ancestor/2``.

    The deadend weight is the UCB1 value of the clause whose body calls
    ``deadend``; the informative weight is the play-weighted mean UCB1
    value of the other clauses.  ``None`` when the program lacks that shape.
    """
    pi = PredicateIndicator("ancestor", 2)
    table = export.get(str(pi))
    clauses = program.clauses_for(pi)
    if table is None or not clauses:
        return None
    dead = [
        i for i, c in enumerate(clauses)
        if any(getattr(g, "functor", getattr(g, "name", None)) == "deadend" for g in c.body)
    ]
    if len(dead) != 1:
        return None
    arms = table["arms"]
    d = arms[dead[0]]
    informative = [a for a in arms if a["clause"] != dead[0] and a["plays"] > 0]
    plays = sum(a["plays"] for a in informative)
    weight = sum(a["plays"] * a["ucb_value"] for a in informative) / plays if plays else None
    takes = sum(a["takes"] for a in informative)
    reward = sum(a["total_reward"] for a in informative)
    return {
        "deadend_clause": dead[0],
        "deadend_weight": d["ucb_value"],
        "deadend_plays": d["plays"],
        "deadend_takes": d["takes"],
        "informative_weight": weight,
        "informative_plays": plays,
        "informative_takes": takes,
        "informative_reward_per_take": reward / takes if takes else None,
    }


def run_benchmark(spec: BenchmarkSpec, registry: BanditRegistry | None = None) -> dict:
    """Run one benchmark and return the report as a plain dict."""
    text, query_text = spec.source()
    program = parse_program(text)
    query = parse_query(query_text)
    report: dict = {"spec": spec.echo(), "query": query_text}
    if spec.strategy == "dfs":
        answers, stats = solve_dfs(program, query, step_limit=spec.config.global_step_limit)
        report.update(
            answers=answers.sorted(),
            bits_gained=float(len(answers)),
            episodes=None,
            arm_table={},
            selections={},
            grouped_weights=None,
            hot_traces=[],
        )
    else:
        res = solve_adaptive(program, query, spec.config, registry)
        answers, stats = res.answer_set, res.stats
        export = res.bandit_export
        report.update(
            answers=answers.sorted(),
            bits_gained=res.bits_gained,
            episodes=res.episodes,
            arm_table=export,
            selections={f"{pi}#{arm}": n for (pi, arm), n in res.selections.items()},
            grouped_weights=grouped_weights(program, export),
            hot_traces=[
                {"path": format_trace(p), "count": res.traces.counts[p], "bits": res.traces.bits[p]}
                for p in hot_traces(res.traces, HOT_TRACE_COUNT)
            ] if len(res.traces) else [],
        )
    report.update(
        wall_time=stats.wall_time,
        resolution_steps=stats.resolution_steps,
        inferences=stats.inferences,
        first_answer_step=stats.first_answer_step,
        limit_reached=stats.limit_reached,
    )
    return report


def report_json(report: dict, timing: bool = True) -> str:
    """Serialize with sorted keys; ``timing=False`` drops ``wall_time``."""
    if not timing:
        report = {k: v for k, v in report.items() if k != "wall_time"}
    return json.dumps(report, sort_keys=True, indent=2) + "\n"
