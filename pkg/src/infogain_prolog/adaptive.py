"""Adaptive evaluation: UCB1 clause choice rewarded by information gain.

A goal whose predicate has two or more candidate clauses (after first
argument filtering) becomes a choice node.  Untried (node, clause) pairs
wait in FIFO queues, one per (predicate, clause); each episode resumes the
oldest pair from the queue whose clause currently has the highest UCB1
value, then descends.  At every fresh node on the way down the
predicate's bandit picks a clause and the siblings are queued.  An episode
ends at an answer, a failure, or the episode budget; a pair that ran out
of budget is queued again.

Accounting
----------
* Effort is counted in clause resolutions and charged to the innermost
  open decision, so a clause leading into a long fruitless recursion pays
  for all of it.
* When an episode produces an answer, each decision opened in that
  episode earns one bit.  Failures earn nothing.
"""

from __future__ import annotations

import heapq
import time
from collections import deque
from dataclasses import dataclass, field

from .bandit import DEFAULT_C, BanditRegistry, record_take, select_arm, ucb_value, update_arm
from .compile import compile_goals, resolver
from .engine import (
    AnswerSet,
    BindingStore,
    EngineError,
    SolveStats,
    StepLimit,
    dfs_run,
    eval_builtin,
    max_var_id,
    push_goals,
    query_variables,
    to_goal_list,
)
from .infogain import InfoAccountant, reward_for_answer
from .terms import Atom, Compound, IfThenElse, Int, PredicateIndicator, Program, Var
from .traces import TraceStats, add_trace

UNLIMITED = None


@dataclass
class AdaptiveConfig:
    episode_budget: int | None = UNLIMITED
    budget_schedule: str = "fixed"  # or "doubling"
    global_step_limit: int = 50_000_000
    exploration_constant: float = DEFAULT_C
    seed: int = 0

    def __post_init__(self):
        if self.episode_budget is not None and self.episode_budget < 1:
            raise ValueError("episode_budget must be >= 1 or None (unlimited)")
        if self.budget_schedule not in ("fixed", "doubling"):
            raise ValueError(f"unknown budget schedule {self.budget_schedule!r}")
        if self.global_step_limit < 1:
            raise ValueError("global_step_limit must be positive")
        if self.episode_budget is not None and self.global_step_limit < self.episode_budget:
            raise ValueError("global_step_limit must be >= episode_budget")
        if self.exploration_constant < 0:
            raise ValueError("exploration_constant must be nonnegative")


@dataclass
class AdaptiveReport:
    answer_set: AnswerSet
    stats: SolveStats
    registry: BanditRegistry
    bits_gained: float
    traces: TraceStats
    episodes: int = 0
    # (predicate, clause index) -> number of episodes that expanded it
    selections: dict = field(default_factory=dict)
    exhausted: bool = False

    def selected(self, pred, clause: int) -> int:
        return self.selections.get((PredicateIndicator(*pred), clause), 0)

    @property
    def bandit_export(self) -> dict:
        return self.registry.export()


class _Decision:
    __slots__ = ("pred", "arm", "trail", "effort", "resume", "reward", "touched", "trace")

    def __init__(self, pred, arm, trail):
        self.pred = pred
        self.arm = arm
        self.trail = trail  # the decision made just before this one
        self.effort = 0
        self.resume = 0
        self.reward = 0.0
        self.touched = False
        self.trace = None


class _Exit:
    """Marks the end of a decision's subproof in the goal list."""

    __slots__ = ("decision", "prev")

    def __init__(self, decision, prev):
        self.decision = decision
        self.prev = prev


class _Node:
    """A suspended goal list whose first goal has several candidate clauses."""

    __slots__ = ("goals", "answer", "path", "current", "pred")

    def __init__(self, goals, answer, path, current, pred):
        self.goals = goals
        self.answer = answer
        self.path = path
        self.current = current
        self.pred = pred


_CONTROL = {",": 1, ";": 2, "is": 3, ">": 3}


def _arg_key(t):
    tp = type(t)
    if tp is Atom:
        return ("a", t.name)
    if tp is Int:
        return ("i", t.value)
    if tp is Compound:
        return ("c", t.functor, len(t.args))
    return None


def _conj_goals(t):
    out = []
    while type(t) is Compound and t.functor == "," and len(t.args) == 2:
        out.append(t.args[0])
        t = t.args[1]
    out.append(t)
    return out


class AdaptiveSolver:
    def __init__(self, program: Program, config: AdaptiveConfig, registry: BanditRegistry | None = None):
        self.program = program
        self.config = config
        self.registry = registry if registry is not None else BanditRegistry(config.exploration_constant)
        self._states: dict = {}
        self._index: dict = {}

    # -- clause candidates -------------------------------------------------
    def _index_entry(self, key):
        pi = PredicateIndicator(*key)
        clauses = self.program.clauses_for(pi)
        var_first, by_key = [], {}
        for i, c in enumerate(clauses):
            k = _arg_key(c.head.args[0]) if type(c.head) is Compound else None
            if k is None:
                var_first.append(i)
            else:
                by_key.setdefault(k, []).append(i)
        merged = {k: sorted(v + var_first) for k, v in by_key.items()}
        resolvers = [resolver(c) for c in clauses]
        entry = self._index[key] = (pi, clauses, resolvers, list(range(len(clauses))), merged, var_first)
        return entry

    # -- main loop ---------------------------------------------------------
    def solve(self, query) -> AdaptiveReport:
        cfg = self.config
        t0 = time.perf_counter()
        self.qvars = query_variables(query)
        self.answers = AnswerSet(v.name for v in self.qvars)
        self.acct = InfoAccountant()
        self.traces = TraceStats()
        self.steps = 0
        self.inferences = 0
        self.next_id = max_var_id(query) + 1
        self.touched: list = []
        self.opened: list = []
        self.limit_hit = False
        # unexpanded alternatives, one FIFO per (predicate, clause), and a
        # lazily refreshed max-heap of the keys by UCB1 value
        self.waiting: dict = {}
        self.heap: list = []
        self.in_heap: set = set()
        self.selections: dict = {}
        budget = cfg.episode_budget
        tried: set = set()
        overran = False
        episodes = 0
        first_answer_step = None

        # the root episode; with no choice node to fall back on, running out
        # of budget before the first one just restarts it with twice as much
        goals, root_budget = to_goal_list(compile_goals(query)), budget
        while True:
            limit = cfg.global_step_limit
            if root_budget is not None:
                limit = min(limit, self.steps + root_budget)
            episodes += 1
            res = self._descend(None, goals, tuple(self.qvars), None, None, limit)
            if res[0] != "budget" or res[1] is not None:
                break
            root_budget *= 2
        if res[0] == "yes":
            first_answer_step = self.steps

        while not self.limit_hit:
            if not self.qvars and len(self.answers):
                break
            key = self._pick()
            if key is None:
                break
            node = self.waiting[key].popleft()
            episodes += 1
            limit = cfg.global_step_limit
            if budget is not None:
                limit = min(limit, self.steps + budget)
            res = self._descend(key[1], node.goals, node.answer, node.path, node.current, limit, node)
            if res[0] == "budget":
                overran = True
            elif res[0] == "yes" and first_answer_step is None:
                first_answer_step = self.steps
            if budget is not None and cfg.budget_schedule == "doubling":
                tried.add(key)
                if overran and tried.issuperset(k for k, q in self.waiting.items() if q):
                    budget *= 2
                    tried.clear()
                    overran = False

        stats = SolveStats(
            resolution_steps=self.steps,
            inferences=self.inferences,
            answers_found=len(self.answers),
            wall_time=time.perf_counter() - t0,
            first_answer_step=first_answer_step,
            limit_reached=self.limit_hit,
        )
        return AdaptiveReport(
            answer_set=self.answers,
            stats=stats,
            registry=self.registry,
            bits_gained=self.acct.bits_gained,
            traces=self.traces,
            episodes=episodes,
            selections=dict(sorted(self.selections.items(), key=lambda kv: (str(kv[0][0]), kv[0][1]))),
            exhausted=not self.limit_hit and not any(self.waiting.values()),
        )

    def _descend(self, arm, goals, answer, path, cur, limit, node=None):
        """One episode: follow UCB1 choices from a node down to a leaf.

        Running out of budget yields ``("budget", node)`` with the node the
        overrun happened under, ``None`` if no choice was reached.
        """
        self.opened = []
        while True:
            if node is not None:
                k = (node.pred, arm)
                self.selections[k] = self.selections.get(k, 0) + 1
            res = self._segment(arm, goals, answer, path, cur, limit)
            if res[0] != "node":
                break
            _, child, cands = res
            self._flush()
            st = self._state(child.pred)
            arm = select_arm(st, cands)
            for a in cands:
                if a != arm:
                    self._wait(child, a)
            node = child
            goals, answer, path, cur = child.goals, child.answer, child.path, child.current
        if res[0] == "budget":
            # the unfinished alternative stays available for a later episode
            if node is not None:
                self._wait(node, arm)
            res = ("budget", node)
        elif res[0] == "yes":
            for d in self.opened:
                d.reward += 1.0
            self._credit(res[1], res[2])
        self.opened = []
        self._flush()
        return res

    def _flush(self):
        """Push pending effort and reward into the bandits."""
        state = self._state
        for d in self.touched:
            d.touched = False
            if d.effort or d.reward:
                update_arm(state(d.pred), d.arm, d.reward, d.effort)
                d.effort = 0
                d.reward = 0.0
        self.touched = []

    def _state(self, pi):
        st = self._states.get(pi)
        if st is None:
            st = self._states[pi] = self.registry.get(pi, len(self.program.clauses_for(pi)))
        return st

    def _value(self, key) -> float:
        pi, arm = key
        st = self._state(pi)
        return ucb_value(st.arms[arm], st.total_plays, st.exploration_constant)

    def _wait(self, node, arm):
        key = (node.pred, arm)
        q = self.waiting.get(key)
        if q is None:
            q = self.waiting[key] = deque()
        q.append(node)
        if key not in self.in_heap:
            self.in_heap.add(key)
            heapq.heappush(self.heap, (-self._value(key), str(key[0]), arm, key))

    def _pick(self):
        """The waiting (predicate, clause) with the highest UCB1 value.

        Heap entries are refreshed on inspection; ties go to the smaller
        predicate name, then the lower clause index.
        """
        heap = self.heap
        while heap:
            stored, name, arm, key = heap[0]
            if not self.waiting[key]:
                heapq.heappop(heap)
                self.in_heap.discard(key)
                continue
            v = -self._value(key)
            if v == stored:
                return key
            heapq.heapreplace(heap, (v, name, arm, key))
        return None

    def _credit(self, answer, path):
        bits = reward_for_answer(self.acct, answer)
        self.answers.add(answer)
        if path is not None:
            add_trace(self.traces, _trace_of(path), bits)

    # -- deterministic execution between choice points -------------------
    def _segment(self, first_arm, goals, answer, path, cur, limit):
        """Run ``goals`` until the next choice point or a leaf.

        A choice point is queued as a new node and reported as ``("node",)``.
        Leaves are ``("yes", answer, path)``, ``("fail",)``, ``("budget",)``
        and ``("limit",)``.
        """
        store = BindingStore()
        bindings, trail = store.bindings, store.trail
        touched = self.touched
        inf = self.inferences
        steps = self.steps
        if cur is not None:
            cur.resume = inf
            if not cur.touched:
                cur.touched = True
                touched.append(cur)
        index = self._index
        opened = self.opened
        forced = first_arm

        try:
            while True:
                if goals is None:
                    return ("yes", tuple(store.resolve(t) for t in answer), path)
                goal, rest = goals
                tp = type(goal)
                if tp is Compound:
                    f = goal.functor
                    args = goal.args
                    if len(args) == 2:
                        kind = _CONTROL.get(f)
                        if kind == 3:
                            if steps >= limit:
                                raise StepLimit
                            steps += 1
                            if not eval_builtin(goal, store):
                                return ("fail",)
                            goals = rest
                            continue
                        if kind is not None:
                            parts = compile_goals(_conj_goals(goal))
                            if kind == 2 and type(parts[0]) is not IfThenElse:
                                raise EngineError("plain disjunction is not supported")
                            goals = push_goals(parts, rest)
                            continue
                    key = (f, len(args))
                    first = args[0]
                    while type(first) is Var:
                        nxt = bindings.get(first.id)
                        if nxt is None:
                            break
                        first = nxt
                elif tp is IfThenElse:
                    mark = len(trail)
                    if goal.simple:
                        ok = True
                        for b in goal.cond:
                            if steps >= limit:
                                raise StepLimit
                            steps += 1
                            if not eval_builtin(b, store):
                                ok = False
                                break
                    else:
                        counter = [steps, inf, self.next_id]
                        try:
                            ok = dfs_run(self.program, push_goals(goal.cond, None), store, counter, limit, _commit)
                        finally:
                            steps, inf, self.next_id = counter
                    if ok:
                        branch = goal.then
                    else:
                        store.undo(mark)
                        branch = goal.orelse
                    for b in reversed(branch):
                        rest = (b, rest)
                    goals = rest
                    continue
                elif tp is _Exit:
                    d = goal.decision
                    d.effort += inf - d.resume
                    cur = goal.prev
                    if cur is not None:
                        cur.resume = inf
                        if not cur.touched:
                            cur.touched = True
                            touched.append(cur)
                    goals = rest
                    continue
                elif tp is Atom:
                    if goal.name == "true" or goal.name == "fail":
                        if steps >= limit:
                            raise StepLimit
                        steps += 1
                        if goal.name == "fail":
                            return ("fail",)
                        goals = rest
                        continue
                    key = (goal.name, 0)
                    args = ()
                    first = None
                else:
                    raise EngineError(f"not callable: {goal!r}")

                entry = index.get(key)
                if entry is None:
                    entry = self._index_entry(key)
                pi, clauses, resolvers, all_idx, merged, var_first = entry
                if len(clauses) == 1:
                    # no alternatives: resolve without a decision
                    if steps >= limit:
                        raise StepLimit
                    steps += 1
                    inf += 1
                    clause = clauses[0]
                    body = resolvers[0](args, store, self.next_id)
                    if body is None:
                        return ("fail",)
                    self.next_id += clause.nvars
                    for b in reversed(body):
                        rest = (b, rest)
                    goals = rest
                    continue
                if forced is not None:
                    arm = forced
                    forced = None
                else:
                    if first is None or type(first) is Var:
                        cands = all_idx
                    else:
                        cands = merged.get(_arg_key(first), var_first)
                    if not cands:
                        return ("fail",)
                    if len(cands) > 1:
                        node = _Node(
                            self._resolve_goals(goals, store),
                            tuple(store.resolve(t) for t in answer),
                            path,
                            cur,
                            pi,
                        )
                        return ("node", node, cands)
                    arm = cands[0]
                # open a decision for this goal
                d = _Decision(pi, arm, path)
                path = d
                if cur is not None:
                    cur.effort += inf - cur.resume
                d.resume = inf
                d.touched = True
                touched.append(d)
                opened.append(d)
                record_take(self._state(pi), arm)
                rest = (_Exit(d, cur), rest)
                cur = d
                if steps >= limit:
                    raise StepLimit
                steps += 1
                inf += 1
                clause = clauses[arm]
                body = resolvers[arm](args, store, self.next_id)
                if body is None:
                    return ("fail",)
                self.next_id += clause.nvars
                for b in reversed(body):
                    rest = (b, rest)
                goals = rest
        except StepLimit:
            if steps >= self.config.global_step_limit:
                self.limit_hit = True
                return ("limit",)
            return ("budget",)
        finally:
            if cur is not None:
                cur.effort += inf - cur.resume
            self.steps = steps
            self.inferences = inf

    def _resolve_goals(self, goals, store):
        if not store.bindings:
            return goals
        items = []
        while goals is not None:
            g, goals = goals
            items.append(_resolve_goal(g, store))
        return push_goals(items, None)


def _resolve_goal(g, store):
    tp = type(g)
    if tp is _Exit:
        return g
    if tp is IfThenElse:
        return IfThenElse(
            tuple(_resolve_goal(x, store) for x in g.cond),
            tuple(_resolve_goal(x, store) for x in g.then),
            tuple(_resolve_goal(x, store) for x in g.orelse),
            g.simple,
        )
    return store.resolve(g)


def _trace_of(d) -> tuple:
    """Decisions from the query down to ``d``, memoized along the chain."""
    pending = []
    while d is not None and d.trace is None:
        pending.append(d)
        d = d.trail
    t = () if d is None else d.trace
    for d in reversed(pending):
        t = d.trace = t + ((d.pred, d.arm),)
    return t


def _commit():
    return True


def solve_adaptive(program: Program, query, config: AdaptiveConfig | None = None, registry: BanditRegistry | None = None) -> AdaptiveReport:
    config = config or AdaptiveConfig()
    return AdaptiveSolver(program, config, registry).solve(query)
