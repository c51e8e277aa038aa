"""Unification, builtins and the baseline depth-first SLD solver."""

from __future__ import annotations

import time
from dataclasses import dataclass

from .compile import compile_goals, resolver
from .parser import format_term
from .terms import (
    Atom,
    IfThenElse,
    Compound,
    Int,
    PredicateIndicator,
    Program,
    Term,
    Var,
    is_ground,
)


class EngineError(Exception):
    pass


class InstantiationError(EngineError):
    def __init__(self, message: str, goal: Term | None = None):
        self.goal = goal
        if goal is not None:
            message = f"{message} in {format_term(goal)}"
        super().__init__(message)


class BindingStore:
    """Variable bindings plus a trail for undoing them."""

    __slots__ = ("bindings", "trail")

    def __init__(self):
        self.bindings: dict[int, Term] = {}
        self.trail: list[int] = []

    def checkpoint(self) -> int:
        return len(self.trail)

    def undo(self, mark: int) -> None:
        trail, bindings = self.trail, self.bindings
        while len(trail) > mark:
            del bindings[trail.pop()]

    def bind(self, var: Var, value: Term) -> None:
        self.bindings[var.id] = value
        self.trail.append(var.id)

    def deref(self, t: Term) -> Term:
        bindings = self.bindings
        while type(t) is Var:
            nxt = bindings.get(t.id)
            if nxt is None:
                return t
            t = nxt
        return t

    def resolve(self, t: Term) -> Term:
        """Apply all bindings to ``t``."""
        t = self.deref(t)
        if type(t) is Compound and not is_ground(t):
            return Compound(t.functor, tuple(self.resolve(a) for a in t.args))
        return t

    def snapshot(self) -> tuple:
        return tuple(self.bindings.items()), tuple(self.trail)


def unify(t1: Term, t2: Term, store: BindingStore) -> bool:
    """Most general unifier without occurs check; restores ``store`` on failure."""
    mark = len(store.trail)
    bindings, trail = store.bindings, store.trail
    stack = [(t1, t2)]
    while stack:
        a, b = stack.pop()
        while type(a) is Var:
            nxt = bindings.get(a.id)
            if nxt is None:
                break
            a = nxt
        while type(b) is Var:
            nxt = bindings.get(b.id)
            if nxt is None:
                break
            b = nxt
        if a is b:
            continue
        ta, tb = type(a), type(b)
        if ta is Var:
            if tb is Var and a.id == b.id:
                continue
            bindings[a.id] = b
            trail.append(a.id)
        elif tb is Var:
            bindings[b.id] = a
            trail.append(b.id)
        elif ta is Compound:
            if (
                tb is not Compound
                or a.functor != b.functor
                or len(a.args) != len(b.args)
            ):
                store.undo(mark)
                return False
            stack.extend(zip(a.args, b.args))
        elif a != b:
            store.undo(mark)
            return False
    return True


def _arith(t: Term, bindings: dict, goal) -> int:
    while type(t) is Var:
        nxt = bindings.get(t.id)
        if nxt is None:
            raise InstantiationError("arguments are not sufficiently instantiated", goal)
        t = nxt
    tp = type(t)
    if tp is Int:
        return t.value
    if tp is Compound:
        args = t.args
        f = t.functor
        if len(args) == 2:
            a, b = args
            # integer operands are by far the common case; skip the recursion
            while type(a) is Var:
                nxt = bindings.get(a.id)
                if nxt is None:
                    break
                a = nxt
            x = a.value if type(a) is Int else _arith(a, bindings, goal)
            while type(b) is Var:
                nxt = bindings.get(b.id)
                if nxt is None:
                    break
                b = nxt
            y = b.value if type(b) is Int else _arith(b, bindings, goal)
            if f == "-":
                return x - y
            if f == "+":
                return x + y
            if f == "*":
                return x * y
            if f == "//":
                if y == 0:
                    raise EngineError("integer division by zero")
                # truncates toward zero, as in ISO Prolog
                q = abs(x) // abs(y)
                return q if (x >= 0) == (y >= 0) else -q
        elif len(args) == 1 and f == "-":
            return -_arith(args[0], bindings, goal)
    raise InstantiationError(f"not an arithmetic expression: {format_term(t)}", goal)


def eval_arith(t: Term, store: BindingStore, goal: Term | None = None) -> int:
    return _arith(t, store.bindings, goal)


BUILTIN_INDICATORS = {
    PredicateIndicator("is", 2),
    PredicateIndicator(">", 2),
    PredicateIndicator("true", 0),
    PredicateIndicator("fail", 0),
}


def is_builtin(goal: Term) -> bool:
    tp = type(goal)
    if tp is Atom:
        return goal.name == "true" or goal.name == "fail"
    return tp is Compound and len(goal.args) == 2 and goal.functor in ("is", ">")


def eval_builtin(goal: Term, store: BindingStore) -> bool:
    tp = type(goal)
    if tp is Compound and len(goal.args) == 2:
        f = goal.functor
        bindings = store.bindings
        if f == "is":
            value = _arith(goal.args[1], bindings, goal)
            x = goal.args[0]
            while type(x) is Var:
                nxt = bindings.get(x.id)
                if nxt is None:
                    bindings[x.id] = Int(value)
                    store.trail.append(x.id)
                    return True
                x = nxt
            return type(x) is Int and x.value == value
        if f == ">":
            return _arith(goal.args[0], bindings, goal) > _arith(goal.args[1], bindings, goal)
    elif tp is Atom:
        if goal.name == "true":
            return True
        if goal.name == "fail":
            return False
    raise EngineError(f"not a builtin: {format_term(goal)}")


def run_simple_cond(cond: tuple, store: BindingStore, counter: list, limit: int) -> bool:
    """Evaluate a builtin-only condition in place, counting one step per builtin."""
    for b in cond:
        if counter[0] >= limit:
            raise StepLimit
        counter[0] += 1
        if not eval_builtin(b, store):
            return False
    return True


def push_goals(goals: tuple, rest):
    for g in reversed(goals):
        rest = (g, rest)
    return rest


def rename(t: Term, fresh: list, base: int) -> Term:
    """Copy a clause-local term, mapping local var id ``i`` to ``base + i``."""
    tp = type(t)
    if tp is Var:
        v = fresh[t.id]
        if v is None:
            v = fresh[t.id] = Var(t.name, base + t.id)
        return v
    if tp is Compound and not is_ground(t):
        return Compound(t.functor, tuple([rename(a, fresh, base) for a in t.args]))
    return t


def query_variables(goals: list[Term]) -> list[Var]:
    seen: dict[int, Var] = {}
    stack = list(reversed(goals))
    while stack:
        t = stack.pop()
        if type(t) is Var:
            if t.name != "_" and t.id not in seen:
                seen[t.id] = t
        elif type(t) is Compound:
            stack.extend(reversed(t.args))
    return list(seen.values())


def max_var_id(goals) -> int:
    best = -1
    stack = list(goals)
    while stack:
        t = stack.pop()
        if type(t) is Var:
            best = max(best, t.id)
        elif type(t) is Compound:
            stack.extend(t.args)
    return best


class AnswerSet:
    """Distinct ground answers, each a tuple aligned with ``variables``.

    A variable-free query has the single answer ``()`` ("yes").
    """

    def __init__(self, variables=()):
        self.variables: tuple[str, ...] = tuple(variables)
        self.answers: set[tuple] = set()

    def add(self, answer: tuple) -> bool:
        if not all(is_ground(t) for t in answer):
            raise EngineError("non-ground answer")
        if answer in self.answers:
            return False
        self.answers.add(answer)
        return True

    def __len__(self):
        return len(self.answers)

    def __contains__(self, answer):
        return answer in self.answers

    def __iter__(self):
        return iter(self.answers)

    def __eq__(self, other):
        return (
            isinstance(other, AnswerSet)
            and other.variables == self.variables
            and other.answers == self.answers
        )

    def format_answer(self, answer: tuple) -> str:
        if not self.variables:
            return "yes"
        return ", ".join(f"{v} = {format_term(t)}" for v, t in zip(self.variables, answer))

    def sorted(self) -> list[str]:
        return sorted(self.format_answer(a) for a in self.answers)

    def __repr__(self):
        return f"AnswerSet({self.sorted()})"


@dataclass
class SolveStats:
    resolution_steps: int = 0
    inferences: int = 0  # clause-head unification attempts only
    answers_found: int = 0
    wall_time: float = 0.0
    first_answer_step: int | None = None
    limit_reached: bool = False


class _Cut:
    """Commit marker for if-then-else: drops choicepoints above ``height``."""

    __slots__ = ("height",)

    def __init__(self, height: int):
        self.height = height


def to_goal_list(goals) -> tuple | None:
    out = None
    for g in reversed(list(goals)):
        out = (g, out)
    return out


class StepLimit(Exception):
    pass


def dfs_run(program: Program, goals, store: BindingStore, counter: list, limit: int, on_solution):
    """Depth-first search over the goal list ``goals`` (a cons list).

    ``counter`` is ``[steps, inferences, next_var_id]`` and is updated in
    place.  ``on_solution()`` is called with the bindings in ``store``; a
    true return value stops the search and leaves those bindings in place.
    Returns True if stopped by ``on_solution``; raises :class:`StepLimit`
    when ``counter[0]`` would exceed ``limit``.
    """
    clauses_for = program.clauses_for
    trail = store.trail
    cps: list[tuple] = []
    pending = None
    while True:
        if pending is not None:
            goal, rest, clauses, idx = pending
            pending = None
            n = len(clauses)
            args = goal.args if type(goal) is Compound else ()
            goals = False
            while idx < n:
                if counter[0] >= limit:
                    raise StepLimit
                counter[0] += 1
                counter[1] += 1
                clause = clauses[idx]
                idx += 1
                mark = len(trail)
                body = resolver(clause)(args, store, counter[2])
                if body is None:
                    store.undo(mark)
                    continue
                if idx < n:
                    cps.append((mark, goal, rest, clauses, idx))
                counter[2] += clause.nvars
                for b in reversed(body):
                    rest = (b, rest)
                goals = rest
                break
        if goals is False:
            if not cps:
                return False
            mark, goal, rest, clauses, idx = cps.pop()
            store.undo(mark)
            if goal is None:
                goals = rest
            else:
                pending = (goal, rest, clauses, idx)
            continue
        if goals is None:
            if on_solution():
                return True
            goals = False
            continue
        goal, rest = goals
        tp = type(goal)
        if tp is _Cut:
            del cps[goal.height:]
            goals = rest
            continue
        if tp is IfThenElse:
            if goal.simple:
                mark = len(trail)
                if run_simple_cond(goal.cond, store, counter, limit):
                    goals = push_goals(goal.then, rest)
                else:
                    store.undo(mark)
                    goals = push_goals(goal.orelse, rest)
                continue
            cps.append((len(trail), None, push_goals(goal.orelse, rest), None, 0))
            goals = push_goals(goal.cond, (_Cut(len(cps) - 1), push_goals(goal.then, rest)))
            continue
        if tp is Var:
            goal = store.deref(goal)
            tp = type(goal)
            if tp is Var:
                raise InstantiationError("unbound goal", goal)
        if tp is Compound:
            f = goal.functor
            kind = CONTROL_KIND.get(f) if len(goal.args) == 2 else None
            if kind is not None:
                if kind == 1:  # ','
                    goals = (goal.args[0], (goal.args[1], rest))
                    continue
                if kind == 2:  # ';'
                    ite = goal.args[0]
                    if type(ite) is Compound and ite.functor == "->" and len(ite.args) == 2:
                        cps.append((len(trail), None, (goal.args[1], rest), None, 0))
                        goals = (ite.args[0], (_Cut(len(cps) - 1), (ite.args[1], rest)))
                        continue
                    raise EngineError("plain disjunction is not supported")
                if counter[0] >= limit:
                    raise StepLimit
                counter[0] += 1
                goals = rest if eval_builtin(goal, store) else False
                continue
            pending = (goal, rest, clauses_for(PredicateIndicator(f, len(goal.args))), 0)
            continue
        if tp is Atom and (goal.name == "true" or goal.name == "fail"):
            if counter[0] >= limit:
                raise StepLimit
            counter[0] += 1
            goals = rest if goal.name == "true" else False
            continue
        if tp is Atom:
            pending = (goal, rest, clauses_for(PredicateIndicator(goal.name, 0)), 0)
            continue
        raise EngineError(f"not callable: {format_term(goal)}")


# functor -> 1 conjunction, 2 disjunction/if-then-else, 3 builtin (arity 2)
CONTROL_KIND = {",": 1, ";": 2, "is": 3, ">": 3}


def solve_dfs(
    program: Program,
    query: list[Term],
    step_limit: int = 10_000_000,
    max_answers: int | None = None,
) -> tuple[AnswerSet, SolveStats]:
    """Prolog's standard strategy: clauses in source order, goals left to right.

    One step is one clause-head unification attempt or one builtin call.
    Running into ``step_limit`` returns the answers found so far with
    ``stats.limit_reached`` set.
    """
    if step_limit <= 0:
        raise ValueError("step_limit must be positive")
    t0 = time.perf_counter()
    qvars = query_variables(query)
    answers = AnswerSet(v.name for v in qvars)
    stats = SolveStats()
    store = BindingStore()
    counter = [0, 0, max_var_id(query) + 1]

    def on_solution():
        ans = tuple(store.resolve(v) for v in qvars)
        if answers.add(ans) and stats.first_answer_step is None:
            stats.first_answer_step = counter[0]
        return max_answers is not None and len(answers) >= max_answers

    try:
        dfs_run(program, to_goal_list(compile_goals(query)), store, counter, step_limit, on_solution)
    except StepLimit:
        stats.limit_reached = True
    stats.resolution_steps, stats.inferences = counter[0], counter[1]
    stats.answers_found = len(answers)
    stats.wall_time = time.perf_counter() - t0
    return answers, stats
