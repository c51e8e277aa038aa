"""Term and program data model.

Terms are immutable.  ``Var`` identity is its integer id; the name is kept
only for printing and for reporting answers.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, NamedTuple, Union


class Atom:
    __slots__ = ("name",)

    def __init__(self, name: str):
        self.name = name

    def __eq__(self, other):
        return type(other) is Atom and other.name == self.name

    def __hash__(self):
        return hash(("atom", self.name))

    def __repr__(self):
        return f"Atom({self.name!r})"


class Int:
    __slots__ = ("value",)

    def __init__(self, value: int):
        self.value = value

    def __eq__(self, other):
        return type(other) is Int and other.value == self.value

    def __hash__(self):
        return hash(("int", self.value))

    def __repr__(self):
        return f"Int({self.value})"


class Var:
    __slots__ = ("name", "id")

    def __init__(self, name: str, id: int):
        self.name = name
        self.id = id

    def __eq__(self, other):
        return type(other) is Var and other.id == self.id

    def __hash__(self):
        return hash(("var", self.id))

    def __repr__(self):
        return f"Var({self.name!r}, {self.id})"


class Compound:
    __slots__ = ("functor", "args", "_ground")

    def __init__(self, functor: str, args: tuple):
        if not args:
            raise ValueError("compound terms need at least one argument; use Atom")
        self.functor = functor
        self.args = tuple(args)
        self._ground = None

    @property
    def arity(self) -> int:
        return len(self.args)

    def __eq__(self, other):
        return (
            type(other) is Compound
            and other.functor == self.functor
            and other.args == self.args
        )

    def __hash__(self):
        return hash((self.functor, self.args))

    def __repr__(self):
        return f"Compound({self.functor!r}, {self.args!r})"


Term = Union[Atom, Int, Var, Compound]

TRUE = Atom("true")
FAIL = Atom("fail")


class IfThenElse:
    """Compiled ``(C -> T ; E)`` goal; each branch is a tuple of goals.

    ``simple`` is true when the condition consists of builtins only, so it
    can be evaluated without opening a search.
    """

    __slots__ = ("cond", "then", "orelse", "simple")

    def __init__(self, cond: tuple, then: tuple, orelse: tuple, simple: bool):
        self.cond = cond
        self.then = then
        self.orelse = orelse
        self.simple = simple

    def as_term(self) -> "Compound":
        def conj(goals):
            goals = [g.as_term() if type(g) is IfThenElse else g for g in goals]
            t = goals[-1]
            for g in reversed(goals[:-1]):
                t = Compound(",", (g, t))
            return t

        return Compound(";", (Compound("->", (conj(self.cond), conj(self.then))), conj(self.orelse)))

    def __repr__(self):
        return f"IfThenElse({self.cond!r}, {self.then!r}, {self.orelse!r})"


class PredicateIndicator(NamedTuple):
    name: str
    arity: int

    def __str__(self):
        return f"{self.name}/{self.arity}"


def indicator(goal: Term) -> PredicateIndicator:
    if type(goal) is Compound:
        return PredicateIndicator(goal.functor, len(goal.args))
    if type(goal) is Atom:
        return PredicateIndicator(goal.name, 0)
    raise TypeError(f"not a callable goal: {goal!r}")


def is_ground(t: Term) -> bool:
    tp = type(t)
    if tp is Var:
        return False
    if tp is not Compound:
        return True
    g = t._ground
    if g is None:
        g = t._ground = all(is_ground(a) for a in t.args)
    return g


def term_vars(t: Term) -> Iterator[Var]:
    """Variables of ``t`` in depth-first, left-to-right order (with repeats)."""
    stack = [t]
    while stack:
        t = stack.pop()
        tp = type(t)
        if tp is Var:
            yield t
        elif tp is Compound and not is_ground(t):
            stack.extend(reversed(t.args))


@dataclass
class Clause:
    head: Term  # Compound, or Atom for zero-arity predicates
    body: list = field(default_factory=list)
    nvars: int = 0  # clause-local variable ids are 0..nvars-1

    @property
    def indicator(self) -> PredicateIndicator:
        return indicator(self.head)

    @property
    def is_fact(self) -> bool:
        return not self.body


class Program:
    """Predicate-indexed clause store; each predicate keeps source order."""

    def __init__(self, clauses=()):
        self.clauses: dict[PredicateIndicator, list[Clause]] = {}
        for c in clauses:
            self.add(c)

    def add(self, clause: Clause) -> None:
        self.clauses.setdefault(clause.indicator, []).append(clause)

    def clauses_for(self, pi: PredicateIndicator) -> list[Clause]:
        return self.clauses.get(pi, [])

    def __contains__(self, pi):
        return pi in self.clauses

    def __iter__(self) -> Iterator[Clause]:
        for cs in self.clauses.values():
            yield from cs

    def __len__(self):
        return sum(len(cs) for cs in self.clauses.values())

    def extend(self, other: "Program") -> "Program":
        for c in other:
            self.add(c)
        return self
