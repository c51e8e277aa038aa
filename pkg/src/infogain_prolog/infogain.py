"""Discrete entropy, total correlation and the answer-counting reward.

All quantities are in bits.
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Hashable, Mapping

from .terms import is_ground

TOL = 1e-9


class DistributionError(ValueError):
    pass


def _check_probs(probs, what: str) -> None:
    total = 0.0
    for p in probs:
        if p < 0 or math.isnan(p):
            raise DistributionError(f"{what}: negative or NaN probability {p}")
        total += p
    if abs(total - 1.0) > TOL:
        raise DistributionError(f"{what}: probabilities sum to {total}, not 1")


class DiscreteDistribution:
    def __init__(self, outcomes: Mapping[Hashable, float]):
        self.outcomes = dict(outcomes)
        _check_probs(self.outcomes.values(), "distribution")

    @classmethod
    def uniform(cls, labels) -> "DiscreteDistribution":
        labels = list(labels)
        return cls({x: 1.0 / len(labels) for x in labels})

    def __repr__(self):
        return f"DiscreteDistribution({self.outcomes!r})"


class JointTable:
    """Joint distribution over named variables; cells map outcome tuples to mass."""

    def __init__(self, variables, cells: Mapping[tuple, float]):
        self.variables = tuple(variables)
        self.cells = {tuple(k): float(v) for k, v in cells.items()}
        n = len(self.variables)
        for k in self.cells:
            if len(k) != n:
                raise DistributionError(f"cell {k!r} does not have {n} coordinates")
        _check_probs(self.cells.values(), "joint table")

    @property
    def n(self) -> int:
        return len(self.variables)


def _h(probs) -> float:
    return -sum(p * math.log2(p) for p in probs if p > 0)


def entropy(d: DiscreteDistribution | JointTable) -> float:
    probs = d.cells.values() if isinstance(d, JointTable) else d.outcomes.values()
    return _h(probs)


def marginal(j: JointTable, index: int) -> DiscreteDistribution:
    if not 0 <= index < j.n:
        raise IndexError(f"variable index {index} out of range for {j.n} variables")
    acc: dict = defaultdict(float)
    for k, p in j.cells.items():
        acc[k[index]] += p
    return DiscreteDistribution(acc)


def total_correlation(j: JointTable) -> float:
    """Sum of marginal entropies minus the joint entropy."""
    tc = sum(entropy(marginal(j, i)) for i in range(j.n)) - entropy(j)
    return max(tc, 0.0)  # rounding can leave about -1e-15 for independent variables


def product_of_marginals(j: JointTable) -> JointTable:
    margs = [marginal(j, i).outcomes for i in range(j.n)]
    cells = {(): 1.0}
    for m in margs:
        cells = {k + (x,): p * q for k, p in cells.items() for x, q in m.items() if q > 0}
    return JointTable(j.variables, cells)


def kl_divergence(p: JointTable, q: JointTable) -> float:
    if p.variables != q.variables:
        raise DistributionError("tables are over different variables")
    total = 0.0
    for k, pk in p.cells.items():
        if pk <= 0:
            continue
        qk = q.cells.get(k, 0.0)
        if qk <= 0:
            raise DistributionError(f"q has no mass where p does: {k!r}")
        total += pk * math.log2(pk / qk)
    return total


@dataclass
class InfoAccountant:
    """One bit per distinct ground answer, against a uniform prior.

    ``prior_domain_size`` is the number of candidate answers; it is kept for
    reporting and does not change the per-answer credit.
    """

    prior_domain_size: int = 0
    bits_gained: float = 0.0
    answers_credited: set = field(default_factory=set)


def reward_for_answer(acct: InfoAccountant, answer) -> float:
    """Bits for an exploration outcome; ``answer=None`` means it failed."""
    if answer is None:
        return 0.0
    terms = answer if isinstance(answer, tuple) else (answer,)
    if not all(is_ground(t) for t in terms):
        raise ValueError("answers must be ground")
    if answer in acct.answers_credited:
        return 0.0
    acct.answers_credited.add(answer)
    acct.bits_gained += 1.0
    return 1.0
