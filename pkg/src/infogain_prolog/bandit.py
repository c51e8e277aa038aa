"""UCB1 clause selection, one bandit per predicate.

Plays are measured in effort units (clause resolutions charged to the arm),
not in selections, so an arm that sinks a long fruitless recursion ends up
with a large play count and a small exploration bonus.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .terms import PredicateIndicator

DEFAULT_C = math.sqrt(2.0)


@dataclass
class ArmStats:
    clause_index: int
    plays: int = 0
    total_reward: float = 0.0
    takes: int = 0  # times the clause was chosen for a goal

    @property
    def mean(self) -> float | None:
        return self.total_reward / self.plays if self.plays else None

    @property
    def reward_per_take(self) -> float | None:
        return self.total_reward / self.takes if self.takes else None


@dataclass
class BanditState:
    arms: list[ArmStats]
    total_plays: int = 0
    takes: int = 0
    exploration_constant: float = DEFAULT_C

    @classmethod
    def fresh(cls, n_arms: int, c: float = DEFAULT_C) -> "BanditState":
        return cls([ArmStats(i) for i in range(n_arms)], exploration_constant=c)


def ucb_value(arm: ArmStats, total_plays: int, c: float = DEFAULT_C) -> float:
    if arm.plays == 0:
        return math.inf
    if total_plays < arm.plays:
        raise ValueError("total_plays is smaller than the arm's plays")
    return arm.total_reward / arm.plays + c * math.sqrt(math.log(total_plays) / arm.plays)


def select_arm(state: BanditState, allowed=None) -> int:
    """Index of the arm with maximal UCB value; ties go to the lowest index.

    ``allowed`` optionally restricts the choice (exhausted or non-matching
    clauses are masked out by the caller).
    """
    arms = state.arms
    indices = range(len(arms)) if allowed is None else sorted(allowed)
    n, c = state.total_plays, state.exploration_constant
    best, best_val = -1, -math.inf
    for i in indices:
        arm = arms[i]
        if arm.plays == 0:
            return i
        v = ucb_value(arm, n, c)
        if v > best_val:
            best, best_val = i, v
    if best < 0:
        raise ValueError("no arm to select")
    return best


def update_arm(state: BanditState, clause_index: int, reward: float, effort: int) -> BanditState:
    """Credit ``reward`` bits and ``effort`` plays to one arm.

    Zero effort is accepted: a decision reached through already-expanded
    search state can still complete and earn reward without new work.
    """
    if effort < 0:
        raise ValueError("effort must be nonnegative")
    arm = state.arms[clause_index]
    arm.plays += effort
    arm.total_reward += reward
    state.total_plays += effort
    return state


def record_take(state: BanditState, clause_index: int) -> None:
    state.arms[clause_index].takes += 1
    state.takes += 1


class BanditRegistry:
    """One shared :class:`BanditState` per predicate."""

    def __init__(self, exploration_constant: float = DEFAULT_C):
        self.exploration_constant = exploration_constant
        self.states: dict[PredicateIndicator, BanditState] = {}

    def get(self, pi: PredicateIndicator, n_arms: int) -> BanditState:
        st = self.states.get(pi)
        if st is None:
            st = self.states[pi] = BanditState.fresh(n_arms, self.exploration_constant)
        elif len(st.arms) != n_arms:
            raise ValueError(f"{pi}: registry has {len(st.arms)} arms, program has {n_arms} clauses")
        return st

    def __contains__(self, pi):
        return pi in self.states

    def __getitem__(self, pi) -> BanditState:
        return self.states[pi]

    def export(self) -> dict:
        out = {}
        for pi in sorted(self.states, key=str):
            st = self.states[pi]
            arms = []
            for a in st.arms:
                ucb = ucb_value(a, st.total_plays, st.exploration_constant)
                arms.append(
                    {
                        "clause": a.clause_index,
                        "plays": a.plays,
                        "total_reward": a.total_reward,
                        "mean": a.mean,
                        "ucb_value": None if math.isinf(ucb) else ucb,
                        "takes": a.takes,
                    }
                )
            out[str(pi)] = {
                "total_plays": st.total_plays,
                "takes": st.takes,
                "exploration_constant": st.exploration_constant,
                "arms": arms,
            }
        return out

    @classmethod
    def from_export(cls, data: dict) -> "BanditRegistry":
        reg = None
        for key, entry in data.items():
            name, _, arity = key.rpartition("/")
            c = entry["exploration_constant"]
            if reg is None:
                reg = cls(c)
            arms = [
                ArmStats(a["clause"], a["plays"], a["total_reward"], a["takes"])
                for a in entry["arms"]
            ]
            reg.states[PredicateIndicator(name, int(arity))] = BanditState(
                arms, entry["total_plays"], entry["takes"], c
            )
        return reg if reg is not None else cls()
