"""A Horn-clause interpreter whose clause choice is driven by UCB1 bandits
rewarded with information gain, next to a standard depth-first baseline."""

from .adaptive import AdaptiveConfig, AdaptiveReport, solve_adaptive
from .bandit import ArmStats, BanditRegistry, BanditState, select_arm, ucb_value, update_arm
from .engine import AnswerSet, BindingStore, SolveStats, solve_dfs, unify
from .infogain import (
    DiscreteDistribution,
    InfoAccountant,
    JointTable,
    entropy,
    kl_divergence,
    marginal,
    reward_for_answer,
    total_correlation,
)
from .parser import ParseError, format_term, parse_program, parse_query, parse_term
from .terms import Atom, Clause, Compound, Int, PredicateIndicator, Program, Var
from .traces import TraceStats, hot_traces, record_trace

__all__ = [
    "AdaptiveConfig", "AdaptiveReport", "solve_adaptive",
    "ArmStats", "BanditRegistry", "BanditState", "select_arm", "ucb_value", "update_arm",
    "AnswerSet", "BindingStore", "SolveStats", "solve_dfs", "unify",
    "DiscreteDistribution", "InfoAccountant", "JointTable", "entropy", "kl_divergence",
    "marginal", "reward_for_answer", "total_correlation",
    "ParseError", "format_term", "parse_program", "parse_query", "parse_term",
    "Atom", "Clause", "Compound", "Int", "PredicateIndicator", "Program", "Var",
    "TraceStats", "hot_traces", "record_trace",
]
