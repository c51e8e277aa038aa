"""Derivation-path statistics and hot-trace extraction."""

from __future__ import annotations

import heapq

from .terms import PredicateIndicator

# A trace is a tuple of (PredicateIndicator, clause index) pairs, root first.
TraceRecord = tuple


class TraceStats:
    def __init__(self):
        self.counts: dict[TraceRecord, int] = {}
        self.bits: dict[TraceRecord, float] = {}

    def __len__(self):
        return len(self.counts)

    def __contains__(self, path):
        return tuple(path) in self.counts

    def items(self):
        for path, n in self.counts.items():
            yield path, n, self.bits[path]

    @property
    def total_bits(self) -> float:
        return sum(self.bits.values())


def record_trace(stats: TraceStats, path, bits: float) -> TraceStats:
    path = tuple(path)
    if not path:
        raise ValueError("empty trace")
    for step in path:
        pi, idx = step
        if not isinstance(pi, PredicateIndicator) or idx < 0:
            raise ValueError(f"malformed trace step {step!r}")
    return add_trace(stats, path, bits)


def add_trace(stats: TraceStats, path: tuple, bits: float) -> TraceStats:
    """:func:`record_trace` without validation, for trusted callers."""
    counts = stats.counts
    counts[path] = counts.get(path, 0) + 1
    stats.bits[path] = stats.bits.get(path, 0.0) + bits
    return stats


def format_trace(path) -> list[str]:
    return [f"{pi}#{idx}" for pi, idx in path]


def hot_traces(stats: TraceStats, k: int) -> list[TraceRecord]:
    """Top ``k`` traces by count, then bits credited, then lexicographic path."""
    if k < 1:
        raise ValueError("k must be at least 1")
    counts, bits = stats.counts, stats.bits
    if len(counts) > k:
        # cheap pre-selection on (count, bits); keep every path tied with the k-th
        top = heapq.nsmallest(k, counts, key=lambda p: (-counts[p], -bits[p]))
        cut = (counts[top[-1]], bits[top[-1]])
        pool = [p for p in counts if (counts[p], bits[p]) >= cut]
    else:
        pool = list(counts)
    pool.sort(key=lambda p: (-counts[p], -bits[p], format_trace(p)))
    return pool[:k]
