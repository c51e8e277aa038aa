import pytest

from infogain_prolog.adaptive import solve_adaptive
from infogain_prolog.bench import SMALL_FACTS, make_confounded_program
from infogain_prolog.parser import parse_program, parse_query
from infogain_prolog.terms import PredicateIndicator
from infogain_prolog.traces import TraceStats, format_trace, hot_traces, record_trace

ANC = PredicateIndicator("ancestor", 2)
PAR = PredicateIndicator("parent", 2)
RECURSIVE_THEN_BASE = ((ANC, 2), (PAR, 0), (ANC, 0), (PAR, 1))


def test_record_counts():
    ts = TraceStats()
    record_trace(ts, RECURSIVE_THEN_BASE, 1.0)
    assert ts.counts[RECURSIVE_THEN_BASE] == 1
    record_trace(ts, list(RECURSIVE_THEN_BASE), 0.0)
    assert ts.counts[RECURSIVE_THEN_BASE] == 2
    assert ts.bits[RECURSIVE_THEN_BASE] == 1.0
    assert ts.total_bits == 1.0


@pytest.mark.parametrize("bad", [(), [("ancestor", 0)], [(ANC, -1)]])
def test_malformed_traces_rejected(bad):
    with pytest.raises(ValueError):
        record_trace(TraceStats(), bad, 1.0)


def test_hot_trace_order():
    ts = TraceStats()
    a, b, c = ((ANC, 0),), ((ANC, 2), (ANC, 0)), ((ANC, 2), (ANC, 2), (ANC, 0))
    for path, n, bits in [(a, 3, 0.0), (b, 3, 1.0), (c, 1, 1.0)]:
        for _ in range(n):
            record_trace(ts, path, bits)
    assert hot_traces(ts, 1) == [b]
    assert hot_traces(ts, 2) == [b, a]
    assert hot_traces(ts, 10) == [b, a, c]
    with pytest.raises(ValueError):
        hot_traces(ts, 0)


def test_ties_break_on_path_text():
    ts = TraceStats()
    paths = [((ANC, i),) for i in (2, 0, 1)]
    for p in paths:
        record_trace(ts, p, 1.0)
    assert [format_trace(p) for p in hot_traces(ts, 2)] == [["ancestor/2#0"], ["ancestor/2#1"]]


def test_small_benchmark_trace():
    prog = parse_program(make_confounded_program(200) + SMALL_FACTS)
    r = solve_adaptive(prog, parse_query("ancestor(tom, jill)."))
    assert dict(r.traces.counts) == {RECURSIVE_THEN_BASE: 1}
    assert hot_traces(r.traces, 1) == [RECURSIVE_THEN_BASE]
