import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from infogain_prolog.adaptive import AdaptiveConfig
from infogain_prolog.bench import (
    BenchmarkSpec,
    SplitMix64,
    descendants,
    gen_matrix,
    make_confounded_program,
    matrix_edges,
    report_json,
    run_benchmark,
)
from infogain_prolog.cli import main
from infogain_prolog.parser import parse_program

from oracles import closure_oracle

LISTING_1E8 = """\
ancestor(A, B)   :- parent(A, B).
ancestor(A, B)   :- deadend(A, B).
deadend(A, B)    :- deadend(A, B,
                       100000000).
deadend(A, B, N) :- N1 is N - 1, N > 0
                    -> deadend(A, B, N1);
                       fail.
ancestor(A, B)   :- parent(A, X),
                    ancestor(X, B).
"""


def test_splitmix_reference_outputs():
    # first outputs for seed 0 of the published reference implementation
    g = SplitMix64(0)
    assert [g.next_u64() for _ in range(3)] == [
        0xE220A8397B1DCDAF,
        0x6E789E6AA1B965F4,
        0x06C45D188009454F,
    ]


def test_full_triangle():
    assert gen_matrix(3, 1.0, 0) == "parent(n0, n1).\nparent(n0, n2).\nparent(n1, n2).\n"


def test_empty_matrix():
    assert gen_matrix(3, 0.0, 0) == ""


def test_density_at_full_size():
    n = len(matrix_edges(1000, 0.125, 0))
    # binomial(499500, 1/8): mean 62437.5, sigma 233.74
    assert abs(n - 62437.5) <= 3 * 233.74


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 40), st.floats(0.0, 1.0), st.integers(0, 2**64 - 1))
def test_strictly_upper_triangular(size, density, seed):
    edges = matrix_edges(size, density, seed)
    assert all(0 <= i < j < size for i, j in edges)
    assert len(set(edges)) == len(edges)
    assert gen_matrix(size, density, seed) == gen_matrix(size, density, seed)


@pytest.mark.parametrize("bad", [(0, 0.5), (3, -0.1), (3, 1.5), (3, float("nan"))])
def test_bad_matrix_args(bad):
    with pytest.raises(ValueError):
        matrix_edges(bad[0], bad[1], 0)


def test_descendants_agrees_with_closure():
    edges = matrix_edges(25, 0.15, 3)
    closure = closure_oracle(25, edges)
    assert descendants(edges, 0) == {j for j in range(25) if closure[0][j]}


def test_program_listing():
    assert make_confounded_program(10**8) == LISTING_1E8
    prog = parse_program(make_confounded_program(1))
    assert len(prog) == 5
    with pytest.raises(ValueError):
        make_confounded_program(0)


def test_deadend_cost_is_linear_in_depth():
    steps = [run_benchmark(BenchmarkSpec(suite="small", deadend_depth=d, strategy="dfs"))["resolution_steps"] for d in (1, 2, 3, 50)]
    per_level = steps[1] - steps[0]
    assert steps[2] - steps[1] == per_level
    assert steps[3] == steps[0] + 49 * per_level


def test_small_suite_dfs_pays_the_countdown():
    rep = run_benchmark(BenchmarkSpec(suite="small", deadend_depth=10**4, strategy="dfs"))
    assert rep["first_answer_step"] >= 10**4


def test_report_is_deterministic():
    spec = BenchmarkSpec(suite="matrix", size=30, deadend_depth=50, config=AdaptiveConfig(global_step_limit=20_000))
    a = report_json(run_benchmark(spec), timing=False)
    b = report_json(run_benchmark(spec), timing=False)
    assert a == b
    doc = json.loads(a)
    assert "wall_time" not in doc
    assert doc["answers"] == sorted(f"X = n{j}" for j in descendants(matrix_edges(30, 0.125, 0), 0))


def test_spec_validation():
    with pytest.raises(ValueError):
        BenchmarkSpec(suite="huge")
    with pytest.raises(ValueError):
        BenchmarkSpec()
    with pytest.raises(ValueError):
        BenchmarkSpec(suite="small", strategy="bfs")


def test_cli_gen_matrix(tmp_path, capsys):
    out = tmp_path / "m.pl"
    assert main(["gen-matrix", "--size", "3", "--density", "1.0", "--out", str(out)]) == 0
    assert out.read_text() == gen_matrix(3, 1.0, 0)
    assert main(["gen-matrix", "--size", "4", "--density", "0.5", "--seed", "9"]) == 0
    assert capsys.readouterr().out == gen_matrix(4, 0.5, 9)


def test_cli_run(tmp_path, capsys):
    prog = tmp_path / "fam.pl"
    prog.write_text(make_confounded_program(1000) + "parent(tom, fred).\nparent(fred, jill).\n")
    rep = tmp_path / "r.json"
    rc = main(["run", "--program", str(prog), "--query", "ancestor(tom, X).", "--json", str(rep)])
    assert rc == 0
    out = capsys.readouterr().out
    assert out.splitlines()[:2] == ["X = fred", "X = jill"]
    doc = json.loads(rep.read_text())
    assert doc["answers"] == ["X = fred", "X = jill"]
    assert main(["run", "--program", str(prog), "--query", "ancestor(tom, X).", "--strategy", "dfs"]) == 0


def test_cli_errors(tmp_path, capsys):
    assert main(["run", "--program", str(tmp_path / "missing.pl"), "--query", "p."]) == 2
    bad = tmp_path / "bad.pl"
    bad.write_text("p(.\n")
    assert main(["run", "--program", str(bad), "--query", "p."]) == 2
    assert "error" in capsys.readouterr().err
    with pytest.raises(SystemExit):
        main(["gen-matrix", "--density", "2"])


def test_cli_bench_json_stdout(capsys):
    assert main(["bench", "--suite", "small", "--deadend-depth", "500", "--json", "-"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["answers"] == ["yes"]
    assert doc["grouped_weights"]["deadend_takes"] == 1
