import math

import pytest

from eps_select.benchmarks import allinterval, latin, magicsquare, nqueens
from eps_select.csp import AllDifferent, InconsistentProblem, Model, VariableDecl
from eps_select.decomposition import (
    DecompositionConfig,
    decompose,
    sample_size_rule,
    srs_sample,
)
from eps_select.search import SolveMode, solve
from eps_select.strategies import ALL_STRATEGIES, StrategyId


def test_target_one_gives_empty_prefix():
    d = decompose(nqueens(6), DecompositionConfig(target_count=1))
    assert len(d) == 1
    assert d.prefix_len == 0
    assert d.subproblems[0].assignment == ()


def test_forced_depth_one_nqueens4():
    # nqueens(4) at prefix 1: one unary assignment per consistent first value
    m = nqueens(4)
    d = decompose(m, DecompositionConfig(target_count=2, max_prefix=1))
    values = []
    for v in range(4):
        try:
            solve(m, ((0, v),), StrategyId.FF, SolveMode.ALL_SOLUTIONS, budget=0)
            values.append(v)
        except InconsistentProblem:
            pass
    assert [s.assignment for s in d.subproblems] == [((0, v),) for v in values]


def test_every_subproblem_is_consistent():
    m = allinterval(7)
    d = decompose(m, DecompositionConfig(target_count=40))
    assert len(d) >= 40
    for s in d.subproblems:
        solve(m, s.assignment, StrategyId.FF, SolveMode.ALL_SOLUTIONS, budget=0)


@pytest.mark.parametrize("target", [1, 10, 50])
@pytest.mark.parametrize(
    "model_fn", [lambda: nqueens(6), lambda: allinterval(6), lambda: latin(3), lambda: magicsquare(3)]
)
def test_partition_property(model_fn, target):
    m = model_fn()
    root = solve(m, (), StrategyId.FF, SolveMode.ALL_SOLUTIONS).solutions_found
    d = decompose(m, DecompositionConfig(target_count=target))
    for sid in ALL_STRATEGIES:
        total = sum(
            solve(m, s.assignment, sid, SolveMode.ALL_SOLUTIONS).solutions_found
            for s in d.subproblems
        )
        assert total == root


def test_shortfall_flag():
    m = Model("tiny", [VariableDecl("a", (1, 2)), VariableDecl("b", (1, 2))], [AllDifferent((0, 1))])
    d = decompose(m, DecompositionConfig(target_count=100))
    assert d.shortfall
    # every depth yields 2 prefixes; the earliest largest set wins
    assert d.prefix_len == 1
    assert len(d) == 2


def test_shortfall_returns_peak_depth():
    # the consistent-prefix count of nqueens(7) peaks below full depth; an
    # unreachable target must return the peak, not the solution set
    from eps_select.csp import _propagate
    from eps_select.decomposition import _consistent_prefixes

    m = nqueens(7)
    root = list(m.initial_masks)
    _propagate(m, root, range(len(m.constraints)), [])
    counts = [len(_consistent_prefixes(m, root, d)[0]) for d in range(1, 8)]
    assert max(counts) > counts[-1]  # the peak is strictly above full depth
    d = decompose(m, DecompositionConfig(target_count=10**9))
    assert d.shortfall
    assert len(d) == max(counts)
    assert d.prefix_len == 1 + counts.index(max(counts))


def test_root_inconsistent_raises():
    m = Model("bad", [VariableDecl("a", (1,)), VariableDecl("b", (1,))], [AllDifferent((0, 1))])
    with pytest.raises(InconsistentProblem):
        decompose(m, DecompositionConfig(target_count=5))


def test_srs_full_population():
    s = srs_sample(10, 10, seed=3)
    assert sorted(s.indices) == list(range(10))


def test_srs_empty():
    assert srs_sample(10, 0, 1).indices == []


def test_srs_reproducible():
    a = srs_sample(16635, 100, seed=42)
    b = srs_sample(16635, 100, seed=42)
    assert a.indices == b.indices
    assert len(set(a.indices)) == 100
    c = srs_sample(16635, 100, seed=43)
    assert a.indices != c.indices


def test_srs_rejects_oversample():
    with pytest.raises(ValueError):
        srs_sample(5, 6, 0)


def test_srs_uniformity():
    # k=1 from N=10 over many seeds: inclusion frequency within 5 sigma
    N = 10
    trials = 10_000
    counts = [0] * N
    for seed in range(trials):
        counts[srs_sample(N, 1, seed).indices[0]] += 1
    p = 1.0 / N
    sigma = math.sqrt(trials * p * (1 - p))
    for c in counts:
        assert abs(c - trials * p) < 5 * sigma


def test_sample_size_rule():
    assert sample_size_rule(100) == 30
    assert sample_size_rule(3000) == 30
    assert sample_size_rule(16635) == 167  # ceil(1%)
    assert sample_size_rule(10) == 10  # capped by the population
