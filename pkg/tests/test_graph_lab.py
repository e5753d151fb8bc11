from __future__ import annotations

import math

import pytest
from hypothesis import given, strategies as st

from tstable import DomainError, Params
from tstable.formulas import chi_bounds
from tstable.graph_lab import (
    Graph,
    brute_alpha_t,
    exact_alpha_t,
    greedy_alpha_t,
    is_t_stable,
    peel_colouring,
    run_concentration_experiment,
    sample_gnp,
    summarize,
    trial_seed,
)

graphs = st.builds(
    sample_gnp,
    n=st.integers(1, 13),
    p=st.sampled_from([0.2, 0.4, 0.5, 0.7, 0.9]),
    seed=st.integers(0, 2**32),
)


def test_graph_validation():
    with pytest.raises(DomainError):
        Graph(2, (0b10, 0))
    with pytest.raises(DomainError):
        Graph(1, (0b1,))
    with pytest.raises(DomainError):
        Graph.from_edges(3, [(1, 1)])


def test_graph_helpers():
    g = Graph.cycle(5)
    assert g.edge_count() == 5
    assert g.has_edge(0, 4) and not g.has_edge(0, 2)
    assert g.with_edge(0, 2).edge_count() == 6
    assert sorted(g.edges()) == [(0, 1), (0, 4), (1, 2), (2, 3), (3, 4)]


@given(g=graphs)
def test_adjacency_symmetric(g):
    for u in range(g.n):
        assert not g.has_edge(u, u)
        for v in range(g.n):
            assert g.has_edge(u, v) == g.has_edge(v, u)


def test_sample_extremes():
    assert sample_gnp(30, 0.0, 5).edge_count() == 0
    assert sample_gnp(30, 1.0, 5).edge_count() == 435


def test_sample_edge_count_concentrates():
    pairs = math.comb(1000, 2)
    e = sample_gnp(1000, 0.5, 2024).edge_count()
    assert abs(e - pairs / 2) <= 4 * math.sqrt(pairs * 0.25)


def test_sample_is_reproducible():
    assert sample_gnp(25, 0.5, 99) == sample_gnp(25, 0.5, 99)
    assert sample_gnp(25, 0.5, 99) != sample_gnp(25, 0.5, 100)


def test_trial_seeds_differ():
    seeds = {trial_seed(7, i) for i in range(1000)}
    assert len(seeds) == 1000
    assert trial_seed(7, 3) == trial_seed(7, 3)


@pytest.mark.parametrize("t", range(4))
def test_exact_alpha_examples(t):
    assert exact_alpha_t(Graph.empty(9), t) == 9
    assert exact_alpha_t(Graph.complete(9), t) == t + 1


def test_cycle_and_clique():
    assert exact_alpha_t(Graph.cycle(5), 1) == 3
    assert exact_alpha_t(Graph.complete(6), 2) == 3


@given(g=graphs, t=st.integers(0, 3))
def test_branch_and_bound_matches_brute_force(g, t):
    assert exact_alpha_t(g, t) == brute_alpha_t(g, t)


@pytest.mark.slow
def test_branch_and_bound_bulk():
    for i in range(200):
        seed = trial_seed(2, i)
        n = 6 + i % 9
        p = (0.2, 0.5, 0.8)[i % 3]
        t = i % 4
        g = sample_gnp(n, p, seed)
        assert exact_alpha_t(g, t) == brute_alpha_t(g, t), (n, p, t, seed)


@given(g=graphs)
def test_alpha_monotone_in_t(g):
    vals = [exact_alpha_t(g, t) for t in range(4)]
    assert vals == sorted(vals)


def test_budget_timeout_is_a_value():
    g = sample_gnp(120, 0.5, 1)
    assert exact_alpha_t(g, 2, budget_ms=1) is None


def test_greedy_examples():
    assert sorted(greedy_alpha_t(Graph.empty(6), 0)) == list(range(6))
    assert len(greedy_alpha_t(Graph.complete(4), 1)) == 2
    assert len(greedy_alpha_t(Graph.cycle(5), 1)) == 3


@given(g=graphs, t=st.integers(0, 3), seed=st.one_of(st.none(), st.integers(0, 1000)))
def test_greedy_stable_and_maximal(g, t, seed):
    chosen = greedy_alpha_t(g, t, seed=seed)
    assert len(set(chosen)) == len(chosen)
    assert is_t_stable(g, chosen, t)
    for v in set(range(g.n)) - set(chosen):
        assert not is_t_stable(g, chosen + [v], t)
    assert len(chosen) <= exact_alpha_t(g, t)


@pytest.mark.parametrize("t", [0, 1])
def test_peel_on_edgeless(t):
    res = peel_colouring(Graph.empty(60), Params(t, 0.5), 0.3)
    assert sorted(v for c in res.classes for v in c) == list(range(60))
    assert all(is_t_stable(Graph.empty(60), c, t) for c in res.classes)


@given(seed=st.integers(0, 10**6), t=st.integers(0, 2), n=st.integers(8, 40))
def test_peel_partitions_vertices(seed, t, n):
    g = sample_gnp(n, 0.5, seed)
    res = peel_colouring(g, Params(t, 0.5), 0.3, seed=seed, restarts=3)
    flat = sorted(v for c in res.classes for v in c)
    assert flat == list(range(n))
    assert all(is_t_stable(g, c, t) for c in res.classes)
    assert res.num_colours >= math.ceil(n / (exact_alpha_t(g, t) + 1))


def test_peel_corridor_at_n60():
    params = Params(1, 0.5)
    g = sample_gnp(60, 0.5, 12)
    lo, hi = chi_bounds(params, 60)
    res = peel_colouring(g, params, 0.3, seed=12)
    assert 0.5 * lo <= res.num_colours <= 2 * hi


def test_experiment_reproducible_and_ordered():
    params = Params(1, 0.5)
    a = run_concentration_experiment(params, 20, 6, 0.2, 5)
    b = run_concentration_experiment(params, 20, 6, 0.2, 5, jobs=2)
    assert a == b
    assert [r.index for r in a] == list(range(6))
    for r in a:
        assert r.alpha_heuristic <= r.alpha_exact
    s = summarize(a)
    assert sum(s.counts.values()) == 6
    assert s.support[0] <= s.mode <= s.support[1]


@pytest.mark.slow
def test_t0_support_narrows_with_n():
    params = Params(0, 0.5)
    widths = []
    for n in (30, 60):
        recs = run_concentration_experiment(params, n, 100, 0.2, 31, budget_ms=10000)
        widths.append(summarize(recs).width)
    assert widths[1] <= widths[0]
