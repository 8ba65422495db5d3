import random
from collections import Counter

import pytest

from congest_dso import oracle
from congest_dso.dso_fastquery import (
    answer_batch_fast,
    cut_protocol,
    hop_unit,
    preprocess_fast_query,
    tree_cut,
)
from congest_dso.graph import Graph, build_sp_tree, generate_deep, generate_random, is_independent
from congest_dso.lowerbound import build_fig1
from congest_dso.queries import Query, random_long_queries, random_queries
from congest_dso.simulator import CostModel, NetworkRun


def tree_of(n, parent_of):
    g = Graph(n, [(parent_of(v), v, 1) for v in range(1, n)])
    return build_sp_tree(g, 0)


def test_hop_unit():
    assert [hop_unit(n) for n in (1, 2, 4, 5, 25, 26, 63, 64)] == [1, 2, 2, 3, 5, 6, 8, 8]


def test_path_tree_has_only_type2_depths():
    cut = tree_cut(tree_of(25, lambda v: v - 1))
    assert not cut.type1
    assert cut.level_depths == [5, 10, 15, 20]


def test_star_tree_has_no_levels():
    cut = tree_cut(tree_of(20, lambda v: 0))
    assert cut.level_depths == []


def test_complete_binary_tree_root_is_type1():
    cut = tree_cut(tree_of(63, lambda v: (v - 1) // 2))
    assert cut.H == 8
    assert 0 in cut.type1 and cut.generators[0] == 0


def test_cut_protocol_agrees_with_centralized_cut():
    for seed in range(10):
        g = generate_deep(40, 70, seed) if seed % 2 else generate_random(40, 100, 9, seed)
        t = build_sp_tree(g, seed)
        H = hop_unit(g.n)
        run = NetworkRun(g)
        size, pre, levels, info = run.run(cut_protocol(run, t, H))
        cut = tree_cut(t, H)
        assert sorted(levels) == cut.level_depths
        for v in range(g.n):
            if t.reachable(v):
                assert size[v] == t.subtree_size[v]
                assert pre[v] == t.pre[v]
                ch = cut.edge_chain.get(v)
                assert info.get(v, ()) == ((ch.a, ch.c, ch.b) if ch else ())


def test_type1_generators_are_few_and_intervals_independent():
    for seed in range(20):
        g = generate_random(60, 150, 5, seed)
        t = build_sp_tree(g, 0)
        cut = tree_cut(t)
        assert len(cut.generators) <= cut.H
        for group in cut.interval_sets(t).values():
            assert is_independent(t, group)


def test_small_complete_digraph_stores_match_oracle():
    g = Graph(4, [(u, v, 1) for u in range(4) for v in range(4) if u != v])
    run = NetworkRun(g)
    preprocess_fast_query(run, CostModel.faithful())
    checked = 0
    for y in range(4):
        for (x, e), d in run.stores[y].get("fq_fwd", {}).items():
            assert d == oracle.rp(g, x, y, e)
            checked += 1
    assert checked > 0


@pytest.mark.parametrize("mode", ["charged", "faithful"])
def test_random_queries_exact(mode):
    g = generate_random(24, 70, 40, seed=5)
    run = NetworkRun(g, seed=5)
    state = preprocess_fast_query(run, CostModel(mode), seed=5)
    for a in answer_batch_fast(run, state, random_queries(g, 40, random.Random(5))):
        assert a.distance == oracle.rp(g, a.query.x, a.query.y, a.query.edge)


def test_level_case_terms_each_win_and_never_undershoot():
    winners = Counter()
    for seed in range(8):
        g = generate_deep(46, 56, seed, stretch=2)
        run = NetworkRun(g, seed=seed)
        state = preprocess_fast_query(run, seed=seed)
        batch = random_long_queries(g, 12, random.Random(seed), state.R + 1)
        for a in answer_batch_fast(run, state, batch):
            q = a.query
            truth = oracle.rp(g, q.x, q.y, q.edge)
            assert a.distance == truth
            if a.case != "level":
                continue
            ch = state.cuts[q.x].edge_chain[q.v]
            terms = (
                oracle.sp(g, q.x)[ch.a] + oracle.rp(g, ch.a, q.y, q.edge),
                oracle.rp(g, q.x, ch.b, q.edge) + oracle.sp(g, ch.b)[q.y],
                oracle.excluded(g, q.x, ch.edges)[q.y],
            )
            assert min(terms) == truth and all(t >= truth for t in terms)
            best = [i for i, t in enumerate(terms) if t == truth]
            if len(best) == 1:
                winners[best[0]] += 1
    assert sum(winners.values()) > 0
    assert len(winners) >= 2, winners


def test_case_coverage_and_query_congestion():
    g = generate_deep(46, 56, 3, stretch=2)
    run = NetworkRun(g, seed=3)
    state = preprocess_fast_query(run, seed=3)
    rng = random.Random(3)
    batch = random_long_queries(g, 10, rng, state.R + 1) + random_queries(g, 20, rng)
    answers = answer_batch_fast(run, state, batch)
    assert {a.case for a in answers} == {"off_path", "short_hop", "level"}
    row = run.ledger.rows[-1]
    assert row.phase == "fq-query"
    # 3 + 7 + 3 + 2 words per query over the broadcast tree
    assert row.peak_congestion <= 15 * len(batch)
    D = g.undirected_diameter()
    assert row.rounds <= 32 * (len(batch) + D)


def test_storage_within_n_three_halves_polylog():
    g = generate_random(36, 100, 30, seed=2)
    run = NetworkRun(g)
    state = preprocess_fast_query(run, seed=2)
    n = g.n
    assert state.max_storage_words(run) <= 8 * n ** 1.5 * hop_unit(n)


def test_figure1_query_hits_detour_length():
    bits_a = [[0, 1, 0]]
    bits_b = [[0, 1, 1]]
    b = build_fig1(1, 3, 6, bits_a, bits_b)
    g, nm = b.graph, b.names
    run = NetworkRun(g)
    state = preprocess_fast_query(run)
    batch = [Query(nm["a1"], nm["b1"], nm[f"v*_{t}"], nm[f"v*_{t + 1}"]) for t in range(5)]
    assert [a.distance for a in answer_batch_fast(run, state, batch)] == [8] * 5


def test_bad_queries_get_errors():
    g = generate_random(10, 25, 5, seed=1)
    run = NetworkRun(g)
    state = preprocess_fast_query(run)
    answers = answer_batch_fast(run, state, [Query(0, 1, 0, 0), Query(0, 12, *g.edges[0][:2])])
    assert all(a.error and a.distance is None for a in answers)
