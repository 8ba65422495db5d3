import math
import random

import numpy as np
import pytest

from congest_dso import oracle
from congest_dso.graph import (
    INF,
    Graph,
    GraphError,
    PathSpec,
    build_sp_tree,
    distance_table,
    generate_deep,
    generate_random,
    is_independent,
    read_graph,
    shortest_paths,
    validate_path,
    without_edges,
    write_graph,
)


def test_rejects_bad_edges():
    with pytest.raises(GraphError):
        Graph(3, [(0, 0, 1)])
    with pytest.raises(GraphError):
        Graph(3, [(0, 1, 1), (0, 1, 2)])
    with pytest.raises(GraphError):
        Graph(3, [(0, 5, 1)])
    with pytest.raises(GraphError):
        Graph(3, [(0, 1, -1)])
    with pytest.raises(GraphError):
        Graph(3, [(0, 1, 9)], max_weight=5)


def test_file_round_trip():
    g = generate_random(15, 40, 30, seed=4)
    text = write_graph(g)
    h = read_graph(text)
    assert h == g
    assert write_graph(h) == text


@pytest.mark.parametrize("bad, line", [("3 1\n0 1\n", 2), ("3 1\n0 x 1\n", 2), ("3\n", 1), ("2 1\n0 1 1\n1 0 1\n", None)])
def test_malformed_files(bad, line):
    with pytest.raises(GraphError) as info:
        read_graph(bad)
    if line is not None:
        assert info.value.line == line


def test_generate_is_deterministic_and_connected():
    a = generate_random(30, 90, 100, seed=9)
    b = generate_random(30, 90, 100, seed=9)
    assert a == b and a.m == 90 and a.is_connected()
    assert all(1 <= w <= 100 for _, _, w in a.edges)
    d = generate_deep(30, 45, seed=2)
    assert d.m == 45 and d.is_connected()


def test_shortest_paths_match_oracle():
    for seed in range(15):
        g = generate_random(25, 70, 20, seed, min_w=0)
        for s in (0, 7):
            dist, hops = shortest_paths(g, s)
            assert dist == oracle.sp(g, s)
            tree = build_sp_tree(g, s)
            for v in range(g.n):
                if tree.reachable(v) and v != s:
                    p = tree.parent[v]
                    assert dist[p] + g.weight(p, v) == dist[v]
                    assert tree.depth[v] == tree.depth[p] + 1


def test_tree_prefers_fewer_hops_then_smaller_id():
    # 0->1->3 and 0->2->3 both cost 2; 0->3 direct also costs 2
    g = Graph(4, [(0, 1, 1), (1, 3, 1), (0, 2, 1), (2, 3, 1), (0, 3, 2)])
    t = build_sp_tree(g, 0)
    assert t.parent[3] == 0 and t.depth[3] == 1
    g = Graph(4, [(0, 2, 1), (2, 3, 1), (0, 1, 1), (1, 3, 1)])
    assert build_sp_tree(g, 0).parent[3] == 1


def test_tree_orders_and_ancestry():
    g = generate_random(40, 120, 10, seed=1)
    t = build_sp_tree(g, 3)
    for v in filter(t.reachable, range(g.n)):
        sub = t.subtree(v)
        assert len(sub) == t.subtree_size[v]
        assert all(t.is_ancestor(v, u) for u in sub)
        if t.parent[v] is not None:
            assert t.path_edges(v)[-1] == (t.parent[v], v)


def test_distance_table_matches_heap_dijkstra():
    g = generate_random(30, 100, 50, seed=5, min_w=0)
    rng = np.random.default_rng(0)
    keep = rng.random(g.m) > 0.2
    removed = [(u, v) for (u, v, _), k in zip(g.edges, keep) if not k]
    tab = distance_table(g, [0, 4], keep)
    for row, s in zip(tab, [0, 4]):
        want, _ = shortest_paths(g, s, without_edges(removed))
        assert row.tolist() == want
    rev = distance_table(g, [2], reverse=True)[0]
    assert rev.tolist() == [oracle.sp(g, v)[2] for v in range(g.n)]


def test_path_validation_and_independence():
    g = Graph(6, [(0, 1, 1), (1, 2, 1), (2, 3, 1), (1, 4, 1), (4, 5, 1)])
    t = build_sp_tree(g, 0)
    p = PathSpec.from_vertices(0, [1, 2, 3])
    q = PathSpec.from_vertices(0, [1, 4])
    validate_path(t, p)
    assert p.subtree_root == 2 and p.vertices == [1, 2, 3]
    assert is_independent(t, [p, q])
    assert not is_independent(t, [PathSpec.from_vertices(0, [0, 1]), q])
    with pytest.raises(GraphError):
        validate_path(t, PathSpec.from_vertices(0, [0, 2]))
    with pytest.raises(GraphError):
        validate_path(t, PathSpec(1, 1, ((1, 2),)))


def test_undirected_diameter():
    g = Graph(4, [(0, 1, 5), (2, 1, 5), (2, 3, 5)])
    assert g.undirected_diameter() == 3
    assert Graph(2, []).undirected_diameter() == INF


def test_random_graph_distances_finite_in_undirected_sense():
    rng = random.Random(0)
    for seed in range(5):
        n = rng.randint(5, 30)
        g = generate_random(n, rng.randint(n, 3 * n), 9, seed)
        assert math.isfinite(g.undirected_diameter())
