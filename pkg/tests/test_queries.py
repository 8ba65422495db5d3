import random

import pytest

from congest_dso.graph import GraphError, build_sp_tree, generate_deep, generate_random
from congest_dso.queries import Answer, Query, answers_csv, random_long_queries, random_queries, read_queries, write_queries


def test_file_round_trip():
    g = generate_random(12, 30, 5, seed=1)
    qs = random_queries(g, 9, random.Random(1))
    text = write_queries(qs)
    assert read_queries(text) == qs
    assert read_queries("# header\n\n" + text) == qs


@pytest.mark.parametrize("bad", ["1 2 3\n", "1 2 x 4\n"])
def test_malformed_queries(bad):
    with pytest.raises(GraphError):
        read_queries(bad)


def test_long_queries_keep_edge_away_from_both_ends():
    g = generate_deep(40, 48, 2, stretch=2)
    for q in random_long_queries(g, 20, random.Random(0), 5):
        path = build_sp_tree(g, q.x).path_edges(q.y)
        i = path.index(q.edge)
        assert i >= 5 and len(path) - 1 - i >= 5


def test_answers_csv_marks_errors_and_infinity():
    out = answers_csv([Answer(Query(0, 1, 2, 3), float("inf"), case="off_path"),
                       Answer(Query(0, 9, 2, 3), None, "y=9 out of range")], with_case=True)
    lines = out.splitlines()
    assert lines[0] == "x,y,u,v,distance,rounds_charged,case"
    assert lines[1] == "0,1,2,3,INF,0,off_path"
    assert lines[2].startswith("0,9,2,3,ERROR,0,")
