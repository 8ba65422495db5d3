import random

import pytest

from congest_dso import oracle
from congest_dso.baseline import answer_general_no_pre, answer_seb_no_pre
from congest_dso.graph import generate_random
from congest_dso.queries import Query, random_queries
from congest_dso.simulator import CostModel, NetworkRun


@pytest.mark.parametrize("mode", ["charged", "faithful"])
def test_general_baseline_exact(mode):
    g = generate_random(20, 55, 30, seed=1)
    batch = random_queries(g, 12, random.Random(1))
    run = NetworkRun(g)
    for a in answer_general_no_pre(run, batch, CostModel(mode)):
        q = a.query
        assert a.distance == oracle.rp(g, q.x, q.y, q.edge)
        assert run.stores[q.y]["answers"][(q.x, q.y, q.u, q.v)] == a.distance


def test_general_baseline_rounds_grow_with_k():
    g = generate_random(20, 55, 30, seed=2)
    rounds = []
    for k in (1, 4):
        run = NetworkRun(g)
        answers = answer_general_no_pre(run, random_queries(g, k, random.Random(0)))
        rounds.append(answers[0].rounds_charged)
    assert rounds[1] >= 4 * rounds[0] - 8


def test_seb_baseline_exact_and_single_sssp_for_single_source():
    g = generate_random(24, 70, 30, seed=3)
    rng = random.Random(3)
    u, v, _ = g.edges[5]
    batch = [Query(rng.randrange(g.n), rng.randrange(g.n), u, v) for _ in range(10)]
    for a in answer_seb_no_pre(NetworkRun(g), batch, seed=1):
        assert a.distance == oracle.rp(g, a.query.x, a.query.y, (u, v))
    one = [Query(0, y, u, v) for y in range(g.n)]
    run = NetworkRun(g)
    answers = answer_seb_no_pre(run, one)
    cm = CostModel.charged()
    assert answers[0].rounds_charged == cm.charged_sssp_rounds(g.n)


def test_seb_rejects_mixed_edges_and_reports_bad_queries():
    g = generate_random(10, 25, 5, seed=4)
    (a, b, _), (c, d, _) = g.edges[:2]
    with pytest.raises(ValueError):
        answer_seb_no_pre(NetworkRun(g), [Query(0, 1, a, b), Query(0, 1, c, d)])
    answers = answer_seb_no_pre(NetworkRun(g), [Query(0, 1, a, b), Query(0, 99, a, b)])
    assert answers[1].error and not answers[1].ok
    answers = answer_general_no_pre(NetworkRun(g), [Query(0, 1, 0, 0)])
    assert answers[0].distance is None and "not an edge" in answers[0].error
