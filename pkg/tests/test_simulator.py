import random

import pytest

from congest_dso import oracle
from congest_dso.graph import INF, Graph, build_sp_tree, generate_random, without_edges
from congest_dso.simulator import (
    ENGINE_C,
    CostModel,
    Idle,
    Message,
    NetworkRun,
    TopologyError,
    apsp,
    bellman_ford_protocol,
    bfs_multi,
    broadcast,
    broadcast_many,
    downcast,
    random_delays,
    schedule_random_delays,
    sssp,
    sssp_protocol,
    upcast,
)


def line(n, w=1):
    return Graph(n, [(i, i + 1, w) for i in range(n - 1)])


def test_multiword_message_takes_words_over_bandwidth_rounds():
    for B, rounds in ((1, 5), (2, 3), (5, 1)):
        run = NetworkRun(line(2), bandwidth=B)

        def send():
            inbox = yield [Message(0, 1, "x", 5)]
            return inbox

        assert run.run(send()) == [Message(0, 1, "x", 5)]
        assert run.ledger.rounds == rounds
        assert run.ledger.words((0, 1)) == 5


def test_fifo_per_link_and_delivery_order():
    run = NetworkRun(line(2))

    def sender():
        yield [Message(0, 1, "a"), Message(0, 1, "b", 2), Message(0, 1, "c")]

    run.run(sender())
    assert run.ledger.rounds == 4 and run.ledger.words((0, 1)) == 4


def test_non_link_is_rejected():
    run = NetworkRun(line(3))

    def bad():
        yield [Message(0, 2, None)]

    with pytest.raises(TopologyError):
        run.run(bad())


def test_idle_and_bandwidth_validation():
    run = NetworkRun(line(2))

    def wait():
        yield Idle(7)
        return "done"

    assert run.run(wait()) == "done" and run.ledger.rounds == 7
    with pytest.raises(ValueError):
        NetworkRun(line(2), bandwidth=0)


def test_bellman_ford_matches_hop_limited_oracle():
    for seed in range(10):
        g = generate_random(20, 60, 15, seed)
        for h in (1, 3, 19):
            run = NetworkRun(g)
            dist, _ = run.run(bellman_ford_protocol(run, g, 0, h, without_edges([g.edges[0][:2]])))
            assert dist == oracle.hop_limited(g, 0, h, banned=[g.edges[0][:2]])


def test_sssp_modes_agree_and_charge_as_declared():
    g = generate_random(24, 70, 30, seed=3)
    trees = {}
    for cm in (CostModel.faithful(), CostModel.charged()):
        run = NetworkRun(g)
        trees[cm.mode] = sssp(run, 5, cost_model=cm)
        if cm.is_charged:
            # black box plus the two-round parent exchange
            assert run.ledger.rounds == cm.charged_sssp_rounds(24) + 3
            assert run.ledger.uniform == cm.charged_sssp_congestion(24)
    ref = build_sp_tree(g, 5)
    for t in trees.values():
        assert t.parent == ref.parent and t.dist == ref.dist


def test_faithful_sssp_within_declared_envelope():
    for seed in range(5):
        g = generate_random(20, 50, 40, seed)
        run = NetworkRun(g)
        cm = CostModel.faithful()
        sssp(run, 0, cost_model=cm)
        assert run.ledger.peak_congestion <= cm.sssp_congestion_bound(g.n)
        assert run.ledger.rounds <= ENGINE_C * cm.sssp_round_bound(g.n)


def test_bfs_multi_is_hop_distance_to_nearest_source():
    g = generate_random(30, 80, 9, seed=1)
    run = NetworkRun(g)
    dist, near = bfs_multi(run, [0, 7])
    unit = Graph(g.n, [(u, v, 1) for u, v, _ in g.edges])
    for v in range(g.n):
        want = min(oracle.sp(unit, 0)[v], oracle.sp(unit, 7)[v])
        assert dist[v] == want
        if want < INF:
            assert oracle.sp(unit, near[v])[v] == want


def test_broadcast_reaches_everyone_and_reports_unreached():
    g = Graph(5, [(0, 1, 1), (1, 2, 1), (3, 4, 1)])
    run = NetworkRun(g)
    res = broadcast(run, 0, ["p", "q"])
    assert res.unreached == [3, 4]
    assert run.stores[2]["broadcast"] == ["p", "q"]


def test_analytic_and_simulated_broadcasts_have_equal_ledgers():
    rng = random.Random(2)
    for seed in range(6):
        g = generate_random(25, 60, 5, seed)
        items = [(rng.randrange(g.n), i, rng.choice((1, 2, 3))) for i in range(rng.randint(1, 30))]
        snaps = []
        for simulate in (False, True):
            run = NetworkRun(g, bandwidth=1 + seed % 2, simulate_broadcasts=simulate)
            out = broadcast_many(run, items)
            snaps.append((out, run.ledger.snapshot()))
        assert snaps[0] == snaps[1]


def test_upcast_and_downcast():
    g = generate_random(20, 50, 5, seed=8)
    run = NetworkRun(g)
    tree = run.leader_tree()
    assert upcast(run, tree, list(range(g.n)), lambda a, b: a + b) == sum(range(g.n))
    _, received, errors = downcast(run, tree, [(3, "x"), (99, "y")])
    assert errors == [1]
    for v in range(g.n):
        assert ("x" in received[v]) == tree.is_ancestor(3, v)


def test_random_delays_range_and_single_instance():
    rng = random.Random(0)
    assert random_delays(1, 50, rng) == [0]
    d = random_delays(10, 4, rng)
    assert all(0 <= x < 40 for x in d)


def test_random_delay_scheduling_round_envelope():
    # k SSSPs with congestion C and dilation R finish in O(kC + R log n)
    g = generate_random(16, 40, 20, seed=4)
    cm = CostModel.faithful()
    run = NetworkRun(g, seed=1)
    protos = [sssp_protocol(run, g, s, cm) for s in range(8)]
    trees, delta = schedule_random_delays(run, protos, cm.sssp_congestion_bound(16), cm.sssp_round_bound(16), seed=1)
    assert [t.dist for t in trees] == [oracle.sp(g, s) for s in range(8)]
    C, R = cm.sssp_congestion_bound(16), cm.sssp_round_bound(16)
    assert delta.rounds <= ENGINE_C * (8 * C + R * 4)
    assert not delta.warnings


def test_replay_determinism():
    g = generate_random(18, 50, 10, seed=6)
    snaps = []
    for _ in range(2):
        run = NetworkRun(g, seed=42)
        trees = apsp(run, CostModel.faithful())
        snaps.append((run.ledger.snapshot(), [t.parent for t in trees]))
    assert snaps[0] == snaps[1]


def test_phase_rows_nest():
    run = NetworkRun(line(4))
    with run.phase("outer") as outer:
        with run.phase("inner"):
            sssp(run, 0, cost_model=CostModel.faithful())
    assert [r.phase for r in run.ledger.rows][-1] == "outer"
    assert outer.rounds == run.ledger.rounds
    assert "phase,rounds" in run.ledger.to_csv()
