import json
import random

import pytest

from congest_dso import oracle
from congest_dso.apsisp import compute_2apsisp
from congest_dso.dso_fastpre import answer_batch_pre, preprocess_fast_pre
from congest_dso.dso_fastquery import answer_batch_fast, preprocess_fast_query
from congest_dso.graph import INF
from congest_dso.lowerbound import (
    ClaimViolation,
    bits_from_seed,
    build_fig1,
    build_fig2,
    diameter_bound_fig1,
    fig1_cut_audit,
    fig2_crossing_links,
    recover_bits,
    verify_claims,
)
from congest_dso.queries import Query
from congest_dso.simulator import NetworkRun


def test_fig1_distances_and_detours():
    b = build_fig1(2, 3, 5, [[1, 0, 0], [0, 0, 1]], [[1, 0, 1], [1, 1, 0]])
    nm, g = b.names, b.graph
    assert oracle.sp(g, nm["a1"])[nm["b1"]] == 6
    e = (nm["v*_2"], nm["v*_3"])
    assert oracle.rp(g, nm["a1"], nm["b1"], e) == 7
    assert oracle.rp(g, nm["a2"], nm["b2"], e) == INF


def test_fig1_diameter_is_logarithmic_and_cut_audit_passes():
    rng = random.Random(1)
    for _ in range(10):
        k, q, ell = rng.randint(1, 6), rng.randint(1, 6), rng.randint(4, 16)
        b = build_fig1(k, q, ell, bits_from_seed(rng, k, q), bits_from_seed(rng, k, q))
        assert b.graph.undirected_diameter() <= diameter_bound_fig1(b)
        assert fig1_cut_audit(b)["ok"]


def test_fig1_answers_from_both_oracles_match_the_claim():
    k, q, ell = 3, 3, 6
    # rows 1 and 3 meet at some column, row 2 never does
    b = build_fig1(k, q, ell, [[1, 0, 1], [1, 0, 0], [0, 1, 1]], [[0, 0, 1], [0, 1, 1], [0, 1, 0]])
    nm, g = b.names, b.graph
    batch = [Query(nm[f"a{i}"], nm[f"b{i}"], nm[f"v*_{t}"], nm[f"v*_{t + 1}"])
             for i in range(1, k + 1) for t in range(ell - 1)]
    want = []
    for i in range(1, k + 1):
        hit = any(b.bits_a[i - 1][j] and b.bits_b[i - 1][j] for j in range(q))
        want += [ell + 2 if hit else INF] * (ell - 1)
    assert INF in want and ell + 2 in want
    run = NetworkRun(g)
    fq = answer_batch_fast(run, preprocess_fast_query(run), batch)
    assert [a.distance for a in fq] == want
    run = NetworkRun(g, seed=1)
    fp = answer_batch_pre(run, preprocess_fast_pre(run, seed=1), batch)
    assert [a.distance for a in fp] == want


@pytest.mark.parametrize("stretch", [1, 3])
def test_fig2_gap_and_bit_recovery(stretch):
    bits = [1, 0, 0, 1, 1, 0, 1, 0]
    b = build_fig2(8, bits, stretch)
    assert fig2_crossing_links(b) == 2
    d2 = compute_2apsisp(NetworkRun(b.graph)).matrix()
    col = [d2[b.names[f"a{i}"]][b.names["q"]] for i in range(1, 9)]
    for bit, d in zip(bits, col):
        assert d == stretch + 2 if bit else d >= 3 * stretch + 2
    assert recover_bits(b, col) == bits


def test_fig2_all_zero_stretch3_hits_lower_edge_of_gap():
    b = build_fig2(3, [0, 0, 0], 3)
    assert [oracle.sisp2(b.graph, b.names[f"a{i}"], b.names["q"]) for i in (1, 2, 3)] == [11] * 3


def test_fig2_directed_variant_is_infinite_for_unset_bits():
    b = build_fig2(4, [0, 1, 0, 1], 2, directed=True)
    col = [oracle.sisp2(b.graph, b.names[f"a{i}"], b.names["q"]) for i in range(1, 5)]
    assert col == [INF, 4, INF, 4]


def test_manifest_and_claim_failures():
    b = build_fig2(2, [1, 0])
    lines = [json.loads(x) for x in b.manifest_lines()]
    assert lines[0]["family"] == "fig2"
    assert {"vertex": "q", "id": b.names["q"]} in lines
    assert all(r.ok for r in verify_claims(b))
    b.claims[0] = type(b.claims[0])("dist", "a1", "q", 99)
    with pytest.raises(ClaimViolation, match="a1,q"):
        verify_claims(b, strict=True)


def test_builders_reject_bad_shapes():
    with pytest.raises(ValueError):
        build_fig1(2, 2, 4, [[1, 0]], [[1, 0], [0, 1]])
    with pytest.raises(ValueError):
        build_fig1(1, 1, 1, [[1]], [[1]])
    with pytest.raises(ValueError):
        build_fig2(3, [1, 0])
