"""Graph families from the set-disjointness reductions, with checkers for their distance claims.

``build_fig1`` encodes two ``k x q`` bit matrices into a directed unit-weight
graph: a balanced binary tree (edges child to parent), ``q`` paths of length
``ell`` plus one path of length ``ell - 1``, every path vertex wired to a leaf.
Pair ``(a_i, b_i)`` keeps a detour around the short path exactly when row ``i``
of the two matrices intersects.

``build_fig2`` encodes one bit vector into an undirected graph where the
second simple shortest path from ``a_i`` to ``q`` is short exactly when bit
``i`` is set.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Sequence

from . import oracle
from .graph import INF, Graph


@dataclass(frozen=True)
class Claim:
    kind: str  # "dist", "rp" or "d2"
    source: str
    target: str
    expected: float
    relation: str = "=="  # or ">="
    edge: tuple[str, str] | None = None


@dataclass
class ClaimResult:
    claim: Claim
    actual: float
    ok: bool


class ClaimViolation(AssertionError):
    def __init__(self, failures: list[ClaimResult]):
        self.failures = failures
        c = failures[0].claim
        super().__init__(
            f"{len(failures)} claim(s) violated, first: {c.kind}({c.source},{c.target}"
            f"{',' + str(c.edge) if c.edge else ''}) expected {c.relation} {c.expected}, got {failures[0].actual}"
        )


@dataclass
class LowerBoundBuild:
    family: str
    graph: Graph
    names: dict[str, int]
    params: dict
    bits_a: list
    bits_b: list | None = None
    claims: list[Claim] = field(default_factory=list)
    alice: frozenset[int] = frozenset()

    def vertex(self, name: str) -> int:
        return self.names[name]

    def manifest_lines(self) -> list[str]:
        head = {"family": self.family, "params": self.params, "n": self.graph.n, "m": self.graph.m}
        lines = [json.dumps(head, sort_keys=True)]
        for name, v in sorted(self.names.items(), key=lambda kv: kv[1]):
            lines.append(json.dumps({"vertex": name, "id": v}))
        for c in self.claims:
            rec = {"claim": c.kind, "source": c.source, "target": c.target, "relation": c.relation,
                   "expected": "INF" if c.expected == INF else c.expected}
            if c.edge:
                rec["edge"] = list(c.edge)
            lines.append(json.dumps(rec))
        return lines


def verify_claims(build: LowerBoundBuild, strict: bool = False) -> list[ClaimResult]:
    """Re-check every claim with the brute-force oracle."""
    g = build.graph
    nm = build.names
    out = []
    for c in build.claims:
        s, t = nm[c.source], nm[c.target]
        if c.kind == "dist":
            val = oracle.sp(g, s)[t]
        elif c.kind == "rp":
            val = oracle.rp(g, s, t, (nm[c.edge[0]], nm[c.edge[1]]))
        else:
            val = oracle.sisp2(g, s, t)
        ok = val == c.expected if c.relation == "==" else val >= c.expected
        out.append(ClaimResult(c, val, ok))
    bad = [r for r in out if not r.ok]
    if strict and bad:
        raise ClaimViolation(bad)
    return out


# ---------------------------------------------------------------------------
# first family


def _tree(ell: int):
    """Balanced binary tree over leaves 1..ell; returns (parent edges, leaf ids, height, node count)."""
    edges = []
    leaves = {}
    counter = [0]

    def build(lo, hi):
        me = counter[0]
        counter[0] += 1
        if lo == hi:
            leaves[lo] = me
            return me, 0
        mid = (lo + hi) // 2
        left, hl = build(lo, mid)
        right, hr = build(mid + 1, hi)
        edges.extend([(left, me), (right, me)])
        return me, 1 + max(hl, hr)

    _, height = build(1, ell)
    return edges, leaves, height, counter[0]


def build_fig1(k: int, q: int, ell: int, bits_a, bits_b, verify: bool = True) -> LowerBoundBuild:
    """``bits_a[i][j]`` wires ``a_(i+1)`` to path ``j+1``; ``bits_b[i][j]`` wires its end to ``b_(i+1)``."""
    if ell < 2:
        raise ValueError("ell must be at least 2")
    if k < 1 or q < 1:
        raise ValueError("k and q must be positive")
    for name, bits in (("bits_a", bits_a), ("bits_b", bits_b)):
        if len(bits) != k or any(len(row) != q for row in bits):
            raise ValueError(f"{name} must be a {k}x{q} matrix")
    tree_edges, leaf_id, height, n_tree = _tree(ell)
    names = {f"u{t}": leaf_id[t] for t in range(1, ell + 1)}
    nxt = n_tree
    for j in range(1, q + 1):
        for t in range(ell + 1):
            names[f"v{j}_{t}"] = nxt
            nxt += 1
    for t in range(ell):
        names[f"v*_{t}"] = nxt
        nxt += 1
    for i in range(1, k + 1):
        names[f"a{i}"] = nxt
        names[f"b{i}"] = nxt + 1
        nxt += 2
    n = nxt
    if 2 * k > n:
        raise ValueError("need k <= n/2")
    edges = set(tree_edges)
    for j in range(1, q + 1):
        for t in range(ell + 1):
            v = names[f"v{j}_{t}"]
            if t < ell:
                edges.add((v, names[f"v{j}_{t + 1}"]))
            edges.add((v, leaf_id[max(t, 1)]))
    for t in range(ell):
        v = names[f"v*_{t}"]
        if t < ell - 1:
            edges.add((v, names[f"v*_{t + 1}"]))
        edges.add((v, leaf_id[max(t, 1)]))
    for i in range(1, k + 1):
        a, b = names[f"a{i}"], names[f"b{i}"]
        edges.add((a, names["v*_0"]))
        edges.add((names[f"v*_{ell - 1}"], b))
        for j in range(1, q + 1):
            if bits_a[i - 1][j - 1]:
                edges.add((a, names[f"v{j}_0"]))
            if bits_b[i - 1][j - 1]:
                edges.add((names[f"v{j}_{ell}"], b))
    g = Graph(n, sorted((u, v, 1) for u, v in edges))
    claims = []
    for i in range(1, k + 1):
        claims.append(Claim("dist", f"a{i}", f"b{i}", ell + 1))
        hit = any(bits_a[i - 1][j] and bits_b[i - 1][j] for j in range(q))
        for t in range(ell - 1):
            claims.append(Claim("rp", f"a{i}", f"b{i}", ell + 2 if hit else INF, edge=(f"v*_{t}", f"v*_{t + 1}")))
    build = LowerBoundBuild(
        "fig1", g, names, {"k": k, "q": q, "ell": ell, "tree_height": height},
        [list(map(int, r)) for r in bits_a], [list(map(int, r)) for r in bits_b], claims,
    )
    if verify:
        verify_claims(build, strict=True)
    return build


def fig1_sides(build: LowerBoundBuild, i: int) -> tuple[set[int], set[int]]:
    """Vertex sets simulated by the two parties after ``i`` rounds (left, right)."""
    ell, q, k = build.params["ell"], build.params["q"], build.params["k"]
    nm = build.names
    g = build.graph
    parent = {}
    n_tree = 2 * ell - 1
    for u, v, _ in g.edges:
        if u < n_tree and v < n_tree:
            parent[u] = v

    def with_ancestors(leaves):
        out = set()
        for t in leaves:
            v = nm[f"u{t}"]
            while v is not None and v not in out:
                out.add(v)
                v = parent.get(v)
        return out

    def path_vertices(ok):
        out = {nm[f"v{r}_{t}"] for r in range(1, q + 1) for t in range(ell + 1) if ok(t)}
        out |= {nm[f"v*_{t}"] for t in range(ell) if ok(t)}
        return out

    left = with_ancestors(range(1, ell - i + 1)) | path_vertices(lambda t: t <= ell - i)
    left |= {nm[f"a{j}"] for j in range(1, k + 1)}
    right = with_ancestors(range(i + 1, ell + 1)) | path_vertices(lambda t: t >= i)
    right |= {nm[f"b{j}"] for j in range(1, k + 1)}
    return left, right


def fig1_cut_audit(build: LowerBoundBuild) -> dict:
    """Largest number of links entering ``L_i`` (``R_i``) from outside ``L_(i-1)`` (``R_(i-1)``).

    The simulation argument needs this to stay within the tree height plus one
    (one boundary vertex per tree level), for ``2 <= i < ell/2``.
    """
    ell = build.params["ell"]
    links = [(u, v) for u, v, _ in build.graph.edges]
    worst_left = worst_right = 0
    for i in range(2, (ell + 1) // 2):
        l_prev, r_prev = fig1_sides(build, i - 1)
        l_cur, r_cur = fig1_sides(build, i)
        cross_l = sum(1 for u, v in links for a, b in ((u, v), (v, u)) if b in l_cur and a not in l_prev)
        cross_r = sum(1 for u, v in links for a, b in ((u, v), (v, u)) if b in r_cur and a not in r_prev)
        worst_left = max(worst_left, cross_l)
        worst_right = max(worst_right, cross_r)
    levels = build.params["tree_height"] + 1
    return {"left": worst_left, "right": worst_right, "tree_levels": levels,
            "ok": worst_left <= levels and worst_right <= levels}


# ---------------------------------------------------------------------------
# second family


def build_fig2(n: int, bits_a: Sequence[int], stretch: int = 1, directed: bool = False,
               verify: bool = True) -> LowerBoundBuild:
    """Vertices ``a1..an``, ``c``, ``c'``, ``p``, ``q`` and a hub ``b`` tied to every ``a_i``.

    Each ``a_i`` edge (to ``c``, to ``c'`` when the bit is set, and to the hub)
    becomes a path of ``stretch`` edges.  The hub never touches ``c``: a hub-to-``c``
    link would open a length-4 detour and break the gap for unset bits.
    """
    if n < 1:
        raise ValueError("n must be positive")
    if stretch < 1:
        raise ValueError("stretch must be at least 1")
    if len(bits_a) != n:
        raise ValueError(f"need {n} bits")
    names: dict[str, int] = {}
    for i in range(1, n + 1):
        names[f"a{i}"] = i - 1
    nxt = n
    for nm in ("c", "c'", "p", "q", "b"):
        names[nm] = nxt
        nxt += 1
    links = []

    def chain(src, dst, label):
        nonlocal nxt
        prev = src
        for s in range(1, stretch):
            names[f"{label}#{s}"] = nxt
            links.append((prev, nxt))
            prev = nxt
            nxt += 1
        links.append((prev, dst))

    for i in range(1, n + 1):
        a = names[f"a{i}"]
        chain(a, names["c"], f"a{i}-c")
        if bits_a[i - 1]:
            chain(a, names["c'"], f"a{i}-c'")
        if directed:
            chain(names["b"], a, f"b-a{i}")
        else:
            chain(a, names["b"], f"a{i}-b")
    links += [(names["c"], names["p"]), (names["c'"], names["p"]), (names["p"], names["q"])]
    edges = set(links)
    if not directed:
        edges |= {(v, u) for u, v in links}
    g = Graph(nxt, sorted((u, v, 1) for u, v in edges))
    alice = frozenset(v for name, v in names.items() if name not in ("p", "q"))
    claims = []
    for i in range(1, n + 1):
        claims.append(Claim("dist", f"a{i}", "q", stretch + 2))
        if bits_a[i - 1]:
            claims.append(Claim("d2", f"a{i}", "q", stretch + 2))
        elif directed:
            claims.append(Claim("d2", f"a{i}", "q", INF))
        else:
            claims.append(Claim("d2", f"a{i}", "q", 3 * stretch + 2, ">="))
    build = LowerBoundBuild(
        "fig2", g, names, {"n": n, "stretch": stretch, "directed": directed},
        [int(b) for b in bits_a], None, claims, alice,
    )
    if verify:
        verify_claims(build, strict=True)
    return build


def fig2_crossing_links(build: LowerBoundBuild) -> int:
    """Undirected links with one end on each side of the Alice/Bob split."""
    seen = set()
    for u, v, _ in build.graph.edges:
        if (u in build.alice) != (v in build.alice):
            seen.add((min(u, v), max(u, v)))
    return len(seen)


def recover_bits(build: LowerBoundBuild, d2_to_q: Sequence[float]) -> list[int]:
    """Read bit ``i`` back from ``d2(a_i, q)``."""
    k = build.params["stretch"]
    return [1 if d == k + 2 else 0 for d in d2_to_q]


def diameter_bound_fig1(build: LowerBoundBuild) -> float:
    """``O(log)`` reference value: a few times the tree height."""
    return 2 * build.params["tree_height"] + 6


def bits_from_seed(rng, rows: int, cols: int | None = None, density: float = 0.5):
    if cols is None:
        return [int(rng.random() < density) for _ in range(rows)]
    return [[int(rng.random() < density) for _ in range(cols)] for _ in range(rows)]

