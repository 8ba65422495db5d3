"""Distance sensitivity oracle with heavy preprocessing and O(k + D)-round queries.

Preprocessing, on top of all-pairs distances in both directions:

* hop excludes: for each source ``x`` and each depth ``i <= R`` the tree edges
  entering depth ``i`` of ``T_x`` are excluded at once (they hang disjoint
  subtrees), giving ``d(x, y, e)`` for every ``e`` within ``R`` hops of ``x``;
  the same on the reversed graph gives ``d(y, x, e)`` for ``e`` near ``x``.
* tree cutting: every ``T_x`` gets *level depths* (multiples of ``H`` plus the
  depths of vertices with two or more children of subtree size ``>= H``).
  Between consecutive level depths a vertex has at most one such big child, so
  from each level vertex ``a`` and big child ``c`` a unique *chain* runs down
  to the next level depth.  Chains leaving one level depth are excluded
  together, giving ``d(x, y, chain)`` below each chain.

A query whose failed edge is far from both ends lies on some chain ``(a, c, b)``
and is answered as ``min(d(x,a) + d(a,y,e), d(x,b,e) + d(b,y), d(x,y,chain))``.
Everything else is an off-path query or a stored short-hop exclude.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

from .exclude import ExcludeRequest, exclude_protocol
from .exclude import congestion_bound as exclude_congestion_bound
from .exclude import round_bound as exclude_round_bound
from .graph import INF, PathSpec, ShortestPathTree
from .queries import Answer, QueryBatch, query_error
from .simulator import (
    CostModel,
    NetworkRun,
    apsp,
    broadcast_many,
    convergecast_protocol,
    schedule_random_delays,
    treecast_protocol,
)


def hop_unit(n: int) -> int:
    return max(1, math.isqrt(max(n, 1) - 1) + 1)


# ---------------------------------------------------------------------------
# tree cutting


@dataclass(frozen=True)
class Chain:
    a: int
    c: int
    b: int
    edges: tuple[tuple[int, int], ...]


@dataclass
class LevelCut:
    H: int
    type1: frozenset[int]
    type2: frozenset[int]
    generators: tuple[int, ...]
    chains: list[Chain]
    # head vertex of a chain edge -> its chain
    edge_chain: dict[int, Chain] = field(default_factory=dict)

    @property
    def level_depths(self) -> list[int]:
        return sorted(self.type1 | self.type2)

    def is_level(self, tree: ShortestPathTree, v: int) -> bool:
        return tree.reachable(v) and int(tree.depth[v]) in self.type1 | self.type2

    def interval_sets(self, tree: ShortestPathTree) -> dict[int, list[PathSpec]]:
        """Chains grouped by the depth they start at; each group is independent."""
        groups: dict[int, list[PathSpec]] = {}
        for ch in self.chains:
            groups.setdefault(int(tree.depth[ch.a]), []).append(PathSpec(tree.root, ch.a, ch.edges))
        return groups


def tree_cut(tree: ShortestPathTree, H: int | None = None) -> LevelCut:
    H = H or hop_unit(tree.n)
    height = tree.height
    big = [s >= H for s in tree.subtree_size]
    generators = tuple(
        v for v in range(tree.n) if tree.reachable(v) and sum(big[c] for c in tree.children[v]) >= 2
    )
    type1 = frozenset(int(tree.depth[v]) for v in generators)
    type2 = frozenset(i * H for i in range(1, H + 1) if i * H <= height)
    levels = type1 | type2
    chains = []
    edge_chain = {}
    for a in range(tree.n):
        if not tree.reachable(a) or int(tree.depth[a]) not in levels:
            continue
        for c in tree.children[a]:
            if not big[c]:
                continue
            edges = [(a, c)]
            cur = c
            while int(tree.depth[cur]) not in levels:
                nxt = [ch for ch in tree.children[cur] if big[ch]]
                if len(nxt) != 1:
                    break
                edges.append((cur, nxt[0]))
                cur = nxt[0]
            ch = Chain(a, c, cur, tuple(edges))
            chains.append(ch)
            for _, head in edges:
                edge_chain[head] = ch
    return LevelCut(H, type1, type2, generators, chains, edge_chain)


def cut_protocol(run: NetworkRun, tree: ShortestPathTree, H: int):
    """The cut computed by message passing over ``tree``.

    Returns ``(size, pre, levels, info)`` where ``info[v]`` is the chain
    ``(a, c, b)`` of the tree edge entering ``v`` (``()`` off chains).
    """
    n = tree.n
    depth = [int(d) if d < INF else -1 for d in tree.depth]
    kid_size: list[dict] = [{} for _ in range(n)]

    def count(v, got):
        kid_size[v] = dict(got)
        return 1 + sum(s for _, s in got)

    size = yield from convergecast_protocol(run, tree, count)

    def gen(v, got):
        found = set()
        tallest = depth[v]
        for _, (s, h) in got:
            found |= s
            tallest = max(tallest, h)
        if sum(1 for s in kid_size[v].values() if s >= H) >= 2:
            found.add(depth[v])
        return frozenset(found), tallest

    up = yield from convergecast_protocol(run, tree, gen, words=lambda val: len(val[0]) + 1)
    type1, height = up[tree.root]
    levels = frozenset(type1 | {i * H for i in range(1, H + 1) if i * H <= height})

    def child_pre(v, lab, c):
        start = lab[0] + 1
        for k in tree.children[v]:
            if k == c:
                break
            start += kid_size[v][k]
        return start, lab[1]

    pre_lab = yield from treecast_protocol(
        run, tree, {tree.root: (0, levels)}, child_pre, words=lambda lab: 1 + len(lab[1])
    )
    pre = {v: p for v, (p, _) in pre_lab.items()}
    ends: list[dict] = [{} for _ in range(n)]

    def chain_end(v, got):
        ends[v] = dict(got)
        if depth[v] in levels:
            return v
        bigs = [c for c, s in kid_size[v].items() if s >= H]
        return ends[v][bigs[0]] if len(bigs) == 1 else v

    yield from convergecast_protocol(run, tree, chain_end)

    def relabel(v, lab, c):
        if kid_size[v][c] < H:
            return ()
        if depth[v] in levels:
            return (v, c, ends[v][c])
        return lab

    info = yield from treecast_protocol(
        run, tree, {tree.root: ()}, relabel, words=lambda lab: 3 if lab else 1
    )
    return size, pre, levels, info


# ---------------------------------------------------------------------------
# state


@dataclass
class FastQueryState:
    n: int
    H: int
    R: int
    trees: list[ShortestPathTree]
    rtrees: list[ShortestPathTree]
    cuts: list[LevelCut]
    preprocessing_rounds: int = 0
    excludes_run: int = 0

    def storage_words(self, run: NetworkRun, v: int) -> int:
        st = run.stores[v]
        words = len(st.get("fq_in", ())) + len(st.get("fq_out", ()))
        words += 4 * len(st.get("fq_tree", {})) + 3 * len(st.get("fq_cut", {}))
        for key in ("fq_fwd", "fq_rev"):
            words += 4 * len(st.get(key, {}))
        words += 3 * len(st.get("fq_lvl", {}))
        return words

    def max_storage_words(self, run: NetworkRun) -> int:
        return max(self.storage_words(run, v) for v in range(self.n))


def _hop_requests(tree: ShortestPathTree, R: int) -> list[ExcludeRequest]:
    by_depth: dict[int, list[PathSpec]] = {}
    for v in range(tree.n):
        p = tree.parent[v]
        if p is not None and tree.depth[v] <= R:
            by_depth.setdefault(int(tree.depth[v]), []).append(PathSpec(tree.root, p, ((p, v),)))
    return [ExcludeRequest(tree.root, paths) for _, paths in sorted(by_depth.items())]


def preprocess_fast_query(
    run: NetworkRun,
    cost_model: CostModel | None = None,
    seed: int | None = None,
) -> FastQueryState:
    cost_model = cost_model or CostModel.charged()
    g = run.graph
    n = g.n
    H = hop_unit(n)
    R = 2 * H
    start = run.ledger.rounds
    run.leader_tree()
    with run.phase("fq-preprocess"):
        trees = apsp(run, cost_model, name="fq-apsp-forward")
        rev = g.reversed()
        rtrees = apsp(run, cost_model, rev, name="fq-apsp-reverse")
        for w in range(n):
            run.stores[w]["fq_in"] = [trees[x].dist[w] for x in range(n)]
            run.stores[w]["fq_out"] = [rtrees[x].dist[w] for x in range(n)]

        protos = [cut_protocol(run, trees[x], H) for x in range(n)]
        outs, _ = schedule_random_delays(run, protos, 2 * H + 6, 5 * n + 5, seed, name="fq-tree-cut")
        cuts = []
        for x, (size, pre, levels, info) in enumerate(outs):
            t = trees[x]
            for w in range(n):
                if not t.reachable(w):
                    continue
                st = run.stores[w]
                st.setdefault("fq_tree", {})[x] = (t.parent[w], int(t.depth[w]), pre[w], pre[w] + size[w] - 1)
                if info.get(w):
                    st.setdefault("fq_cut", {})[x] = info[w]
            cuts.append(tree_cut(t, H))

        jobs = []  # (kind, request, graph, base tree)
        for x in range(n):
            for req in _hop_requests(trees[x], R):
                jobs.append(("fwd", req, g, trees[x]))
            for req in _hop_requests(rtrees[x], R):
                jobs.append(("rev", req, rev, rtrees[x]))
            for _, paths in sorted(cuts[x].interval_sets(trees[x]).items()):
                jobs.append(("lvl", ExcludeRequest(x, paths), g, trees[x]))
        protos = [
            exclude_protocol(run, graph, req, cost_model, base_tree=base, store_key=None)
            for _, req, graph, base in jobs
        ]
        results, _ = schedule_random_delays(
            run,
            protos,
            exclude_congestion_bound(n, cost_model),
            exclude_round_bound(n, cost_model),
            seed,
            name="fq-excludes",
        )
        for (kind, req, _, base), res in zip(jobs, results):
            x = req.source
            for (y, root), d in res.values.items():
                st = run.stores[y]
                if kind == "fwd":
                    st.setdefault("fq_fwd", {})[(x, (base.parent[root], root))] = d
                elif kind == "rev":
                    # reversed edge (parent, root) is the original edge (root, parent)
                    st.setdefault("fq_rev", {})[(x, (root, base.parent[root]))] = d
                else:
                    st.setdefault("fq_lvl", {})[(x, root)] = d
    return FastQueryState(n, H, R, trees, rtrees, cuts, run.ledger.rounds - start, len(jobs))


# ---------------------------------------------------------------------------
# queries


def _sink_answer(run: NetworkRun, state: FastQueryState, q, facts, xinfo) -> tuple[float, str]:
    """What node ``y`` computes from its own store and the two broadcasts."""
    st = run.stores[q.y]
    on_tree, v_pre, v_post, v_depth, chain = facts
    here = st.get("fq_tree", {}).get(q.x)
    if not on_tree or here is None or not (v_pre <= here[2] <= v_post):
        return st["fq_in"][q.x], "off_path"
    e = q.edge
    if v_depth <= state.R:
        return st["fq_fwd"][(q.x, e)], "short_hop"
    d_xa, d_xbe, d_xye = xinfo
    if here[1] - (v_depth - 1) <= state.R:
        return (st["fq_in"][q.x] if d_xye is None else d_xye), "short_hop"
    if not chain:
        raise RuntimeError(f"failed edge {e} lies on no chain of T_{q.x}")
    a, c, b = chain
    via_a = d_xa + st.get("fq_fwd", {}).get((a, e), st["fq_in"][a])
    via_b = d_xbe + st["fq_in"][b]
    around = st["fq_lvl"][(q.x, c)]
    return min(via_a, via_b, around), "level"


def answer_batch_fast(run: NetworkRun, state: FastQueryState, batch: QueryBatch) -> list[Answer]:
    """Four pipelined broadcasts: the queries, facts about each failed edge from
    its head, the source's distances, and finally the sink's answer."""
    g = run.graph
    answers = [Answer(q, None, query_error(g, q)) for q in batch]
    live = [i for i, a in enumerate(answers) if a.error is None]
    if not live:
        return answers
    with run.phase("fq-query") as delta:
        broadcast_many(run, [(batch[i].x, i, 3) for i in live], name="fq-announce")

        items = []
        for i in live:
            q = batch[i]
            st = run.stores[q.v]
            here = st.get("fq_tree", {}).get(q.x)
            on_tree = here is not None and here[0] == q.u
            facts = (on_tree, here[2], here[3], here[1], st.get("fq_cut", {}).get(q.x, ())) if on_tree else (
                False, -1, -1, -1, ())
            items.append((q.v, (i, facts), 7))
        facts = dict(broadcast_many(run, items, name="fq-edge-facts"))

        items = []
        for i in live:
            q = batch[i]
            st = run.stores[q.x]
            chain = facts[i][4]
            d_xa = d_xbe = INF
            if chain:
                a, _, b = chain
                d_xa = st["fq_out"][a]
                d_xbe = st.get("fq_rev", {}).get((b, q.edge), st["fq_out"][b])
            d_xye = st.get("fq_rev", {}).get((q.y, q.edge))
            items.append((q.x, (i, (d_xa, d_xbe, d_xye)), 3))
        xinfo = dict(broadcast_many(run, items, name="fq-source-facts"))

        items = []
        for i in live:
            q = batch[i]
            d, case = _sink_answer(run, state, q, facts[i], xinfo[i])
            answers[i].distance = d
            answers[i].case = case
            run.stores[q.y].setdefault("answers", {})[(q.x, q.y, q.u, q.v)] = d
            items.append((q.y, (i, d), 2))
        broadcast_many(run, items, name="fq-answers")
    for i in live:
        answers[i].rounds_charged = delta.rounds
    return answers
