"""Excluded shortest paths: d(x, y, P) for a set of independent tree paths.

For every path ``P`` hanging off the shortest-path tree of ``x``, each vertex
``y`` below ``P`` learns its distance from ``x`` once the edges of ``P`` are
deleted.  One SSSP builds the tree, a downcast tells every vertex which
excluded subtree it belongs to, one exchange round lets each subtree vertex
``z`` compute the best entry into its subtree from outside, and a final SSSP
(on the graph minus all path edges, with those entry values as local virtual
edges from ``x``) settles everything else.
"""
from __future__ import annotations

import csv
import io
import random
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .graph import (
    INF,
    Graph,
    GraphError,
    PathSpec,
    ShortestPathTree,
    build_sp_tree,
    is_independent,
    validate_path,
)
from .simulator import (
    CostModel,
    Message,
    NetworkRun,
    bfs_protocol,
    schedule_random_delays,
    sssp_protocol,
    treecast_protocol,
)

STORE_KEY = "exclude"


@dataclass
class ExcludeRequest:
    source: int
    paths: list[PathSpec] = field(default_factory=list)


@dataclass
class ExcludeResult:
    source: int
    paths: list[PathSpec]
    # (y, subtree root of P) -> d(source, y, P), present exactly for y below P
    values: dict[tuple[int, int], float]

    def distance(self, y: int, path: PathSpec) -> float:
        return self.values[(y, path.subtree_root)]


def check_request(g: Graph, req: ExcludeRequest, tree: ShortestPathTree | None = None) -> ShortestPathTree:
    if not 0 <= req.source < g.n:
        raise ValueError(f"source {req.source} out of range")
    tree = tree or build_sp_tree(g, req.source)
    for p in req.paths:
        validate_path(tree, p)
    if not is_independent(tree, req.paths):
        raise ValueError(f"paths for source {req.source} are not independent")
    return tree


def exclude_protocol(
    run: NetworkRun,
    graph: Graph,
    req: ExcludeRequest,
    cost_model: CostModel,
    base_tree: ShortestPathTree | None = None,
    unit_bfs: bool = False,
    store_key: str | None = STORE_KEY,
):
    """Protocol form, so many sources can share the network.

    ``graph`` may be the reversed graph; links are the same.  With
    ``base_tree`` the first SSSP is skipped (the tree is already known).
    """
    x = req.source
    tree = base_tree
    if tree is None:
        tree = yield from sssp_protocol(run, graph, x, cost_model)
    dist = tree.dist
    roots = {p.subtree_root: p for p in req.paths}
    if not roots:
        return ExcludeResult(x, [], {})

    # every vertex below P learns P's subtree root; the root knows it from its parent edge
    labels = yield from treecast_protocol(run, tree, {r: r for r in roots})

    # one round: reachable y tells out-neighbours (d(x,y), label)
    sends = []
    for y in range(graph.n):
        if dist[y] < float("inf"):
            lab = labels.get(y)
            words = 1 if lab is None else 2
            for z, _ in graph.out_adj[y]:
                sends.append(Message(y, z, (dist[y], lab), words))
    inbox = yield sends

    best: dict[int, float] = {z: INF for z in labels}
    for msg in inbox:
        z = msg.dst
        if z not in best:
            continue
        dv, lab = msg.payload
        if lab == labels[z]:
            continue
        if z in roots and msg.src == tree.parent[z]:
            continue  # first edge of P itself
        cand = dv + graph.weight(msg.src, z)
        if cand < best[z]:
            best[z] = cand

    banned = {e for p in req.paths for e in p.edges}
    allowed = lambda u, v: (u, v) not in banned
    virtual = {z: d for z, d in best.items() if d < INF}
    if unit_bfs:
        arrivals = {z: int(d) for z, d in virtual.items()}
        final, _ = yield from bfs_protocol(run, graph, [x], h=graph.n, allowed=allowed, arrivals=arrivals)
    else:
        final, _ = yield from sssp_protocol(run, graph, x, cost_model, allowed, virtual, with_parents=False)

    values = {(y, lab): final[y] for y, lab in labels.items()}
    if store_key is not None:
        for (y, lab), d in values.items():
            run.stores[y].setdefault(store_key, {})[(x, lab)] = d
    return ExcludeResult(x, list(req.paths), values)


def congestion_bound(n: int, cost_model: CostModel) -> int:
    # two SSSPs, the label downcast (1 word) and the 2-word exchange
    return 2 * cost_model.sssp_congestion_bound(n) + 3


def round_bound(n: int, cost_model: CostModel) -> int:
    return 2 * cost_model.sssp_round_bound(n) + n + 2


def exclude_single_source(
    run: NetworkRun,
    req: ExcludeRequest,
    cost_model: CostModel | None = None,
    unit_bfs: bool = False,
) -> ExcludeResult:
    cost_model = cost_model or CostModel.charged()
    g = run.graph
    check_request(g, req)
    if unit_bfs and not g.is_unit_weight():
        raise ValueError("the BFS variant needs unit weights")
    with run.phase("exclude"):
        return run.run(exclude_protocol(run, g, req, cost_model, unit_bfs=unit_bfs))


def exclude_multi_source(
    run: NetworkRun,
    reqs: Sequence[ExcludeRequest],
    cost_model: CostModel | None = None,
    seed: int | None = None,
    unit_bfs: bool = False,
) -> list[ExcludeResult]:
    """One exclude per request, all started after random delays on the same network."""
    cost_model = cost_model or CostModel.charged()
    g = run.graph
    for req in reqs:
        check_request(g, req)
    if unit_bfs and not g.is_unit_weight():
        raise ValueError("the BFS variant needs unit weights")
    protos = [exclude_protocol(run, g, req, cost_model, unit_bfs=unit_bfs) for req in reqs]
    results, _ = schedule_random_delays(
        run, protos, congestion_bound(g.n, cost_model), round_bound(g.n, cost_model), seed, name="exclude-multi"
    )
    return results


def random_independent_paths(
    tree: ShortestPathTree,
    rng: random.Random,
    max_paths: int = 4,
    max_len: int = 4,
) -> list[PathSpec]:
    """Random downward paths of ``tree`` whose hanging subtrees are disjoint."""
    cand = [v for v in range(tree.n) if tree.parent[v] is not None]
    rng.shuffle(cand)
    paths: list[PathSpec] = []
    taken: list[int] = []
    for r in cand:
        if len(paths) >= max_paths:
            break
        if any(tree.is_ancestor(a, r) or tree.is_ancestor(r, a) for a in taken):
            continue
        verts = [tree.parent[r], r]
        for _ in range(rng.randrange(max_len)):
            kids = tree.children[verts[-1]]
            if not kids:
                break
            verts.append(rng.choice(kids))
        paths.append(PathSpec.from_vertices(tree.root, verts))
        taken.append(r)
    return paths


# ---------------------------------------------------------------------------
# files


def read_requests(text: str) -> list[ExcludeRequest]:
    """Lines ``"source; path = v0 v1 ... vk"``; lines of one source are grouped."""
    by_src: dict[int, ExcludeRequest] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            head, tail = line.split(";", 1)
            key, verts = tail.split("=", 1)
            if key.strip() != "path":
                raise ValueError
            src = int(head)
            vs = [int(v) for v in verts.split()]
            path = PathSpec.from_vertices(src, vs)
        except (ValueError, GraphError):
            raise GraphError(f"bad request line {raw!r}", lineno) from None
        by_src.setdefault(src, ExcludeRequest(src)).paths.append(path)
    return list(by_src.values())


def write_requests(reqs: Iterable[ExcludeRequest]) -> str:
    lines = []
    for req in reqs:
        for p in req.paths:
            lines.append(f"{req.source}; path = {' '.join(map(str, p.vertices))}")
    return "\n".join(lines) + "\n"


def format_distance(d: float) -> str:
    return "INF" if d == INF else str(int(d))


def results_csv(results: Iterable[ExcludeResult]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["x", "y", "path_start", "path_root", "distance"])
    for res in results:
        start_of = {p.subtree_root: p.start_vertex for p in res.paths}
        for (y, root), d in sorted(res.values.items(), key=lambda kv: (kv[0][1], kv[0][0])):
            w.writerow([res.source, y, start_of[root], root, format_distance(d)])
    return buf.getvalue()
