"""All-pairs second simple shortest paths.

After all-pairs distances, every source ``x`` runs one exclude over the edges
leaving it in ``T_x`` (they hang disjoint subtrees).  Node ``y`` then knows,
for every ``z``, the distance avoiding the first edge ``(z, a)`` of its tree
path from ``z``, and finishes with a local recursion::

    d2(z, y) = d(z, y, (z, y))                              if that edge is the path
    d2(z, y) = min(d(z, y, (z, a)), w(z, a) + d2(a, y))     otherwise

evaluated in order of increasing hop length, since ``a`` is one hop closer.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

from .exclude import ExcludeRequest, congestion_bound, exclude_protocol, round_bound
from .graph import INF, PathSpec
from .simulator import CostModel, NetworkRun, apsp, schedule_random_delays

STORE_KEY = "sisp_exclude"


@dataclass
class SispTable:
    n: int
    # d2[y][x] lives at node y
    d2: list[dict[int, float]]
    # (z, y) -> (DP iteration that fixed d2(z, y), iteration of the value it read; -1 for base cases)
    dp_trace: dict[tuple[int, int], tuple[int, int]] = field(default_factory=dict)

    def value(self, x: int, y: int) -> float:
        return self.d2[y][x]

    def matrix(self) -> list[list[float]]:
        return [[self.d2[y][x] for y in range(self.n)] for x in range(self.n)]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["x", "y", "d2"])
        for x in range(self.n):
            for y in range(self.n):
                d = self.d2[y][x]
                w.writerow([x, y, "INF" if d == INF else int(d)])
        return buf.getvalue()


def compute_2apsisp(run: NetworkRun, cost_model: CostModel | None = None, seed: int | None = None) -> SispTable:
    cost_model = cost_model or CostModel.charged()
    g = run.graph
    n = g.n
    with run.phase("sisp"):
        trees = apsp(run, cost_model, name="sisp-apsp")
        for y in range(n):
            run.stores[y]["sisp_in"] = [trees[z].dist[y] for z in range(n)]
            run.stores[y]["sisp_depth"] = [trees[z].depth[y] for z in range(n)]
        reqs = [
            ExcludeRequest(x, [PathSpec(x, x, ((x, a),)) for a in trees[x].children[x]]) for x in range(n)
        ]
        protos = [
            exclude_protocol(run, g, req, cost_model, base_tree=trees[req.source], store_key=STORE_KEY)
            for req in reqs
        ]
        schedule_random_delays(
            run, protos, congestion_bound(n, cost_model), round_bound(n, cost_model), seed, name="sisp-excludes"
        )
    table = SispTable(n, [dict() for _ in range(n)])
    for y in range(n):
        _local_dp(run, y, table)
    return table


def _local_dp(run: NetworkRun, y: int, table: SispTable) -> None:
    """Pure local computation at ``y``; charged no rounds."""
    st = run.stores[y]
    dist_in = st["sisp_in"]
    depth = st["sisp_depth"]
    avoid = {}  # z -> (a, d(z, y, (z, a)))
    for (z, a), d in st.get(STORE_KEY, {}).items():
        avoid[z] = (a, d)
    d2 = table.d2[y]
    order = sorted((depth[z], z) for z in range(table.n) if z != y and dist_in[z] < INF)
    for z in range(table.n):
        d2[z] = INF
    done: dict[int, int] = {}
    for t, z in order:
        a, d_first = avoid[z]
        t = int(t)
        if a == y:
            d2[z] = d_first
            table.dp_trace[(z, y)] = (t, -1)
        else:
            w_za = dist_in[z] - dist_in[a]
            d2[z] = min(d_first, w_za + d2[a])
            table.dp_trace[(z, y)] = (t, done[a])
        done[z] = t
