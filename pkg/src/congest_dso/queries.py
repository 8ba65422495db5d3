"""Replacement-distance queries, batches and their file formats."""
from __future__ import annotations

import csv
import io
import random
from dataclasses import dataclass
from typing import Iterable, Sequence

from .graph import INF, Graph, GraphError, build_sp_tree


@dataclass(frozen=True)
class Query:
    """Distance from ``x`` to ``y`` once edge ``(u, v)`` has failed."""

    x: int
    y: int
    u: int
    v: int

    @property
    def edge(self) -> tuple[int, int]:
        return (self.u, self.v)


QueryBatch = Sequence[Query]


@dataclass
class Answer:
    query: Query
    distance: float | None
    error: str | None = None
    case: str | None = None
    rounds_charged: int = 0

    @property
    def ok(self) -> bool:
        return self.error is None


def query_error(g: Graph, q: Query) -> str | None:
    for name, val in (("x", q.x), ("y", q.y)):
        if not (isinstance(val, int) and 0 <= val < g.n):
            return f"{name}={val} out of range"
    if not g.has_edge(q.u, q.v):
        return f"({q.u},{q.v}) is not an edge"
    return None


def random_queries(g: Graph, k: int, rng: random.Random, on_path: float = 0.75) -> list[Query]:
    """Mostly queries whose failed edge lies on the tree path from x to y."""
    trees = {}
    out = []
    edges = [(u, v) for u, v, _ in g.edges]
    while len(out) < k:
        x, y = rng.randrange(g.n), rng.randrange(g.n)
        if x not in trees:
            trees[x] = build_sp_tree(g, x)
        path = trees[x].path_edges(y) if trees[x].reachable(y) else []
        if path and rng.random() < on_path:
            u, v = rng.choice(path)
        else:
            u, v = rng.choice(edges)
        out.append(Query(x, y, u, v))
    return out


def random_long_queries(g: Graph, k: int, rng: random.Random, min_hops: int) -> list[Query]:
    """Queries whose failed edge sits at least ``min_hops`` hops from both ends
    of the tree path (falls back to shorter gaps when the trees are shallow)."""
    trees = [build_sp_tree(g, x) for x in range(g.n)]
    pool = [(x, y) for x in range(g.n) for y in range(g.n) if trees[x].depth[y] < INF]
    best = max((int(trees[x].depth[y]) for x, y in pool), default=0)
    need = min(2 * min_hops + 1, best)
    pool = [(x, y) for x, y in pool if trees[x].depth[y] >= need and need > 0]
    out = []
    for _ in range(k if pool else 0):
        x, y = rng.choice(pool)
        path = trees[x].path_edges(y)
        gap = min(min_hops, (len(path) - 1) // 2)
        u, v = path[rng.randint(gap, len(path) - 1 - gap)]
        out.append(Query(x, y, u, v))
    return out


def read_queries(text: str) -> list[Query]:
    out = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 4:
            raise GraphError("query line must be 'x y u v'", lineno)
        try:
            out.append(Query(*(int(p) for p in parts)))
        except ValueError:
            raise GraphError(f"expected integers, got {line!r}", lineno) from None
    return out


def write_queries(qs: Iterable[Query]) -> str:
    return "".join(f"{q.x} {q.y} {q.u} {q.v}\n" for q in qs)


def format_distance(d: float | None) -> str:
    if d is None:
        return "ERROR"
    return "INF" if d == INF else str(int(d))


def answers_csv(answers: Iterable[Answer], with_case: bool = False) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    head = ["x", "y", "u", "v", "distance", "rounds_charged"]
    if with_case:
        head.append("case")
    w.writerow(head)
    for a in answers:
        q = a.query
        row = [q.x, q.y, q.u, q.v, format_distance(a.distance), a.rounds_charged]
        if with_case:
            row.append(a.case or a.error or "")
        w.writerow(row)
    return buf.getvalue()
