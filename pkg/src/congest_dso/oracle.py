"""Centralized brute-force reference answers.

Nothing here imports the shortest-path code used by the distributed
algorithms; the searches are written from scratch so that they act as an
independent check.
"""
from __future__ import annotations

import heapq
import math
from typing import Iterable, Sequence

INF = math.inf


def _adj(g, banned=frozenset()):
    out = [[] for _ in range(g.n)]
    for u, v, w in g.edges:
        if (u, v) not in banned:
            out[u].append((v, w))
    return out


def _dijkstra(n, adj, s):
    dist = [INF] * n
    dist[s] = 0
    pq = [(0, s)]
    while pq:
        d, u = heapq.heappop(pq)
        if d > dist[u]:
            continue
        for v, w in adj[u]:
            nd = d + w
            if nd < dist[v]:
                dist[v] = nd
                heapq.heappush(pq, (nd, v))
    return dist


def _check_vertex(g, v):
    if not (isinstance(v, int) and 0 <= v < g.n):
        raise ValueError(f"vertex {v!r} out of range")


def _check_edge(g, e):
    u, v = e
    if not g.has_edge(u, v):
        raise ValueError(f"({u},{v}) is not an edge")


def sp(g, s: int) -> list[float]:
    _check_vertex(g, s)
    return _dijkstra(g.n, _adj(g), s)


def excluded(g, s: int, path_edges: Iterable[tuple[int, int]]) -> list[float]:
    """Distances from ``s`` once every edge in ``path_edges`` is deleted."""
    _check_vertex(g, s)
    banned = frozenset(tuple(e) for e in path_edges)
    for e in banned:
        _check_edge(g, e)
    return _dijkstra(g.n, _adj(g, banned), s)


def rp(g, s: int, t: int, e: tuple[int, int]) -> float:
    _check_vertex(g, t)
    return excluded(g, s, [e])[t]


def ksssp(g, sources: Sequence[int]) -> dict[int, list[float]]:
    adj = _adj(g)
    for s in sources:
        _check_vertex(g, s)
    return {s: _dijkstra(g.n, adj, s) for s in sources}


def hop_limited(g, s: int, h: int, banned: Iterable[tuple[int, int]] = ()) -> list[float]:
    """Minimum weight over ``s``-paths with at most ``h`` edges (table DP)."""
    _check_vertex(g, s)
    banned = frozenset(banned)
    cur = [INF] * g.n
    cur[s] = 0
    for _ in range(h):
        nxt = list(cur)
        for u, v, w in g.edges:
            if (u, v) not in banned and cur[u] + w < nxt[v]:
                nxt[v] = cur[u] + w
        cur = nxt
    return cur


def shortest_path(g, s: int, t: int, tie_break: str = "min") -> list[tuple[int, int]] | None:
    """One shortest ``s``-``t`` path as an edge list.

    Among paths of minimum weight it takes one with the fewest edges, and then
    walks back from ``t`` picking the smallest (``"min"``) or largest
    (``"max"``) id predecessor that keeps both weight and edge count tight.
    """
    n = g.n
    dist = [INF] * n
    hops = [INF] * n
    dist[s], hops[s] = 0, 0
    adj = _adj(g)
    pq = [(0, 0, s)]
    while pq:
        d, h, u = heapq.heappop(pq)
        if (d, h) > (dist[u], hops[u]):
            continue
        for v, w in adj[u]:
            cand = (d + w, h + 1)
            if cand < (dist[v], hops[v]):
                dist[v], hops[v] = cand
                heapq.heappush(pq, (d + w, h + 1, v))
    if dist[t] == INF:
        return None
    preds = [[] for _ in range(n)]
    for u, v, w in g.edges:
        if dist[u] + w == dist[v] and hops[u] + 1 == hops[v]:
            preds[v].append(u)
    pick = min if tie_break == "min" else max
    path = []
    v = t
    while v != s:
        u = pick(preds[v])
        path.append((u, v))
        v = u
    return path[::-1]


def sisp2(g, s: int, t: int, tie_break: str = "min") -> float:
    """Second simple shortest path distance: min over path edges of d(s,t,e)."""
    _check_vertex(g, s)
    _check_vertex(g, t)
    if s == t:
        return INF
    path = shortest_path(g, s, t, tie_break)
    if path is None:
        return INF
    return min((rp(g, s, t, e) for e in path), default=INF)


def sisp2_all_edges(g, s: int, t: int) -> float:
    """Same quantity, taking the minimum over the edges of *every* shortest path.

    Only valid for positive weights: with zero-weight cycles an edge can be
    tight without lying on any simple shortest path.
    """
    if s == t:
        return INF
    fwd = sp(g, s)
    if fwd[t] == INF:
        return INF
    rev_adj = [[] for _ in range(g.n)]
    for u, v, w in g.edges:
        rev_adj[v].append((u, w))
    back = _dijkstra(g.n, rev_adj, t)
    best = INF
    for u, v, w in g.edges:
        if fwd[u] + w + back[v] == fwd[t]:
            best = min(best, rp(g, s, t, (u, v)))
    return best


def sisp2_bruteforce(g, s: int, t: int) -> float:
    """Enumerate simple paths; second smallest weight over distinct paths (tiny graphs only)."""
    if s == t:
        return INF
    adj = _adj(g)
    weights = []
    seen = [False] * g.n

    def dfs(u, acc):
        if u == t:
            weights.append(acc)
            return
        seen[u] = True
        for v, w in adj[u]:
            if not seen[v]:
                dfs(v, acc + w)
        seen[u] = False

    dfs(s, 0)
    weights.sort()
    return weights[1] if len(weights) > 1 else INF


def sisp2_table(g, tie_break: str = "min") -> list[list[float]]:
    return [[sisp2(g, x, y, tie_break) for y in range(g.n)] for x in range(g.n)]


def replacement_hops(g, s: int, t: int, e: tuple[int, int]) -> float:
    """Fewest edges on a minimum-weight ``s``-``t`` path avoiding ``e``."""
    n = g.n
    d_full = rp(g, s, t, e)
    if d_full == INF:
        return INF
    banned = frozenset([tuple(e)])
    h = 0
    cur = [INF] * n
    cur[s] = 0
    while cur[t] != d_full:
        h += 1
        nxt = list(cur)
        for u, v, w in g.edges:
            if (u, v) not in banned and cur[u] + w < nxt[v]:
                nxt[v] = cur[u] + w
        cur = nxt
    return h
