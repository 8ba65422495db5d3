"""Directed weighted graphs, shortest-path trees and graph files.

Everything here is centralized and deterministic. The simulated (distributed)
versions of these computations live in :mod:`congest_dso.simulator`; they are
required to reproduce the exact same trees.
"""
from __future__ import annotations

import heapq
import math
import random
from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import dijkstra as _csgraph_dijkstra

INF = math.inf

Edge = tuple[int, int]
EdgeFilter = Callable[[int, int], bool]


class GraphError(ValueError):
    """Raised for malformed graphs or graph files."""

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class Graph:
    """Immutable directed graph on vertices ``0..n-1`` with integer weights.

    Adjacency lists are sorted by neighbour id so that every traversal order is
    a function of the edge set alone.
    """

    def __init__(self, n: int, edges: Iterable[tuple[int, int, int]], max_weight: int | None = None):
        if n < 1:
            raise GraphError("graph needs at least one vertex")
        self.n = n
        self.edges: list[tuple[int, int, int]] = []
        self._w: dict[Edge, int] = {}
        for u, v, w in edges:
            u, v = int(u), int(v)
            if not (0 <= u < n and 0 <= v < n):
                raise GraphError(f"edge ({u},{v}) has an endpoint outside 0..{n - 1}")
            if u == v:
                raise GraphError(f"self-loop at {u}")
            if (u, v) in self._w:
                raise GraphError(f"duplicate edge ({u},{v})")
            if int(w) != w or w < 0:
                raise GraphError(f"edge ({u},{v}) weight {w} is not a non-negative integer")
            if max_weight is not None and w > max_weight:
                raise GraphError(f"edge ({u},{v}) weight {w} exceeds W={max_weight}")
            self._w[(u, v)] = int(w)
            self.edges.append((u, v, int(w)))
        self.out_adj: list[list[tuple[int, int]]] = [[] for _ in range(n)]
        self.in_adj: list[list[tuple[int, int]]] = [[] for _ in range(n)]
        for u, v, w in self.edges:
            self.out_adj[u].append((v, w))
            self.in_adj[v].append((u, w))
        for lst in self.out_adj:
            lst.sort()
        for lst in self.in_adj:
            lst.sort()
        nb: list[set[int]] = [set() for _ in range(n)]
        for u, v, _ in self.edges:
            nb[u].add(v)
            nb[v].add(u)
        self.neighbors: list[list[int]] = [sorted(s) for s in nb]
        self._reversed: Graph | None = None

    @property
    def m(self) -> int:
        return len(self.edges)

    def weight(self, u: int, v: int) -> int:
        return self._w[(u, v)]

    def has_edge(self, u: int, v: int) -> bool:
        return (u, v) in self._w

    @property
    def max_weight(self) -> int:
        return max((w for _, _, w in self.edges), default=0)

    def is_unit_weight(self) -> bool:
        return all(w == 1 for _, _, w in self.edges)

    def links(self) -> list[Edge]:
        """Undirected communication links as sorted pairs ``(min, max)``."""
        return sorted({(min(u, v), max(u, v)) for u, v, _ in self.edges})

    def reversed(self) -> "Graph":
        if self._reversed is None:
            g = Graph(self.n, [(v, u, w) for u, v, w in self.edges])
            g._reversed = self
            self._reversed = g
        return self._reversed

    def undirected_hops(self, source: int) -> list[float]:
        dist: list[float] = [INF] * self.n
        dist[source] = 0
        q = deque([source])
        while q:
            u = q.popleft()
            for v in self.neighbors[u]:
                if dist[v] == INF:
                    dist[v] = dist[u] + 1
                    q.append(v)
        return dist

    def undirected_diameter(self) -> float:
        """Hop diameter of the underlying undirected graph (INF if disconnected)."""
        return max(max(self.undirected_hops(s)) for s in range(self.n))

    def is_connected(self) -> bool:
        return max(self.undirected_hops(0)) < INF

    def __eq__(self, other) -> bool:
        return isinstance(other, Graph) and self.n == other.n and self._w == other._w

    def __hash__(self):
        return hash((self.n, frozenset(self._w.items())))

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.m})"


def without_edges(removed: Iterable[Edge]) -> EdgeFilter:
    removed = frozenset(removed)
    return lambda u, v: (u, v) not in removed


# ---------------------------------------------------------------------------
# shortest paths


def shortest_paths(
    g: Graph,
    source: int,
    allowed: EdgeFilter | None = None,
    virtual: dict[int, float] | None = None,
) -> tuple[list[float], list[float]]:
    """Distances and hop counts from ``source``.

    Ties are broken towards fewer hops, so ``hops[v]`` is the smallest number of
    edges on any shortest ``source``-``v`` path. ``virtual`` adds one-hop edges
    ``source -> z`` of the given weights that exist only for this computation.
    """
    dist: list[float] = [INF] * g.n
    hops: list[float] = [INF] * g.n
    dist[source] = 0
    hops[source] = 0
    heap = [(0, 0, source)]
    for z, d in (virtual or {}).items():
        if d < INF and (d, 1) < (dist[z], hops[z]):
            dist[z], hops[z] = d, 1
            heap.append((d, 1, z))
    heapq.heapify(heap)
    while heap:
        d, h, u = heapq.heappop(heap)
        if (d, h) != (dist[u], hops[u]):
            continue
        for v, w in g.out_adj[u]:
            if allowed is not None and not allowed(u, v):
                continue
            key = (d + w, h + 1)
            if key < (dist[v], hops[v]):
                dist[v], hops[v] = key
                heapq.heappush(heap, (d + w, h + 1, v))
    return dist, hops


def choose_parents(
    g: Graph,
    source: int,
    dist: Sequence[float],
    hops: Sequence[float],
    allowed: EdgeFilter | None = None,
) -> list[int | None]:
    """Parent of ``v``: the smallest-id tight in-neighbour one hop closer to the root."""
    parent: list[int | None] = [None] * g.n
    for v in range(g.n):
        if v == source or dist[v] == INF:
            continue
        for u, w in g.in_adj[v]:  # sorted by id
            if allowed is not None and not allowed(u, v):
                continue
            if dist[u] + w == dist[v] and hops[u] + 1 == hops[v]:
                parent[v] = u
                break
    return parent


@dataclass
class ShortestPathTree:
    root: int
    parent: list[int | None]
    dist: list[float]
    depth: list[float]
    subtree_size: list[int] = field(default_factory=list)
    children: list[list[int]] = field(default_factory=list)
    pre: list[int] = field(default_factory=list)
    post: list[int] = field(default_factory=list)

    def __post_init__(self):
        n = len(self.parent)
        self.children = [[] for _ in range(n)]
        for v, p in enumerate(self.parent):
            if p is not None:
                self.children[p].append(v)
        self.subtree_size = [0] * n
        self.pre = [-1] * n
        self.post = [-1] * n
        # iterative DFS, children in id order
        order = []
        stack = [self.root]
        counter = 0
        while stack:
            u = stack.pop()
            self.pre[u] = counter
            counter += 1
            order.append(u)
            stack.extend(reversed(self.children[u]))
        for u in reversed(order):
            self.subtree_size[u] = 1 + sum(self.subtree_size[c] for c in self.children[u])
            self.post[u] = self.pre[u] + self.subtree_size[u] - 1

    @property
    def n(self) -> int:
        return len(self.parent)

    def reachable(self, v: int) -> bool:
        return self.dist[v] < INF

    @property
    def height(self) -> int:
        return int(max(d for d in self.depth if d < INF))

    def is_ancestor(self, a: int, b: int) -> bool:
        """True if ``a`` is ``b`` or lies above it."""
        if not (self.reachable(a) and self.reachable(b)):
            return False
        return self.pre[a] <= self.pre[b] <= self.post[a]

    def has_edge(self, u: int, v: int) -> bool:
        return self.parent[v] == u

    def subtree(self, v: int) -> list[int]:
        out, stack = [], [v]
        while stack:
            u = stack.pop()
            out.append(u)
            stack.extend(self.children[u])
        return sorted(out)

    def path_edges(self, v: int) -> list[Edge]:
        """Tree edges from the root down to ``v``."""
        out = []
        while self.parent[v] is not None:
            out.append((self.parent[v], v))
            v = self.parent[v]
        return out[::-1]

    def reachable_count(self) -> int:
        return sum(1 for d in self.dist if d < INF)


def tree_from_labels(g: Graph, root: int, dist, hops, allowed: EdgeFilter | None = None) -> ShortestPathTree:
    parent = choose_parents(g, root, dist, hops, allowed)
    return ShortestPathTree(root=root, parent=parent, dist=list(dist), depth=list(hops))


def build_sp_tree(g: Graph, root: int) -> ShortestPathTree:
    if not 0 <= root < g.n:
        raise GraphError(f"root {root} out of range")
    dist, hops = shortest_paths(g, root)
    return tree_from_labels(g, root, dist, hops)


def distance_table(
    g: Graph,
    sources: Sequence[int],
    keep: np.ndarray | None = None,
    reverse: bool = False,
) -> np.ndarray:
    """Float distance rows for many sources at once, ``inf`` for unreachable.

    ``keep`` is a boolean mask over ``g.edges``; ``reverse`` measures distances
    *to* each source instead of from it.
    """
    if len(sources) == 0:
        return np.zeros((0, g.n))
    arr = _edge_arrays(g)
    src, dst, wt = arr
    if keep is not None:
        src, dst, wt = src[keep], dst[keep], wt[keep]
    if reverse:
        src, dst = dst, src
    mat = csr_matrix((wt, (src, dst)), shape=(g.n, g.n))
    return _csgraph_dijkstra(mat, directed=True, indices=list(sources))


def _edge_arrays(g: Graph):
    cached = getattr(g, "_arrays", None)
    if cached is None:
        src = np.array([u for u, _, _ in g.edges], dtype=np.int64)
        dst = np.array([v for _, v, _ in g.edges], dtype=np.int64)
        wt = np.array([w for _, _, w in g.edges], dtype=np.float64)
        cached = (src, dst, wt)
        g._arrays = cached
    return cached


# ---------------------------------------------------------------------------
# paths on trees


@dataclass(frozen=True)
class PathSpec:
    """A downward subpath of ``T_source`` starting at ``start_vertex``."""

    source: int
    start_vertex: int
    edges: tuple[Edge, ...]

    @classmethod
    def from_vertices(cls, source: int, vertices: Sequence[int]) -> "PathSpec":
        if len(vertices) < 2:
            raise GraphError("a path needs at least one edge")
        edges = tuple(zip(vertices[:-1], vertices[1:]))
        return cls(source, vertices[0], edges)

    @property
    def subtree_root(self) -> int:
        """Second vertex of the path: root of the hanging subtree ``T_x(P)``."""
        return self.edges[0][1]

    @property
    def vertices(self) -> list[int]:
        return [self.edges[0][0]] + [v for _, v in self.edges]


def validate_path(t: ShortestPathTree, p: PathSpec) -> None:
    if p.source != t.root:
        raise GraphError(f"path rooted at {p.source}, tree at {t.root}")
    if not p.edges:
        raise GraphError("empty path")
    if p.edges[0][0] != p.start_vertex:
        raise GraphError(f"path start {p.start_vertex} does not match first edge {p.edges[0]}")
    for (a, b), (c, d) in zip(p.edges, p.edges[1:]):
        if b != c:
            raise GraphError(f"edges {(a, b)} and {(c, d)} do not share an endpoint")
    for u, v in p.edges:
        if not t.has_edge(u, v):
            raise GraphError(f"edge ({u},{v}) is not on the tree rooted at {t.root}")


def is_independent(t: ShortestPathTree, paths: Iterable[PathSpec]) -> bool:
    """Pairwise disjointness of the hanging subtrees ``T_x(P)``."""
    roots = []
    for p in paths:
        validate_path(t, p)
        roots.append(p.subtree_root)
    # subtrees are disjoint iff no root lies in another's subtree; sort by preorder
    roots.sort(key=lambda r: t.pre[r])
    for a, b in zip(roots, roots[1:]):
        if t.pre[b] <= t.post[a]:
            return False
    return True


# ---------------------------------------------------------------------------
# generation and files


def generate_random(
    n: int,
    m: int,
    max_w: int,
    seed: int,
    min_w: int = 1,
    connected: bool = True,
) -> Graph:
    """Random simple digraph with ``m`` edges and weights in ``[min_w, max_w]``.

    With ``connected`` (and ``m >= n - 1``) a randomly oriented spanning tree is
    laid down first so the communication network is connected.
    """
    if m > n * (n - 1):
        raise GraphError(f"m={m} exceeds n(n-1)={n * (n - 1)}")
    rng = random.Random(seed)
    chosen: dict[Edge, int] = {}
    if connected and n > 1:
        if m < n - 1:
            raise GraphError(f"m={m} too small for a connected graph on {n} vertices")
        order = list(range(n))
        rng.shuffle(order)
        for i in range(1, n):
            a, b = order[i], order[rng.randrange(i)]
            if rng.random() < 0.5:
                a, b = b, a
            chosen[(a, b)] = rng.randint(min_w, max_w)
    if m > n * (n - 1) // 2:
        pool = [(u, v) for u in range(n) for v in range(n) if u != v and (u, v) not in chosen]
        rng.shuffle(pool)
        for e in pool[: m - len(chosen)]:
            chosen[e] = rng.randint(min_w, max_w)
    else:
        while len(chosen) < m:
            u, v = rng.randrange(n), rng.randrange(n)
            if u != v and (u, v) not in chosen:
                chosen[(u, v)] = rng.randint(min_w, max_w)
    return Graph(n, [(u, v, w) for (u, v), w in chosen.items()])


def generate_deep(n: int, m: int, seed: int, stretch: int = 3) -> Graph:
    """Random digraph whose shortest-path trees are deep.

    A random Hamiltonian path with unit weights is laid down first; every other
    edge jumping ``j`` positions along it gets a weight in
    ``[j - 1, stretch * j]``, so shortcuts exist but rarely win by much.
    """
    if m > n * (n - 1) or m < n - 1:
        raise GraphError(f"m={m} out of range for n={n}")
    rng = random.Random(seed)
    order = list(range(n))
    rng.shuffle(order)
    pos = {v: i for i, v in enumerate(order)}
    chosen = {(order[i], order[i + 1]): 1 for i in range(n - 1)}
    while len(chosen) < m:
        u, v = rng.randrange(n), rng.randrange(n)
        if u == v or (u, v) in chosen:
            continue
        j = abs(pos[v] - pos[u])
        chosen[(u, v)] = rng.randint(max(0, j - 1), stretch * j)
    return Graph(n, [(u, v, w) for (u, v), w in chosen.items()])


def read_graph(data: bytes | str) -> Graph:
    """Parse ``"n m"`` followed by ``m`` lines ``"u v w"``; ``#`` starts a comment."""
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    header = None
    edges = []
    for lineno, raw in enumerate(data.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        try:
            nums = [int(x) for x in parts]
        except ValueError:
            raise GraphError(f"expected integers, got {line!r}", lineno) from None
        if header is None:
            if len(nums) != 2:
                raise GraphError("header must be 'n m'", lineno)
            header = nums
            continue
        if len(nums) != 3:
            raise GraphError("edge line must be 'u v w'", lineno)
        edges.append((lineno, nums))
    if header is None:
        raise GraphError("empty graph file")
    n, m = header
    if len(edges) != m:
        raise GraphError(f"header announces {m} edges, found {len(edges)}")
    seen = set()
    out = []
    for lineno, (u, v, w) in edges:
        if not (0 <= u < n and 0 <= v < n):
            raise GraphError(f"vertex out of range 0..{n - 1}", lineno)
        if u == v:
            raise GraphError("self-loop", lineno)
        if (u, v) in seen:
            raise GraphError(f"duplicate edge ({u},{v})", lineno)
        if w < 0:
            raise GraphError("negative weight", lineno)
        seen.add((u, v))
        out.append((u, v, w))
    return Graph(n, out)


def write_graph(g: Graph) -> bytes:
    lines = [f"{g.n} {g.m}"] + [f"{u} {v} {w}" for u, v, w in g.edges]
    return ("\n".join(lines) + "\n").encode("utf-8")
