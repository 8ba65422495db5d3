"""Synchronous CONGEST round engine, cost ledgers and the standard primitives.

Distributed algorithms are written as generator *protocols*.  A protocol
yields the list of :class:`Message` objects its nodes send in the current
round and receives back the messages delivered to them::

    inbox = yield [Message(u, v, payload, words), ...]

Yielding :class:`Idle` lets the protocol sit out a number of rounds without
traffic; returning ends it.  Protocol code keeps per-node state in plain
lists indexed by vertex and only lets node ``v`` act on what ``v`` has
received, so the round counts it produces are those of a real CONGEST run.

Several protocols can share one network (:meth:`NetworkRun.execute`); their
messages then compete for links.  Every link direction carries at most ``B``
words per round, the rest waits in a FIFO queue.  A protocol only advances to
its next round once all of its messages for the current round have arrived,
so queueing delays never change what a protocol computes, only when.
"""
from __future__ import annotations

import heapq
import io
import csv
import math
import random
from collections import Counter, deque
from contextlib import contextmanager
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable, NamedTuple, Sequence

from .graph import INF, EdgeFilter, Graph, ShortestPathTree, choose_parents, shortest_paths

#: fixed constant for the primitive cost envelopes (broadcast <= c(m+D) etc.)
ENGINE_C = 3


class Message(NamedTuple):
    src: int
    dst: int
    payload: Any
    words: int = 1


class Idle:
    __slots__ = ("rounds",)

    def __init__(self, rounds: int):
        self.rounds = max(0, int(rounds))


# process-wide tally, read by the test suite's final bandwidth audit
BANDWIDTH_AUDIT: Counter = Counter()


class BandwidthViolation(AssertionError):
    pass


class TopologyError(ValueError):
    pass


def clog2(n: int) -> int:
    return max(1, math.ceil(math.log2(max(n, 2))))


# ---------------------------------------------------------------------------
# cost accounting


@dataclass
class PhaseRow:
    phase: str
    rounds: int
    peak_congestion: int
    total_words: int


class CostLedger:
    """Round counter plus words carried per link direction."""

    def __init__(self, link_dirs: int):
        self.rounds = 0
        self.link_words: Counter = Counter()
        # words charged to every link direction at once (black-box SSSP charges)
        self.uniform = 0
        self.link_dirs = link_dirs
        self.rows: list[PhaseRow] = []
        self.warnings: list[str] = []

    def add(self, link: tuple[int, int], words: int) -> None:
        self.link_words[link] += words

    def words(self, link: tuple[int, int]) -> int:
        return self.link_words.get(link, 0) + self.uniform

    @property
    def peak_congestion(self) -> int:
        peak = max(self.link_words.values(), default=0)
        return peak + self.uniform

    @property
    def total_words(self) -> int:
        return sum(self.link_words.values()) + self.uniform * self.link_dirs

    def snapshot(self) -> tuple:
        return (
            self.rounds,
            tuple(sorted(self.link_words.items())),
            self.uniform,
            tuple((r.phase, r.rounds, r.peak_congestion, r.total_words) for r in self.rows),
            tuple(self.warnings),
        )

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["phase", "rounds", "peak_congestion", "total_words"])
        for r in self.rows:
            w.writerow([r.phase, r.rounds, r.peak_congestion, r.total_words])
        return buf.getvalue()


@dataclass
class CostModel:
    """How SSSP invocations are executed and charged.

    ``faithful`` runs Bellman-Ford message passing.  ``charged`` computes the
    same distances centrally and bills the ledger with the round and
    congestion costs of a low-congestion SSSP black box.
    """

    mode: str = "charged"
    charged_sssp_rounds: Callable[[int], int] = field(default=lambda n: n * clog2(n))
    charged_sssp_congestion: Callable[[int], int] = field(default=lambda n: clog2(n) ** 2)

    def __post_init__(self):
        if self.mode not in ("faithful", "charged"):
            raise ValueError(f"unknown cost model mode {self.mode!r}")

    @classmethod
    def faithful(cls) -> "CostModel":
        return cls(mode="faithful")

    @classmethod
    def charged(cls) -> "CostModel":
        return cls(mode="charged")

    @property
    def is_charged(self) -> bool:
        return self.mode == "charged"

    def sssp_congestion_bound(self, n: int) -> int:
        # faithful: <= n-1 improvements per node, then the 2-word parent exchange and a notify
        base = self.charged_sssp_congestion(n) if self.is_charged else n - 1
        return base + 3

    def sssp_round_bound(self, n: int) -> int:
        base = self.charged_sssp_rounds(n) if self.is_charged else n - 1
        return base + 4


# ---------------------------------------------------------------------------
# the network


class _Instance:
    __slots__ = ("idx", "gen", "pending", "inbox", "done", "result", "finish", "steps", "link_words")

    def __init__(self, idx, gen):
        self.idx = idx
        self.gen = gen
        self.pending = 0
        self.inbox: list[Message] = []
        self.done = False
        self.result = None
        self.finish = 0
        self.steps = 0
        self.link_words: Counter | None = None


class NetworkRun:
    """One simulated CONGEST network: topology, node stores and a ledger."""

    def __init__(self, graph: Graph, bandwidth: int = 1, seed: int = 0, engine_c: int = ENGINE_C,
                 simulate_broadcasts: bool = False):
        if bandwidth < 1:
            raise ValueError("bandwidth must be at least one word")
        self.graph = graph
        self.bandwidth = bandwidth
        self.seed = seed
        self.engine_c = engine_c
        self.rng = random.Random(seed)
        self.simulate_broadcasts = simulate_broadcasts
        self.stores: list[dict] = [dict() for _ in range(graph.n)]
        self._links = {(u, v) for u in range(graph.n) for v in graph.neighbors[u]}
        self.ledger = CostLedger(len(self._links))
        self._active: list[CostLedger] = [self.ledger]
        self._leader_tree: ShortestPathTree | None = None
        self.delivered_words = 0

    @property
    def n(self) -> int:
        return self.graph.n

    # -- accounting ------------------------------------------------------

    @contextmanager
    def phase(self, name: str):
        sub = CostLedger(len(self._links))
        self._active.append(sub)
        try:
            yield sub
        finally:
            self._active.remove(sub)
            row = PhaseRow(name, sub.rounds, sub.peak_congestion, sub.total_words)
            sub.rows.append(row)
            for led in self._active:
                led.rows.append(row)
                led.warnings.extend(sub.warnings)

    def charge_uniform(self, words: int) -> None:
        for led in self._active:
            led.uniform += words

    def warn(self, text: str) -> None:
        for led in self._active:
            led.warnings.append(text)

    def _charge_rounds(self, rounds: int) -> None:
        for led in self._active:
            led.rounds += rounds

    def _charge_link(self, link, words) -> None:
        for led in self._active:
            led.link_words[link] += words

    # -- execution -------------------------------------------------------

    def run(self, protocol) -> Any:
        return self.execute([protocol])[0]

    def execute(
        self,
        protocols: Sequence,
        delays: Sequence[int] | None = None,
        congestion_bound: int | None = None,
        round_bound: int | None = None,
    ) -> list:
        """Run protocols concurrently, instance ``i`` starting at ``delays[i]``.

        Returns the protocols' return values in order.  Rounds elapsed until the
        last instance finishes are added to the ledger.
        """
        B = self.bandwidth
        insts = [_Instance(i, g) for i, g in enumerate(protocols)]
        if congestion_bound is not None:
            for it in insts:
                it.link_words = Counter()
        delays = list(delays) if delays is not None else [0] * len(insts)
        wake: list[tuple[int, int]] = [(int(d), i) for i, d in enumerate(delays)]
        heapq.heapify(wake)
        queues: dict[tuple[int, int], deque] = {}
        t = 0
        remaining = len(insts)
        end = 0
        while remaining:
            while wake and wake[0][0] == t:
                _, i = heapq.heappop(wake)
                it = insts[i]
                inbox, it.inbox = it.inbox, []
                self._step(it, inbox, t, wake, queues)
                if it.done:
                    remaining -= 1
                    end = max(end, it.finish)
            if queues:
                finished = []
                for link, q in queues.items():
                    cap = B
                    while q and cap:
                        entry = q[0]
                        take = entry[0] if entry[0] < cap else cap
                        entry[0] -= take
                        cap -= take
                        it = entry[2]
                        if it.link_words is not None:
                            it.link_words[link] += take
                        if entry[0] == 0:
                            q.popleft()
                            it.inbox.append(entry[1])
                            it.pending -= 1
                            if it.pending == 0:
                                heapq.heappush(wake, (t + 1, it.idx))
                    used = B - cap
                    BANDWIDTH_AUDIT["link_rounds"] += 1
                    if used > B:
                        BANDWIDTH_AUDIT["violations"] += 1
                        raise BandwidthViolation(f"link {link} carried {used} > {B} words in one round")
                    self._charge_link(link, used)
                    self.delivered_words += used
                    if not q:
                        finished.append(link)
                for link in finished:
                    del queues[link]
            t += 1
            if not queues and wake and wake[0][0] > t:
                t = wake[0][0]
            if remaining and not queues and not wake:
                raise RuntimeError("protocol deadlock: instances waiting with nothing in flight")
        self._charge_rounds(end)
        for it in insts:
            if congestion_bound is not None and it.link_words:
                peak = max(it.link_words.values())
                if peak > congestion_bound:
                    self.warn(f"instance {it.idx}: congestion {peak} exceeds declared bound {congestion_bound}")
            if round_bound is not None and it.steps > round_bound:
                self.warn(f"instance {it.idx}: {it.steps} rounds exceed declared bound {round_bound}")
        return [it.result for it in insts]

    def _step(self, it: _Instance, inbox, t, wake, queues) -> None:
        send = inbox
        first = it.steps == 0 and not inbox and it.pending == 0
        while True:
            try:
                out = next(it.gen) if first else it.gen.send(send)
            except StopIteration as stop:
                it.done = True
                it.result = stop.value
                it.finish = t
                return
            first = False
            if isinstance(out, Idle):
                if out.rounds == 0:
                    send = []
                    continue
                it.steps += out.rounds
                heapq.heappush(wake, (t + out.rounds, it.idx))
                return
            it.steps += 1
            if not out:
                heapq.heappush(wake, (t + 1, it.idx))
                return
            for msg in out:
                link = (msg.src, msg.dst)
                if link not in self._links:
                    raise TopologyError(f"{msg.src} -> {msg.dst} is not a communication link")
                q = queues.get(link)
                if q is None:
                    q = queues[link] = deque()
                q.append([max(1, msg.words), msg, it])
            it.pending = len(out)
            return

    # -- helpers ---------------------------------------------------------

    def leader_tree(self) -> ShortestPathTree:
        """BFS tree of the communication graph rooted at vertex 0 (built once)."""
        if self._leader_tree is None:
            with self.phase("leader-bfs-tree"):
                self._leader_tree = self.run(bfs_tree_protocol(self, 0))
        return self._leader_tree


# ---------------------------------------------------------------------------
# protocols


def bellman_ford_protocol(
    run: NetworkRun,
    graph: Graph,
    source: int,
    h: int,
    allowed: EdgeFilter | None = None,
    virtual: dict[int, float] | None = None,
):
    """``h`` rounds of synchronous Bellman-Ford; returns ``(dist, hops)``.

    A node sends its tentative distance (one word) along its out-edges only in
    rounds right after it improved.  ``hops[v]`` is the round of the last
    improvement, i.e. the fewest edges on a minimum-weight ``<= h``-edge path.
    Entries of ``virtual`` act as edges from the source that node ``z`` applies
    locally in round one.
    """
    n = graph.n
    dist: list[float] = [INF] * n
    hops: list[float] = [INF] * n
    dist[source] = 0
    hops[source] = 0
    active = [source]
    virtual = {z: d for z, d in (virtual or {}).items() if d < INF}
    for r in range(1, h + 1):
        sends = []
        for u in active:
            du = dist[u]
            for v, _ in graph.out_adj[u]:
                if allowed is None or allowed(u, v):
                    sends.append(Message(u, v, du))
        if not sends and not (r == 1 and virtual):
            yield Idle(h - r + 1)
            break
        inbox = yield sends
        improved = set()
        if r == 1:
            for z, d in virtual.items():
                if d < dist[z]:
                    dist[z], hops[z] = d, 1
                    improved.add(z)
        for msg in inbox:
            cand = msg.payload + graph.weight(msg.src, msg.dst)
            if cand < dist[msg.dst]:
                dist[msg.dst] = cand
                hops[msg.dst] = r
                improved.add(msg.dst)
        active = sorted(improved)
    return dist, hops


def parent_protocol(run: NetworkRun, graph: Graph, source: int, dist, hops, allowed: EdgeFilter | None = None):
    """Each node shares ``(dist, hops)`` with out-neighbours and adopts a parent.

    Two rounds: the 2-word exchange, then a 1-word notification to the parent
    so every node knows its children.  Returns the tree.
    """
    sends = []
    for u in range(graph.n):
        if dist[u] < INF:
            for v, _ in graph.out_adj[u]:
                if allowed is None or allowed(u, v):
                    sends.append(Message(u, v, (dist[u], hops[u]), 2))
    heard: dict[int, list] = {}
    if sends:
        inbox = yield sends
        for msg in inbox:
            heard.setdefault(msg.dst, []).append(msg)
    parent: list[int | None] = [None] * graph.n
    for v, msgs in heard.items():
        if v == source or dist[v] == INF:
            continue
        best = None
        for msg in msgs:
            du, hu = msg.payload
            if du + graph.weight(msg.src, v) == dist[v] and hu + 1 == hops[v]:
                if best is None or msg.src < best:
                    best = msg.src
        parent[v] = best
    notes = [Message(v, p, "child") for v, p in enumerate(parent) if p is not None]
    if notes:
        yield notes
    return ShortestPathTree(root=source, parent=parent, dist=list(dist), depth=list(hops))


def sssp_protocol(
    run: NetworkRun,
    graph: Graph,
    source: int,
    cost_model: CostModel,
    allowed: EdgeFilter | None = None,
    virtual: dict[int, float] | None = None,
    with_parents: bool = True,
):
    """Exact SSSP; returns a tree, or ``(dist, hops)`` without parents."""
    n = graph.n
    if cost_model.is_charged:
        dist, hops = shortest_paths(graph, source, allowed, virtual)
        run.charge_uniform(cost_model.charged_sssp_congestion(n))
        yield Idle(cost_model.charged_sssp_rounds(n))
    else:
        dist, hops = yield from bellman_ford_protocol(run, graph, source, max(1, n - 1), allowed, virtual)
    if not with_parents:
        return dist, hops
    tree = yield from parent_protocol(run, graph, source, dist, hops, allowed)
    return tree


def bfs_protocol(
    run: NetworkRun,
    graph: Graph,
    sources: Iterable[int],
    h: float = INF,
    undirected: bool = False,
    allowed: EdgeFilter | None = None,
    arrivals: dict[int, int] | None = None,
):
    """Multi-source BFS; returns ``(hop distance, nearest source)`` per node.

    Node ``v`` is reached in round ``dist[v]`` and forwards its nearest source id
    (one word) in the next round; ties go to the smallest source id.
    ``arrivals[z] = r`` makes ``z`` count as reached from the first source in
    round ``r`` unless a real message got there earlier.
    """
    n = graph.n
    dist: list[float] = [INF] * n
    near: list[int | None] = [None] * n
    srcs = sorted(set(sources))
    for s in srcs:
        dist[s] = 0
        near[s] = s
    arrivals = dict(arrivals or {})
    late = sorted((r, z) for z, r in arrivals.items() if r < INF)
    frontier = srcs
    r = 0
    while r < h:
        if not frontier and not any(rr > r for rr, _ in late):
            break
        r += 1
        sends = []
        for u in frontier:
            nbrs = graph.neighbors[u] if undirected else [v for v, _ in graph.out_adj[u]]
            for v in nbrs:
                if allowed is None or allowed(u, v):
                    sends.append(Message(u, v, near[u]))
        inbox = yield sends
        reached: dict[int, int] = {}
        for msg in inbox:
            v = msg.dst
            if dist[v] == INF and (v not in reached or msg.payload < reached[v]):
                reached[v] = msg.payload
        for rr, z in late:
            if rr == r and dist[z] == INF and z not in reached:
                reached[z] = srcs[0]
        for v, s in reached.items():
            dist[v] = r
            near[v] = s
        frontier = sorted(reached)
    return dist, near


def bfs_tree_protocol(run: NetworkRun, root: int):
    """BFS tree of the undirected communication graph; parent = smallest id one level up."""
    g = run.graph
    dist, _ = yield from bfs_protocol(run, g, [root], undirected=True)
    parent: list[int | None] = [None] * g.n
    for v in range(g.n):
        if v != root and dist[v] < INF:
            parent[v] = min(u for u in g.neighbors[v] if dist[u] == dist[v] - 1)
    notes = [Message(v, p, "child") for v, p in enumerate(parent) if p is not None]
    if notes:
        yield notes
    return ShortestPathTree(root=root, parent=parent, dist=list(dist), depth=list(dist))


def convergecast_protocol(run: NetworkRun, tree: ShortestPathTree, fold: Callable, words: Callable | int = 1):
    """Leaves-to-root fold.  ``fold(v, reports)`` gives node ``v``'s value from
    the ``(child, value)`` pairs it received; ``v`` sends it to its parent once
    every child has reported."""
    n = tree.n
    waiting = [len(tree.children[v]) for v in range(n)]
    got: list[list] = [[] for _ in range(n)]
    values: dict[int, Any] = {}
    ready = sorted(v for v in range(n) if tree.reachable(v) and waiting[v] == 0)
    while ready:
        sends = []
        for v in ready:
            values[v] = fold(v, got[v])
            p = tree.parent[v]
            if p is not None:
                wv = words(values[v]) if callable(words) else words
                sends.append(Message(v, p, values[v], wv))
        if not sends:
            break
        inbox = yield sends
        ready = []
        for msg in inbox:
            got[msg.dst].append((msg.src, msg.payload))
            waiting[msg.dst] -= 1
            if waiting[msg.dst] == 0:
                ready.append(msg.dst)
        ready.sort()
    return values


def treecast_protocol(
    run: NetworkRun,
    tree: ShortestPathTree,
    initial: dict[int, Any],
    relabel: Callable | None = None,
    words: Callable | int = 1,
):
    """Root-to-leaves label propagation started at the nodes in ``initial``.

    A labelled node hands ``relabel(v, label, child)`` (default: its own label)
    to every child; ``None`` is not sent.  Returns labels of all nodes reached.
    """
    labels: dict[int, Any] = dict(initial)
    frontier = sorted(initial)
    while frontier:
        sends = []
        for v in frontier:
            for c in tree.children[v]:
                lab = relabel(v, labels[v], c) if relabel else labels[v]
                if lab is not None:
                    wv = words(lab) if callable(words) else words
                    sends.append(Message(v, c, lab, wv))
        if not sends:
            break
        inbox = yield sends
        frontier = []
        for msg in inbox:
            labels[msg.dst] = msg.payload
            frontier.append(msg.dst)
        frontier.sort()
    return labels


def downcast_protocol(run: NetworkRun, tree: ShortestPathTree, items: Sequence[tuple[int, Any, int]]):
    """Pipelined downcast of ``(target, payload, words)`` items.

    Each item is routed from the root to ``target`` and then copied through
    ``target``'s whole subtree; every tree link forwards one item per round in
    FIFO order.  Returns ``(received, errors)``: payloads held per node and the
    indices of items whose target is not in the tree.
    """
    n = tree.n
    received: list[list] = [[] for _ in range(n)]
    errors = [i for i, (tgt, _, _) in enumerate(items) if not (0 <= tgt < n and tree.reachable(tgt))]
    bad = set(errors)
    queues: dict[tuple[int, int], deque] = {}

    def route(v, item):
        tgt = item[0]
        if tree.is_ancestor(tgt, v):
            received[v].append(item[1])
            kids = tree.children[v]
        else:
            kids = [c for c in tree.children[v] if tree.is_ancestor(c, tgt)]
        for c in kids:
            queues.setdefault((v, c), deque()).append(item)

    for i, item in enumerate(items):
        if i not in bad:
            route(tree.root, item)
    while queues:
        sends = []
        for (v, c), q in sorted(queues.items()):
            item = q.popleft()
            sends.append(Message(v, c, item, item[2]))
        queues = {k: q for k, q in queues.items() if q}
        inbox = yield sends
        for msg in inbox:
            route(msg.dst, msg.payload)
    return received, errors


def gather_protocol(run: NetworkRun, tree: ShortestPathTree, items: Sequence[tuple[int, Any, int]]):
    """Move ``(origin, payload, words)`` items up to the root, one per link per round.

    Returns the payload list in the order the root ends up holding them.
    """
    order = sorted(range(len(items)), key=lambda i: i)
    queues: dict[int, deque] = {}
    at_root: list = []
    for i in order:
        origin, payload, w = items[i]
        if origin == tree.root:
            at_root.append((payload, w))
        else:
            queues.setdefault(origin, deque()).append((payload, w))
    while queues:
        sends = []
        for v in sorted(queues):
            payload, w = queues[v].popleft()
            sends.append(Message(v, tree.parent[v], (payload, w), w))
        queues = {v: q for v, q in queues.items() if q}
        inbox = yield sends
        for msg in inbox:
            if msg.dst == tree.root:
                at_root.append(msg.payload)
            else:
                queues.setdefault(msg.dst, deque()).append(msg.payload)
    return at_root


# ---------------------------------------------------------------------------
# operations (run a protocol and account for it as one phase)


@dataclass
class BroadcastResult:
    ledger: CostLedger
    unreached: list[int]
    payloads: list = field(default_factory=list)


def broadcast(run: NetworkRun, origin: int, items: Sequence, key: str = "broadcast") -> BroadcastResult:
    """Deliver one-word ``items`` from ``origin`` to every node it can reach.

    A BFS tree is grown from ``origin`` and the items are streamed down it.
    Nodes outside ``origin``'s component are reported in ``unreached``.
    """
    if not items:
        raise ValueError("broadcast needs at least one item")
    with run.phase("broadcast") as delta:
        tree = run.run(bfs_tree_protocol(run, origin))
        received, _ = run.run(downcast_protocol(run, tree, [(origin, it, 1) for it in items]))
    unreached = []
    for v in range(run.n):
        if tree.reachable(v):
            run.stores[v].setdefault(key, []).extend(received[v])
        else:
            unreached.append(v)
    return BroadcastResult(delta, unreached, list(items))


def _analytic_stream(run: NetworkRun, tree: ShortestPathTree, word_sizes: Sequence[int]) -> None:
    """Charge exactly what :func:`downcast_protocol` costs for items addressed to the root."""
    if not word_sizes:
        return
    B = run.bandwidth
    depth_links = Counter()
    for v in range(tree.n):
        p = tree.parent[v]
        if p is not None:
            depth_links[int(tree.depth[p])] += 1
    h = max(depth_links) + 1 if depth_links else 0
    M = len(word_sizes)
    rounds = 0
    for r in range(M + h - 1):
        lo, hi = max(0, r - h + 1), min(M - 1, r)
        worst = 0
        for i in range(lo, hi + 1):
            if depth_links.get(r - i):
                worst = max(worst, word_sizes[i])
        if worst:
            rounds += -(-worst // B)
    total = sum(word_sizes)
    run._charge_rounds(rounds)
    for v in range(tree.n):
        p = tree.parent[v]
        if p is not None:
            run._charge_link((p, v), total)
            run.delivered_words += total


def broadcast_many(run: NetworkRun, items: Sequence[tuple[int, Any, int]], name: str = "broadcast") -> list:
    """Pipelined broadcast of ``(origin, payload, words)`` items from many origins.

    Items are gathered at the leader of a BFS tree and streamed back down, so a
    batch of ``k`` constant-size items costs ``O(k + D)`` rounds and ``O(k)``
    words per link.  Returns the payloads in delivery order (the same at
    every node).  The downward stream is charged in closed form unless the run
    was created with ``simulate_broadcasts=True``; both give identical ledgers.
    """
    tree = run.leader_tree()
    with run.phase(name):
        gathered = run.run(gather_protocol(run, tree, items))
        if run.simulate_broadcasts:
            run.run(downcast_protocol(run, tree, [(tree.root, p, w) for p, w in gathered]))
        else:
            _analytic_stream(run, tree, [w for _, w in gathered])
    return [p for p, _ in gathered]


def upcast(run: NetworkRun, tree: ShortestPathTree, values: Sequence, combine: Callable) -> Any:
    """Fold per-node ``values`` with an associative ``combine`` up to the root."""

    def fold(v, kids):
        acc = values[v]
        for _, x in kids:
            acc = combine(acc, x)
        return acc

    with run.phase("upcast"):
        out = run.run(convergecast_protocol(run, tree, fold))
    return out[tree.root]


def downcast(run: NetworkRun, tree: ShortestPathTree, items: Sequence[tuple[int, Any]]):
    """Send ``(target, payload)`` items down ``tree``; returns ``(ledger, received, errors)``."""
    with run.phase("downcast") as delta:
        received, errors = run.run(downcast_protocol(run, tree, [(t, p, 1) for t, p in items]))
    for v, got in enumerate(received):
        if got:
            run.stores[v].setdefault("downcast", []).extend(got)
    return delta, received, errors


def bfs_multi(run: NetworkRun, sources: Iterable[int], h: float = INF):
    sources = list(sources)
    if not sources:
        raise ValueError("need at least one source")
    with run.phase("bfs-multi"):
        return run.run(bfs_protocol(run, run.graph, sources, h))


def bellman_ford(run: NetworkRun, source: int, h: int, g_view: EdgeFilter | None = None) -> list[float]:
    with run.phase("bellman-ford"):
        dist, _ = run.run(bellman_ford_protocol(run, run.graph, source, h, g_view))
    return dist


def sssp(run: NetworkRun, source: int, g_view: EdgeFilter | None = None,
         cost_model: CostModel | None = None) -> ShortestPathTree:
    cost_model = cost_model or CostModel.charged()
    with run.phase(f"sssp-{cost_model.mode}"):
        return run.run(sssp_protocol(run, run.graph, source, cost_model, g_view))


def random_delays(k: int, congestion: int, rng: random.Random) -> list[int]:
    if k <= 1:
        return [0] * k
    span = max(1, k * congestion)
    return [rng.randrange(span) for _ in range(k)]


def schedule_random_delays(
    run: NetworkRun,
    instances: Sequence,
    C: int,
    R: int | None = None,
    seed: int | None = None,
    name: str = "scheduled",
):
    """Run ``k`` protocols, each after a uniform random delay in ``[0, k*C)``.

    Returns ``(results, phase ledger)``.  An instance that puts more than
    ``C`` words on some link is reported in the ledger warnings.
    """
    rng = random.Random(seed) if seed is not None else run.rng
    delays = random_delays(len(instances), C, rng)
    with run.phase(name) as delta:
        results = run.execute(instances, delays, congestion_bound=C, round_bound=R)
    return results, delta


def apsp(run: NetworkRun, cost_model: CostModel, graph: Graph | None = None, name: str = "apsp") -> list[ShortestPathTree]:
    """Shortest-path trees from every vertex (``graph`` may be the reversed graph)."""
    graph = graph or run.graph
    n = graph.n
    protos = [sssp_protocol(run, graph, x, cost_model) for x in range(n)]
    trees, _ = schedule_random_delays(
        run, protos, cost_model.sssp_congestion_bound(n), cost_model.sssp_round_bound(n), name=name
    )
    return trees
