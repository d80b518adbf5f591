"""Distance and cycle computations that mix local flooding with global aggregation."""

from __future__ import annotations

import heapq
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .graph import INF, Graph, GraphError, id_bits
from .primitives import Result, _network, aggregate_and_broadcast, chunked_sum, token_dissemination
from .simcore import HybridConfig, Network, node_rng


@dataclass(frozen=True)
class SourceSet:
    """Explicit sources, or every node sampled with probability ``n^(x-1)``."""

    sources: tuple[int, ...] = ()
    mode: str = "explicit"
    x: float = 1.0

    def resolve(self, n: int, seed: int) -> list[int]:
        if self.mode == "explicit":
            return sorted(set(self.sources))
        if self.mode == "sampled":
            p = n ** (self.x - 1)
            return [u for u in range(1, n + 1) if node_rng(seed, u, 0x5A).random() < p]
        raise ValueError(f"unknown source mode {self.mode!r}")


def multi_source_sssp(graph: Graph, sources: SourceSet | list[int], config: HybridConfig | None = None,
                      *, net: Network | None = None) -> Result:
    """Exact distance from every source at every node.

    Synchronous Bellman-Ford flooded over local edges, all sources batched
    in one pass; a node forwards only the entries that improved.  Output per
    node: ``{source: distance}``.
    """
    net = _network(graph, config, net, "multi_source_sssp")
    if not isinstance(sources, SourceSet):
        sources = SourceSet(tuple(sources))
    S = sources.resolve(graph.n, net.config.seed)
    n = graph.n
    if not S:
        return Result({u: {} for u in graph.nodes}, net.trace, {"sources": []})
    arcs = list(graph.iter_arcs())
    us = np.array([a[0] - 1 for a in arcs], dtype=np.int64)
    vs = np.array([a[1] - 1 for a in arcs], dtype=np.int64)
    ws = np.array([a[2] for a in arcs], dtype=float)
    D = np.full((len(S), n), INF)
    for i, s in enumerate(S):
        D[i, s - 1] = 0.0
    changed = np.zeros((len(S), n), dtype=bool)
    for i, s in enumerate(S):
        changed[i, s - 1] = True
    entry_bits = id_bits(n) + 2 * id_bits(n) + id_bits(int(max(ws, default=1)))
    with net.phase("sssp"):
        while changed.any() and len(arcs):
            sending = changed[:, us]
            per_arc = sending.sum(axis=0)
            cand = np.where(sending, D[:, us] + ws, INF)
            newD = D.copy()
            np.minimum.at(newD.T, vs, cand.T)
            net.local_bulk(total_bits=int(per_arc.sum()) * entry_bits,
                           max_arc_bits=int(per_arc.max(initial=0)) * entry_bits)
            changed = newD < D
            D = newD
    out = {u: {s: float(D[i, u - 1]) for i, s in enumerate(S)} for u in graph.nodes}
    return Result(out, net.trace, {"sources": S, "matrix": D})


def _l_nearest(graph: Graph, w: int, L: int) -> list[int]:
    """The ``L`` nodes closest to ``w`` (``w`` included), ties broken by ID."""
    dist = {w: 0}
    heap = [(0, w)]
    done: list[int] = []
    seen = set()
    while heap and len(done) < L:
        d, x = heapq.heappop(heap)
        if x in seen:
            continue
        seen.add(x)
        done.append(x)
        for y, wt in graph.neighbors(x):
            nd = d + wt
            if nd < dist.get(y, INF):
                dist[y] = nd
                heapq.heappush(heap, (nd, y))
    return done


def rv_diameter(graph: Graph, config: HybridConfig | None = None, *, c: float = 4.0,
                net: Network | None = None) -> Result:
    """Diameter estimate ``D'`` with ``ceil(2D/3) <= D' <= D`` with high probability.

    Samples ``S`` with probability ``min(1, c log2 n / L)``, ``L = ceil(n^(1/3))``,
    finds the node ``w`` farthest from ``S``, and takes the largest distance
    seen from ``S`` and from ``w``'s ``L``-nearest ball expanded by one hop.
    """
    if graph.directed or not graph.connected:
        raise GraphError("rv_diameter needs a connected undirected graph")
    net = _network(graph, config, net, "rv_diameter")
    n = graph.n
    logn = math.log2(max(n, 2))
    if graph.max_degree > max(4.0, logn ** 2):
        warnings.warn("rv_diameter is intended for polylog maximum degree", RuntimeWarning)
    L = max(1, math.ceil(round(n ** (1 / 3), 9)))
    p = min(1.0, c * logn / L)
    draws = {u: node_rng(net.config.seed, u, 0x52).random() for u in graph.nodes}
    S = [u for u in graph.nodes if draws[u] < p]
    if not S:
        S = [min(graph.nodes, key=lambda u: (draws[u], u))]
    first = multi_source_sssp(graph, S, net=net)
    to_s = {u: min(first.outputs[u].values()) for u in graph.nodes}
    far = aggregate_and_broadcast(graph, None, {u: (to_s[u], u) for u in graph.nodes}, "MAX", net=net)
    w = far.outputs[1][1]
    with net.phase("ball"):
        net.charge_local(L + 1, reason="L-nearest ball and expansion")
    ball = _l_nearest(graph, w, L)
    expanded = sorted(set(ball) | {y for x in ball for y, _ in graph.neighbors(x)})
    flag = len(expanded) > 4 * L * max(1.0, logn)
    td = token_dissemination(graph, None, {w: expanded}, id_bits(n), net=net)
    ts = td.info["tokens"]
    if not ts.all_complete():
        raise RuntimeError("ball identifiers were not delivered everywhere")
    second = multi_source_sssp(graph, expanded, net=net)
    local_max = {u: max(max(first.outputs[u].values()), max(second.outputs[u].values()))
                 for u in graph.nodes}
    est = aggregate_and_broadcast(graph, None, local_max, "MAX", net=net).outputs
    net.trace.extra.update(L=L, sample=len(S), w=w, ball=len(expanded), large_ball=flag)
    return Result(est, net.trace, {"S": S, "w": w, "ball": expanded, "L": L, "large_ball": flag})


# ---------------------------------------------------------------------------
# cycles

def _bfs_depth(graph: Graph, u: int, depth: int) -> dict[int, int]:
    dist = {u: 0}
    frontier = [u]
    for d in range(1, depth + 1):
        nxt = []
        for x in frontier:
            for y, _ in graph.neighbors(x):
                if y not in dist:
                    dist[y] = d
                    nxt.append(y)
        frontier = nxt
    return dist


def _cycles_through(graph: Graph, u: int, r: int, t: int, min_id: bool) -> int:
    """Directed count of ``r``-cycles through ``u`` using edges visible after ``t`` flood rounds.

    An edge is visible when one endpoint lies within ``t`` hops of ``u``.
    With ``min_id`` only cycles whose smallest node is ``u`` are counted.
    """
    dist = _bfs_depth(graph, u, t + 1)
    adj = {}

    def nbrs(x):
        if x not in adj:
            adj[x] = [y for y, _ in graph.neighbors(x)
                      if y in dist and (dist[x] <= t or dist[y] <= t) and (not min_id or y >= u)]
        return adj[x]

    count = 0
    path = [u]
    on = {u}

    def dfs(x):
        nonlocal count
        if len(path) == r:
            if u in nbrs(x):
                count += 1
            return
        for y in nbrs(x):
            if y != u and y not in on:
                path.append(y)
                on.add(y)
                dfs(y)
                path.pop()
                on.discard(y)

    dfs(u)
    return count


def _flood(graph: Graph, net: Network, t: int):
    with net.phase("flood"):
        net.charge_local(t, bits=t * 2 * graph.m * graph.token_bits(), reason="adjacency flooding")


def detect_cycle(graph: Graph, r: int, config: HybridConfig | None = None, *,
                 net: Network | None = None) -> Result:
    """Whether an ``r``-cycle exists, known at every node.

    ``floor((r-1)/2)`` flood rounds reveal every ``r``-cycle through a node;
    the OR is a MAX aggregate over a high-fanout tree.
    """
    if r < 3:
        raise ValueError("r must be at least 3")
    net = _network(graph, config, net, "detect_cycle")
    t = (r - 1) // 2
    _flood(graph, net, t)
    positive = {u: 1 for u in graph.nodes if _cycles_through(graph, u, r, t, False) > 0}
    arity = max(2, net.config.gamma_msgs)
    agg = aggregate_and_broadcast(graph, None, positive, "MAX", arity=arity, net=net)
    out = {u: agg.outputs[u] == 1 for u in graph.nodes}
    net.trace.extra.update(flood_rounds=t, positives=len(positive))
    return Result(out, net.trace, {"flood_rounds": t, "positives": sorted(positive)})


def count_cycles(graph: Graph, r: int, config: HybridConfig | None = None, *,
                 net: Network | None = None) -> Result:
    """Exact number of ``r``-cycles at every node.

    Each cycle is counted only by its smallest node; the per-node counts are
    summed in ``r - 1`` chunks of ``id_bits(n)`` bits and reassembled locally.
    """
    if r < 3:
        raise ValueError("r must be at least 3")
    net = _network(graph, config, net, "count_cycles")
    n = graph.n
    t = (r - 1) // 2
    _flood(graph, net, t)
    mine = {}
    for u in graph.nodes:
        directed = _cycles_through(graph, u, r, t, True)
        if directed % 2:
            raise RuntimeError("cycle walk count must be even")
        mine[u] = directed // 2
    width = id_bits(n)
    chunks = r - 1
    if any(v >> (width * chunks) for v in mine.values()):
        raise OverflowError("per-node cycle count exceeds the (r-1) log n bit budget")
    total = chunked_sum(graph, None, mine, chunks, width, net=net)
    net.trace.extra.update(flood_rounds=t, chunks=chunks)
    return Result(total.outputs, net.trace, {"flood_rounds": t, "per_node": mine})
