"""Algorithms that replace slow local shortcuts with the global network.

``partwise_aggregate`` routes every part's values to a hashed column of a
virtual butterfly, combining them on the way, and sends the result back
along the same paths.  Boruvka's MST algorithm with Heads/Tails merges and
the virtual-tree diameter wrapper are built on top of it.
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Any, Callable, Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import dijkstra

from .graph import INF, Graph, GraphError, id_bits
from .primitives import AggregateFn, Result, _network, aggregate_and_broadcast, value_bits
from .simcore import HybridConfig, Message, Network, node_rng


@dataclass
class PartAssignment:
    """Part label per node; every part must induce a connected subgraph."""

    part: dict[int, int]

    def validate(self, graph: Graph):
        if set(self.part) != set(graph.nodes):
            raise GraphError("every node needs a part")
        groups = self.groups()
        for p, members in groups.items():
            reach = graph.bfs(members[0], set(members))
            if len(reach) != len(members):
                raise GraphError(f"part {p} is not connected")

    def groups(self) -> dict[int, list[int]]:
        g: dict[int, list[int]] = defaultdict(list)
        for u in sorted(self.part):
            g[self.part[u]].append(u)
        return dict(g)


def random_partition(graph: Graph, parts: int, seed=0) -> PartAssignment:
    """Grow ``parts`` connected parts from random seeds, absorbing frontier nodes in random order."""
    if not graph.connected:
        raise GraphError("random_partition needs a connected graph")
    parts = max(1, min(parts, graph.n))
    rng = np.random.default_rng(seed)
    seeds = rng.choice(graph.n, size=parts, replace=False) + 1
    label = {int(s): i for i, s in enumerate(seeds)}
    frontier = [(int(s), y) for s in seeds for y, _ in graph.neighbors(int(s))]
    while frontier:
        i = int(rng.integers(len(frontier)))
        frontier[i], frontier[-1] = frontier[-1], frontier[i]
        x, y = frontier.pop()
        if y in label:
            continue
        label[y] = label[x]
        frontier.extend((y, z) for z, _ in graph.neighbors(y) if z not in label)
    return PartAssignment(label)


def _combine(f, a, b):
    if isinstance(f, (tuple, list)):
        return tuple(fi.combine(x, y) for fi, x, y in zip(f, a, b))
    return f.combine(a, b)


def _as_fn(f):
    if isinstance(f, str):
        return AggregateFn(f)
    if isinstance(f, (tuple, list)):
        return tuple(_as_fn(x) for x in f)
    return f


def _part_hash(part: int, seed: int, cols: int) -> int:
    return int(node_rng(seed, part & 0x7FFFFFFF, 0xB0).integers(cols))


def partwise_aggregate(graph: Graph, parts: PartAssignment | dict[int, int], values: dict[int, Any],
                       f="MIN", config: HybridConfig | None = None, *, validate: bool = True,
                       net: Network | None = None) -> Result:
    """Every node learns ``f`` over the values of its own part, using global edges only.

    ``f`` may be a tuple of aggregates applied componentwise to tuple values.
    Virtual column ``x`` of the ``ceil(log2 n)``-dimensional butterfly is
    hosted by real node ``(x mod n) + 1``.
    """
    if not isinstance(parts, PartAssignment):
        parts = PartAssignment(dict(parts))
    if validate:
        parts.validate(graph)
    f = _as_fn(f)
    net = _network(graph, config, net, "partwise_aggregate")
    n = graph.n
    d = max(0, math.ceil(math.log2(n))) if n > 1 else 0
    cols = 1 << d
    host = lambda x: (x % n) + 1  # noqa: E731
    seed = net.config.seed
    target = {p: _part_hash(p, seed, cols) for p in set(parts.part.values())}
    pbits = id_bits(n)
    # packets[column] = {part: value}
    packets: dict[int, dict[int, Any]] = defaultdict(dict)
    for u in graph.nodes:
        p = parts.part[u]
        packets[u - 1][p] = values[u]
    came_from: list[dict[tuple[int, int], set[int]]] = []
    start = net.rounds
    with net.phase("partwise_up"):
        for level in range(d):
            bit = 1 << level
            nxt: dict[int, dict[int, Any]] = defaultdict(dict)
            back: dict[tuple[int, int], set[int]] = defaultdict(set)
            items = []
            for col in sorted(packets):
                for p, val in sorted(packets[col].items()):
                    dst = (col & ~bit) | (target[p] & bit)
                    back[(dst, p)].add(col)
                    if host(dst) == host(col):
                        _merge(nxt[dst], p, val, f)
                    else:
                        items.append((host(col), host(dst), (dst, p, val), pbits + d + value_bits(val)))
            got = net.global_transfer(items)
            for lst in got.values():
                for _, (dst, p, val) in lst:
                    _merge(nxt[dst], p, val, f)
            packets = nxt
            came_from.append(back)
    result = {}
    for col, dct in packets.items():
        for p, val in dct.items():
            if col != target[p]:
                raise RuntimeError("butterfly routing ended in the wrong column")
            result[p] = val
    # reverse: column-level knowledge of each part's result
    know: dict[int, dict[int, Any]] = defaultdict(dict)
    for p, val in result.items():
        know[target[p]][p] = val
    with net.phase("partwise_down"):
        for level in range(d - 1, -1, -1):
            back = came_from[level]
            nxt = defaultdict(dict)
            items = []
            for (col, p), sources in sorted(back.items()):
                val = know[col][p]
                for src in sorted(sources):
                    if host(src) == host(col):
                        nxt[src][p] = val
                    else:
                        items.append((host(col), host(src), (src, p, val), pbits + d + value_bits(val)))
            got = net.global_transfer(items)
            for lst in got.values():
                for _, (src, p, val) in lst:
                    nxt[src][p] = val
            know = nxt
    out = {u: know[u - 1][parts.part[u]] for u in graph.nodes}
    return Result(out, net.trace, {"rounds": net.rounds - start, "dimension": d})


def _merge(slot: dict, p: int, val, f):
    slot[p] = _combine(f, slot[p], val) if p in slot else val


def gh_mincut_hook(parts_service: Callable = partwise_aggregate):
    """Entry point for the Ghaffari-Haeupler (1+eps) minimum cut framework.

    The framework would consume ``parts_service`` (same contract as
    :func:`partwise_aggregate`); its tree-packing internals are not provided.
    """
    raise NotImplementedError("Ghaffari-Haeupler minimum cut via part-wise aggregation is not implemented")


def hl_sssp_hook(parts_service: Callable = partwise_aggregate):
    """Entry point for the Haeupler-Li polylog-approximate SSSP framework.

    Consumes ``parts_service`` like the minimum cut hook; not implemented.
    """
    raise NotImplementedError("Haeupler-Li approximate SSSP via part-wise aggregation is not implemented")


# ---------------------------------------------------------------------------
# Boruvka

@dataclass
class MstState:
    leader: dict[int, int]
    edges: set[tuple[int, int, int]] = field(default_factory=set)
    phase: int = 0


def _edge_key(u: int, v: int, w: int) -> tuple:
    return (w, min(u, v), max(u, v))


def boruvka_mst(graph: Graph, config: HybridConfig | None = None, *, max_rounds: int | None = None,
                net: Network | None = None) -> Result:
    """Minimum spanning tree with Heads/Tails star merges.

    Each phase: one local round to learn neighbours' leaders, a part-wise
    aggregate of ``(min outgoing edge key with remote leader, leader coin)``,
    one local round to learn the coin on the far side, and a part-wise MAX
    that spreads the new leader through every Heads component that merged.
    """
    if graph.directed or not graph.connected:
        raise GraphError("Boruvka needs a connected undirected graph")
    n = graph.n
    if config is None and net is None:
        config = HybridConfig.preset("CONGEST_NCC", n)
    net = _network(graph, config, net, "boruvka_mst")
    logn = max(1, math.ceil(math.log2(max(n, 2))))
    budget = max_rounds if max_rounds is not None else 64 * logn * logn
    state = MstState({u: u for u in graph.nodes})
    b = id_bits(n)
    stars_ok = True
    merges_per_phase = []
    while True:
        state.phase += 1
        with net.phase("leader_exchange"):
            inbox = net.exchange(Message(u, v, state.leader[u], b, "local")
                                 for u in graph.nodes for v, _ in graph.neighbors(u))
        remote = {u: {mm.src: mm.data for mm in inbox.get(u, [])} for u in graph.nodes}
        coin = {u: None for u in graph.nodes}
        vals = {}
        for u in graph.nodes:
            best = (INF,)
            for v, w in graph.neighbors(u):
                if remote[u][v] != state.leader[u]:
                    cand = _edge_key(u, v, w) + (remote[u][v],)
                    if cand < best:
                        best = cand
            heads = -1
            if state.leader[u] == u:
                heads = int(node_rng(net.config.seed, u, state.phase).integers(2))
            vals[u] = (best, heads)
        parts = PartAssignment(dict(state.leader))
        agg = partwise_aggregate(graph, parts, vals, (AggregateFn("MIN"), AggregateFn("MAX")),
                                 validate=False, net=net).outputs
        if agg[1][0] == (INF,):
            break
        for u in graph.nodes:
            coin[u] = agg[u][1]
        with net.phase("coin_exchange"):
            inbox = net.exchange(Message(u, v, coin[u], 1, "local")
                                 for u in graph.nodes for v, _ in graph.neighbors(u))
        far_coin = {u: {mm.src: mm.data for mm in inbox.get(u, [])} for u in graph.nodes}
        inject = {}
        adopted = []
        for u in graph.nodes:
            key = agg[u][0]
            new = -1
            if key != (INF,) and coin[u] == 1:
                w, a, c, far_leader = key
                if u in (a, c):
                    other = c if u == a else a
                    if far_coin[u][other] == 0:
                        new = far_leader
                        adopted.append((state.leader[u], far_leader, (a, c, w)))
            inject[u] = new
        spread = partwise_aggregate(graph, parts, inject, "MAX", validate=False, net=net).outputs
        adopters = {x for x, _, _ in adopted}
        for x, y, _ in adopted:
            if y in adopters:
                stars_ok = False
        for _, _, (a, c, w) in adopted:
            state.edges.add((a, c, w))
        for u in graph.nodes:
            if spread[u] != -1:
                state.leader[u] = spread[u]
        merges_per_phase.append(len(adopted))
        if net.rounds > budget:
            net.trace.extra.update(phases=state.phase)
            raise RuntimeError(f"Boruvka exceeded its round budget of {budget}")
    phases = state.phase - 1
    net.trace.extra.update(phases=phases, stars_ok=stars_ok, budget=budget)
    out = {u: frozenset(e for e in state.edges if u in e[:2]) for u in graph.nodes}
    return Result(out, net.trace, {"mst": frozenset(state.edges), "phases": phases,
                                   "stars_ok": stars_ok, "merges": merges_per_phase})


# ---------------------------------------------------------------------------
# virtual-tree diameter

def virtual_tree_graph(graph: Graph) -> tuple[list[tuple[int, int, int]], int]:
    """Edges of ``G`` plus heap-tree edges ``(i, i // 2)`` weighted ``ceil(3 n W / 2)``."""
    n = graph.n
    W = max((e[2] for e in graph.edges), default=1)
    vw = (3 * n * W + 1) // 2
    edges = list(graph.edges)
    for i in range(2, n + 1):
        if not graph.has_edge(i, i // 2):
            edges.append((i // 2, i, vw))
    return edges, vw


def _csr(n: int, edges) -> csr_matrix:
    u = [e[0] - 1 for e in edges]
    v = [e[1] - 1 for e in edges]
    w = [float(e[2]) for e in edges]
    return csr_matrix((w, (u, v)), shape=(n, n))


def hop_diameter_of(n: int, edges) -> float:
    d = dijkstra(_csr(n, [(a, b, 1) for a, b, _ in edges]), directed=False, unweighted=True)
    return float(d.max())


def exact_plugin(graph: Graph, edges, net: Network) -> tuple[float, float]:
    """Diameter of the augmented graph over real nodes; approximation factor 1."""
    d = dijkstra(_csr(graph.n, edges), directed=False)
    return float(d.max()), 1.0


def ecc_plugin(graph: Graph, edges, net: Network) -> tuple[float, float]:
    """Twice the eccentricity of node 1, computed by Bellman-Ford; factor 2.

    Real edges carry distance updates locally; virtual edges are served by
    global messages.
    """
    n = graph.n
    real = {(min(a, b), max(a, b)) for a, b, _ in graph.edges}
    adj: dict[int, list[tuple[int, int, bool]]] = defaultdict(list)
    for a, b, w in edges:
        virt = (min(a, b), max(a, b)) not in real
        adj[a].append((b, w, virt))
        adj[b].append((a, w, virt))
    dist = {u: INF for u in graph.nodes}
    dist[1] = 0
    changed = {1}
    with net.phase("bellman_ford"):
        while changed:
            msgs = []
            for u in sorted(changed):
                for v, w, virt in adj[u]:
                    msgs.append(Message(u, v, dist[u] + w, value_bits(int(dist[u] + w)),
                                        "global" if virt else "local"))
            inbox = net.exchange(msgs)
            changed = set()
            for v, lst in inbox.items():
                best = min(mm.data for mm in lst)
                if best < dist[v]:
                    dist[v] = best
                    changed.add(v)
    ecc = aggregate_and_broadcast(graph, None, dist, "MAX", net=net).outputs[1]
    return 2 * ecc, 2.0


PLUGINS = {"exact": exact_plugin, "ecc": ecc_plugin}


def diameter_virtual_tree(graph: Graph, congest_diam_algo: str | Callable = "ecc",
                          config: HybridConfig | None = None, *, net: Network | None = None) -> Result:
    """Run a CONGEST diameter algorithm on ``G`` plus a heavy virtual binary tree.

    The tree shrinks the hop diameter to ``O(log n)`` without shortening any
    path between real nodes, so the plug-in's approximation factor carries
    over.  Returns the estimate at every node.
    """
    if graph.directed or not graph.connected:
        raise GraphError("diameter needs a connected undirected graph")
    if congest_diam_algo is None:
        raise ValueError("a diameter plug-in is required")
    algo = PLUGINS[congest_diam_algo] if isinstance(congest_diam_algo, str) else congest_diam_algo
    n = graph.n
    if config is None and net is None:
        config = HybridConfig.preset("CONGEST_NCC", n, cB=8)
    net = _network(graph, config, net, "diameter_virtual_tree")
    edges, vw = virtual_tree_graph(graph)
    est, rho = algo(graph, edges, net)
    hop = hop_diameter_of(n, edges)
    net.trace.extra.update(estimate=est, rho=rho, virtual_weight=vw, augmented_hop_diameter=hop)
    return Result({u: est for u in graph.nodes}, net.trace,
                  {"estimate": est, "rho": rho, "hop_diameter": hop, "virtual_weight": vw})
