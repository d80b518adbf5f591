"""Sparsify-and-conquer: shrink the graph, let everyone learn the sparse
version, then finish with exact local computation.

Spanners give approximate all-pairs distances, cut sparsifiers give
approximate cuts, and the girth algorithm either sees a short cycle within
``log n`` hops or knows the graph has linearly many edges.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import dijkstra

from .graph import INF, Graph, GraphError, id_bits
from .primitives import Result, _network, aggregate_and_broadcast
from .simcore import HybridConfig, Network, node_rng
from .sparselearn import learn_topology_deterministic, learn_topology_randomized


# ---------------------------------------------------------------------------
# spanners

@dataclass
class Spanner:
    """Subgraph ``H`` with ``d_G <= d_H <= alpha * d_G + beta``."""

    n: int
    edges: list[tuple[int, int, int]]
    alpha: float
    beta: float
    k: int

    def graph(self) -> Graph:
        return Graph(self.n, list(self.edges))


def _key(u: int, v: int, w) -> tuple:
    return (w, min(u, v), max(u, v))


def build_spanner(graph: Graph, k: int, config: HybridConfig | None = None, *,
                  net: Network | None = None) -> Spanner:
    """Weighted Baswana-Sen ``(2k - 1)``-spanner.

    Phases ``1 .. k-1`` keep each current cluster with probability
    ``n^(-1/k)``; every vertex either joins an adjacent sampled cluster via
    its lightest edge (keeping strictly lighter edges to other clusters) or
    keeps its lightest edge to every adjacent cluster and drops out.  The
    final phase joins every vertex to every adjacent surviving cluster.
    Each phase costs two local rounds.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    if graph.directed:
        raise GraphError("spanners are built on undirected graphs")
    net = _network(graph, config, net, "build_spanner")
    n = graph.n
    seed = net.config.seed
    prob = n ** (-1.0 / k)
    cluster = {u: u for u in graph.nodes}  # vertex -> centre, absent once unclustered
    alive = {(min(u, v), max(u, v)): w for u, v, w in graph.edges}  # E'
    kept: set[tuple[int, int]] = set()

    def incident(v):
        for x, w in graph.neighbors(v):
            e = (min(v, x), max(v, x))
            if e in alive:
                yield x, w, e

    with net.phase("spanner"):
        for phase in range(1, k):
            centres = sorted(set(cluster.values()))
            sampled = {c for c in centres if node_rng(seed, c, phase).random() < prob}
            new_cluster = {v: c for v, c in cluster.items() if c in sampled}
            for v in graph.nodes:
                if v in cluster and cluster[v] in sampled:
                    continue
                best: dict[int, tuple] = {}
                for x, w, e in incident(v):
                    if x not in cluster:
                        continue
                    c = cluster[x]
                    key = _key(v, x, w)
                    if c not in best or key < best[c][0]:
                        best[c] = (key, e)
                near = [(best[c][0], c) for c in best if c in sampled]
                if not near:
                    for c, (key, e) in best.items():
                        kept.add(e)
                    drop = set(best)
                else:
                    star_key, star = min(near)
                    kept.add(best[star][1])
                    new_cluster[v] = star
                    drop = {star}
                    for c, (key, e) in best.items():
                        if key < star_key:
                            kept.add(e)
                            drop.add(c)
                for x, w, e in list(incident(v)):
                    if x in cluster and cluster[x] in drop:
                        del alive[e]
            cluster = new_cluster
            for e in [e for e in alive if e[0] in cluster and e[1] in cluster
                      and cluster[e[0]] == cluster[e[1]]]:
                del alive[e]
            net.charge_local(2, reason="spanner clustering")
        for v in graph.nodes:
            best = {}
            for x, w, e in incident(v):
                if x not in cluster:
                    continue
                c = cluster[x]
                key = _key(v, x, w)
                if c not in best or key < best[c][0]:
                    best[c] = (key, e)
            for key, e in best.values():
                kept.add(e)
        net.charge_local(2, reason="spanner joining")
    edges = sorted((u, v, graph.weight(u, v)) for u, v in kept)
    return Spanner(n, edges, 2 * k - 1, 0, k)


def identity_spanner(graph: Graph, epsilon: float = 0.0, net: Network | None = None) -> Spanner:
    return Spanner(graph.n, list(graph.edges), 1, 0, 1)


def multiplicative_provider(k: int = 2) -> Callable:
    """Provider returning a Baswana-Sen ``(2k-1, 0)`` spanner."""
    def provide(graph: Graph, epsilon: float, net: Network | None = None) -> Spanner:
        return build_spanner(graph, k, net=net)
    return provide


def spanner_size_bound(n: int, k: int, C: float = 1.0) -> float:
    return C * k * n ** (1 + 1 / k) * math.log2(max(n, 2))


def apsp_k(n: int) -> int:
    """``ceil(log n / log log n)`` with base-2 logarithms, and 1 for ``n <= 2``."""
    L = math.log2(max(n, 1))
    if L <= 1:
        return 1
    return max(1, math.ceil(L / math.log2(L)))


def _apsp_of(n: int, edges, unweighted: bool = False) -> np.ndarray:
    if not edges:
        d = np.full((n, n), INF)
        np.fill_diagonal(d, 0)
        return d
    u = [e[0] - 1 for e in edges]
    v = [e[1] - 1 for e in edges]
    w = [1.0 if unweighted else float(e[2]) for e in edges]
    return dijkstra(csr_matrix((w, (u, v)), shape=(n, n)), directed=False)


def apsp_weighted(graph: Graph, config: HybridConfig | None = None, *,
                  net: Network | None = None) -> Result:
    """``(2k - 1)``-approximate distances with ``k = ceil(log n / log log n)``.

    Output per node ``u``: a length-``n`` array, entry ``v - 1`` holding the
    estimate of ``d(u, v)``.
    """
    if not graph.connected:
        raise GraphError("APSP needs a connected graph")
    net = _network(graph, config, net, "apsp_weighted")
    k = apsp_k(graph.n)
    H = build_spanner(graph, k, net=net)
    learned = learn_topology_deterministic(graph, edges=H.edges, net=net)
    full = frozenset(H.edges)
    if any(learned.outputs[u] != full for u in graph.nodes):
        raise RuntimeError("spanner dissemination incomplete")
    D = _apsp_of(graph.n, H.edges)
    net.trace.extra.update(k=k, spanner_edges=len(H.edges), stretch_bound=2 * k - 1)
    return Result({u: D[u - 1] for u in graph.nodes}, net.trace, {"k": k, "spanner": H})


def apsp_unweighted(graph: Graph, epsilon: float, provider: Callable | None = None,
                    config: HybridConfig | None = None, *, net: Network | None = None) -> Result:
    """Distances exact up to ``ceil(beta / epsilon)`` hops, spanner distances beyond."""
    if graph.weighted and any(e[2] != 1 for e in graph.edges):
        raise GraphError("apsp_unweighted expects an unweighted graph")
    if not graph.connected:
        raise GraphError("APSP needs a connected graph")
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    net = _network(graph, config, net, "apsp_unweighted")
    provider = provider or multiplicative_provider(2)
    H = provider(graph, epsilon, net=net)
    radius = math.ceil(H.beta / epsilon)
    with net.phase("ball_flood"):
        net.charge_local(radius, bits=radius * 2 * graph.m * 2 * id_bits(graph.n),
                         reason="adjacency flooding")
    learn_topology_deterministic(graph, edges=H.edges, net=net)
    dH = _apsp_of(graph.n, H.edges, unweighted=True)
    if radius > 0:
        dG = _apsp_of(graph.n, graph.edges, unweighted=True)
        out = np.where(dG <= radius, dG, dH)
    else:
        out = dH
    net.trace.extra.update(alpha=H.alpha, beta=H.beta, radius=radius)
    return Result({u: out[u - 1] for u in graph.nodes}, net.trace, {"spanner": H, "radius": radius})


# ---------------------------------------------------------------------------
# cut sparsification and local cut solvers

def stoer_wagner(n: int, edges) -> tuple[float, frozenset[int]]:
    """Global minimum cut of the graph on nodes ``1..n``; returns the value and one side."""
    if n < 2:
        raise ValueError("a cut needs at least two nodes")
    W = np.zeros((n, n))
    for u, v, w in edges:
        W[u - 1, v - 1] += w
        W[v - 1, u - 1] += w
    groups = [[u + 1] for u in range(n)]
    alive = np.ones(n, dtype=bool)
    best = (INF, frozenset())
    for _ in range(n - 1):
        idx = np.nonzero(alive)[0]
        used = ~alive.copy()
        first = idx[0]
        used[first] = True
        conn = W[first].copy()
        prev, last = first, first
        cut = 0.0
        for _ in range(len(idx) - 1):
            masked = np.where(used, -np.inf, conn)
            sel = int(np.argmax(masked))
            cut = conn[sel]
            used[sel] = True
            prev, last = last, sel
            conn += W[sel]
        if cut < best[0]:
            best = (float(cut), frozenset(groups[last]))
        W[prev] += W[last]
        W[:, prev] += W[:, last]
        W[prev, prev] = 0
        W[last] = 0
        W[:, last] = 0
        alive[last] = False
        groups[prev].extend(groups[last])
    return best


def max_flow_min_cut(n: int, edges, s: int, t: int) -> tuple[float, frozenset[int]]:
    """Edmonds-Karp on an undirected capacitated graph; returns value and source side."""
    cap: dict[int, dict[int, float]] = {u: {} for u in range(1, n + 1)}
    for u, v, w in edges:
        cap[u][v] = cap[u].get(v, 0.0) + w
        cap[v][u] = cap[v].get(u, 0.0) + w
    flow = 0.0
    while True:
        parent = {s: None}
        q = deque([s])
        while q and t not in parent:
            x = q.popleft()
            for y, c in cap[x].items():
                if c > 1e-12 and y not in parent:
                    parent[y] = x
                    q.append(y)
        if t not in parent:
            break
        path = []
        y = t
        while parent[y] is not None:
            path.append((parent[y], y))
            y = parent[y]
        push = min(cap[a][b] for a, b in path)
        for a, b in path:
            cap[a][b] -= push
            cap[b][a] = cap[b].get(a, 0.0) + push
        flow += push
    return flow, frozenset(parent)


def sparsest_cut_exhaustive(n: int, edges, limit: int = 20) -> tuple[float, frozenset[int]]:
    if n > limit:
        raise ValueError(f"exact sparsest cut is limited to n <= {limit}")
    masks = np.arange(1, 1 << (n - 1), dtype=np.int64)
    vals = np.zeros(masks.shape)
    sizes = np.zeros(masks.shape, dtype=np.int64)
    for b in range(n - 1):
        sizes += (masks >> b) & 1
    for u, v, w in edges:
        bu = (masks >> (u - 2)) & 1 if u >= 2 else 0
        bv = (masks >> (v - 2)) & 1 if v >= 2 else 0
        vals += w * (bu ^ bv)
    ratio = vals / (sizes * (n - sizes))
    i = int(np.argmin(ratio))
    side = frozenset(u for u in range(2, n + 1) if masks[i] >> (u - 2) & 1)
    return float(ratio[i]), side


def _components(nodes: set[int], adj: dict[int, dict[int, float]]) -> list[list[int]]:
    seen, out = set(), []
    for s in sorted(nodes):
        if s in seen:
            continue
        comp, q = [], [s]
        seen.add(s)
        while q:
            x = q.pop()
            comp.append(x)
            for y in adj[x]:
                if y in nodes and y not in seen:
                    seen.add(y)
                    q.append(y)
        out.append(sorted(comp))
    return out


def edge_strengths(graph: Graph) -> dict[tuple[int, int], float]:
    """Exact edge strengths via recursive minimum-cut decomposition.

    The strength of ``e`` is the largest minimum cut of a vertex-induced
    subgraph containing ``e``; splitting each component along its minimum
    cut and recursing visits every maximal strong component.
    """
    adj: dict[int, dict[int, float]] = {u: {} for u in graph.nodes}
    for u, v, w in graph.edges:
        adj[u][v] = w
        adj[v][u] = w
    strength = {(min(u, v), max(u, v)): 0.0 for u, v, _ in graph.edges}
    stack = _components(set(graph.nodes), adj)
    while stack:
        comp = stack.pop()
        if len(comp) < 2:
            continue
        pos = {u: i + 1 for i, u in enumerate(comp)}
        inside = set(comp)
        local = [(pos[u], pos[v], w) for u in comp for v, w in adj[u].items() if v in inside and u < v]
        lam, side = stoer_wagner(len(comp), local)
        for u in comp:
            for v in adj[u]:
                if v in inside and u < v:
                    strength[(u, v)] = max(strength[(u, v)], lam)
        side_nodes = {comp[i - 1] for i in side}
        for part in (side_nodes, inside - side_nodes):
            stack.extend(_components(part, adj))
    return strength


@dataclass
class CutSparsifier:
    n: int
    edges: list[tuple[int, int, float]]
    epsilon: float
    probabilities: dict[tuple[int, int], float] = field(default_factory=dict)

    def cut(self, side) -> float:
        return sum(w for u, v, w in self.edges if (u in side) != (v in side))


def build_cut_sparsifier(graph: Graph, epsilon: float, config: HybridConfig | None = None, *,
                         rho: float = 1.0, net: Network | None = None) -> CutSparsifier:
    """Strength-based importance sampling.

    Edge ``e`` survives with probability
    ``p_e = min(1, rho * ln n * w_e / (epsilon^2 * k_e))`` and is reweighted
    to ``w_e / p_e``.  The coin for ``e`` is tossed by its smaller endpoint.
    """
    if not 0 < epsilon < 1:
        raise ValueError("epsilon must lie in (0, 1)")
    net = _network(graph, config, net, "build_cut_sparsifier")
    n = graph.n
    strength = edge_strengths(graph)
    logn = math.log(max(n, 2))
    with net.phase("sparsifier"):
        # stand-in for the distributed strength estimation: polylog local rounds
        net.charge_local(id_bits(n) ** 2, reason="strength estimation")
    kept, probs = [], {}
    by_node: dict[int, list] = {}
    for u, v, w in graph.edges:
        by_node.setdefault(min(u, v), []).append((u, v, w))
    for u in sorted(by_node):
        rng = node_rng(net.config.seed, u, 0)
        for a, b, w in sorted(by_node[u]):
            e = (min(a, b), max(a, b))
            p = min(1.0, rho * logn * w / (epsilon ** 2 * strength[e]))
            probs[e] = p
            if p >= 1.0 or rng.random() < p:
                kept.append((a, b, w / p))
    return CutSparsifier(n, kept, epsilon, probs)


def _sparse_connected(n: int, edges) -> bool:
    adj = {u: {} for u in range(1, n + 1)}
    for u, v, w in edges:
        adj[u][v] = w
        adj[v][u] = w
    return len(_components(set(adj), adj)) <= 1


def solve_cuts(graph: Graph, epsilon: float, config: HybridConfig | None = None, *,
               problems=("mincut", "stcut", "sparsest"), s: int = 1, t: int | None = None,
               rho: float = 1.0, net: Network | None = None) -> Result:
    """Approximate minimum cut, ``s``-``t`` cut and sparsest cut at every node.

    The sparsifier is built with ``epsilon / 4`` so the ratio
    ``(1 + e') / (1 - e') <= 1 + 4e' = 1 + epsilon`` holds.
    """
    if not graph.connected:
        raise GraphError("cut problems need a connected graph")
    if graph.n < 2:
        raise GraphError("cut problems need at least two nodes")
    net = _network(graph, config, net, "solve_cuts")
    t = graph.n if t is None else t
    H = build_cut_sparsifier(graph, epsilon / 4, rho=rho, net=net)
    if not _sparse_connected(graph.n, H.edges):
        raise RuntimeError("cut sparsifier disconnected the graph")
    tb = graph.token_bits() + 2 * id_bits(graph.n)
    learned = learn_topology_randomized(graph, edges=H.edges, token_bits=tb, net=net)
    full = frozenset(H.edges)
    if any(learned.outputs[u] != full for u in graph.nodes):
        raise RuntimeError("sparsifier dissemination incomplete")
    answer = {}
    if "mincut" in problems:
        answer["mincut"] = stoer_wagner(graph.n, H.edges)
    if "stcut" in problems:
        answer["stcut"] = max_flow_min_cut(graph.n, H.edges, s, t)
    if "sparsest" in problems:
        answer["sparsest"] = sparsest_cut_exhaustive(graph.n, H.edges)
    net.trace.extra.update(sparsifier_edges=len(H.edges), epsilon=epsilon)
    return Result({u: answer for u in graph.nodes}, net.trace, {"sparsifier": H, "answer": answer})


# ---------------------------------------------------------------------------
# girth

def shortest_cycle_through(adj: dict[int, list[int]], u: int, depth: int | None = None) -> float:
    """Length of the shortest cycle through ``u`` using only edges with an endpoint within ``depth`` hops.

    BFS labels every node with the neighbour of ``u`` it hangs from; a
    non-tree edge joining two different labels closes a simple cycle.
    """
    dist = {u: 0}
    label = {u: 0}
    q = deque([u])
    best = INF
    while q:
        x = q.popleft()
        if depth is not None and dist[x] > depth:
            continue
        if 2 * dist[x] + 1 >= best:
            break
        for y in adj[x]:
            if y not in dist:
                dist[y] = dist[x] + 1
                label[y] = y if x == u else label[x]
                q.append(y)
            elif y != u and x != u and label[y] != label[x]:
                best = min(best, dist[x] + dist[y] + 1)
    return best


def girth(graph: Graph, config: HybridConfig | None = None, *, net: Network | None = None) -> Result:
    """Exact girth (``inf`` for forests) of an unweighted undirected graph."""
    if graph.directed:
        raise GraphError("girth expects an undirected graph")
    if not graph.connected:
        raise GraphError("girth needs a connected graph")
    net = _network(graph, config, net, "girth")
    n = graph.n
    t = max(1, math.ceil(math.log2(max(n, 2))))
    adj = {u: [v for v, _ in graph.neighbors(u)] for u in graph.nodes}
    with net.phase("girth_flood"):
        net.charge_local(t, bits=t * 2 * graph.m * graph.token_bits(), reason="adjacency flooding")
    local = {}
    for u in graph.nodes:
        c = shortest_cycle_through(adj, u, t)
        local[u] = c if c <= 2 * t else INF
    agg = aggregate_and_broadcast(graph, None, {u: c for u, c in local.items() if c < INF}, "MIN",
                                  net=net)
    g = agg.outputs[1]
    phase = 1
    if g == INF and graph.m > 0:
        # no short cycle, so the graph has O(n) edges and can be learned
        phase = 2
        learned = learn_topology_deterministic(graph, net=net)
        if any(learned.outputs[u] != frozenset(graph.edges) for u in graph.nodes):
            raise RuntimeError("topology learning incomplete")
        g = min((shortest_cycle_through(adj, u) for u in graph.nodes), default=INF)
    net.trace.extra.update(phase=phase, flood_rounds=t)
    return Result({u: g for u in graph.nodes}, net.trace, {"phase": phase, "local": local})
