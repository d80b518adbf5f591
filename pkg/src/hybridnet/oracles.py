"""Sequential exact reference computations.

These never touch the simulator.  Shortest paths and flows lean on
``scipy.sparse.csgraph``; cut enumeration is vectorised with numpy.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable, Iterator

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import dijkstra, maximum_flow

from .graph import INF, Graph


@dataclass(frozen=True)
class OracleLimits:
    """Largest inputs each oracle accepts."""

    apsp: int = 2048
    eccentricity: int = 5000
    cut_enumeration: int = 24
    cycle_r: int = 8
    cycle_n: int = 128
    sparsest_cut: int = 20


LIMITS = OracleLimits()


class OracleLimitError(ValueError):
    pass


def _check(n: int, cap: int, what: str):
    if n > cap:
        raise OracleLimitError(f"{what} oracle refuses n={n} (limit {cap})")


def _matrix(graph: Graph, weights: bool = True) -> csr_matrix:
    n = graph.n
    if graph.m == 0:
        return csr_matrix((n, n))
    u = np.fromiter((e[0] - 1 for e in graph.edges), dtype=np.int64, count=graph.m)
    v = np.fromiter((e[1] - 1 for e in graph.edges), dtype=np.int64, count=graph.m)
    w = np.fromiter((e[2] if weights else 1 for e in graph.edges), dtype=float, count=graph.m)
    return csr_matrix((w, (u, v)), shape=(n, n))


def _distances(graph: Graph, sources=None) -> np.ndarray:
    return dijkstra(_matrix(graph), directed=graph.directed, indices=sources)


def exact_apsp(graph: Graph, limits: OracleLimits = LIMITS) -> np.ndarray:
    """``n x n`` float matrix; entry ``[u-1, v-1]`` is ``d(u, v)``, ``inf`` when unreachable."""
    _check(graph.n, limits.apsp, "APSP")
    return _distances(graph)


def exact_sssp(graph: Graph, source: int) -> np.ndarray:
    return _distances(graph, source - 1)


def exact_radius_diameter(graph: Graph, limits: OracleLimits = LIMITS,
                          batch: int = 256) -> tuple[float, float, np.ndarray]:
    """``(R, D, ecc)`` where ``ecc[u-1]`` is the eccentricity of ``u``."""
    n = graph.n
    _check(n, limits.eccentricity, "eccentricity")
    mat = _matrix(graph)
    ecc = np.empty(n)
    for lo in range(0, n, batch):
        idx = np.arange(lo, min(n, lo + batch))
        d = dijkstra(mat, directed=graph.directed, indices=idx)
        ecc[idx] = d.max(axis=1)
    return float(ecc.min()), float(ecc.max()), ecc


def _girth_bfs(graph: Graph) -> float:
    best = INF
    for s in graph.nodes:
        dist = {s: 0}
        parent = {s: 0}
        q = deque([s])
        while q:
            x = q.popleft()
            if 2 * dist[x] + 1 >= best:
                break
            for y, _ in graph.neighbors(x):
                if y not in dist:
                    dist[y] = dist[x] + 1
                    parent[y] = x
                    q.append(y)
                elif parent[x] != y:
                    best = min(best, dist[x] + dist[y] + 1)
    return best


def exact_girth(graph: Graph, directed: bool | None = None, weighted: bool | None = None,
                limits: OracleLimits = LIMITS) -> float:
    """Length (or weight) of the shortest cycle; ``inf`` for acyclic inputs."""
    _check(graph.n, limits.eccentricity, "girth")
    directed = graph.directed if directed is None else directed
    weighted = graph.weighted if weighted is None else weighted
    if directed:
        d = dijkstra(_matrix(graph, weighted), directed=True)
        best = INF
        for u, v, w in graph.edges:
            back = d[v - 1, u - 1]
            if back < INF:
                best = min(best, (w if weighted else 1) + back)
        return float(best)
    if not weighted or all(e[2] == 1 for e in graph.edges):
        return float(_girth_bfs(graph))
    best = INF
    base = _matrix(graph).tolil()
    for u, v, w in graph.edges:
        base[u - 1, v - 1] = 0
        d = dijkstra(base.tocsr(), directed=False, indices=u - 1)[v - 1]
        base[u - 1, v - 1] = w
        best = min(best, w + d)
    return float(best)


# ---------------------------------------------------------------------------
# cuts

def cut_weight(edges: Iterable[tuple], side: set[int] | frozenset[int]) -> float:
    return sum(e[2] for e in edges if (e[0] in side) != (e[1] in side))


def exact_st_mincut(graph: Graph, s: int, t: int) -> tuple[float, frozenset[int]]:
    """Minimum ``s``-``t`` cut value and the source side, via maximum flow."""
    if s == t:
        raise ValueError("s and t must differ")
    n = graph.n
    rows, cols, caps = [], [], []
    for u, v, w in graph.edges:
        rows += [u - 1, v - 1]
        cols += [v - 1, u - 1]
        caps += [int(w), int(w)]
    cap = csr_matrix((np.array(caps, dtype=np.int64), (rows, cols)), shape=(n, n))
    cap.sum_duplicates()
    res = maximum_flow(cap.astype(np.int32) if cap.max() < 2**31 else cap, s - 1, t - 1)
    flow = res.flow.toarray() if hasattr(res, "flow") else res.residual.toarray()
    capd = cap.toarray()
    side = {s}
    q = deque([s - 1])
    while q:
        x = q.popleft()
        for y in np.nonzero(capd[x] - flow[x] > 0)[0]:
            if y + 1 not in side:
                side.add(int(y) + 1)
                q.append(int(y))
    return float(res.flow_value), frozenset(side)


def exact_min_cut(graph: Graph) -> tuple[float, frozenset[int]]:
    """Global minimum cut as the best of ``n - 1`` max-flows from node 1.

    Deliberately independent of the Stoer-Wagner solver used by the
    simulated pipeline.
    """
    if graph.n < 2:
        raise ValueError("a cut needs at least two nodes")
    best = (INF, frozenset())
    for t in range(2, graph.n + 1):
        val, side = exact_st_mincut(graph, 1, t)
        if val < best[0]:
            best = (val, side)
    return best


def enumerate_cuts(graph_or_n, edges: Iterable[tuple] | None = None,
                   limits: OracleLimits = LIMITS) -> np.ndarray:
    """Weights of all ``2^(n-1) - 1`` proper cuts.

    Index ``mask`` (1 .. 2^(n-1)-1) describes the side ``{u >= 2 : bit u-2 set}``;
    node 1 always lies on the other side.  Accepts a :class:`Graph` or
    ``(n, edges)`` with arbitrary positive weights.
    """
    if isinstance(graph_or_n, Graph):
        n, edges = graph_or_n.n, graph_or_n.edges
    else:
        n = int(graph_or_n)
    _check(n, limits.cut_enumeration, "cut enumeration")
    masks = np.arange(1 << (n - 1), dtype=np.int64)
    vals = np.zeros(masks.shape, dtype=float)
    for u, v, w in edges:
        bu = (masks >> (u - 2)) & 1 if u >= 2 else np.zeros_like(masks)
        bv = (masks >> (v - 2)) & 1 if v >= 2 else np.zeros_like(masks)
        vals += float(w) * (bu ^ bv)
    vals[0] = INF
    return vals


def mask_to_side(mask: int, n: int) -> frozenset[int]:
    return frozenset(u for u in range(2, n + 1) if mask >> (u - 2) & 1)


def exact_sparsest_cut(graph: Graph, limits: OracleLimits = LIMITS) -> tuple[float, frozenset[int]]:
    """Minimise ``cut(S) / (|S| |V - S|)`` exhaustively."""
    n = graph.n
    _check(n, limits.sparsest_cut, "sparsest cut")
    vals = enumerate_cuts(graph, limits=limits)
    masks = np.arange(1 << (n - 1), dtype=np.int64)
    sizes = np.zeros(masks.shape, dtype=np.int64)
    for b in range(n - 1):
        sizes += (masks >> b) & 1
    denom = sizes * (n - sizes)
    ratio = np.full(vals.shape, INF)
    ok = denom > 0
    ratio[ok] = vals[ok] / denom[ok]
    best = int(np.argmin(ratio))
    return float(ratio[best]), mask_to_side(best, n)


# ---------------------------------------------------------------------------
# trees and cycles

def edge_key(e: tuple) -> tuple:
    u, v, w = e
    return (w, min(u, v), max(u, v))


def exact_mst(graph: Graph) -> tuple[frozenset, float]:
    """Kruskal with ties broken by ``(w, min id, max id)``; a spanning forest if disconnected."""
    parent = list(range(graph.n + 1))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    chosen = []
    for e in sorted(graph.edges, key=edge_key):
        a, b = find(e[0]), find(e[1])
        if a != b:
            parent[a] = b
            chosen.append(e)
    return frozenset(chosen), float(sum(e[2] for e in chosen))


def enumerate_cycles(graph: Graph, r: int, limits: OracleLimits = LIMITS) -> Iterator[tuple[int, ...]]:
    """Every simple ``r``-cycle once, as a tuple starting at its smallest node.

    The second node is smaller than the last, which fixes the direction.
    """
    if r < 3:
        raise ValueError("cycles have length at least 3")
    _check(r, limits.cycle_r, "cycle length")
    _check(graph.n, limits.cycle_n, "cycle enumeration")
    adj = {u: sorted(v for v, _ in graph.neighbors(u)) for u in graph.nodes}
    for s in graph.nodes:
        path = [s]
        on = {s}

        def dfs(x):
            if len(path) == r:
                if s in adj[x] and path[1] < path[-1]:
                    yield tuple(path)
                return
            for y in adj[x]:
                if y > s and y not in on:
                    path.append(y)
                    on.add(y)
                    yield from dfs(y)
                    path.pop()
                    on.discard(y)

        yield from dfs(s)


def count_cycles_bruteforce(graph: Graph, r: int, limits: OracleLimits = LIMITS) -> int:
    return sum(1 for _ in enumerate_cycles(graph, r, limits))
