"""Graph container, the plain-text graph file format, and random generators."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Iterator

import numpy as np

INF = float("inf")


class GraphError(ValueError):
    """Raised for malformed graph files or invariant violations."""

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


def id_bits(n: int) -> int:
    """Bits needed to write any node ID in 1..n."""
    return max(1, int(n).bit_length())


@dataclass
class Graph:
    """Simple graph on node IDs 1..n with positive integer weights.

    Undirected edges are stored once as ``(min, max, w)``; directed edges as
    ``(tail, head, w)``.
    """

    n: int
    edges: list[tuple[int, int, int]]
    directed: bool = False
    weighted: bool = True
    W: int | None = None
    weight_exponent: int = 4
    _adj: list[list[tuple[int, int]]] = field(init=False, repr=False)
    _radj: list[list[tuple[int, int]]] | None = field(init=False, repr=False)
    _index: dict[tuple[int, int], int] = field(init=False, repr=False)

    def __post_init__(self):
        if self.n < 1:
            raise GraphError("graph needs at least one node")
        canon = []
        seen = {}
        for u, v, w in self.edges:
            u, v, w = int(u), int(v), int(w)
            if not (1 <= u <= self.n and 1 <= v <= self.n):
                raise GraphError(f"node ID out of range in edge ({u}, {v})")
            if u == v:
                raise GraphError(f"self-loop at node {u}")
            if w < 1:
                raise GraphError(f"non-positive weight {w} on edge ({u}, {v})")
            key = (u, v) if self.directed else (min(u, v), max(u, v))
            if key in seen:
                raise GraphError(f"duplicate edge {key}")
            seen[key] = len(canon)
            canon.append((key[0], key[1], w))
        max_w = max((w for _, _, w in canon), default=1)
        if self.W is None:
            self.W = max_w
        if max_w > self.W:
            raise GraphError(f"weight {max_w} exceeds bound W={self.W}")
        if self.W > max(2, self.n) ** self.weight_exponent:
            raise GraphError(f"W={self.W} exceeds n^{self.weight_exponent}")
        if not self.weighted and max_w != 1:
            raise GraphError("unweighted graph with non-unit weight")
        self.edges = canon
        self._index = seen
        self._adj = [[] for _ in range(self.n + 1)]
        self._radj = [[] for _ in range(self.n + 1)] if self.directed else None
        for u, v, w in canon:
            self._adj[u].append((v, w))
            if self.directed:
                self._radj[v].append((u, w))
            else:
                self._adj[v].append((u, w))
        for lst in self._adj:
            lst.sort()

    # -- basic queries -------------------------------------------------
    @property
    def m(self) -> int:
        return len(self.edges)

    @property
    def nodes(self) -> range:
        return range(1, self.n + 1)

    def neighbors(self, u: int) -> list[tuple[int, int]]:
        """Out-neighbours ``(v, w)`` of ``u`` (all neighbours if undirected)."""
        return self._adj[u]

    def in_neighbors(self, u: int) -> list[tuple[int, int]]:
        return self._radj[u] if self.directed else self._adj[u]

    def degree(self, u: int) -> int:
        return len(self._adj[u])

    @property
    def max_degree(self) -> int:
        return max((len(a) for a in self._adj[1:]), default=0)

    def has_edge(self, u: int, v: int) -> bool:
        key = (u, v) if self.directed else (min(u, v), max(u, v))
        return key in self._index

    def weight(self, u: int, v: int) -> int:
        key = (u, v) if self.directed else (min(u, v), max(u, v))
        return self.edges[self._index[key]][2]

    def edge_index(self, u: int, v: int) -> int:
        key = (u, v) if self.directed else (min(u, v), max(u, v))
        return self._index[key]

    def edge_set(self) -> frozenset[tuple[int, int, int]]:
        return frozenset(self.edges)

    # -- derived structure -------------------------------------------
    def bfs(self, source: int, allowed: set[int] | None = None) -> dict[int, int]:
        """Hop distances from ``source``, optionally inside ``allowed`` only."""
        dist = {source: 0}
        queue = deque([source])
        while queue:
            x = queue.popleft()
            for y, _ in self._adj[x]:
                if y not in dist and (allowed is None or y in allowed):
                    dist[y] = dist[x] + 1
                    queue.append(y)
        return dist

    def components(self) -> list[list[int]]:
        seen = [False] * (self.n + 1)
        comps = []
        for s in self.nodes:
            if seen[s]:
                continue
            comp = []
            stack = [s]
            seen[s] = True
            while stack:
                x = stack.pop()
                comp.append(x)
                nbrs = self._adj[x] if not self.directed else self._adj[x] + self._radj[x]
                for y, _ in nbrs:
                    if not seen[y]:
                        seen[y] = True
                        stack.append(y)
            comps.append(sorted(comp))
        return comps

    @property
    def connected(self) -> bool:
        return len(self.components()) == 1

    def hop_diameter(self) -> float:
        if not self.connected:
            return INF
        return max(max(self.bfs(s).values()) for s in self.nodes)

    def induced_diameter(self, nodes: Iterable[int]) -> float:
        """Strong (induced-subgraph) hop diameter of a node set."""
        nodes = set(nodes)
        best = 0
        for s in nodes:
            d = self.bfs(s, allowed=nodes)
            if len(d) < len(nodes):
                return INF
            best = max(best, max(d.values()))
        return best

    def weak_diameter(self, nodes: Iterable[int]) -> float:
        nodes = set(nodes)
        best = 0
        for s in nodes:
            d = self.bfs(s)
            if not nodes <= d.keys():
                return INF
            best = max(best, max(d[v] for v in nodes))
        return best

    def subgraph_edges(self, edges: Iterable[tuple[int, int, int]]) -> "Graph":
        return Graph(self.n, list(edges), directed=self.directed,
                     weighted=self.weighted, W=self.W,
                     weight_exponent=self.weight_exponent)

    def token_bits(self) -> int:
        """Bits of one edge token ``(u, v, w)``."""
        bits = 2 * id_bits(self.n)
        if self.weighted:
            bits += max(1, int(self.W).bit_length())
        return bits

    def iter_arcs(self) -> Iterator[tuple[int, int, int]]:
        """Every edge in both directions (once if directed)."""
        for u, v, w in self.edges:
            yield u, v, w
            if not self.directed:
                yield v, u, w

    # -- file format ---------------------------------------------------
    def dumps(self) -> str:
        lines = [f"{self.n} {self.m} {'d' if self.directed else 'u'} "
                 f"{'w' if self.weighted else 'u'}"]
        for u, v, w in self.edges:
            lines.append(f"{u} {v} {w}" if self.weighted else f"{u} {v}")
        return "\n".join(lines) + "\n"


def load_graph(text: str, weight_exponent: int = 4) -> Graph:
    """Parse the ``n m <d|u> <w|u>`` header plus ``m`` edge lines."""
    rows = [(i + 1, line.split()) for i, line in enumerate(text.splitlines())]
    rows = [(i, r) for i, r in rows if r and not r[0].startswith("#")]
    if not rows:
        raise GraphError("empty graph file", 1)
    lineno, head = rows[0]
    if len(head) != 4 or head[2] not in ("d", "u") or head[3] not in ("w", "u"):
        raise GraphError("header must be 'n m <d|u> <w|u>'", lineno)
    try:
        n, m = int(head[0]), int(head[1])
    except ValueError:
        raise GraphError("n and m must be integers", lineno) from None
    directed, weighted = head[2] == "d", head[3] == "w"
    body = rows[1:]
    if len(body) != m:
        raise GraphError(f"expected {m} edge lines, found {len(body)}", lineno)
    edges = []
    for lineno, parts in body:
        want = 3 if weighted else 2
        if len(parts) != want:
            raise GraphError(f"expected {want} fields", lineno)
        try:
            vals = [int(p) for p in parts]
        except ValueError:
            raise GraphError("non-integer field", lineno) from None
        edges.append((vals[0], vals[1], vals[2] if weighted else 1))
    try:
        return Graph(n, edges, directed=directed, weighted=weighted,
                     weight_exponent=weight_exponent)
    except GraphError as exc:
        raise GraphError(str(exc), lineno if "duplicate" in str(exc) else None) from None


# -- generators ---------------------------------------------------------

def path_graph(n: int, weights: list[int] | None = None) -> Graph:
    ws = weights or [1] * (n - 1)
    return Graph(n, [(i, i + 1, ws[i - 1]) for i in range(1, n)],
                 weighted=weights is not None)


def cycle_graph(n: int) -> Graph:
    edges = [(i, i + 1, 1) for i in range(1, n)] + [(1, n, 1)]
    return Graph(n, edges, weighted=False)


def complete_graph(n: int) -> Graph:
    return Graph(n, [(i, j, 1) for i in range(1, n + 1) for j in range(i + 1, n + 1)],
                 weighted=False)


def star_graph(n: int) -> Graph:
    """Star with centre 1 and ``n - 1`` leaves."""
    return Graph(n, [(1, i, 1) for i in range(2, n + 1)], weighted=False)


def _rng(seed) -> np.random.Generator:
    return np.random.default_rng(seed)


def random_tree(n: int, seed=0, W: int | None = None) -> Graph:
    rng = _rng(seed)
    perm = rng.permutation(n) + 1
    edges = []
    for i in range(1, n):
        parent = perm[rng.integers(0, i)]
        w = int(rng.integers(1, W + 1)) if W else 1
        edges.append((int(perm[i]), int(parent), w))
    return Graph(n, edges, weighted=W is not None, W=W)


def random_connected(n: int, m: int, seed=0, W: int | None = None) -> Graph:
    """Uniform random spanning tree (random walk) plus uniform extra edges."""
    rng = _rng(seed)
    m = min(m, n * (n - 1) // 2)
    if m < n - 1:
        raise GraphError("m < n - 1 cannot be connected")
    # Aldous-Broder walk over the complete graph gives a uniform spanning tree.
    keys = set()
    visited = {1}
    cur = 1
    while len(visited) < n:
        nxt = int(rng.integers(1, n))
        nxt = nxt + 1 if nxt >= cur else nxt
        if nxt not in visited:
            visited.add(nxt)
            keys.add((min(cur, nxt), max(cur, nxt)))
        cur = nxt
    while len(keys) < m:
        need = m - len(keys)
        us = rng.integers(1, n + 1, size=2 * need + 8)
        vs = rng.integers(1, n + 1, size=2 * need + 8)
        for u, v in zip(us.tolist(), vs.tolist()):
            if u != v:
                keys.add((min(u, v), max(u, v)))
                if len(keys) == m:
                    break
    keys = sorted(keys)
    if W:
        ws = rng.integers(1, W + 1, size=len(keys)).tolist()
    else:
        ws = [1] * len(keys)
    return Graph(n, [(u, v, w) for (u, v), w in zip(keys, ws)],
                 weighted=W is not None, W=W)


def random_bounded_degree(n: int, max_deg: int = 4, extra: float = 0.5, seed=0,
                          W: int | None = None) -> Graph:
    """Connected graph with maximum degree ``max_deg`` (path backbone plus chords)."""
    rng = _rng(seed)
    perm = (rng.permutation(n) + 1).tolist()
    deg = [0] * (n + 1)
    keys = set()
    for i in range(1, n):
        # random tree with degree cap: attach to a random earlier node with room
        for _ in range(32):
            p = perm[int(rng.integers(0, i))]
            if deg[p] < max_deg - 1:
                break
        else:
            p = perm[i - 1]
        keys.add((min(p, perm[i]), max(p, perm[i])))
        deg[p] += 1
        deg[perm[i]] += 1
    target = len(keys) + int(extra * n)
    for _ in range(20 * n):
        if len(keys) >= target:
            break
        u, v = (int(x) for x in rng.integers(1, n + 1, size=2))
        if u != v and deg[u] < max_deg and deg[v] < max_deg and (min(u, v), max(u, v)) not in keys:
            keys.add((min(u, v), max(u, v)))
            deg[u] += 1
            deg[v] += 1
    keys = sorted(keys)
    ws = rng.integers(1, W + 1, size=len(keys)).tolist() if W else [1] * len(keys)
    return Graph(n, [(u, v, w) for (u, v), w in zip(keys, ws)],
                 weighted=W is not None, W=W)


def random_gnp(n: int, p: float, seed=0) -> Graph:
    rng = _rng(seed)
    edges = [(i, j, 1) for i in range(1, n + 1) for j in range(i + 1, n + 1)
             if rng.random() < p]
    return Graph(n, edges, weighted=False)


def planted_cycle(n: int, length: int, extra_edges: int = 0, seed=0) -> Graph:
    """Random forest on ``n`` nodes with one planted cycle of ``length`` nodes.

    ``extra_edges`` random chords are added afterwards (these may create
    shorter cycles; pass 0 to keep the planted cycle as the unique one).
    """
    rng = _rng(seed)
    perm = (rng.permutation(n) + 1).tolist()
    ring = perm[:length]
    keys = {(min(a, b), max(a, b)) for a, b in zip(ring, ring[1:] + ring[:1])}
    for i in range(length, n):
        p = perm[int(rng.integers(0, i))]
        keys.add((min(p, perm[i]), max(p, perm[i])))
    while extra_edges > 0:
        u, v = (int(x) for x in rng.integers(1, n + 1, size=2))
        if u != v and (min(u, v), max(u, v)) not in keys:
            keys.add((min(u, v), max(u, v)))
            extra_edges -= 1
    return Graph(n, [(u, v, 1) for u, v in sorted(keys)], weighted=False)


def dumbbell(k: int, bridge_weight: int = 1, clique_weight: int = 5) -> Graph:
    """Two ``k``-cliques (nodes 1..k and k+1..2k) joined by edge (k, k+1)."""
    edges = []
    for off in (0, k):
        edges += [(off + i, off + j, clique_weight)
                  for i in range(1, k + 1) for j in range(i + 1, k + 1)]
    edges.append((k, k + 1, bridge_weight))
    return Graph(2 * k, edges, W=max(bridge_weight, clique_weight))
