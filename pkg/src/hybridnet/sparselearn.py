"""Topology learning for sparse graphs.

Two pipelines are provided.  The randomized one broadcasts degrees, spreads
the edge tokens of high-degree nodes over their neighbourhoods and then runs
randomized token dissemination.  The deterministic one grows clusters of
size about ``s = floor(sqrt(n))`` with a GKP-style merge phase, cuts them into
fragments of size ``[s, 2s)``, lets every cluster learn every other cluster's
composition, balances the token load between clusters and finally rotates
each cluster's load through all other clusters over global edges.

Intra-cluster flooding is accounted with :meth:`Network.charge_local`: with
unbounded local bandwidth a flood through a cluster whose leader has
eccentricity ``e`` costs ``2e`` rounds irrespective of payload size.
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Hashable, Iterable

from .graph import Graph, GraphError, id_bits
from .primitives import (Result, TokenSet, _network, bcc_round, global_broadcast,
                         index_tokens, token_dissemination)
from .simcore import CapacityError, HybridConfig, Message, Network


@dataclass
class ClusterPartition:
    """Clusters ordered by leader ID; each member list is sorted."""

    clusters: list[list[int]]
    parent: list[int] = field(default_factory=list)
    flood_rounds: int = 0

    @property
    def leaders(self) -> list[int]:
        return [c[0] for c in self.clusters]

    @property
    def N(self) -> int:
        return len(self.clusters)

    def cluster_of(self, n: int) -> list[int]:
        owner = [-1] * (n + 1)
        for i, members in enumerate(self.clusters):
            for u in members:
                owner[u] = i
        return owner

    def sizes(self) -> list[int]:
        return [len(c) for c in self.clusters]


def _log_star(n: int) -> int:
    k, x = 0, float(n)
    while x > 1:
        x = math.log2(x)
        k += 1
    return k


def _leader_ecc(graph: Graph, members: list[int]) -> int:
    dist = graph.bfs(members[0], set(members))
    if len(dist) != len(members):
        raise GraphError(f"cluster led by {members[0]} is not connected")
    return max(dist.values())


class _UnionFind:
    def __init__(self, n: int):
        self.p = list(range(n + 1))

    def find(self, x: int) -> int:
        p = self.p
        while p[x] != x:
            p[x] = p[p[x]]
            x = p[x]
        return x

    def union(self, a: int, b: int):
        a, b = self.find(a), self.find(b)
        if a != b:
            if a < b:
                self.p[b] = a
            else:
                self.p[a] = b


def _groups(uf: _UnionFind, n: int) -> dict[int, list[int]]:
    g: dict[int, list[int]] = defaultdict(list)
    for u in range(1, n + 1):
        g[uf.find(u)].append(u)
    return g


def gkp_phase1(graph: Graph, config: HybridConfig | None = None, *, s: int | None = None,
               net: Network | None = None) -> ClusterPartition:
    """Grow connected clusters of at least ``s`` nodes (default ``floor(sqrt(n))``).

    Iteration ``i`` lets every component whose leader eccentricity is at
    most ``2**i`` propose its minimum outgoing edge, keyed by
    ``(w, min endpoint, max endpoint)``.  A greedy maximal matching by
    ascending leader ID merges matched pairs; unmatched proposers join the
    component they proposed to.
    """
    n = graph.n
    if not graph.connected:
        raise GraphError("GKP clustering needs a connected graph")
    net = _network(graph, config, net, "gkp_phase1")
    s = s if s is not None else max(1, math.isqrt(n))
    uf = _UnionFind(n)
    iterations = max(0, math.ceil(math.log2(s))) if s > 1 else 0
    with net.phase("gkp"):
        for i in range(iterations + 1):
            groups = _groups(uf, n)
            if len(groups) == 1:
                break
            radius = 1 << i
            proposals: dict[int, tuple] = {}
            max_ecc = 0
            for lead, members in groups.items():
                ecc = _leader_ecc(graph, members)
                max_ecc = max(max_ecc, ecc)
                if ecc > radius:
                    continue
                best = None
                for u in members:
                    for v, w in graph.neighbors(u):
                        if uf.find(v) != lead:
                            key = (w, min(u, v), max(u, v))
                            if best is None or key < best:
                                best = key
                proposals[lead] = best
            matched: dict[int, int] = {}
            for a in sorted(proposals):
                key = proposals[a]
                b = uf.find(key[1]) if uf.find(key[1]) != a else uf.find(key[2])
                if a not in matched and b not in matched:
                    matched[a] = b
                    matched[b] = a
            targets = {}
            for a, key in proposals.items():
                b = uf.find(key[1]) if uf.find(key[1]) != a else uf.find(key[2])
                targets[a] = b
            for a, b in targets.items():
                if matched.get(a) == b or a not in matched:
                    uf.union(a, b)
            new_ecc = max(_leader_ecc(graph, m) for m in _groups(uf, n).values())
            # probe radius, min-edge convergecast, proposal, symmetry breaking
            # on the proposal forest, then relabelling inside merged clusters
            probe = 2 * (min(radius, max_ecc) + 1)
            net.charge_local(probe + (_log_star(n) + 2) * (2 * new_ecc + 1) + new_ecc,
                             reason="GKP merging")
    groups = _groups(uf, n)
    clusters = sorted(groups.values(), key=lambda c: c[0])
    part = ClusterPartition(clusters, list(range(len(clusters))))
    part.flood_rounds = max(2 * _leader_ecc(graph, c) for c in clusters)
    return part


def fragment(partition: ClusterPartition, s: int) -> ClusterPartition:
    """Split every cluster of at least ``2s`` nodes into ID-contiguous pieces of size ``[s, 2s)``.

    A cluster of size ``c >= 2s`` becomes ``q = ceil(c / (2s - 1))`` pieces
    whose sizes differ by at most one, which keeps every piece at or above
    ``s``.  Smaller clusters are returned unchanged.
    """
    if s < 1:
        raise ValueError("fragment size must be positive")
    out: list[list[int]] = []
    parent: list[int] = []
    for idx, members in enumerate(partition.clusters):
        c = len(members)
        if c < s and partition.N > 1:
            raise GraphError(f"cluster of size {c} is below the fragment size {s}")
        if c < 2 * s:
            out.append(sorted(members))
            parent.append(idx)
            continue
        q = -(-c // (2 * s - 1))
        base, extra = divmod(c, q)
        ordered = sorted(members)
        pos = 0
        for j in range(q):
            size = base + (1 if j < extra else 0)
            out.append(ordered[pos:pos + size])
            parent.append(idx)
            pos += size
    order = sorted(range(len(out)), key=lambda i: out[i][0])
    res = ClusterPartition([out[i] for i in order], [parent[i] for i in order])
    res.flood_rounds = partition.flood_rounds
    return res


def _representative(part: ClusterPartition, i: int, j: int) -> int:
    """Member of cluster ``i`` assigned to cluster ``j`` (round-robin when ``N - 1 > |C_i|``)."""
    t = j if j < i else j - 1
    members = part.clusters[i]
    return members[t % len(members)]


def matching_components(graph: Graph, partition: ClusterPartition, config: HybridConfig | None = None,
                        *, net: Network | None = None) -> dict[int, frozenset]:
    """Every node learns the member list of every cluster.

    Returns, per node, the set of cluster indices whose full composition it
    has received.  Raises if any node misses a cluster.
    """
    net = _network(graph, config, net, "matching_components")
    part = partition
    N = part.N
    b = id_bits(graph.n)
    owner = part.cluster_of(graph.n)
    with net.phase("matching"):
        # members learn their own cluster
        net.charge_local(part.flood_rounds, reason="cluster composition flood")
        if N == 1:
            return {u: frozenset([0]) for u in graph.nodes}
        leaders = part.leaders
        # representatives announce themselves to the leaders they serve
        got_a = net.global_transfer(
            (_representative(part, i, j), leaders[j], (i, _representative(part, i, j)), 2 * b)
            for i in range(N) for j in range(N) if i != j)
        counterpart: dict[tuple[int, int], int] = {}
        for lead, lst in got_a.items():
            j = owner[lead]
            for _, (i, rep) in lst:
                counterpart[(j, i)] = rep
        # leaders tell their own representatives who their partner is
        items = []
        for (j, i), rep_i in counterpart.items():
            mine = _representative(part, j, i)
            if mine != leaders[j]:
                items.append((leaders[j], mine, (i, rep_i), 2 * b))
        net.global_transfer(items)
        # partners swap full member lists
        items = []
        for (j, i), rep_i in counterpart.items():
            mine = _representative(part, j, i)
            lst = tuple(part.clusters[j])
            items.append((mine, rep_i, (j, lst), len(lst) * b))
        got_c = net.global_transfer(items)
        learned: list[set[int]] = [set([i]) for i in range(N)]
        for dst, lst in got_c.items():
            for _, (j, members) in lst:
                if list(members) != part.clusters[j]:
                    raise RuntimeError("member list corrupted in transit")
                learned[owner[dst]].add(j)
        net.charge_local(part.flood_rounds, reason="composition flood")
    out = {}
    for u in graph.nodes:
        known = frozenset(learned[owner[u]])
        if len(known) != N:
            raise RuntimeError(f"node {u} knows only {len(known)} of {N} clusters")
        out[u] = known
    return out


def _balance_inside(members: list[int], tokens: list[int]) -> dict[int, list[int]]:
    q, r = divmod(len(tokens), len(members))
    out, pos = {}, 0
    for j, u in enumerate(members):
        size = q + (1 if j < r else 0)
        out[u] = tokens[pos:pos + size]
        pos += size
    return out


def transfer_schedule(loads: list[int], m: int) -> list[tuple[int, int, int]]:
    """Pair overloaded with underloaded clusters until no cluster exceeds ``2m/N``.

    Returns ``(from, to, amount)`` triples.  Every node computes the same
    schedule from the broadcast loads.
    """
    N = len(loads)
    loads = list(loads)
    hi = (2 * m) // N
    lo = -(-m // N)
    sched = []
    while True:
        over = [i for i in range(N) if N * loads[i] > 2 * m]
        under = [i for i in range(N) if N * loads[i] < m]
        if not over or not under:
            break
        for o, u in zip(over, under):
            t = min(loads[o] - hi, lo - loads[u])
            if t <= 0:
                continue
            loads[o] -= t
            loads[u] += t
            sched.append((o, u, t))
    return sched


def cluster_load_balancing(graph: Graph, partition: ClusterPartition, held: dict[int, list[int]],
                           token_bits: int, config: HybridConfig | None = None, *,
                           net: Network | None = None) -> dict[int, list[int]]:
    """Move tokens between clusters so no cluster carries more than ``2k/N``.

    ``held`` maps each node to the token indices it is responsible for; the
    returned map has loads differing by at most one inside each cluster.
    """
    net = _network(graph, config, net, "cluster_load_balancing")
    part = partition
    N = part.N
    k = sum(len(v) for v in held.values())
    ctoks = [sorted(t for u in members for t in held.get(u, ())) for members in part.clusters]
    with net.phase("load_balancing"):
        net.charge_local(part.flood_rounds, reason="load convergecast and spreading")
        if N == 1:
            return _balance_inside(part.clusters[0], ctoks[0])
        b = id_bits(max(k, 2)) + 1
        for j, lead in enumerate(part.leaders):
            global_broadcast(graph, None, lead, len(ctoks[j]), b, net=net)
        sched = transfer_schedule([len(t) for t in ctoks], k)
        layout = [_balance_inside(part.clusters[j], ctoks[j]) for j in range(N)]
        items = []
        for o, u, t in sched:
            senders = part.clusters[o]
            receivers = part.clusters[u]
            # take the top ``t`` tokens, dealt round-robin over the senders
            moving = ctoks[o][-t:]
            ctoks[o] = ctoks[o][:-t]
            for idx, tok in enumerate(moving):
                src = _holder(layout[o], tok)
                dst = receivers[idx % len(receivers)]
                items.append((src, dst, tok, token_bits))
            ctoks[u] = sorted(ctoks[u] + moving)
        net.global_transfer(items)
        net.charge_local(part.flood_rounds, reason="in-cluster rebalancing")
    out: dict[int, list[int]] = {}
    for j in range(N):
        out.update(_balance_inside(part.clusters[j], ctoks[j]))
    return out


def _holder(layout: dict[int, list[int]], tok: int) -> int:
    for u, toks in layout.items():
        if toks and toks[0] <= tok <= toks[-1]:
            return u
    raise KeyError(tok)


def disseminate_round_robin(graph: Graph, partition: ClusterPartition, held: dict[int, list[int]],
                            masks: list[int], token_bits: int, config: HybridConfig | None = None, *,
                            net: Network | None = None) -> list[int]:
    """Rotate every cluster's load through all other clusters, then flood locally.

    In iteration ``i`` cluster ``j`` (1-based) sends to cluster
    ``((i + j) mod N) + 1``; member ``p`` of the sender targets member
    ``p mod |C_target|``.  Returns the updated knowledge masks.
    """
    net = _network(graph, config, net, "disseminate_round_robin")
    part = partition
    N = part.N
    masks = list(masks)
    with net.phase("round_robin"):
        for i in range(N - 1):
            targets = [((i + j) % N) for j in range(1, N + 1)]
            if len(set(targets)) != N or any(t == j for j, t in enumerate(targets)):
                raise RuntimeError("rotation schedule collision")
            items = []
            for j in range(N):
                tgt = part.clusters[targets[j]]
                for p, u in enumerate(part.clusters[j]):
                    dst = tgt[p % len(tgt)]
                    for tok in held.get(u, ()):
                        items.append((u, dst, tok, token_bits))
            got = net.global_transfer(items)
            for dst, lst in got.items():
                acc = 0
                for _, tok in lst:
                    acc |= 1 << tok
                masks[dst] |= acc
        net.charge_local(part.flood_rounds, reason="final in-cluster flood")
    for members in part.clusters:
        acc = 0
        for u in members:
            acc |= masks[u]
            for tok in held.get(u, ()):
                acc |= 1 << tok
        for u in members:
            masks[u] = acc
    return masks


def disseminate_deterministic(graph: Graph, placement: dict[int, Iterable[Hashable]],
                              token_bits: int, *, net: Network, s: int | None = None,
                              edge_rule: bool = False) -> TokenSet:
    """Deterministic token dissemination through cluster rotation.

    ``s`` defaults to ``floor(sqrt(k))`` capped at ``n``.  With
    ``edge_rule`` the tokens are edges ``(u, v, w)`` and each is handed to
    its endpoint in the lower-indexed cluster before balancing.
    """
    if not net.config.local_unbounded:
        raise CapacityError("deterministic dissemination requires unbounded local bandwidth")
    n = graph.n
    tokens, index, _ = index_tokens(placement)
    k = len(tokens)
    masks = [0] * (n + 1)
    held: dict[int, list[int]] = defaultdict(list)
    for u, ts in placement.items():
        for t in ts:
            masks[u] |= 1 << index[t]
            held[u].append(index[t])
    if n == 1 or k == 0:
        full = (1 << k) - 1
        return TokenSet(tokens, [full] * (n + 1))
    s = s if s is not None else max(1, min(n, math.isqrt(k)))
    gkp = gkp_phase1(graph, s=s, net=net)
    part = fragment(gkp, s)
    with net.phase("leader_broadcast"):
        for lead in part.leaders:
            global_broadcast(graph, None, lead, lead, id_bits(n), net=net)
    matching_components(graph, part, net=net)
    if edge_rule:
        owner = part.cluster_of(n)
        net.charge_local(1, 2 * graph.m * id_bits(part.N), reason="cluster index swap")
        held = defaultdict(list)
        for t, i in index.items():
            u, v = t[0], t[1]
            cu, cv = owner[u], owner[v]
            holder = (min(u, v) if cu == cv else (u if cu < cv else v))
            held[holder].append(i)
            masks[holder] |= 1 << i
    held = cluster_load_balancing(graph, part, held, token_bits, net=net)
    masks = disseminate_round_robin(graph, part, held, masks, token_bits, net=net)
    net.trace.extra.setdefault("clusters", part.N)
    net.trace.extra.setdefault("cluster_size", s)
    return TokenSet(tokens, masks)


# ---------------------------------------------------------------------------
# learning pipelines

def _edge_tokens(edges: Iterable[tuple]) -> dict[int, list[tuple]]:
    placement: dict[int, list] = defaultdict(list)
    for e in edges:
        placement[min(e[0], e[1])].append(e)
    return placement


def _outputs(graph: Graph, ts: TokenSet) -> dict[int, frozenset]:
    everything = frozenset(ts.tokens)
    full = ts.full
    return {u: everything if ts.masks[u] == full else ts.holdings(u) for u in graph.nodes}


def _subgraph_tokens(graph: Graph, edges, token_bits):
    edges = list(graph.edges if edges is None else edges)
    for e in edges:
        if not graph.has_edge(e[0], e[1]):
            raise GraphError(f"edge {e[:2]} is not in the communication graph")
    return edges, (token_bits if token_bits is not None else graph.token_bits())


def learn_topology_deterministic(graph: Graph, config: HybridConfig | None = None, *,
                                 edges: Iterable[tuple] | None = None, token_bits: int | None = None,
                                 net: Network | None = None) -> Result:
    """Every node learns all edges (with weights) without using randomness.

    ``edges`` restricts the learned set to a subgraph of ``graph`` (for
    instance a spanner); communication still uses all of ``graph``.
    """
    if not graph.connected:
        raise GraphError("topology learning needs a connected graph")
    net = _network(graph, config, net, "learn_topology_deterministic")
    edges, tb = _subgraph_tokens(graph, edges, token_bits)
    ts = disseminate_deterministic(graph, _edge_tokens(edges), tb, net=net,
                                   s=max(1, math.isqrt(graph.n)), edge_rule=True)
    return Result(_outputs(graph, ts), net.trace, {"mode": "det", "tokens": ts})


def neighborhood_load_balance(graph: Graph, u: int, held: dict[int, list], token_bits: int,
                              config: HybridConfig | None = None, *,
                              net: Network | None = None) -> dict[int, list]:
    """Two local rounds: neighbours hand their tokens to ``u``, which deals them back evenly."""
    net = _network(graph, config, net, "neighborhood_load_balance")
    if not net.config.local_unbounded:
        raise CapacityError("neighbourhood load balancing needs unbounded local bandwidth")
    group = sorted([u] + [v for v, _ in graph.neighbors(u)])
    msgs = [Message(v, u, list(held.get(v, ())), max(1, len(held.get(v, ())) * token_bits), "local")
            for v, _ in graph.neighbors(u)]
    inbox = net.exchange(msgs)
    pool = list(held.get(u, ()))
    for mm in sorted(inbox.get(u, []), key=lambda mm: mm.src):
        pool.extend(mm.data)
    shares = _balance_inside(group, pool)
    out = dict(held)
    out[u] = shares[u]
    net.exchange([Message(u, v, shares[v], max(1, len(shares[v]) * token_bits), "local")
                  for v in group if v != u])
    for v in group:
        if v != u:
            out[v] = shares[v]
    return out


def learn_topology_randomized(graph: Graph, config: HybridConfig | None = None, *,
                              edges: Iterable[tuple] | None = None, token_bits: int | None = None,
                              net: Network | None = None) -> Result:
    """Every node learns all edges; high-degree nodes first spread their load."""
    if not graph.connected:
        raise GraphError("topology learning needs a connected graph")
    net = _network(graph, config, net, "learn_topology_randomized")
    edges, tb = _subgraph_tokens(graph, edges, token_bits)
    placement = _edge_tokens(edges)
    deg = {u: 0 for u in graph.nodes}
    for e in edges:
        deg[e[0]] += 1
        deg[e[1]] += 1
    with net.phase("degrees"):
        seen = bcc_round(graph, None, deg, net=net).outputs[1]
    m = sum(seen.values()) // 2
    if m == 0:
        empty = TokenSet([], [0] * (graph.n + 1))
        return Result({u: frozenset() for u in graph.nodes}, net.trace,
                      {"mode": "rand", "Q": [], "tokens": empty})
    root = math.sqrt(m)
    Q = [u for u in sorted(seen) if seen[u] > root]
    with net.phase("neighbourhood_balance"):
        for u in Q:
            placement = neighborhood_load_balance(graph, u, placement, tb, net=net)
    placement = {u: ts for u, ts in placement.items() if ts}
    td = token_dissemination(graph, None, placement, tb, mode="rand", net=net)
    ts: TokenSet = td.info["tokens"]
    return Result(_outputs(graph, ts), net.trace,
                  {"mode": "rand", "Q": Q, "max_load": max(len(v) for v in placement.values()),
                   "tokens": ts})
