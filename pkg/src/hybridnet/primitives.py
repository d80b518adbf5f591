"""Communication subroutines shared by the algorithm modules."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Hashable, Iterable

import numpy as np

from .graph import Graph, GraphError, id_bits
from .simcore import HybridConfig, Message, Network, TraceReport

_IDENTITY = {"MIN": math.inf, "MAX": -math.inf, "SUM": 0}


@dataclass(frozen=True)
class AggregateFn:
    """Distributive aggregate: MIN, MAX or SUM (values may be tuples for MIN/MAX)."""

    kind: str = "MIN"
    chunk_width: int | None = None

    def __post_init__(self):
        if self.kind not in _IDENTITY:
            raise ValueError(f"unsupported aggregate {self.kind!r}")

    @property
    def identity(self):
        return _IDENTITY[self.kind]

    def __call__(self, values: Iterable) -> Any:
        values = list(values)
        if not values:
            return self.identity
        if self.kind == "MIN":
            return min(values)
        if self.kind == "MAX":
            return max(values)
        return sum(values)

    def combine(self, a, b):
        if self.kind == "MIN":
            return a if a <= b else b
        if self.kind == "MAX":
            return a if a >= b else b
        return a + b


def value_bits(v) -> int:
    """Encoded size of an aggregate value (ints, tuples of ints, +-inf); negatives pay a sign bit."""
    if isinstance(v, tuple):
        return sum(value_bits(x) for x in v)
    if isinstance(v, float):
        if math.isinf(v):
            return 2
        if v.is_integer():
            return value_bits(int(v))
        return 64
    if isinstance(v, bool):
        return 1
    v = int(v)
    return max(1, v.bit_length() if v >= 0 else (-v).bit_length() + 1)


def _heap_parent(i: int, arity: int) -> int:
    return (i - 2) // arity + 1


def _heap_depths(n: int, arity: int) -> list[int]:
    depth = [0] * (n + 1)
    for i in range(2, n + 1):
        depth[i] = depth[_heap_parent(i, arity)] + 1
    return depth


@dataclass
class Result:
    """Per-node outputs plus the execution trace."""

    outputs: dict[int, Any]
    trace: TraceReport
    info: dict[str, Any] = field(default_factory=dict)


def _network(graph: Graph, config: HybridConfig | None, net: Network | None, name: str) -> Network:
    if net is not None:
        return net
    if config is None:
        config = HybridConfig.preset("HYBRID", graph.n)
    return Network(graph, config, name)


def aggregate_and_broadcast(graph: Graph, config: HybridConfig | None,
                            holders: dict[int, Any], f: AggregateFn | str = "MIN", *,
                            arity: int = 2, net: Network | None = None) -> Result:
    """Every node learns ``f`` over the holders' values.

    Convergecast then broadcast over a static ``arity``-ary heap tree on the
    IDs, laid over the global network.  ``arity=2`` gives ``2*floor(log2 n)``
    rounds; ``arity=gamma_msgs`` shortens the tree to ``log n / log log n``
    depth.  An empty holder set yields the identity of ``f``.
    """
    if isinstance(f, str):
        f = AggregateFn(f)
    net = _network(graph, config, net, "aggregate_and_broadcast")
    n = graph.n
    arity = max(2, min(arity, net.config.gamma_msgs or 2))
    depth = _heap_depths(n, arity)
    max_depth = max(depth[1:])
    partial: dict[int, Any] = {u: v for u, v in holders.items()}
    start = net.rounds
    with net.phase("aggregate"):
        for d in range(max_depth, 0, -1):
            msgs = [Message(u, _heap_parent(u, arity), partial[u], value_bits(partial[u]))
                    for u in range(1, n + 1) if depth[u] == d and u in partial]
            inbox = net.exchange(msgs)
            for p, lst in inbox.items():
                for mm in lst:
                    partial[p] = f.combine(partial[p], mm.data) if p in partial else mm.data
        result = partial.get(1, f.identity)
        known = {1: result}
        for d in range(0, max_depth):
            msgs = []
            for u in range(1, n + 1):
                if depth[u] != d:
                    continue
                first = arity * (u - 1) + 2
                for c in range(first, min(first + arity, n + 1)):
                    msgs.append(Message(u, c, known[u], value_bits(known[u])))
            inbox = net.exchange(msgs)
            for c, lst in inbox.items():
                known[c] = lst[0].data
    return Result(known, net.trace, {"rounds": net.rounds - start, "depth": max_depth})


def chunked_sum(graph: Graph, config: HybridConfig | None, values: dict[int, int],
                chunks: int, width: int | None = None, *, net: Network | None = None) -> Result:
    """Exact SUM of large non-negative integers via ``chunks`` narrow SUM passes.

    Each value is cut into ``width``-bit pieces; chunk sums are aggregated
    separately and recombined with carries at every node.
    """
    net = _network(graph, config, net, "chunked_sum")
    width = width or id_bits(graph.n)
    mask = (1 << width) - 1
    for u, v in values.items():
        if v < 0 or v >> (width * chunks):
            raise ValueError(f"value {v} at node {u} does not fit in {chunks}x{width} bits")
    sums = []
    for c in range(chunks):
        part = {u: (v >> (c * width)) & mask for u, v in values.items()}
        sums.append(aggregate_and_broadcast(graph, None, part, "SUM", net=net).outputs)
    total = {u: sum(sums[c][u] << (c * width) for c in range(chunks)) for u in graph.nodes}
    return Result(total, net.trace, {"chunks": chunks, "width": width})


def global_broadcast(graph: Graph, config: HybridConfig | None, source: int, value: Any,
                     bits: int | None = None, *, net: Network | None = None) -> Result:
    """Fan-out dissemination: every informed node informs ``gamma_msgs`` new ones per round."""
    net = _network(graph, config, net, "global_broadcast")
    n = graph.n
    bits = bits if bits is not None else value_bits(value)
    order = [source] + [u for u in range(1, n + 1) if u != source]
    informed = 1
    known = {source: value}
    g = net.config.gamma_msgs
    start = net.rounds
    with net.phase("broadcast"):
        while informed < n:
            msgs = []
            nxt = informed
            for i in range(informed):
                for _ in range(g):
                    if nxt >= n:
                        break
                    msgs.append(Message(order[i], order[nxt], known[order[i]], bits))
                    nxt += 1
            inbox = net.exchange(msgs)
            for u, lst in inbox.items():
                known[u] = lst[0].data
            informed = nxt
    return Result(known, net.trace, {"rounds": net.rounds - start})


# ---------------------------------------------------------------------------
# token dissemination

@dataclass
class TokenSet:
    """Knowledge of indexed tokens at every node, as integer bitmasks."""

    tokens: list[Hashable]
    masks: list[int]

    def holdings(self, u: int) -> frozenset:
        m = self.masks[u]
        return frozenset(t for i, t in enumerate(self.tokens) if m >> i & 1)

    @property
    def full(self) -> int:
        return (1 << len(self.tokens)) - 1

    def complete(self, u: int) -> bool:
        return self.masks[u] == self.full

    def all_complete(self) -> bool:
        full = self.full
        return all(m == full for m in self.masks[1:])


def index_tokens(placement: dict[int, Iterable[Hashable]]) -> tuple[list, dict, list[int]]:
    """Assign token indices; returns ``(tokens, index, initial masks by node)``."""
    tokens: list = []
    index: dict = {}
    for u in sorted(placement):
        for t in placement[u]:
            if t in index:
                raise ValueError(f"token {t!r} placed twice")
            index[t] = len(tokens)
            tokens.append(t)
    return tokens, index, []


def _check_connected(graph: Graph):
    if not graph.connected:
        raise GraphError("token dissemination needs a connected graph")


def token_dissemination(graph: Graph, config: HybridConfig | None,
                        placement: dict[int, Iterable[Hashable]], token_bits: int | None = None,
                        *, mode: str = "auto", net: Network | None = None) -> Result:
    """Every node collects all ``k`` distinct tokens.

    ``mode='auto'`` uses the deterministic cluster protocol when ``k >= n``
    and the randomized push-and-flood protocol otherwise.
    """
    _check_connected(graph)
    net = _network(graph, config, net, "token_dissemination")
    placement = {u: list(ts) for u, ts in placement.items()}
    k = sum(len(ts) for ts in placement.values())
    if token_bits is None:
        token_bits = 2 * id_bits(graph.n)
    if mode == "auto":
        mode = "det" if k >= graph.n else "rand"
    if mode == "det":
        from .sparselearn import disseminate_deterministic
        ts = disseminate_deterministic(graph, placement, token_bits, net=net)
    elif mode == "rand":
        ts = _disseminate_randomized(graph, placement, token_bits, net)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return Result({u: ts.masks[u] for u in graph.nodes}, net.trace,
                  {"tokens": ts, "k": k, "mode": mode})


def _popcount(x: int) -> int:
    return bin(x).count("1")


def _bits_of(x: int) -> list[int]:
    """Indices of the set bits of ``x`` in increasing order."""
    out = []
    while x:
        low = x & -x
        out.append(low.bit_length() - 1)
        x ^= low
    return out


def _disseminate_randomized(graph: Graph, placement: dict[int, list], token_bits: int,
                            net: Network) -> TokenSet:
    """Push tokens to random nodes over global edges while flooding them locally.

    Destinations in each round come from ``gamma_msgs`` seeded permutations,
    so every node receives at most ``gamma_msgs`` global messages.
    """
    n = graph.n
    tokens, index, _ = index_tokens(placement)
    k = len(tokens)
    masks = [0] * (n + 1)
    for u, ts in placement.items():
        for t in ts:
            masks[u] |= 1 << index[t]
    full = (1 << k) - 1
    fresh = masks[:]
    cursor = [0] * (n + 1)
    order = [_bits_of(masks[u]) for u in range(n + 1)]
    g = net.config.gamma_msgs
    use_local = net.config.lam > 0
    frag = max(1, -(-token_bits // net.config.gamma_bits)) if g else 1
    per_round = g // frag if g else 0
    nodes = list(graph.nodes)
    rnd = 0
    with net.phase("td_rand"):
        while any(masks[u] != full for u in nodes):
            msgs = []
            if use_local:
                for u in nodes:
                    if fresh[u]:
                        b = _popcount(fresh[u]) * token_bits
                        for v, _ in graph.neighbors(u):
                            msgs.append(Message(u, v, fresh[u], b, "local"))
            if per_round:
                rng = np.random.default_rng([net.config.seed & (2**64 - 1), 0x7D, rnd])
                perms = [rng.permutation(n) + 1 for _ in range(per_round)]
                for u in nodes:
                    ids = order[u]
                    if not ids:
                        continue
                    for j in range(per_round):
                        dst = int(perms[j][u - 1])
                        if dst == u:
                            continue
                        t = ids[cursor[u] % len(ids)]
                        cursor[u] += 1
                        # a token wider than one message travels as ``frag`` fragments
                        rest = token_bits
                        for f in range(frag):
                            fb = min(rest, net.config.gamma_bits)
                            rest -= fb
                            msgs.append(Message(u, dst, (1 << t) if f == 0 else 0, max(1, fb)))
            if not msgs:
                raise GraphError("token dissemination stalled")
            inbox = net.exchange(msgs)
            fresh = [0] * (n + 1)
            for u, lst in inbox.items():
                got = 0
                for mm in lst:
                    got |= mm.data
                new = got & ~masks[u]
                masks[u] |= new
                fresh[u] = new
                if new:
                    order[u].extend(_bits_of(new))
            rnd += 1
    return TokenSet(tokens, masks)


def bcc_round(graph: Graph, config: HybridConfig | None, values: dict[int, Any],
              bits: int | None = None, *, net: Network | None = None) -> Result:
    """All-to-all broadcast of one value per node via ``(n, 1)`` token dissemination."""
    if set(values) != set(graph.nodes):
        raise ValueError("bcc_round needs exactly one value per node")
    net = _network(graph, config, net, "bcc_round")
    if graph.n == 1:
        return Result({1: {1: values[1]}}, net.trace, {})
    b = bits if bits is not None else id_bits(graph.n) + max(value_bits(v) for v in values.values())
    td = token_dissemination(graph, None, {u: [(u, values[u])] for u in graph.nodes}, b, net=net)
    ts: TokenSet = td.info["tokens"]
    received = {}
    full = dict(ts.tokens)
    for u in graph.nodes:
        if ts.complete(u):
            received[u] = full
        else:
            received[u] = dict(ts.holdings(u))
    return Result(received, net.trace, {"mode": td.info["mode"]})
