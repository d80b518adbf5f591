"""Synchronous round engine with HYBRID capacity accounting.

Two ways of driving the engine share one capacity check:

* :func:`run` executes per-node :class:`NodeProgram` state machines.
* :class:`Network` is the engine handle used by the built-in algorithms,
  which orchestrate node-local state explicitly and push every round of
  traffic through :meth:`Network.exchange` (or :meth:`Network.local_bulk`
  for vectorised LOCAL rounds).
"""

from __future__ import annotations

import json
import math
from collections import Counter, defaultdict, deque
from dataclasses import asdict, dataclass, field
from typing import Any, Callable, Iterable

import numpy as np

from .graph import Graph, id_bits

UNBOUNDED = math.inf

DROP_POLICIES = ("adversarial-prefix", "random", "fail-fast")


class CapacityError(RuntimeError):
    """A round exceeded a local or global capacity under fail-fast."""


class RoundLimitExceeded(RuntimeError):
    def __init__(self, message: str, trace: "TraceReport"):
        super().__init__(message)
        self.trace = trace


@dataclass(frozen=True)
class HybridConfig:
    """Model parameters.

    ``lam`` is the local bit budget per edge, direction and round
    (``math.inf`` for LOCAL, 0 disables the local mode).  ``gamma_msgs``
    global messages of at most ``gamma_bits`` bits may be sent and received
    by each node per round.
    """

    lam: float = UNBOUNDED
    gamma_msgs: int = 0
    gamma_bits: int = 0
    drop_policy: str = "fail-fast"
    seed: int = 0
    name: str = "custom"

    def __post_init__(self):
        if self.drop_policy not in DROP_POLICIES:
            raise ValueError(f"unknown drop policy {self.drop_policy!r}")
        if self.lam < 0 or self.gamma_msgs < 0 or self.gamma_bits < 0:
            raise ValueError("capacities must be non-negative")

    @classmethod
    def preset(cls, name: str, n: int, *, c: int = 1, cB: int = 2,
               seed: int = 0, drop_policy: str = "fail-fast") -> "HybridConfig":
        """LOCAL, CONGEST, NCC, HYBRID or CONGEST+NCC for an ``n``-node graph."""
        logn = id_bits(n)
        name_u = name.upper().replace("-", "_").replace("+", "_")
        glob = dict(gamma_msgs=c * logn, gamma_bits=cB * logn)
        table = {
            "LOCAL": dict(lam=UNBOUNDED),
            "CONGEST": dict(lam=cB * logn),
            "NCC": dict(lam=0, **glob),
            "HYBRID": dict(lam=UNBOUNDED, **glob),
            "CONGEST_NCC": dict(lam=cB * logn, **glob),
        }
        if name_u not in table:
            raise ValueError(f"unknown preset {name!r}")
        return cls(seed=seed, drop_policy=drop_policy, name=name_u, **table[name_u])

    def with_seed(self, seed: int) -> "HybridConfig":
        return HybridConfig(self.lam, self.gamma_msgs, self.gamma_bits,
                            self.drop_policy, seed, self.name)

    @property
    def local_unbounded(self) -> bool:
        return math.isinf(self.lam)


@dataclass(frozen=True, slots=True)
class Message:
    src: int
    dst: int
    data: Any
    bits: int
    mode: str = "global"  # "local" | "global"


@dataclass
class TraceReport:
    algorithm: str = ""
    n: int = 0
    m: int = 0
    seed: int = 0
    rounds: int = 0
    local_bits: int = 0
    global_bits: int = 0
    global_msgs: int = 0
    dropped_msgs: int = 0
    violations: list[str] = field(default_factory=list)
    per_node_output: dict[int, Any] = field(default_factory=dict)
    phases: dict[str, int] = field(default_factory=dict)
    extra: dict[str, Any] = field(default_factory=dict)

    def record(self, *, outputs: bool = False, correct: bool | None = None,
               approx_ratio: float | None = None) -> dict:
        rec = {
            "algorithm": self.algorithm, "n": self.n, "m": self.m,
            "rounds": self.rounds, "local_bits": self.local_bits,
            "global_bits": self.global_bits, "dropped": self.dropped_msgs,
            "seed": self.seed,
        }
        if outputs:
            rec["outputs"] = {str(k): _jsonable(v) for k, v in sorted(self.per_node_output.items())}
        if correct is not None:
            rec["correct"] = bool(correct)
        if approx_ratio is not None:
            rec["approx_ratio"] = float(approx_ratio)
        if self.phases:
            rec["phases"] = dict(sorted(self.phases.items()))
        for k, v in sorted(self.extra.items()):
            rec.setdefault(k, _jsonable(v))
        return rec

    def to_json(self, **kw) -> str:
        return json.dumps(self.record(**kw), sort_keys=True)


def _jsonable(v):
    if isinstance(v, (set, frozenset)):
        return sorted(_jsonable(x) for x in v)
    if isinstance(v, tuple):
        return [_jsonable(x) for x in v]
    if isinstance(v, list):
        return [_jsonable(x) for x in v]
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in sorted(v.items(), key=lambda kv: str(kv[0]))}
    if isinstance(v, float) and math.isinf(v):
        return "inf" if v > 0 else "-inf"
    if isinstance(v, np.ndarray):
        return [_jsonable(x) for x in v.tolist()]
    if isinstance(v, np.bool_):
        return bool(v)
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (np.floating,)):
        return float(v)
    return v


def node_rng(seed: int, node: int, round_no: int) -> np.random.Generator:
    """Counter-based per-node stream keyed by (seed, node, round)."""
    return np.random.default_rng([int(seed) & (2**64 - 1), int(node), int(round_no)])


# ---------------------------------------------------------------------------
# capacity enforcement

def enforce_capacity(outboxes: dict[int, list[Message]], config: HybridConfig,
                     round_no: int = 0) -> tuple[list[Message], list[Message]]:
    """Split one round of traffic into ``(delivered, dropped)``.

    Senders keep at most ``gamma_msgs`` global messages and ``lam`` bits per
    local edge direction; receivers then keep at most ``gamma_msgs`` global
    messages.  Oversized global payloads are always dropped.
    """
    delivered: list[Message] = []
    dropped: list[Message] = []
    inbound: dict[int, list[Message]] = defaultdict(list)

    def order(msgs: list[Message], key, salt: int) -> list[Message]:
        if config.drop_policy == "random":
            rng = np.random.default_rng([config.seed & (2**64 - 1), round_no, salt])
            idx = rng.permutation(len(msgs))
            return [msgs[i] for i in idx]
        return sorted(msgs, key=key)

    for src in sorted(outboxes):
        msgs = outboxes[src]
        glob = [mm for mm in msgs if mm.mode == "global"]
        loc = [mm for mm in msgs if mm.mode == "local"]
        # local: per (edge, direction) bit budget, earliest-queued first
        used: dict[int, int] = defaultdict(int)
        for mm in loc:
            if used[mm.dst] + mm.bits <= config.lam:
                used[mm.dst] += mm.bits
                delivered.append(mm)
            else:
                dropped.append(mm)
        ok = [mm for mm in glob if mm.bits <= config.gamma_bits]
        dropped.extend(mm for mm in glob if mm.bits > config.gamma_bits)
        if len(ok) > config.gamma_msgs:
            ok = order(ok, key=lambda mm: mm.dst, salt=2 * src)
            dropped.extend(ok[config.gamma_msgs:])
            ok = ok[:config.gamma_msgs]
        for mm in ok:
            inbound[mm.dst].append(mm)
    for dst in sorted(inbound):
        msgs = inbound[dst]
        if len(msgs) > config.gamma_msgs:
            msgs = order(msgs, key=lambda mm: mm.src, salt=2 * dst + 1)
            dropped.extend(msgs[config.gamma_msgs:])
            msgs = msgs[:config.gamma_msgs]
        delivered.extend(msgs)
    return delivered, dropped


# ---------------------------------------------------------------------------
# algorithm-facing network handle

class Network:
    """Round counter and capacity auditor for one simulated execution."""

    def __init__(self, graph: Graph, config: HybridConfig, algorithm: str = ""):
        self.graph = graph
        self.config = config
        self.trace = TraceReport(algorithm=algorithm, n=graph.n, m=graph.m, seed=config.seed)
        self._label = "main"

    # convenience views
    @property
    def rounds(self) -> int:
        return self.trace.rounds

    @property
    def gamma(self) -> int:
        return self.config.gamma_msgs

    def phase(self, label: str) -> "_Phase":
        return _Phase(self, label)

    def _tick(self, rounds: int = 1):
        self.trace.rounds += rounds
        self.trace.phases[self._label] = self.trace.phases.get(self._label, 0) + rounds

    def exchange(self, messages: Iterable[Message]) -> dict[int, list[Message]]:
        """Execute one synchronous round and return the inboxes."""
        outboxes: dict[int, list[Message]] = defaultdict(list)
        for mm in messages:
            if mm.mode == "local" and not self.graph.has_edge(mm.src, mm.dst) and not (
                    self.graph.directed and self.graph.has_edge(mm.dst, mm.src)):
                raise CapacityError(f"local message {mm.src}->{mm.dst} off the graph")
            if mm.mode == "global" and self.config.gamma_msgs == 0:
                raise CapacityError("global message sent with global mode disabled")
            outboxes[mm.src].append(mm)
        delivered, dropped = enforce_capacity(outboxes, self.config, self.trace.rounds)
        if dropped and self.config.drop_policy == "fail-fast":
            mm = dropped[0]
            raise CapacityError(
                f"round {self.trace.rounds}: {len(dropped)} message(s) over capacity "
                f"(first {mm.mode} {mm.src}->{mm.dst}, {mm.bits} bits)")
        self._audit(delivered)
        self.trace.dropped_msgs += len(dropped)
        inbox: dict[int, list[Message]] = defaultdict(list)
        for mm in delivered:
            inbox[mm.dst].append(mm)
            if mm.mode == "local":
                self.trace.local_bits += mm.bits
            else:
                self.trace.global_bits += mm.bits
                self.trace.global_msgs += 1
        self._tick()
        return inbox

    def _audit(self, delivered: list[Message]):
        sent = Counter()
        recv = Counter()
        edge_bits = Counter()
        for mm in delivered:
            if mm.mode == "global":
                sent[mm.src] += 1
                recv[mm.dst] += 1
                if mm.bits > self.config.gamma_bits:
                    self.trace.violations.append(f"r{self.rounds}: payload {mm.bits} bits")
            else:
                edge_bits[(mm.src, mm.dst)] += mm.bits
        g = self.config.gamma_msgs
        for u, c in sent.items():
            if c > g:
                self.trace.violations.append(f"r{self.rounds}: node {u} sent {c} > {g}")
        for u, c in recv.items():
            if c > g:
                self.trace.violations.append(f"r{self.rounds}: node {u} received {c} > {g}")
        for e, b in edge_bits.items():
            if b > self.config.lam:
                self.trace.violations.append(f"r{self.rounds}: edge {e} carried {b} bits")

    def local_bulk(self, arc_bits: dict[tuple[int, int], int] | None = None,
                   total_bits: int | None = None, max_arc_bits: int = 0):
        """One LOCAL round whose traffic is given as bit counts per arc.

        Vectorised algorithms use this instead of materialising messages;
        the per-arc budget is still enforced.
        """
        if arc_bits is not None:
            total_bits = sum(arc_bits.values())
            max_arc_bits = max(arc_bits.values(), default=0)
            for (u, v) in arc_bits:
                if not self.graph.has_edge(u, v):
                    raise CapacityError(f"local traffic {u}->{v} off the graph")
        if max_arc_bits > self.config.lam:
            if self.config.drop_policy == "fail-fast":
                raise CapacityError(
                    f"round {self.rounds}: {max_arc_bits} bits on one edge exceeds lambda={self.config.lam}")
            self.trace.violations.append(f"r{self.rounds}: bulk local overflow")
        self.trace.local_bits += int(total_bits or 0)
        self._tick()

    def charge_local(self, rounds: int, bits: int = 0, reason: str = ""):
        """Account ``rounds`` LOCAL rounds spent on intra-cluster flooding.

        Only legal with unbounded local bandwidth: there, a flood over a
        cluster of hop radius ``r`` costs exactly ``r`` rounds whatever the
        payload size.
        """
        if rounds <= 0:
            return
        if not self.config.local_unbounded:
            raise CapacityError(f"{reason or 'local flooding'} requires unbounded local bandwidth")
        self.trace.local_bits += int(bits)
        self._tick(int(rounds))

    def global_transfer(self, items: Iterable[tuple[int, int, Any, int]]) -> dict[int, list[tuple[int, Any]]]:
        """Route logical ``(src, dst, data, bits)`` items over global edges.

        Items larger than ``gamma_bits`` travel as consecutive fragments.
        Rounds are packed greedily so no node sends or receives more than
        ``gamma_msgs`` fragments per round.  Returns ``dst -> [(src, data)]``.
        """
        cap_bits = self.config.gamma_bits
        g = self.config.gamma_msgs
        if g == 0 or cap_bits == 0:
            items = list(items)
            if items:
                raise CapacityError("global transfer with global mode disabled")
            return {}
        queues: dict[int, deque] = defaultdict(deque)
        total = 0
        for src, dst, data, bits in items:
            nfrag = max(1, -(-int(bits) // cap_bits))
            remaining = int(bits)
            for f in range(nfrag):
                last = f == nfrag - 1
                fb = max(1, remaining) if last else cap_bits
                remaining -= fb
                queues[src].append((dst, data if last else None, fb, last))
                total += 1
        out: dict[int, list[tuple[int, Any]]] = defaultdict(list)
        lookahead = 4 * g + 4
        order = sorted(queues)
        while total:
            msgs = []
            recv = Counter()
            for src in order:
                q = queues[src]
                if not q:
                    continue
                taken = 0
                blocked = set()
                keep = []
                scanned = 0
                while q and taken < g and scanned < lookahead:
                    item = q.popleft()
                    scanned += 1
                    dst = item[0]
                    # fragments to one destination leave in order
                    if dst not in blocked and recv[dst] < g:
                        recv[dst] += 1
                        taken += 1
                        msgs.append(Message(src, dst, (item[1], item[3]), item[2], "global"))
                    else:
                        blocked.add(dst)
                        keep.append(item)
                q.extendleft(reversed(keep))
            if not msgs:
                raise RuntimeError("global transfer scheduler made no progress")
            total -= len(msgs)
            inbox = self.exchange(msgs)
            for dst in sorted(inbox):
                for mm in inbox[dst]:
                    data, last = mm.data
                    if last:
                        out[dst].append((mm.src, data))
        return out


class _Phase:
    def __init__(self, net: Network, label: str):
        self.net, self.label = net, label

    def __enter__(self):
        self.prev = self.net._label
        self.net._label = self.label
        return self.net

    def __exit__(self, *exc):
        self.net._label = self.prev
        return False


# ---------------------------------------------------------------------------
# node-program execution

@dataclass
class NodeContext:
    id: int
    neighbors: list[tuple[int, int]]
    n: int
    config: HybridConfig


class NodeProgram:
    """Per-node state machine driven by :func:`run`.

    Subclasses override :meth:`on_round`, returning ``Message`` objects whose
    ``src`` is the node itself.  Set ``self.halted`` when done and leave the
    answer in ``self.output``.
    """

    def __init__(self):
        self.halted = False
        self.output: Any = None
        self.ctx: NodeContext | None = None

    def init(self, ctx: NodeContext):
        self.ctx = ctx

    def on_round(self, inbox: list[Message], rng: np.random.Generator) -> list[Message]:
        raise NotImplementedError


def run(program_factory: Callable[[int], NodeProgram], graph: Graph,
        config: HybridConfig, max_rounds: int = 10_000, algorithm: str = "program") -> TraceReport:
    """Run one program instance per node until all halt.

    A round is counted whenever at least one message is in flight or some
    node is still active after its step; the final quiet step is free.
    """
    if max_rounds < 1:
        raise ValueError("max_rounds must be >= 1")
    net = Network(graph, config, algorithm)
    progs: dict[int, NodeProgram] = {}
    for u in graph.nodes:
        p = program_factory(u)
        p.init(NodeContext(u, list(graph.neighbors(u)), graph.n, config))
        progs[u] = p
    inbox: dict[int, list[Message]] = defaultdict(list)
    step = 0
    while True:
        out: list[Message] = []
        for u in graph.nodes:
            p = progs[u]
            if p.halted:
                continue
            sent = p.on_round(inbox.get(u, []), node_rng(config.seed, u, step)) or []
            for mm in sent:
                if mm.src != u:
                    raise ValueError(f"node {u} forged sender {mm.src}")
            out.extend(sent)
        step += 1
        if not out and all(p.halted for p in progs.values()):
            break
        if net.rounds >= max_rounds:
            net.trace.per_node_output = {u: p.output for u, p in progs.items()}
            raise RoundLimitExceeded(f"no termination within {max_rounds} rounds", net.trace)
        inbox = net.exchange(out)
    net.trace.per_node_output = {u: p.output for u, p in progs.items()}
    return net.trace
