"""Lower-bound instance generators and exact checkers for their value gaps.

Every generator is a deterministic function of its parameters and witness.
Nodes carry readable labels (``u3``, ``v'0``, ``f1`` ...) that map to IDs
``1..n`` in construction order; the mapping is kept on the instance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .graph import INF, Graph, GraphError
from .oracles import (enumerate_cuts, enumerate_cycles, exact_girth, exact_min_cut,
                      exact_radius_diameter, exact_st_mincut)

KINDS = ("mincut-hard", "dgirth-bcc", "dgirth-hybrid", "radius-bcc", "radius-hybrid",
         "radius-weighted", "count4cycle", "detect5cycle")


@dataclass
class GadgetInstance:
    graph: Graph
    kind: str
    witness: dict[str, Any]
    params: dict[str, Any]
    labels: dict[str, int] = field(default_factory=dict)

    def ids(self, prefix: str) -> list[int]:
        """IDs of all nodes whose label is ``prefix`` followed by a number."""
        out = []
        for lab, i in self.labels.items():
            if lab.startswith(prefix) and lab[len(prefix):].isdigit():
                out.append(i)
        return sorted(out)


class _Builder:
    def __init__(self):
        self.labels: dict[str, int] = {}
        self.edges: dict[tuple[int, int], int] = {}

    def node(self, label: str) -> int:
        if label not in self.labels:
            self.labels[label] = len(self.labels) + 1
        return self.labels[label]

    def edge(self, a: str, b: str, w: int = 1, directed: bool = False):
        u, v = self.node(a), self.node(b)
        key = (u, v) if directed else (min(u, v), max(u, v))
        self.edges[key] = w

    def path(self, a: str, b: str, length: int, tag: str, w: int = 1, directed: bool = False):
        """``length`` edges from ``a`` to ``b`` through fresh internal nodes."""
        prev = a
        for s in range(1, length):
            mid = f"{tag}~{s}"
            self.edge(prev, mid, w, directed)
            prev = mid
        self.edge(prev, b, w, directed)

    def build(self, directed: bool = False, weighted: bool = False) -> Graph:
        n = len(self.labels)
        edges = [(u, v, w) for (u, v), w in sorted(self.edges.items())]
        W = max((w for *_, w in edges), default=1)
        return Graph(n, edges, directed=directed, weighted=weighted, W=W,
                     weight_exponent=max(4, math.ceil(math.log(max(W, 2), max(n, 2))) + 1))


def _bits(x, length: int, name: str) -> np.ndarray:
    arr = np.asarray(list(x), dtype=np.int8)
    if arr.shape != (length,) or not np.isin(arr, (0, 1)).all():
        raise GraphError(f"{name} must be a 0/1 string of length {length}")
    return arr


def intersects(x, y) -> bool:
    return bool(np.any(np.asarray(x, dtype=bool) & np.asarray(y, dtype=bool)))


def random_witness(length: int, intersecting: bool, seed=0, density: float = 0.5):
    """Random ``(x, y)``; disjoint pairs clear ``y`` wherever ``x`` is set."""
    rng = np.random.default_rng(seed)
    x = (rng.random(length) < density).astype(np.int8)
    y = (rng.random(length) < density).astype(np.int8)
    if intersecting:
        b = int(rng.integers(length))
        x[b] = y[b] = 1
    else:
        y &= 1 - x
    return x, y


# ---------------------------------------------------------------------------
# generators

def gen_mincut_hard(n: int, W: int, seed=0) -> GadgetInstance:
    """Weight-``W`` path ``a..b`` of ``floor(sqrt n)`` edges plus a coin-split of the rest.

    ``a = 1``, the path occupies ``1..L+1`` (``b = L+1``), ``u = L+2`` and
    every remaining node joins ``V1`` (with ``a``) or ``V2`` (with ``u``) by
    a fair coin.  ``u`` has unit edges to all of ``V1``; each side is
    strung on a weight-``W`` path in ID order.
    """
    if n < 8:
        raise GraphError("the min-cut instance needs n >= 8")
    if W < n:
        raise GraphError("the min-cut instance needs W >= n")
    L = math.isqrt(n)
    a, b, u = 1, L + 1, L + 2
    rng = np.random.default_rng(seed)
    coins = rng.integers(0, 2, size=n - (L + 2))
    rest = list(range(L + 3, n + 1))
    V1 = [a] + [v for v, c in zip(rest, coins) if c == 1]
    V2 = [u] + [v for v, c in zip(rest, coins) if c == 0]
    edges = {}
    for i in range(1, L + 1):
        edges[(i, i + 1)] = W
    for side in (V1, V2):
        for p, q in zip(side, side[1:]):
            edges[(min(p, q), max(p, q))] = W
    for v in V1:
        edges[(min(u, v), max(u, v))] = 1
    g = Graph(n, [(p, q, w) for (p, q), w in sorted(edges.items())], W=W,
              weight_exponent=max(4, math.ceil(math.log(W, n)) + 1))
    labels = {"a": a, "b": b, "u": u}
    return GadgetInstance(g, "mincut-hard", {"V1": sorted(V1), "V2": sorted(V2)},
                          {"n": n, "W": W, "seed": seed, "L": L}, labels)


def gen_dgirth(k: int, ell: int, x, y) -> GadgetInstance:
    """Directed instance: ``u_i -> v_j`` iff ``x[i,j]``, ``v'_j -> u'_i`` iff ``y[i,j]``,
    and directed ``ell``-paths ``v_i ~> v'_i`` and ``u'_i ~> u_i``."""
    if k < 1 or ell < 1:
        raise GraphError("k and ell must be positive")
    x = _bits(x, k * k, "x")
    y = _bits(y, k * k, "y")
    B = _Builder()
    for grp in ("u", "v", "v'", "u'"):
        for i in range(k):
            B.node(f"{grp}{i}")
    for i in range(k):
        B.path(f"v{i}", f"v'{i}", ell, f"pv{i}", directed=True)
        B.path(f"u'{i}", f"u{i}", ell, f"pu{i}", directed=True)
    for i in range(k):
        for j in range(k):
            if x[i * k + j]:
                B.edge(f"u{i}", f"v{j}", directed=True)
            if y[i * k + j]:
                B.edge(f"v'{j}", f"u'{i}", directed=True)
    kind = "dgirth-bcc" if ell == 1 else "dgirth-hybrid"
    return GadgetInstance(B.build(directed=True), kind, {"x": x, "y": y},
                          {"k": k, "ell": ell}, B.labels)


def radius_node_count(k: int, ell: int) -> int:
    """Closed form for the radius construction's node count."""
    l = max(0, math.ceil(math.log2(k))) if k > 1 else 0
    return 4 * k + 4 * l + 2 + (ell + 2) + k * (ell - 1) + 2 * l * (ell - 1)


def gen_radius(k: int, ell: int, x, y, W: int | None = None) -> GadgetInstance:
    """Radius instance with a bit-gadget over ``l = ceil(log2 k)`` bits.

    With ``W`` set, every edge weighs ``W`` except the ``V``-``V'`` paths,
    the ``F``-``T'`` and ``T``-``F'`` paths and the ``z_1 .. z_(ell+1)`` path,
    which weigh 1.
    """
    if k < 2 or ell < 1:
        raise GraphError("need k >= 2 and ell >= 1")
    if W is not None and W < 2:
        raise GraphError("weighted mode needs W >= 2")
    x = _bits(x, k * k, "x")
    y = _bits(y, k * k, "y")
    l = math.ceil(math.log2(k))
    heavy = W if W is not None else 1
    B = _Builder()
    for grp in ("u", "v", "v'", "u'"):
        for i in range(k):
            B.node(f"{grp}{i}")
    for grp in ("f", "t", "f'", "t'"):
        for j in range(l):
            B.node(f"{grp}{j}")
    B.node("w")
    B.node("w'")
    for s in range(ell + 2):
        B.node(f"z{s}")
    for i in range(k):
        B.path(f"v{i}", f"v'{i}", ell, f"vv{i}", 1)
    for i in range(k):
        for j in range(l):
            side = "t" if (i >> j) & 1 else "f"
            B.edge(f"u{i}", f"{side}{j}", heavy)
            B.edge(f"u'{i}", f"{side}'{j}", heavy)
    for j in range(l):
        B.edge(f"f{j}", f"t{j}", heavy)
        B.edge(f"f'{j}", f"t'{j}", heavy)
        B.path(f"f{j}", f"t'{j}", ell, f"ft{j}", 1)
        B.path(f"t{j}", f"f'{j}", ell, f"tf{j}", 1)
    for i in range(k):
        B.edge("w", f"u{i}", heavy)
        B.edge("w", f"v{i}", heavy)
        B.edge("w'", f"u'{i}", heavy)
        B.edge("w'", f"v'{i}", heavy)
        B.edge("z0", f"u{i}", heavy)
    B.edge("z0", "z1", heavy)
    for s in range(1, ell + 1):
        B.edge(f"z{s}", f"z{s + 1}", 1)
    for i in range(k):
        for j in range(k):
            if x[i * k + j]:
                B.edge(f"u{i}", f"v{j}", heavy)
            if y[i * k + j]:
                B.edge(f"v'{j}", f"u'{i}", heavy)
    if W is not None:
        kind = "radius-weighted"
    else:
        kind = "radius-bcc" if ell == 1 else "radius-hybrid"
    g = B.build(weighted=W is not None)
    return GadgetInstance(g, kind, {"x": x, "y": y}, {"k": k, "ell": ell, "W": W, "l": l}, B.labels)


def pair_index(b: int, r: int) -> tuple[int, int]:
    """``b``-th pair ``(i, j)``, ``1 <= i < j <= r``, in lexicographic order."""
    for i in range(1, r):
        span = r - i
        if b < span:
            return i, i + 1 + b
        b -= span
    raise IndexError("pair index out of range")


def gen_count4cycle(k: int, x, y) -> GadgetInstance:
    """Alice's bits as edges on ``V = 1..r``, Bob's on ``V' = r+1..2r``, plus the matching ``i - i'``."""
    if k < 1:
        raise GraphError("k must be positive")
    x = _bits(x, k, "x")
    y = _bits(y, k, "y")
    r = 2
    while r * (r - 1) // 2 < k:
        r += 1
    B = _Builder()
    for i in range(1, r + 1):
        B.node(f"a{i}")
    for i in range(1, r + 1):
        B.node(f"b{i}")
    for i in range(1, r + 1):
        B.edge(f"a{i}", f"b{i}")
    for b in range(k):
        i, j = pair_index(b, r)
        if x[b]:
            B.edge(f"a{i}", f"a{j}")
        if y[b]:
            B.edge(f"b{i}", f"b{j}")
    return GadgetInstance(B.build(), "count4cycle", {"x": x, "y": y}, {"k": k, "r": r}, B.labels)


def gen_detect5cycle(k: int, x, y) -> GadgetInstance:
    """Experimental construction: bipartite inputs, fixed ``v_j - v'_j`` and paths ``u'_i - m_i - u_i``.

    Without the ``m`` nodes the graph is bipartite, so any odd cycle passes
    through some ``m_i`` and must close ``u_i ~ u'_i`` in three hops, which
    requires a common input bit.
    """
    x = _bits(x, k * k, "x")
    y = _bits(y, k * k, "y")
    B = _Builder()
    for grp in ("u", "v", "v'", "u'", "m"):
        for i in range(k):
            B.node(f"{grp}{i}")
    for i in range(k):
        B.edge(f"v{i}", f"v'{i}")
        B.edge(f"u'{i}", f"m{i}")
        B.edge(f"m{i}", f"u{i}")
    for i in range(k):
        for j in range(k):
            if x[i * k + j]:
                B.edge(f"u{i}", f"v{j}")
            if y[i * k + j]:
                B.edge(f"v'{j}", f"u'{i}")
    return GadgetInstance(B.build(), "detect5cycle", {"x": x, "y": y},
                          {"k": k, "experimental": True}, B.labels)


def generate(kind: str, *, k: int = 2, ell: int = 1, W: int | None = None, n: int = 16,
             x=None, y=None, seed=0, intersecting: bool | None = None) -> GadgetInstance:
    """Dispatch by kind; missing witnesses are drawn at random."""
    if kind not in KINDS:
        raise ValueError(f"unknown gadget kind {kind!r}")
    if kind == "mincut-hard":
        return gen_mincut_hard(n, W if W is not None else n, seed)
    length = k if kind == "count4cycle" else k * k
    if x is None or y is None:
        x, y = random_witness(length, bool(intersecting) if intersecting is not None else True, seed)
    if kind.startswith("dgirth"):
        return gen_dgirth(k, 1 if kind == "dgirth-bcc" else ell, x, y)
    if kind == "radius-bcc":
        return gen_radius(k, 1, x, y)
    if kind == "radius-hybrid":
        return gen_radius(k, ell, x, y)
    if kind == "radius-weighted":
        return gen_radius(k, ell, x, y, W if W is not None else 4)
    if kind == "count4cycle":
        return gen_count4cycle(k, x, y)
    return gen_detect5cycle(k, x, y)


# ---------------------------------------------------------------------------
# verification

@dataclass
class Verdict:
    claim_holds: bool | None
    predicted: Any
    observed: Any
    details: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if self.claim_holds is not None:
            self.claim_holds = bool(self.claim_holds)

    def as_dict(self) -> dict:
        return {"claim_holds": self.claim_holds, "predicted": self.predicted,
                "observed": self.observed, **self.details}


def _fmt(v):
    return "inf" if v == INF else (int(v) if float(v).is_integer() else float(v))


def classify_4cycles(inst: GadgetInstance) -> dict[str, int]:
    r = inst.params["r"]
    counts = {"i": 0, "ii": 0, "iii": 0, "other": 0}
    for cyc in enumerate_cycles(inst.graph, 4):
        left = sum(1 for v in cyc if v <= r)
        if left == 4:
            counts["i"] += 1
        elif left == 0:
            counts["ii"] += 1
        elif left == 2:
            counts["iii"] += 1
        else:
            counts["other"] += 1
    return counts


def verify_claim(inst: GadgetInstance) -> Verdict:
    """Compare the exact oracle value against the value the construction promises."""
    kind = inst.kind
    g = inst.graph
    if kind == "mincut-hard":
        V1, V2 = inst.witness["V1"], inst.witness["V2"]
        W = inst.params["W"]
        val, side = exact_min_cut(g)
        sides = {frozenset(side), frozenset(set(g.nodes) - set(side))}
        ab, _ = exact_st_mincut(g, inst.labels["a"], inst.labels["b"])
        ok = val == len(V1) and frozenset(V2) in sides and ab >= W and len(V1) < W
        details = {"st_ab": _fmt(ab), "strict": len(V1) < W}
        if g.n <= 24:
            cuts = enumerate_cuts(g)
            a, b = inst.labels["a"], inst.labels["b"]
            masks = np.arange(len(cuts), dtype=np.int64)
            sep = ((masks >> (b - 2)) & 1).astype(bool) if b >= 2 else np.zeros(len(cuts), bool)
            sep[0] = False
            min_sep = float(cuts[sep].min()) if sep.any() else INF
            unique = int((cuts == cuts.min()).sum()) == 1
            ok = ok and min_sep >= W and unique and float(cuts.min()) == len(V1)
            details.update(min_ab_cut=_fmt(min_sep), unique=unique)
        return Verdict(ok, len(V1), _fmt(val), details)
    if kind.startswith("dgirth"):
        ell = inst.params["ell"]
        gval = exact_girth(g, directed=True, weighted=False)
        if intersects(inst.witness["x"], inst.witness["y"]):
            pred = 2 + 2 * ell
            return Verdict(gval == pred, pred, _fmt(gval))
        pred = 4 + 4 * ell
        return Verdict(gval >= pred, f">={pred}", _fmt(gval))
    if kind.startswith("radius"):
        ell = inst.params["ell"]
        W = inst.params["W"]
        R, _, ecc = exact_radius_diameter(g)
        U = set(inst.ids("u"))
        non_u = [ecc[v - 1] for v in g.nodes if v not in U]
        hit = intersects(inst.witness["x"], inst.witness["y"])
        if kind == "radius-weighted":
            details = {"min_ecc_outside_U": _fmt(min(non_u))}
            if W <= ell:
                details["regime"] = "W <= ell: not checked"
                pred = ell + 2 * W if hit else ell + 3 * W
                return Verdict(None, pred, _fmt(R), details)
            outside = min(non_u) >= ell + 3 * W
            pred = ell + 2 * W if hit else ell + 3 * W
            return Verdict(R == pred and outside, pred, _fmt(R), details)
        if ell == 1:
            outside = min(non_u) >= 4
            pred = 3 if hit else 4
            return Verdict(R == pred and outside, pred, _fmt(R),
                           {"min_ecc_outside_U": _fmt(min(non_u))})
        if hit:
            return Verdict(R == ell + 2, ell + 2, _fmt(R))
        return Verdict(R >= ell + 3, f">={ell + 3}", _fmt(R))
    if kind == "count4cycle":
        counts = classify_4cycles(inst)
        pred = int(np.sum(inst.witness["x"] & inst.witness["y"]))
        return Verdict(counts["iii"] == pred and counts["other"] == 0, pred, counts["iii"], counts)
    if kind == "detect5cycle":
        found = next(iter(enumerate_cycles(g, 5)), None)
        hit = intersects(inst.witness["x"], inst.witness["y"])
        return Verdict((found is not None) == hit, hit, found is not None,
                       {"experimental": True, "example": list(found) if found else None})
    raise ValueError(f"unknown gadget kind {kind!r}")
