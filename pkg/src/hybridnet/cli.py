"""Command line front end and batch experiment runner.

Every run prints or appends one JSON object per line.  A run is fully
determined by its parameters and seed, and the emitted record carries both,
so ``run_experiment`` on the same ExperimentSpec always writes the same bytes.
"""

from __future__ import annotations

import argparse
import itertools
import json
import math
import os
import sys
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable

import numpy as np

from . import gadgets, oracles
from .distances import count_cycles, detect_cycle, rv_diameter
from .graph import (Graph, GraphError, complete_graph, cycle_graph, load_graph, path_graph,
                    random_bounded_degree, random_connected, random_tree)
from .shortcuts import PLUGINS, boruvka_mst, diameter_virtual_tree
from .simcore import CapacityError, HybridConfig, _jsonable
from .sparselearn import learn_topology_deterministic, learn_topology_randomized
from .sparsify import apsp_unweighted, apsp_weighted, girth, solve_cuts

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
SEED_ENV = "HYBRIDNET_SEED"


def default_seed() -> int:
    raw = os.environ.get(SEED_ENV, "0")
    try:
        return int(raw)
    except ValueError:
        raise SystemExit(f"{SEED_ENV} must be an integer, got {raw!r}")


# ---------------------------------------------------------------------------
# experiment definition

FAMILIES = ("path", "cycle", "clique", "tree", "random-m", "bounded-degree")


@dataclass
class ExperimentSpec:
    algorithm: str
    family: str = "random-m"
    n: list[int] = field(default_factory=lambda: [16])
    seeds: list[int] = field(default_factory=lambda: [0])
    m_factor: float = 2.0
    W: int = 1
    eps: float = 0.5
    k: int = 2
    r: int = 4
    plugin: str = "ecc"
    preset: str | None = None
    graph_file: str | None = None
    output: str | None = None

    def validate(self):
        if self.algorithm not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {self.algorithm!r}; choose from {sorted(ALGORITHMS)}")
        if self.plugin not in PLUGINS:
            raise ValueError(f"unknown diameter plug-in {self.plugin!r}")
        if self.graph_file is None and self.family not in FAMILIES:
            raise ValueError(f"unknown graph family {self.family!r}")

    def grid(self):
        if self.graph_file is not None:
            return [(None, s) for s in self.seeds]
        return list(itertools.product(self.n, self.seeds))


def make_graph(family: str, n: int, seed: int, *, m_factor: float = 2.0, W: int = 1) -> Graph:
    """Graph for one grid point; ``random-m`` draws a spanning tree plus uniform extra edges."""
    w = W if W > 1 else None
    if family == "path":
        return path_graph(n)
    if family == "cycle":
        return cycle_graph(n)
    if family == "clique":
        return complete_graph(n)
    if family == "tree":
        return random_tree(n, seed, w)
    if family == "random-m":
        m = min(n * (n - 1) // 2, max(n - 1, int(round(m_factor * n))))
        return random_connected(n, m, seed, w)
    if family == "bounded-degree":
        return random_bounded_degree(n, 4, 0.5, seed, w)
    raise ValueError(f"unknown graph family {family!r}")


DEFAULT_PRESET = {"mst": "CONGEST_NCC", "diameter-vt": "CONGEST_NCC"}


def _config(spec: ExperimentSpec, graph: Graph, seed: int) -> HybridConfig:
    name = spec.preset or DEFAULT_PRESET.get(spec.algorithm, "HYBRID")
    kw = {"cB": 8} if spec.algorithm == "diameter-vt" else {}
    return HybridConfig.preset(name, graph.n, seed=seed, **kw)


# ---------------------------------------------------------------------------
# algorithm adapters: each returns (Result, correct, approx_ratio)

def _check_learn(graph, res):
    full = graph.edge_set()
    return all(frozenset(res.outputs[u]) == full for u in graph.nodes), None


def _check_apsp(graph, res):
    D = oracles.exact_apsp(graph)
    est = np.vstack([res.outputs[u] for u in graph.nodes])
    off = ~np.eye(graph.n, dtype=bool)
    if np.any(est < D - 1e-9):
        return False, None
    ratio = float(np.max(est[off] / D[off])) if graph.n > 1 else 1.0
    return True, ratio


def _run_learn(mode):
    fn = learn_topology_deterministic if mode == "det" else learn_topology_randomized

    def run(graph, spec, cfg):
        res = fn(graph, cfg)
        return (res, *_check_learn(graph, res))
    return run


def _run_apsp(graph, spec, cfg):
    res = apsp_weighted(graph, cfg)
    ok, ratio = _check_apsp(graph, res)
    k = res.info["k"]
    return res, ok and (ratio is None or ratio <= 2 * k - 1 + 1e-9), ratio


def _run_apsp_unweighted(graph, spec, cfg):
    res = apsp_unweighted(graph, spec.eps, config=cfg)
    ok, ratio = _check_apsp(graph, res)
    return res, ok, ratio


def _run_cuts(graph, spec, cfg):
    res = solve_cuts(graph, spec.eps, cfg, problems=("mincut",))
    val = res.info["answer"]["mincut"][0]
    exact, _ = oracles.exact_min_cut(graph)
    ratio = val / exact
    same = len({repr(res.outputs[u]) for u in graph.nodes}) == 1
    return res, same and ratio <= 1 + spec.eps + 1e-9, ratio


def _run_girth(graph, spec, cfg):
    res = girth(graph, cfg)
    g = res.outputs[1]
    return res, all(res.outputs[u] == g for u in graph.nodes) and g == oracles.exact_girth(graph), None


def _run_mst(graph, spec, cfg):
    res = boruvka_mst(graph, cfg)
    want, _ = oracles.exact_mst(graph)
    got = frozenset(res.info["mst"])
    norm = lambda es: frozenset((min(a, b), max(a, b), w) for a, b, w in es)
    return res, norm(got) == norm(want), None


def _run_diameter_vt(graph, spec, cfg):
    res = diameter_virtual_tree(graph, spec.plugin, cfg)
    _, D, _ = oracles.exact_radius_diameter(graph)
    est = res.info["estimate"]
    return res, D <= est <= res.info["rho"] * D, est / D if D else 1.0


def _run_diameter_rv(graph, spec, cfg):
    res = rv_diameter(graph, cfg)
    _, D, _ = oracles.exact_radius_diameter(graph)
    est = res.outputs[1]
    return res, math.ceil(2 * D / 3) <= est <= D, est / D if D else 1.0


def _run_cycles(count: bool):
    def run(graph, spec, cfg):
        want = oracles.count_cycles_bruteforce(graph, spec.r)
        if count:
            res = count_cycles(graph, spec.r, cfg)
            ok = all(res.outputs[u] == want for u in graph.nodes)
        else:
            res = detect_cycle(graph, spec.r, cfg)
            ok = all(res.outputs[u] == (want > 0) for u in graph.nodes)
        return res, ok, None
    return run


ALGORITHMS: dict[str, Callable] = {
    "learn-det": _run_learn("det"),
    "learn-rand": _run_learn("rand"),
    "apsp": _run_apsp,
    "apsp-unweighted": _run_apsp_unweighted,
    "mincut": _run_cuts,
    "girth": _run_girth,
    "mst": _run_mst,
    "diameter-vt": _run_diameter_vt,
    "diameter-rv": _run_diameter_rv,
    "cycles-detect": _run_cycles(False),
    "cycles-count": _run_cycles(True),
}


def run_one(spec: ExperimentSpec, n: int | None, seed: int, *, outputs: bool = False) -> dict:
    """Execute a single grid point and return its JSON record."""
    if spec.graph_file is not None:
        graph = load_graph(Path(spec.graph_file).read_text())
    else:
        graph = make_graph(spec.family, n, seed, m_factor=spec.m_factor, W=spec.W)
    cfg = _config(spec, graph, seed)
    res, ok, ratio = ALGORITHMS[spec.algorithm](graph, spec, cfg)
    res.trace.seed = seed
    if outputs:
        res.trace.per_node_output = res.outputs
    rec = res.trace.record(outputs=outputs, correct=ok, approx_ratio=ratio)
    rec["spec"] = {"algorithm": spec.algorithm, "family": spec.family, "n": graph.n, "seed": seed,
                   "m_factor": spec.m_factor, "W": spec.W, "eps": spec.eps, "k": spec.k, "r": spec.r,
                   "plugin": spec.plugin, "preset": spec.preset, "graph_file": spec.graph_file}
    rec["violations"] = len(res.trace.violations)
    return rec


def summarize(records: list[dict]) -> dict:
    """Pure function of the records."""
    done = [r for r in records if "rounds" in r]
    return {"summary": True, "runs": len(done),
            "correct": sum(1 for r in done if r.get("correct")),
            "failed": sum(1 for r in done if r.get("correct") is False),
            "max_rounds": max((r["rounds"] for r in done), default=0)}


def run_experiment(spec: ExperimentSpec, output: str | os.PathLike | None = None) -> list[dict]:
    """Run every grid point, write one JSON line per run plus a summary line."""
    spec.validate()
    grid = spec.grid()
    out = output if output is not None else spec.output
    if not grid:
        warnings.warn("experiment grid is empty", RuntimeWarning)
        if out is not None:
            Path(out).write_text("")
        return []
    records = [run_one(spec, n, s) for n, s in grid]
    if out is not None:
        with open(out, "w") as fh:
            for r in records:
                fh.write(json.dumps(_jsonable(r), sort_keys=True) + "\n")
            fh.write(json.dumps(summarize(records), sort_keys=True) + "\n")
    return records


def load_report(path) -> list[dict]:
    with open(path) as fh:
        return [json.loads(line) for line in fh if line.strip()]


def fit_scaling(report, x: str = "n", y: str = "rounds") -> tuple[float, float]:
    """Least-squares slope of ``log y`` against ``log x`` and its R^2."""
    records = load_report(report) if isinstance(report, (str, os.PathLike)) else list(report)
    pts = [(float(r[x]), float(r[y])) for r in records if x in r and y in r]
    if len({p[0] for p in pts}) < 4:
        raise ValueError("scaling fit needs at least four distinct x values")
    if any(a <= 0 or b <= 0 for a, b in pts):
        raise ValueError("scaling fit needs positive data")
    lx = np.log([p[0] for p in pts])
    ly = np.log([p[1] for p in pts])
    slope, icept = np.polyfit(lx, ly, 1)
    resid = ly - (slope * lx + icept)
    ss_tot = float(np.sum((ly - ly.mean()) ** 2))
    if ss_tot == 0:
        raise ValueError("degenerate data: y is constant")
    return float(slope), 1.0 - float(np.sum(resid ** 2)) / ss_tot


# ---------------------------------------------------------------------------
# configuration files

def read_config(path) -> dict[str, str]:
    """Flat ``key = value`` lines; ``#`` starts a comment."""
    cfg = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        cfg[key.replace("-", "_")] = value
    return cfg


def _ints(text) -> list[int]:
    if isinstance(text, list):
        return [int(v) for v in text]
    return [int(v) for v in str(text).replace(",", " ").split()]


def spec_from_mapping(values: dict[str, Any]) -> ExperimentSpec:
    kw: dict[str, Any] = {}
    conv = {"n": _ints, "seeds": _ints, "m_factor": float, "W": int, "eps": float, "k": int,
            "r": int, "plugin": str, "algorithm": str, "family": str, "preset": str, "graph_file": str, "output": str}
    for key, value in values.items():
        if value is None:
            continue
        if key not in conv:
            raise ValueError(f"unknown experiment key {key!r}")
        kw[key] = conv[key](value)
    if "algorithm" not in kw:
        raise ValueError("experiment needs an algorithm")
    return ExperimentSpec(**kw)


# ---------------------------------------------------------------------------
# argument parsing

def _emit(obj, stream=None):
    print(json.dumps(_jsonable(obj), sort_keys=True), file=stream or sys.stdout)


def _graph_args(p: argparse.ArgumentParser):
    p.add_argument("--graph", help="graph file in the edge-list format")
    p.add_argument("--family", default=None, choices=FAMILIES)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--m-factor", type=float, default=None)
    p.add_argument("--W", type=int, default=None, help="maximum edge weight for random families")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--preset", default=None, help="LOCAL, CONGEST, NCC, HYBRID or CONGEST_NCC")
    p.add_argument("--outputs", action="store_true", help="include per-node outputs")
    p.add_argument("--config", help="flat key=value file; flags override it")


def _single(args, algorithm: str, extra: dict | None = None) -> int:
    values = read_config(args.config) if args.config else {}
    values["algorithm"] = algorithm
    flags = {"family": args.family, "W": args.W, "m_factor": args.m_factor,
             "preset": args.preset, "graph_file": args.graph}
    if args.n is not None:
        flags["n"] = [args.n]
    seed = args.seed if args.seed is not None else int(values.pop("seed", default_seed()))
    values.pop("seed", None)
    flags["seeds"] = [seed]
    flags.update(extra or {})
    values.update({k: v for k, v in flags.items() if v is not None})
    spec = spec_from_mapping(values)
    spec.validate()
    n, s = spec.grid()[0]
    rec = run_one(spec, n, s, outputs=args.outputs)
    _emit(rec)
    return EXIT_OK if rec.get("correct", True) else EXIT_FAIL


def _parse_hex(text: str, length: int, name: str) -> np.ndarray:
    try:
        val = int(text, 16)
    except ValueError:
        raise GraphError(f"--{name}-hex is not hexadecimal")
    if val >> length:
        raise GraphError(f"--{name}-hex has more than {length} bits")
    return np.array([(val >> b) & 1 for b in range(length)], dtype=np.int8)


def _bits_hex(bits) -> str:
    return format(sum(int(b) << i for i, b in enumerate(bits)), "x")


def cmd_gadget(args) -> int:
    if args.kind == "detect5cycle" and not args.experimental:
        print("detect5cycle is an experimental construction; pass --experimental", file=sys.stderr)
        return EXIT_USAGE
    seed = args.seed if args.seed is not None else default_seed()
    if args.kind == "mincut-hard":
        inst = gadgets.gen_mincut_hard(args.n, args.weight or args.n, seed)
    else:
        length = args.k if args.kind == "count4cycle" else args.k * args.k
        if args.x_hex is not None or args.y_hex is not None:
            if args.x_hex is None or args.y_hex is None:
                print("--x-hex and --y-hex go together", file=sys.stderr)
                return EXIT_USAGE
            x = _parse_hex(args.x_hex, length, "x")
            y = _parse_hex(args.y_hex, length, "y")
        else:
            x, y = gadgets.random_witness(length, not args.random_disjoint, seed)
        inst = gadgets.generate(args.kind, k=args.k, ell=args.ell, W=args.weight, x=x, y=y)
    rec: dict[str, Any] = {"kind": inst.kind, "n": inst.graph.n, "m": inst.graph.m,
                           "params": inst.params}
    if "x" in inst.witness:
        rec["x_hex"] = _bits_hex(inst.witness["x"])
        rec["y_hex"] = _bits_hex(inst.witness["y"])
        rec["intersecting"] = gadgets.intersects(inst.witness["x"], inst.witness["y"])
    else:
        rec["V1"] = inst.witness["V1"]
    if args.emit_graph:
        Path(args.emit_graph).write_text(inst.graph.dumps())
        rec["graph_file"] = args.emit_graph
    status = EXIT_OK
    if args.verify:
        verdict = gadgets.verify_claim(inst)
        rec["verdict"] = verdict.as_dict()
        if verdict.claim_holds is False:
            status = EXIT_FAIL
    _emit(rec)
    return status


ORACLE_OPS = ("apsp", "radius", "diameter", "girth", "mincut", "stcut", "sparsest", "mst", "cycles")


def cmd_oracle(args) -> int:
    graph = load_graph(Path(args.graph).read_text())
    op = args.op
    if op == "apsp":
        out: Any = oracles.exact_apsp(graph).tolist()
    elif op in ("radius", "diameter"):
        R, D, ecc = oracles.exact_radius_diameter(graph)
        out = {"radius": R, "diameter": D, "ecc": ecc.tolist()}
    elif op == "girth":
        out = oracles.exact_girth(graph)
    elif op == "mincut":
        v, side = oracles.exact_min_cut(graph)
        out = {"value": v, "side": sorted(side)}
    elif op == "stcut":
        v, side = oracles.exact_st_mincut(graph, args.s, args.t or graph.n)
        out = {"value": v, "side": sorted(side)}
    elif op == "sparsest":
        v, side = oracles.exact_sparsest_cut(graph)
        out = {"value": v, "side": sorted(side)}
    elif op == "mst":
        es, w = oracles.exact_mst(graph)
        out = {"weight": w, "edges": sorted(es)}
    else:
        out = oracles.count_cycles_bruteforce(graph, args.r)
    _emit({"op": op, "n": graph.n, "result": out})
    return EXIT_OK


def cmd_bench(args) -> int:
    values = read_config(args.config) if args.config else {}
    flags = {"algorithm": args.algorithm, "family": args.family, "n": args.n, "seeds": args.seeds,
             "m_factor": args.m_factor, "W": args.W, "eps": args.eps, "r": args.r,
             "preset": args.preset, "output": args.out}
    values.update({k: v for k, v in flags.items() if v is not None})
    if "seeds" not in values:
        values["seeds"] = [default_seed()]
    spec = spec_from_mapping(values)
    records = run_experiment(spec)
    if spec.output is None:
        for r in records:
            _emit(r)
    summary = summarize(records)
    if args.fit and records:
        summary["slope"], summary["r2"] = fit_scaling(records)
    _emit(summary, sys.stderr if spec.output is None else None)
    return EXIT_OK if summary["failed"] == 0 else EXIT_FAIL


def cmd_verify(args) -> int:
    from .acceptance import verify_suite
    only = _ints(args.only) if args.only else None
    return verify_suite(quick=args.quick, only=only)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="hybridnet", description="Hybrid network simulator experiments")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("learn", help="every node learns the whole topology")
    _graph_args(p)
    p.add_argument("--mode", choices=("det", "rand"), default="det")

    p = sub.add_parser("apsp", help="approximate all-pairs shortest paths")
    _graph_args(p)
    p.add_argument("--unweighted", action="store_true")
    p.add_argument("--eps", type=float, default=None)

    p = sub.add_parser("cuts", help="approximate minimum cut")
    _graph_args(p)
    p.add_argument("--eps", type=float, default=None)

    p = sub.add_parser("girth", help="exact girth")
    _graph_args(p)

    p = sub.add_parser("mst", help="Boruvka minimum spanning tree")
    _graph_args(p)

    p = sub.add_parser("diameter", help="diameter estimation")
    _graph_args(p)
    p.add_argument("--mode", choices=("rv", "virtual-tree"), default="rv")
    p.add_argument("--plugin", choices=sorted(PLUGINS), default=None,
                   help="CONGEST diameter algorithm run on the augmented graph")

    p = sub.add_parser("cycles", help="r-cycle detection or counting")
    _graph_args(p)
    p.add_argument("--op", choices=("detect", "count"), default="detect")
    p.add_argument("--r", type=int, default=None)

    p = sub.add_parser("gadget", help="generate a lower-bound instance and check its value gap")
    p.add_argument("--kind", required=True, choices=gadgets.KINDS)
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--ell", type=int, default=1)
    p.add_argument("--weight", type=int, default=None)
    p.add_argument("--n", type=int, default=16)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--x-hex")
    p.add_argument("--y-hex")
    grp = p.add_mutually_exclusive_group()
    grp.add_argument("--random-disjoint", action="store_true")
    grp.add_argument("--random-intersecting", action="store_true")
    p.add_argument("--verify", action="store_true")
    p.add_argument("--emit-graph", help="write the instance graph to this file")
    p.add_argument("--experimental", action="store_true", help="allow the 5-cycle construction")

    p = sub.add_parser("oracle", help="exact sequential reference values")
    p.add_argument("--op", required=True, choices=ORACLE_OPS)
    p.add_argument("--graph", required=True)
    p.add_argument("--s", type=int, default=1)
    p.add_argument("--t", type=int, default=None)
    p.add_argument("--r", type=int, default=3)

    p = sub.add_parser("bench", help="run a parameter grid and write JSON lines")
    p.add_argument("--config")
    p.add_argument("--algorithm", choices=sorted(ALGORITHMS))
    p.add_argument("--family", choices=FAMILIES)
    p.add_argument("--n", type=_ints)
    p.add_argument("--seeds", type=_ints)
    p.add_argument("--m-factor", type=float)
    p.add_argument("--W", type=int)
    p.add_argument("--eps", type=float)
    p.add_argument("--r", type=int)
    p.add_argument("--preset")
    p.add_argument("--out")
    p.add_argument("--fit", action="store_true", help="append the log-log rounds slope")

    p = sub.add_parser("verify", help="run the acceptance suite")
    p.add_argument("--quick", action="store_true")
    p.add_argument("--only", help="comma separated criterion numbers")
    return ap


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        cmd = args.command
        if cmd == "learn":
            return _single(args, f"learn-{args.mode}")
        if cmd == "apsp":
            return _single(args, "apsp-unweighted" if args.unweighted else "apsp",
                           {"eps": args.eps})
        if cmd == "cuts":
            return _single(args, "mincut", {"eps": args.eps})
        if cmd in ("girth", "mst"):
            return _single(args, cmd)
        if cmd == "diameter":
            algo = "diameter-vt" if args.mode == "virtual-tree" else "diameter-rv"
            return _single(args, algo, {"plugin": args.plugin})
        if cmd == "cycles":
            return _single(args, f"cycles-{args.op}", {"r": args.r})
        if cmd == "gadget":
            return cmd_gadget(args)
        if cmd == "oracle":
            return cmd_oracle(args)
        if cmd == "bench":
            return cmd_bench(args)
        return cmd_verify(args)
    except (GraphError, ValueError, FileNotFoundError, oracles.OracleLimitError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CapacityError as exc:
        print(f"capacity violation: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
