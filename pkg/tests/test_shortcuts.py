import math

import numpy as np
import pytest

from hybridnet.graph import Graph, GraphError, path_graph, random_bounded_degree, random_connected
from hybridnet.oracles import exact_mst, exact_radius_diameter
from hybridnet.shortcuts import (PartAssignment, boruvka_mst, diameter_virtual_tree, gh_mincut_hook,
                                 hl_sssp_hook, hop_diameter_of, partwise_aggregate, random_partition,
                                 virtual_tree_graph)
from hybridnet.simcore import HybridConfig

PARTWISE_C = 4.0  # frozen, see hybridnet.acceptance


def ncc(n, seed=0):
    return HybridConfig.preset("NCC", n, seed=seed)


# --- part-wise aggregation --------------------------------------------------

def test_one_part_sum():
    g = random_connected(50, 100, 1)
    res = partwise_aggregate(g, {u: 0 for u in g.nodes}, {u: u for u in g.nodes}, "SUM", ncc(50))
    assert set(res.outputs.values()) == {50 * 51 // 2}


def test_singleton_parts_identity():
    g = path_graph(33)
    res = partwise_aggregate(g, {u: u for u in g.nodes}, {u: 7 * u for u in g.nodes}, "MAX", ncc(33))
    assert res.outputs == {u: 7 * u for u in g.nodes}


@pytest.mark.parametrize("seed", range(4))
def test_random_partition_min(seed):
    n = 256
    g = random_connected(n, 600, seed)
    parts = random_partition(g, 16, seed)
    parts.validate(g)
    assert len(parts.groups()) == 16
    rng = np.random.default_rng(seed)
    vals = {u: int(rng.integers(0, 10 ** 6)) for u in g.nodes}
    net_cfg = ncc(n, seed)
    res = partwise_aggregate(g, parts, vals, "MIN", net_cfg)
    want = {p: min(vals[u] for u in mem) for p, mem in parts.groups().items()}
    assert all(res.outputs[u] == want[parts.part[u]] for u in g.nodes)
    assert res.trace.rounds <= PARTWISE_C * math.log2(n)
    assert res.trace.local_bits == 0 and not res.trace.violations


def test_tuple_aggregates():
    g = path_graph(8)
    parts = {u: (u - 1) // 4 for u in g.nodes}
    vals = {u: (u, u) for u in g.nodes}
    res = partwise_aggregate(g, parts, vals, ("MIN", "MAX"), ncc(8))
    assert res.outputs[1] == (1, 4) and res.outputs[8] == (5, 8)


def test_disconnected_part_rejected():
    g = path_graph(4)
    with pytest.raises(GraphError):
        partwise_aggregate(g, {1: 0, 2: 1, 3: 0, 4: 1}, {u: 1 for u in g.nodes}, "SUM", ncc(4))
    with pytest.raises(GraphError):
        PartAssignment({1: 0}).validate(g)


def test_random_partition_reproducible():
    g = random_connected(100, 200, 3)
    assert random_partition(g, 10, 4).part == random_partition(g, 10, 4).part


def test_hooks_not_implemented():
    for hook, name in ((gh_mincut_hook, "Ghaffari-Haeupler"), (hl_sssp_hook, "Haeupler-Li")):
        assert name in hook.__doc__
        with pytest.raises(NotImplementedError, match=name):
            hook()
        with pytest.raises(NotImplementedError):
            hook(partwise_aggregate)


# --- Boruvka ------------------------------------------------------------------

def test_mst_two_nodes():
    g = Graph(2, [(1, 2, 4)])
    res = boruvka_mst(g)
    assert res.info["mst"] == frozenset({(1, 2, 4)})


def canon(edges):
    return sorted((min(u, v), max(u, v), w) for u, v, w in edges)


@pytest.mark.parametrize("seed", range(8))
def test_mst_matches_kruskal(seed):
    n = 100
    g = random_connected(n, 300, seed, W=10 ** 5)
    res = boruvka_mst(g, HybridConfig.preset("CONGEST_NCC", n, seed=seed))
    tree, weight = exact_mst(g)
    assert canon(res.info["mst"]) == canon(tree)
    assert sum(e[2] for e in res.info["mst"]) == weight
    assert res.info["stars_ok"]
    assert res.info["phases"] <= 8 * math.log2(n)
    assert not res.trace.violations


def test_mst_with_ties_is_still_a_minimum_tree():
    g = random_connected(60, 200, 2, W=2)
    res = boruvka_mst(g)
    mst = res.info["mst"]
    assert len(mst) == 59
    assert sum(e[2] for e in mst) == exact_mst(g)[1]
    # spanning: the chosen edges connect everything
    assert Graph(60, canon(mst)).connected


def test_mst_endpoints_know_membership():
    g = random_connected(30, 60, 1, W=100)
    res = boruvka_mst(g)
    for u in g.nodes:
        assert all(u in e[:2] for e in res.outputs[u])
        assert res.outputs[u] == frozenset(e for e in res.info["mst"] if u in e[:2])


def test_mst_budget_and_input_checks():
    g = random_connected(64, 128, 1, W=50)
    with pytest.raises(RuntimeError):
        boruvka_mst(g, max_rounds=1)
    with pytest.raises(GraphError):
        boruvka_mst(Graph(4, [(1, 2, 1), (3, 4, 1)]))


def test_mst_is_seed_deterministic():
    g = random_connected(50, 120, 3, W=100)
    cfg = HybridConfig.preset("CONGEST_NCC", 50, seed=9)
    assert boruvka_mst(g, cfg).trace.to_json() == boruvka_mst(g, cfg).trace.to_json()


# --- virtual tree diameter ----------------------------------------------------

def test_virtual_tree_shape():
    g = path_graph(64)
    edges, vw = virtual_tree_graph(g)
    W = 1
    assert vw >= 1.5 * 64 * W
    assert hop_diameter_of(64, edges) <= 2 * math.ceil(math.log2(64)) + 1
    assert Graph(64, edges).max_degree <= 3 + 2


def test_exact_plugin_returns_exact_diameter():
    for seed in range(3):
        g = random_connected(64, 150, seed, W=20)
        res = diameter_virtual_tree(g, "exact")
        assert res.info["estimate"] == exact_radius_diameter(g)[1]


def test_ecc_plugin_within_two():
    g = random_connected(128, 300, 5, W=50)
    D = exact_radius_diameter(g)[1]
    res = diameter_virtual_tree(g)
    assert D <= res.info["estimate"] <= 2 * D
    assert res.info["rho"] == 2
    assert not res.trace.violations


def test_bounded_degree_long_paths():
    g = random_bounded_degree(200, 3, 0.1, 4)
    D = exact_radius_diameter(g)[1]
    assert diameter_virtual_tree(g, "exact").info["estimate"] == D


def test_custom_plugin_and_missing_plugin():
    g = path_graph(10)
    res = diameter_virtual_tree(g, lambda graph, edges, net: (42.0, 1.0))
    assert res.outputs[3] == 42.0
    with pytest.raises(ValueError):
        diameter_virtual_tree(g, None)
