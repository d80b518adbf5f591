import math

import numpy as np
import pytest

from hybridnet.distances import (SourceSet, count_cycles, detect_cycle, multi_source_sssp,
                                 rv_diameter)
from hybridnet.graph import (Graph, GraphError, complete_graph, cycle_graph, path_graph,
                             planted_cycle, random_bounded_degree, random_connected, random_tree,
                             star_graph)
from hybridnet.oracles import (count_cycles_bruteforce, enumerate_cycles, exact_radius_diameter,
                               exact_sssp)
from hybridnet.simcore import HybridConfig


def hybrid(n, seed=0):
    return HybridConfig.preset("HYBRID", n, seed=seed)


# --- multi-source SSSP ------------------------------------------------------

def test_single_source_on_path_gives_prefix_sums():
    ws = [3, 1, 4, 1, 5, 9]
    g = Graph(7, [(i, i + 1, w) for i, w in enumerate(ws, start=1)])
    res = multi_source_sssp(g, [1], hybrid(7))
    assert [res.outputs[u][1] for u in g.nodes] == [0, 3, 4, 8, 9, 14, 23]


def test_all_sources_on_k4():
    g = complete_graph(4)
    res = multi_source_sssp(g, SourceSet(tuple(g.nodes)), hybrid(4))
    for u in g.nodes:
        assert res.outputs[u] == {s: (0.0 if s == u else 1.0) for s in g.nodes}


def test_random_sources_match_oracle():
    n = 128
    g = random_connected(n, 400, 3, W=60)
    src = [5, 17, 40, 99, 128]
    res = multi_source_sssp(g, src, hybrid(n))
    for s in src:
        d = exact_sssp(g, s)
        assert all(res.outputs[u][s] == d[u - 1] for u in g.nodes)
    assert not res.trace.violations


def test_sampled_sources():
    n = 200
    S = SourceSet(mode="sampled", x=0.5).resolve(n, 3)
    assert S == SourceSet(mode="sampled", x=0.5).resolve(n, 3)
    assert 0 < len(S) < 60
    assert SourceSet(mode="sampled", x=1.0).resolve(n, 3) == list(range(1, n + 1))
    with pytest.raises(ValueError):
        SourceSet(mode="bogus").resolve(n, 0)


def test_empty_source_set():
    res = multi_source_sssp(path_graph(3), [], hybrid(3))
    assert res.outputs == {1: {}, 2: {}, 3: {}} and res.trace.rounds == 0


# --- RV diameter ------------------------------------------------------------

def bounds(D):
    return math.ceil(2 * D / 3), D


def test_rv_clique():
    res = rv_diameter(complete_graph(12), hybrid(12))
    assert set(res.outputs.values()) == {1}


def test_rv_path():
    res = rv_diameter(path_graph(64), hybrid(64))
    lo, hi = bounds(63)
    assert lo <= res.outputs[1] <= hi
    assert len(set(res.outputs.values())) == 1


@pytest.mark.parametrize("seed", range(25))
def test_rv_bounded_degree_weighted(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(30, 200))
    g = random_bounded_degree(n, 4, 0.3, seed, W=20)
    D = exact_radius_diameter(g)[1]
    est = rv_diameter(g, hybrid(n, seed)).outputs[1]
    lo, hi = bounds(D)
    assert lo <= est <= hi


def test_rv_warns_on_high_degree():
    with pytest.warns(RuntimeWarning):
        rv_diameter(star_graph(100), hybrid(100))


def test_rv_ball_contains_l_nearest():
    g = random_bounded_degree(125, 4, 0.5, 1)
    res = rv_diameter(g, hybrid(125))
    assert res.info["L"] == 5
    assert res.info["w"] in res.info["ball"]
    assert len(res.info["ball"]) >= 5


def test_rv_rejects_disconnected():
    with pytest.raises(GraphError):
        rv_diameter(Graph(4, [(1, 2, 1), (3, 4, 1)]), hybrid(4))


# --- cycles -----------------------------------------------------------------

def test_detect_triangle():
    res = detect_cycle(cycle_graph(3), 3, hybrid(3))
    assert all(res.outputs.values())
    assert res.trace.phases["flood"] == 1


@pytest.mark.parametrize("r", [3, 4, 5, 7])
def test_detect_nothing_in_tree(r):
    res = detect_cycle(random_tree(40, r), r, hybrid(40))
    assert not any(res.outputs.values())
    assert res.trace.phases["flood"] == (r - 1) // 2


def test_detect_planted_c6():
    g = planted_cycle(80, 6, 0, seed=2)
    assert all(detect_cycle(g, 6, hybrid(80)).outputs.values())
    for r in (3, 4, 5, 7):
        got = detect_cycle(g, r, hybrid(80)).outputs[1]
        assert got == (count_cycles_bruteforce(g, r) > 0)


@pytest.mark.parametrize("seed", range(6))
def test_detect_matches_oracle_on_random(seed):
    g = random_connected(40, 55, seed)
    for r in (4, 5, 6):
        assert detect_cycle(g, r, hybrid(40)).outputs[7] == (count_cycles_bruteforce(g, r) > 0)


def test_count_k4_triangles():
    assert set(count_cycles(complete_graph(4), 3, hybrid(4)).outputs.values()) == {4}


def test_count_c5():
    assert count_cycles(cycle_graph(5), 5, hybrid(5)).outputs[2] == 1


@pytest.mark.parametrize("r", [3, 4, 5])
def test_count_random_matches_oracle(r):
    g = random_connected(64, 202, 5)
    res = count_cycles(g, r, hybrid(64))
    want = count_cycles_bruteforce(g, r)
    assert set(res.outputs.values()) == {want}
    assert sum(res.info["per_node"].values()) == want


def test_count_clique_needs_chunked_sum():
    g = complete_graph(9)
    # 9 choose 6 times 5!/2 six-cycles
    assert count_cycles(g, 6, hybrid(9)).outputs[1] == math.comb(9, 6) * math.factorial(5) // 2


def test_min_id_visibility():
    g = random_connected(24, 40, 1)
    for r in (4, 5, 6, 7, 8):
        t = (r - 1) // 2
        for cyc in enumerate_cycles(g, r):
            for u in cyc:
                i = cyc.index(u)
                for j in range(r):
                    a, b = cyc[j], cyc[(j + 1) % r]
                    da = min(abs(i - j), r - abs(i - j))
                    db = min(abs(i - (j + 1) % r), r - abs(i - (j + 1) % r))
                    assert g.has_edge(a, b) and min(da, db) <= t


def test_cycle_length_checked():
    with pytest.raises(ValueError):
        detect_cycle(path_graph(3), 2, hybrid(3))
    with pytest.raises(ValueError):
        count_cycles(path_graph(3), 2, hybrid(3))
