import math
from collections import Counter

import numpy as np
import pytest

from hybridnet.graph import (Graph, GraphError, complete_graph, cycle_graph, path_graph,
                             random_connected, random_tree, star_graph)
from hybridnet.simcore import CapacityError, HybridConfig, Network
from hybridnet.sparselearn import (ClusterPartition, cluster_load_balancing, disseminate_round_robin,
                                   fragment, gkp_phase1, learn_topology_deterministic,
                                   learn_topology_randomized, matching_components,
                                   neighborhood_load_balance, transfer_schedule)

K = 4.0  # frozen strong-diameter constant, see hybridnet.acceptance.GKP_K


def hybrid(n, seed=0):
    return HybridConfig.preset("HYBRID", n, seed=seed)


def net_for(g, seed=0):
    return Network(g, hybrid(g.n, seed))


def check_gkp(g, part):
    n = g.n
    assert sorted(u for c in part.clusters for u in c) == list(g.nodes)
    assert min(part.sizes()) >= math.isqrt(n)
    for c in part.clusters:
        assert g.induced_diameter(c) <= K * math.sqrt(n)


def test_gkp_single_node():
    part = gkp_phase1(Graph(1, []), hybrid(1))
    assert part.clusters == [[1]]


@pytest.mark.parametrize("g", [path_graph(16), complete_graph(25), cycle_graph(49), star_graph(30)],
                         ids=["path16", "clique25", "cycle49", "star30"])
def test_gkp_bounds(g):
    check_gkp(g, gkp_phase1(g, hybrid(g.n)))


@pytest.mark.parametrize("seed", range(6))
def test_gkp_bounds_random(seed):
    g = random_connected(200, 400, seed)
    check_gkp(g, gkp_phase1(g, hybrid(200)))
    t = random_tree(150, seed)
    check_gkp(t, gkp_phase1(t, hybrid(150)))


def test_gkp_needs_no_randomness():
    g = random_connected(100, 200, 3)
    a = gkp_phase1(g, hybrid(100, 1))
    b = gkp_phase1(g, hybrid(100, 99))
    assert a.clusters == b.clusters


def test_fragment_sizes():
    s = 4
    part = ClusterPartition([list(range(1, 5)), list(range(5, 25)), list(range(25, 33))])
    out = fragment(part, s)
    assert sorted(u for c in out.clusters for u in c) == list(range(1, 33))
    assert all(s <= len(c) < 2 * s for c in out.clusters)
    # the size-s cluster is left alone
    assert [1, 2, 3, 4] in out.clusters


def test_fragment_five_s():
    s = 5
    out = fragment(ClusterPartition([list(range(1, 26))]), s)
    assert out.sizes() == [9, 8, 8]
    assert all(max(c) - min(c) + 1 == len(c) for c in out.clusters)


def test_fragment_rejects_small_cluster():
    with pytest.raises(GraphError):
        fragment(ClusterPartition([[1, 2], [3, 4, 5, 6]]), 3)


def test_fragment_weak_diameter_not_larger():
    g = random_connected(144, 288, 2)
    gkp = gkp_phase1(g, hybrid(144))
    frag = fragment(gkp, 12)
    owner = gkp.cluster_of(g.n)
    for c in frag.clusters:
        parent = gkp.clusters[owner[c[0]]]
        assert all(owner[u] == owner[c[0]] for u in c)
        assert g.weak_diameter(c) <= g.induced_diameter(parent)


def test_matching_components_two_clusters():
    g = path_graph(16)
    part = ClusterPartition([list(range(1, 9)), list(range(9, 17))], flood_rounds=8)
    net = net_for(g)
    known = matching_components(g, part, net=net)
    assert all(known[u] == frozenset({0, 1}) for u in g.nodes)
    assert not net.trace.violations


def test_matching_components_single_cluster():
    g = path_graph(9)
    part = ClusterPartition([list(range(1, 10))])
    assert set(matching_components(g, part, hybrid(9)).values()) == {frozenset({0})}


def test_transfer_schedule_all_on_one():
    loads = [100, 0, 0, 0]
    sched = transfer_schedule(loads, 100)
    after = list(loads)
    for o, u, t in sched:
        after[o] -= t
        after[u] += t
    assert sum(after) == 100
    assert max(after) <= 2 * 100 / 4
    assert len(sched) <= 3


def test_transfer_schedule_balanced_is_noop():
    assert transfer_schedule([30, 40, 50, 35], 155) == []


def test_cluster_load_balancing_conserves_tokens():
    g = path_graph(16)
    part = ClusterPartition([list(range(1, 5)), list(range(5, 9)), list(range(9, 13)), list(range(13, 17))],
                            flood_rounds=6)
    held = {1: list(range(60)), 2: list(range(60, 64))}
    out = cluster_load_balancing(g, part, held, 8, net=net_for(g))
    got = sorted(t for ts in out.values() for t in ts)
    assert got == list(range(64))
    for members in part.clusters:
        loads = [len(out.get(u, [])) for u in members]
        assert max(loads) - min(loads) <= 1
        assert sum(loads) <= 2 * 64 / 4


def test_round_robin_delivers_everything():
    g = path_graph(12)
    part = ClusterPartition([[1, 2, 3, 4], [5, 6, 7, 8], [9, 10, 11, 12]], flood_rounds=6)
    held = {u: [u - 1] for u in g.nodes}
    masks = [0] + [1 << (u - 1) for u in g.nodes]
    out = disseminate_round_robin(g, part, held, masks, 8, net=net_for(g))
    assert all(out[u] == (1 << 12) - 1 for u in g.nodes)


def test_round_robin_single_cluster():
    g = path_graph(4)
    part = ClusterPartition([[1, 2, 3, 4]])
    out = disseminate_round_robin(g, part, {1: [0]}, [0, 1, 0, 0, 0], 8, net=net_for(g))
    assert out[1:] == [1, 1, 1, 1]


def test_neighborhood_load_balance():
    g = star_graph(11)
    held = {u: [] for u in g.nodes}
    held[1] = list(range(50))
    net = net_for(g)
    out = neighborhood_load_balance(g, 1, held, 8, net=net)
    assert net.rounds == 2
    assert sorted(len(out[u]) for u in g.nodes) == [4] * 5 + [5] * 6
    assert Counter(t for ts in out.values() for t in ts) == Counter(range(50))


def test_neighborhood_load_balance_empty_and_congest():
    g = star_graph(5)
    net = net_for(g)
    out = neighborhood_load_balance(g, 1, {}, 8, net=net)
    assert net.rounds == 2 and all(not out.get(u) for u in g.nodes)
    with pytest.raises(CapacityError):
        neighborhood_load_balance(g, 1, {}, 8, HybridConfig.preset("CONGEST", 5))


def test_randomized_star_triggers_balancing():
    g = star_graph(9)
    res = learn_topology_randomized(g, hybrid(9))
    assert res.info["Q"] == [1]
    assert all(res.outputs[u] == g.edge_set() for u in g.nodes)


def test_randomized_cycle_skips_balancing():
    g = cycle_graph(16)
    res = learn_topology_randomized(g, hybrid(16))
    assert res.info["Q"] == []
    assert all(res.outputs[u] == g.edge_set() for u in g.nodes)


def test_randomized_dense_random():
    g = random_connected(256, 768, 8, W=100)
    res = learn_topology_randomized(g, hybrid(256, 4))
    assert all(res.outputs[u] == g.edge_set() for u in g.nodes)
    assert not res.trace.violations and res.trace.dropped_msgs == 0


def test_deterministic_small_path():
    g = path_graph(4)
    res = learn_topology_deterministic(g, hybrid(4))
    assert all(len(res.outputs[u]) == 3 for u in g.nodes)


@pytest.mark.parametrize("n", [64, 128, 256])
def test_deterministic_exact_topology(n):
    g = random_connected(n, 2 * n, n, W=n)
    res = learn_topology_deterministic(g, hybrid(n))
    assert all(res.outputs[u] == g.edge_set() for u in g.nodes)
    assert res.trace.extra["clusters"] >= 1


def test_deterministic_ignores_seed():
    g = random_connected(80, 160, 1)
    a = learn_topology_deterministic(g, hybrid(80, 1)).trace
    b = learn_topology_deterministic(g, hybrid(80, 2)).trace
    a.seed = b.seed = 0
    assert a.to_json() == b.to_json()


def test_learning_a_subgraph():
    g = random_connected(60, 150, 5)
    sub = g.edges[::3]
    for fn in (learn_topology_deterministic, learn_topology_randomized):
        res = fn(g, hybrid(60), edges=sub)
        assert all(res.outputs[u] == frozenset(sub) for u in g.nodes)
    with pytest.raises(GraphError):
        learn_topology_deterministic(g, hybrid(60), edges=[(1, 2, 99)] if not g.has_edge(1, 2) else [(1, 60, 7)]
                                     if not g.has_edge(1, 60) else [])


def test_learning_rejects_disconnected_and_bounded_local():
    g = Graph(4, [(1, 2, 1), (3, 4, 1)])
    with pytest.raises(GraphError):
        learn_topology_deterministic(g, hybrid(4))
    with pytest.raises(GraphError):
        learn_topology_randomized(g, hybrid(4))
    with pytest.raises(CapacityError):
        learn_topology_deterministic(random_connected(30, 60, 1), HybridConfig.preset("CONGEST_NCC", 30))


def test_rounds_grow_sublinearly():
    rounds = {}
    for n in (64, 256, 1024):
        g = random_connected(n, 2 * n, 11)
        rounds[n] = learn_topology_deterministic(g, hybrid(n)).trace.rounds
    slope = np.polyfit(np.log(list(rounds)), np.log(list(rounds.values())), 1)[0]
    assert slope <= 0.75
