import dataclasses

import numpy as np
import pytest

from hybridnet.gadgets import (KINDS, Verdict, classify_4cycles, gen_count4cycle, gen_detect5cycle,
                               gen_dgirth, gen_mincut_hard, gen_radius, generate, intersects,
                               pair_index, radius_node_count, random_witness, verify_claim)
from hybridnet.graph import Graph, GraphError
from hybridnet.oracles import enumerate_cycles, exact_girth, exact_radius_diameter


def unit(length, *bits):
    v = np.zeros(length, dtype=np.int8)
    v[list(bits)] = 1
    return v


def add_edge(inst, u, v, w=1):
    g = inst.graph
    if g.has_edge(u, v):
        raise AssertionError("edge already present")
    h = Graph(g.n, list(g.edges) + [(u, v, w)], directed=g.directed, weighted=g.weighted, W=g.W,
              weight_exponent=g.weight_exponent)
    return dataclasses.replace(inst, graph=h)


# --- witnesses --------------------------------------------------------------

def test_random_witness_shapes():
    for s in range(20):
        x, y = random_witness(16, True, s)
        assert intersects(x, y)
        x, y = random_witness(16, False, s)
        assert not intersects(x, y) and x.shape == (16,)


def test_bad_witness_dimension():
    with pytest.raises(GraphError):
        gen_dgirth(2, 1, [1, 0, 0], [0, 0, 0, 0])
    with pytest.raises(GraphError):
        gen_radius(2, 1, [1, 2, 0, 0], [0, 0, 0, 0])


# --- min cut ---------------------------------------------------------------

@pytest.mark.parametrize("seed", range(10))
def test_mincut_hard_claim(seed):
    inst = gen_mincut_hard(20, 20, seed)
    v = verify_claim(inst)
    assert v.claim_holds is True
    assert v.observed == len(inst.witness["V1"])
    assert v.details["unique"] and v.details["min_ab_cut"] >= 20


def test_mincut_hard_structure():
    inst = gen_mincut_hard(64, 100, 3)
    L = inst.params["L"]
    assert L == 8 and inst.labels["b"] == 9
    V1, V2 = set(inst.witness["V1"]), set(inst.witness["V2"])
    assert V1 | V2 | set(range(2, L + 2)) == set(inst.graph.nodes)
    assert all(inst.graph.weight(inst.labels["u"], v) == 1 for v in V1)
    assert verify_claim(inst).claim_holds


def test_mincut_hard_side_sizes_vary_with_seed():
    sizes = {len(gen_mincut_hard(40, 40, s).witness["V1"]) for s in range(30)}
    assert len(sizes) > 3


def test_mincut_hard_preconditions():
    with pytest.raises(GraphError):
        gen_mincut_hard(7, 10)
    with pytest.raises(GraphError):
        gen_mincut_hard(16, 15)


# --- directed girth -------------------------------------------------------

def test_dgirth_single_shared_bit():
    e = unit(4, 0)
    inst = gen_dgirth(2, 1, e, e)
    assert inst.kind == "dgirth-bcc"
    assert exact_girth(inst.graph) == 4


@pytest.mark.parametrize("seed", range(30))
def test_dgirth_disjoint_bcc(seed):
    x, y = random_witness(16, False, seed)
    inst = gen_dgirth(4, 1, x, y)
    assert exact_girth(inst.graph) >= 8
    assert verify_claim(inst).claim_holds


def test_dgirth_ell3_intersecting():
    x, y = random_witness(9, True, 5)
    inst = gen_dgirth(3, 3, x, y)
    assert inst.kind == "dgirth-hybrid"
    v = verify_claim(inst)
    assert v.claim_holds and v.observed == 8


def test_dgirth_ell2_disjoint_verdict():
    x, y = random_witness(16, False, 1)
    v = verify_claim(gen_dgirth(4, 2, x, y))
    assert v.predicted == ">=12" and v.claim_holds


# --- radius ------------------------------------------------------------------

def test_radius_k2_intersecting_centre_in_u():
    x = unit(4, 1)
    inst = gen_radius(2, 1, x, x)
    R, _, ecc = exact_radius_diameter(inst.graph)
    assert R == 3
    centres = {v for v in inst.graph.nodes if ecc[v - 1] == R}
    assert centres <= set(inst.ids("u"))
    assert verify_claim(inst).claim_holds


@pytest.mark.parametrize("seed", range(10))
def test_radius_k4_disjoint(seed):
    x, y = random_witness(16, False, seed)
    v = verify_claim(gen_radius(4, 1, x, y))
    assert v.observed == 4 and v.claim_holds
    assert v.details["min_ecc_outside_U"] >= 4


@pytest.mark.parametrize("hit,want", [(True, 22), (False, 32)])
def test_radius_weighted(hit, want):
    x, y = random_witness(16, hit, 2)
    v = verify_claim(gen_radius(4, 2, x, y, W=10))
    assert v.observed == want and v.claim_holds


def test_radius_weighted_small_w_is_reported_not_judged():
    x, y = random_witness(16, False, 2)
    v = verify_claim(gen_radius(4, 4, x, y, W=4))
    assert v.claim_holds is None and "regime" in v.details


@pytest.mark.parametrize("k", [2, 3, 4, 8, 16])
@pytest.mark.parametrize("ell", [1, 2, 4])
def test_radius_node_count_closed_form(k, ell):
    x, y = random_witness(k * k, True, k)
    assert gen_radius(k, ell, x, y).graph.n == radius_node_count(k, ell)


def test_radius_hybrid_claims():
    for hit in (True, False):
        for s in range(5):
            x, y = random_witness(64, hit, s)
            assert verify_claim(gen_radius(8, 2, x, y)).claim_holds


# --- 4-cycles -------------------------------------------------------------------

def test_pair_index_lexicographic():
    r = 5
    pairs = [pair_index(b, r) for b in range(r * (r - 1) // 2)]
    assert pairs == [(i, j) for i in range(1, r + 1) for j in range(i + 1, r + 1)]
    with pytest.raises(IndexError):
        pair_index(10, 5)


def test_count4cycle_empty():
    z = np.zeros(10, dtype=np.int8)
    inst = gen_count4cycle(10, z, z)
    assert classify_4cycles(inst)["iii"] == 0
    assert verify_claim(inst).claim_holds


def test_count4cycle_single_common_bit():
    e = unit(10, 3)
    inst = gen_count4cycle(10, e, e)
    assert classify_4cycles(inst)["iii"] == 1


@pytest.mark.parametrize("seed", range(15))
def test_count4cycle_k45(seed):
    x, y = random_witness(45, seed % 2 == 0, seed)
    inst = gen_count4cycle(45, x, y)
    assert inst.params["r"] == 10
    v = verify_claim(inst)
    assert v.claim_holds and v.observed == int(np.sum(x & y))


# --- 5-cycles (experimental) -----------------------------------------------------

def test_detect5cycle_intersecting_bit():
    x = unit(9, 4)  # bit (1, 1)
    inst = gen_detect5cycle(3, x, x)
    assert inst.params["experimental"]
    v = verify_claim(inst)
    assert v.claim_holds and v.observed is True


@pytest.mark.parametrize("seed", range(20))
def test_detect5cycle_disjoint(seed):
    k = 2 + seed % 7
    x, y = random_witness(k * k, False, seed)
    assert next(iter(enumerate_cycles(gen_detect5cycle(k, x, y).graph, 5)), None) is None


def test_detect5cycle_empty_has_no_cycles():
    z = np.zeros(16, dtype=np.int8)
    g = gen_detect5cycle(4, z, z).graph
    assert g.m <= g.n - 1


# --- dispatcher, determinism, falsifiability -----------------------------------

@pytest.mark.parametrize("kind", KINDS)
def test_generate_every_kind(kind):
    a = generate(kind, k=4, ell=2, W=32 if kind == "mincut-hard" else 8, n=20, seed=3)
    b = generate(kind, k=4, ell=2, W=32 if kind == "mincut-hard" else 8, n=20, seed=3)
    assert a.graph.edges == b.graph.edges and a.kind == kind
    assert verify_claim(a).claim_holds is True


def test_generate_unknown_kind():
    with pytest.raises(ValueError):
        generate("radius-unknown")


def test_corrupted_radius_breaks_the_claim():
    x, y = random_witness(16, False, 0)
    inst = gen_radius(4, 1, x, y)
    w, z = inst.labels["w"], inst.labels["w'"]
    broken = add_edge(inst, w, z)
    assert verify_claim(inst).claim_holds
    # a hub-to-hub shortcut pulls every eccentricity down
    assert verify_claim(broken).claim_holds is False


def test_corrupted_dgirth_breaks_the_claim():
    x, y = unit(16, 0), np.zeros(16, dtype=np.int8)
    inst = gen_dgirth(4, 1, x, y)
    u0, v0 = inst.ids("u")[0], inst.ids("v")[0]
    assert inst.graph.has_edge(u0, v0) and verify_claim(inst).claim_holds
    # the back edge closes a directed 2-cycle
    assert verify_claim(add_edge(inst, v0, u0)).claim_holds is False


def test_verdict_as_dict():
    v = Verdict(np.bool_(True), 3, 3, {"x": 1})
    assert v.claim_holds is True
    assert v.as_dict() == {"claim_holds": True, "predicted": 3, "observed": 3, "x": 1}

