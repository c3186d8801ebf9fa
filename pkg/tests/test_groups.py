import itertools

import numpy as np
import pytest

from comack.budget import BudgetExceeded
from comack.groups import (
    GroupError,
    build_group,
    cyclic,
    dihedral,
    extraspecial_p3,
    parse_group_spec,
    quaternion8,
    symmetric,
    xq8,
)

SMALL = ["C 1", "C 2", "C 6", "K4", "E 2 3", "S 3", "D 8", "Q8", "D 12", "S 4", "X 3", "prod(C 2,S 3)"]


# -- brute-force oracles -------------------------------------------------------------

def closure(G, gens):
    elems = {0}
    frontier = [0]
    while frontier:
        nxt = []
        for a in frontier:
            for g in gens:
                b = int(G.mul[a, g])
                if b not in elems:
                    elems.add(b)
                    nxt.append(b)
        frontier = nxt
    return frozenset(elems)


def brute_subgroups(G):
    """All subgroups generated by at most three elements (enough for the groups tested)."""
    found = set()
    for r in range(0, 4):
        for gens in itertools.combinations(range(G.order), r):
            found.add(closure(G, gens))
    return found


def brute_double_cosets(G, H, K):
    seen, parts = set(), []
    for g in range(G.order):
        if g in seen:
            continue
        part = {int(G.mul[G.mul[h, g], k]) for h in H.members for k in K.members}
        seen |= part
        parts.append(part)
    return parts


def brute_classes(G):
    seen, parts = set(), []
    for x in range(G.order):
        if x in seen:
            continue
        cl = {int(G.mul[G.mul[g, x], G.inv[g]]) for g in range(G.order)}
        seen |= cl
        parts.append(cl)
    return parts


# -- group axioms ---------------------------------------------------------------------

@pytest.mark.parametrize("spec", SMALL)
def test_group_invariants(spec):
    G = build_group(spec)
    n = G.order
    assert G.check_associative()
    assert np.array_equal(G.mul[0], np.arange(n)) and np.array_equal(G.mul[:, 0], np.arange(n))
    assert np.all(G.mul[np.arange(n), G.inv] == 0) and np.all(G.mul[G.inv, np.arange(n)] == 0)
    assert closure(G, G.generators) == frozenset(range(n))


@pytest.mark.parametrize("spec", SMALL[:-3] + ["S 4"])
def test_subgroup_lattice_matches_brute_force(spec):
    G = build_group(spec)
    subs = G.all_subgroups()
    assert {frozenset(H.members) for H in subs} == brute_subgroups(G)
    assert len(subs) == len({H.members for H in subs})
    keys = [(H.order, tuple(H.members)) for H in subs]
    assert keys == sorted(keys)
    assert all(G.order % H.order == 0 for H in subs)
    assert all(H.canonical_id == i for i, H in enumerate(subs))


@pytest.mark.parametrize("spec", ["S 3", "D 8", "Q8", "C 6", "K4", "D 12"])
def test_double_cosets_match_brute_force(spec):
    G = build_group(spec)
    subs = G.all_subgroups()
    for H in subs:
        for K in subs:
            dc = G.double_cosets(H, K)
            parts = brute_double_cosets(G, H, K)
            assert len(dc.representatives) == len(parts)
            assert dc.representatives[0] == 0
            assert sum(dc.sizes) == G.order
            for x in range(G.order):
                rep = dc.representatives[dc.coset_of[x]]
                assert any(x in part and rep in part for part in parts)
            assert len(G.double_cosets(K, H).representatives) == len(parts)


@pytest.mark.parametrize("spec", ["S 3", "D 8", "Q8", "S 4", "X 3"])
def test_conjugacy_classes_match_brute_force(spec):
    G = build_group(spec)
    got = sorted(sorted(c) for c in G.conjugacy_classes())
    assert got == sorted(sorted(c) for c in brute_classes(G))


# -- documented examples ------------------------------------------------------------------

def test_cyclic2():
    G = cyclic(2)
    assert G.order == 2 and G.element_orders.tolist() == [1, 2]
    assert len(G.all_subgroups()) == 2
    assert len(G.double_cosets(G.trivial, G.trivial).representatives) == 2


def test_quaternion8():
    G = quaternion8()
    orders = G.element_orders.tolist()
    assert G.order == 8 and orders.count(2) == 1 and orders.count(4) == 6
    assert len(G.all_subgroups()) == 6
    assert len(G.subgroup_conjugacy_classes()) == 6
    assert all(G.is_normal(H) for H in G.all_subgroups())
    i = G.element("i")
    Hi = G.subgroup([i])
    assert len(G.double_cosets(Hi, Hi).representatives) == 2


def test_quaternion_presentation_oracle():
    G = quaternion8()
    i, j = G.element("i"), G.element("j")
    assert G.power(i, 4) == 0 and G.power(i, 2) == G.power(j, 2)
    assert G.m(G.m(j, i), G.inv[j]) == G.inv[i]


def test_klein4_and_s3_examples():
    K = build_group("K4")
    assert len(K.all_subgroups()) == 5
    assert all(len(c) == 1 for c in K.conjugacy_classes())
    S = symmetric(3)
    t = next(g for g in range(6) if S.element_orders[g] == 2)
    H = S.subgroup([t])
    assert len(S.double_cosets(H, H).representatives) == 2


def test_known_lattice_sizes():
    assert len(symmetric(4).all_subgroups()) == 30
    assert len(symmetric(4).subgroup_conjugacy_classes()) == 11
    assert len(dihedral(8).all_subgroups()) == 10


def test_extraspecial():
    for p in (3, 5):
        X = extraspecial_p3(p)
        assert X.order == p ** 3 and X.exponent == p and X.center.order == p


def test_xq8_3():
    G = xq8(3)
    assert G.order == 216
    assert G.sylow(2).order == 8
    assert len(G.conjugacy_classes()) == 16
    # Q8 sits in SL2, so it fixes the commutator subgroup of X pointwise: the center has order 3
    brute = [z for z in range(G.order) if np.array_equal(G.mul[z], G.mul[:, z])]
    assert len(brute) == 3 == G.center.order


def test_xq8_sylow_is_quaternion():
    G = xq8(3)
    P = G.sylow(2)
    orders = sorted(int(G.element_orders[g]) for g in P.members)
    assert orders == [1, 2, 4, 4, 4, 4, 4, 4]


def test_budget_refuses_large_xq8(monkeypatch):
    monkeypatch.setenv("COMACK_BUDGET", "1000")
    with pytest.raises(BudgetExceeded):
        xq8(17)


def test_p_subgroup_classes_by_sylow_path(monkeypatch):
    G = build_group("S 4")
    full = [(H.order, H.members) for H in G.p_subgroup_classes(2)]
    monkeypatch.setenv("COMACK_BUDGET", "5000,8")
    G2 = build_group("S 4")
    via_sylow = [H.order for H in G2.p_subgroup_classes(2)]
    assert sorted(o for o, _ in full) == sorted(via_sylow)


def test_spec_parsing():
    assert parse_group_spec("prod(C 2,S 3)") == ("prod", ("C", 2), ("S", 3))
    assert build_group("prod(C 2, C 3)").order == 6
    assert build_group("E 3 2").order == 9
    for bad in ["", "C", "F 2", "prod(C 2)", "C 2 3"]:
        with pytest.raises(GroupError):
            build_group(bad)


def test_invalid_parameters():
    with pytest.raises(GroupError):
        extraspecial_p3(2)
    with pytest.raises(GroupError):
        xq8(4)
    with pytest.raises(GroupError):
        G = symmetric(3)
        G.sylow(4)
