import numpy as np
import pytest
import sympy

from comack.blocks import block_idempotents
from comack.cartan import (
    CartanError,
    CartanMatrix,
    block_catalog,
    cartan_block,
    cartan_pgroup,
    cyclic_criterion_report,
    same_fingerprint,
)
from comack.exactla.field import field_make
from comack.exactla.intmat import IntMatrix
from comack.groups import build_group, cyclic
from comack.modrep import pperm_catalog

CRITERION_SET = [("C 2", 2), ("C 4", 2), ("C 8", 2), ("C 9", 3), ("K4", 2),
                 ("prod(C 2,C 4)", 2), ("Q8", 2), ("D 8", 2), ("E 3 2", 3)]


def brute_cartan(P):
    """Double-coset counts between subgroup class representatives, counted by brute force."""
    subs = P.all_subgroups()
    reps = [subs[c[0]] for c in sorted(P.subgroup_conjugacy_classes(), key=lambda c: (subs[c[0]].order, c[0]))]
    out = []
    for Q in reps:
        row = []
        for R in reps:
            seen, n = set(), 0
            for g in range(P.order):
                if g not in seen:
                    seen |= {int(P.mul[P.mul[q, g], r]) for q in Q.members for r in R.members}
                    n += 1
            row.append(n)
        out.append(row)
    return out


def principal_cartan(G, p, m=1, seed=0):
    ctx = field_make(p, m)
    blocks = block_idempotents(G, ctx, seed)
    return cartan_block(G, blocks[0], block_catalog(G, p, blocks[0], seed), blocks)


# -- p-group path ---------------------------------------------------------------------

@pytest.mark.parametrize("spec,p", CRITERION_SET)
def test_pgroup_matrix_matches_brute_force(spec, p):
    P = build_group(spec)
    C = cartan_pgroup(P, p)
    assert C.matrix.tolist() == brute_cartan(P)
    assert C.is_symmetric()
    assert C.det == abs(int(sympy.Matrix(C.matrix.tolist()).det()))
    assert all(x >= 0 for row in C.matrix.tolist() for x in row)


def test_pgroup_examples():
    C = cartan_pgroup(cyclic(2), 2)
    assert C.matrix.tolist() == [[2, 1], [1, 1]] and C.det == 1
    K = cartan_pgroup(build_group("K4"), 2)
    assert K.size == 5 and K.det == 0
    assert K.matrix.tolist() == [[4, 2, 2, 2, 1], [2, 2, 1, 1, 1], [2, 1, 2, 1, 1],
                                 [2, 1, 1, 2, 1], [1, 1, 1, 1, 1]]
    T = cartan_pgroup(build_group("C 1"), 2)
    assert T.matrix.tolist() == [[1]] and T.det == 1
    with pytest.raises(CartanError):
        cartan_pgroup(build_group("S 3"), 2)


@pytest.mark.parametrize("spec,p", CRITERION_SET)
def test_cyclic_criterion(spec, p):
    P = build_group(spec)
    rep = cyclic_criterion_report(P, p)
    cyclic_by_orders = int(P.element_orders.max()) == P.order
    assert rep.cyclic == cyclic_by_orders
    assert rep.holds and (rep.det != 0) == cyclic_by_orders


def test_criterion_examples():
    assert cyclic_criterion_report(build_group("C 4"), 2).det == 2
    assert cyclic_criterion_report(build_group("C 9"), 3).det == 12
    q = cyclic_criterion_report(build_group("Q8"), 2)
    assert not q.cyclic and q.det == 0


# -- block path ------------------------------------------------------------------------

@pytest.mark.parametrize("spec,p", [("C 2", 2), ("C 4", 2), ("K4", 2), ("Q8", 2), ("D 8", 2),
                                    ("C 9", 3), ("E 3 2", 3)])
def test_paths_agree_on_pgroups(spec, p):
    P = build_group(spec)
    A, B = cartan_pgroup(P, p), principal_cartan(P, p)
    assert B.is_symmetric()
    assert same_fingerprint(A, B) and A.det == B.det


def test_block_examples():
    G = build_group("C 6")
    F4 = field_make(2, 2)
    blocks = block_idempotents(G, F4)
    cat = pperm_catalog(G, 2, F4)
    for b in blocks:
        assert cartan_block(G, b, cat, blocks).matrix.tolist() == [[2, 1], [1, 1]]
    C3 = cyclic(3)
    blocks = block_idempotents(C3, F4)
    cat = pperm_catalog(C3, 2, F4)
    assert [cartan_block(C3, b, cat, blocks).matrix.tolist() for b in blocks] == [[[1]]] * 3


def test_s4_blocks_at_3():
    G = build_group("S 4")
    F3 = field_make(3)
    blocks = block_idempotents(G, F3)
    cat = pperm_catalog(G, 3, F3)
    mats = [cartan_block(G, b, cat, blocks) for b in blocks]
    assert all(C.is_symmetric() for C in mats)
    assert [C.size for C in mats] == [4, 1, 1]
    frozen = [[2, 1, 1, 0], [1, 2, 0, 1], [1, 0, 1, 0], [0, 1, 0, 1]]
    assert same_fingerprint(mats[0], CartanMatrix(["a", "b", "c", "d"], IntMatrix(frozen)))
    assert mats[0].det == 0  # checked with sympy
    # the per-block catalog gives the same matrices as the full catalog
    for b, C in zip(blocks, mats):
        assert same_fingerprint(C, cartan_block(G, b, block_catalog(G, 3, b), blocks))


def test_block_catalog_mismatch():
    G = build_group("S 3")
    blocks = block_idempotents(G, field_make(2))
    with pytest.raises(CartanError):
        cartan_block(G, blocks[0], pperm_catalog(G, 2, field_make(2, 2)), blocks)


# -- fingerprints and dumps ----------------------------------------------------------------

def test_fingerprint_is_permutation_invariant():
    C = cartan_pgroup(build_group("D 8"), 2)
    rng = np.random.default_rng(1)
    M = np.array(C.matrix.tolist())
    for _ in range(5):
        perm = rng.permutation(len(M))
        D = CartanMatrix(list(np.array(C.row_labels)[perm]), IntMatrix(M[np.ix_(perm, perm)].tolist()))
        assert same_fingerprint(C, D) and D.det == C.det
    E = M.copy()
    E[0, 1] += 1
    E[1, 0] += 1
    assert not same_fingerprint(C, CartanMatrix(C.row_labels, IntMatrix(E.tolist())))
    assert not same_fingerprint(C, cartan_pgroup(build_group("Q8"), 2))
    assert not same_fingerprint(C, cartan_pgroup(cyclic(2), 2))


def test_dumps():
    C = cartan_pgroup(cyclic(2), 2)
    lines = C.to_csv().splitlines()
    assert lines[0].split(",")[1:] == C.row_labels
    assert lines[1].split(",")[1:] == ["2", "1"]
    assert C.format().endswith("det = 1")
    assert C.as_dict()["matrix"] == [[2, 1], [1, 1]]
