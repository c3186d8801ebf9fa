import itertools
import random
from collections import Counter

import numpy as np
import pytest

from comack.exactla.field import field_make
from comack.exactla.linalg import FqMatrix, inverse, is_invertible
from comack.groups import build_group, cyclic
from comack.modrep import (
    ModuleError,
    ModuleRep,
    are_isomorphic,
    bimodule_from_left,
    bimodule_group,
    decompose,
    hom_dim,
    hom_space,
    is_permeable_bimodule,
    is_pperm,
    module_from_elements,
    perm_module,
    pperm_catalog,
    regular_bimodule,
    tensor_over_group,
    trivial_module,
)


def brute_double_coset_count(G, H, K):
    seen, n = set(), 0
    for g in range(G.order):
        if g not in seen:
            seen |= {int(G.mul[G.mul[h, g], k]) for h in H.members for k in K.members}
            n += 1
    return n


def brute_hom_dim(V, W):
    """dim of {T : T A_s = B_s T} by brute enumeration of all matrices (tiny cases only)."""
    ctx = V.ctx
    count = 0
    for entries in itertools.product(range(ctx.q), repeat=V.dim * W.dim):
        T = np.array(entries, dtype=np.int64).reshape(W.dim, V.dim)
        if V.is_hom(W, FqMatrix.wrap(ctx, T)):
            count += 1
    d = 0
    while ctx.q ** d < count:
        d += 1
    assert ctx.q ** d == count
    return d


def c2c2_bimodule(A, B, F2):
    """C2-C2-bimodule over F2: the left generator acts by A, the right one by B."""
    C2 = cyclic(2)
    HG = bimodule_group(C2, C2)
    mats = {}
    for e in HG.generators:
        h, g = divmod(e, 2)
        mats[e] = A if h else B
    return C2, HG, module_from_elements(HG, F2, mats)


def random_commuting_involutions(n, rng):
    """Conjugate a random pair of commuting block-diagonal involutions by a random invertible matrix."""
    F2 = field_make(2)
    blocks = []
    left = n
    while left:
        size = rng.choice([1, 2, 4]) if left >= 4 else rng.choice([1, 2][:left])
        blocks.append(size)
        left -= size
    A, B = np.zeros((n, n), dtype=np.int64), np.zeros((n, n), dtype=np.int64)
    off = 0
    swap = np.array([[0, 1], [1, 0]])
    I2 = np.eye(2, dtype=np.int64)
    for size in blocks:
        if size == 1:
            A[off, off] = B[off, off] = 1
        elif size == 2:
            a, b = rng.choice([(swap, I2), (I2, swap), (swap, swap)])
            A[off:off + 2, off:off + 2], B[off:off + 2, off:off + 2] = a, b
        else:
            # regular module of C2 x C2
            A[off:off + 4, off:off + 4] = np.kron(swap, I2)
            B[off:off + 4, off:off + 4] = np.kron(I2, swap)
        off += size
    while True:
        S = FqMatrix.wrap(F2, np.array([[rng.randrange(2) for _ in range(n)] for _ in range(n)]))
        if is_invertible(S):
            Si = inverse(S)
            return (Si @ FqMatrix.wrap(F2, A) @ S).a, (Si @ FqMatrix.wrap(F2, B) @ S).a


# -- modules ---------------------------------------------------------------------

def test_perm_module_examples():
    F2 = field_make(2)
    G = build_group("S 3")
    assert perm_module(G, G.whole, F2).dim == 1
    assert perm_module(G, G.trivial, F2).dim == 6
    t = next(g for g in range(6) if G.element_orders[g] == 2)
    V = perm_module(G, G.subgroup([t]), F2)
    assert V.dim == 3 and V.check()
    for s in G.generators:
        M = V.gens[s]
        assert np.array_equal(M.sum(axis=0), np.ones(3)) and np.array_equal(M.sum(axis=1), np.ones(3))


def test_module_validation():
    G = cyclic(2)
    F2 = field_make(2)
    with pytest.raises(ModuleError):
        ModuleRep(G, F2, 2, {})
    bad = module_from_elements(G, F2, {G.generators[0]: np.array([[1, 1], [0, 0]])})
    assert not bad.check()
    F4 = field_make(2, 2)
    C3 = cyclic(3)
    omega_rep = module_from_elements(C3, F4, {C3.generators[0]: np.array([[F4.primitive_element()]])})
    assert omega_rep.check()


# -- Hom spaces -----------------------------------------------------------------------

@pytest.mark.parametrize("spec", ["S 3", "D 8", "Q8", "C 6", "K4"])
@pytest.mark.parametrize("p,m", [(2, 1), (3, 2)])
def test_hom_dims_of_permutation_modules(spec, p, m):
    G = build_group(spec)
    ctx = field_make(p, m)
    subs = G.all_subgroups()
    mods = {H.canonical_id: perm_module(G, H, ctx) for H in subs}
    for H in subs:
        for K in subs:
            V, W = mods[H.canonical_id], mods[K.canonical_id]
            d = brute_double_coset_count(G, H, K)
            assert hom_dim(V, W, "orbit") == d == hom_dim(V, W, "generic")
            for T in hom_space(V, W, "generic"):
                assert V.is_hom(W, T)


def test_hom_space_matches_brute_force():
    F2 = field_make(2)
    G = build_group("S 3")
    t = next(g for g in range(6) if G.element_orders[g] == 2)
    mods = [perm_module(G, G.whole, F2), perm_module(G, G.subgroup([t]), F2)]
    for V in mods:
        for W in mods:
            assert hom_dim(V, W, "generic") == brute_hom_dim(V, W)


def test_hom_examples():
    F2, F4 = field_make(2), field_make(2, 2)
    G = cyclic(2)
    k = trivial_module(G, F2)
    assert hom_dim(k, k) == 1
    assert hom_dim(perm_module(G, G.trivial, F2), perm_module(G, G.trivial, F2)) == 2
    S = build_group("S 3")
    t = next(g for g in range(6) if S.element_orders[g] == 2)
    c = next(g for g in range(6) if S.element_orders[g] == 3)
    assert hom_dim(perm_module(S, S.subgroup([t]), F4), perm_module(S, S.subgroup([c]), F4)) == 1
    with pytest.raises(ModuleError):
        hom_space(k, trivial_module(G, F4))


# -- decomposition -----------------------------------------------------------------------

def test_c2_group_algebra_is_local_by_brute_force():
    F2 = field_make(2)
    G = cyclic(2)
    V = perm_module(G, G.trivial, F2)
    ends = [FqMatrix.wrap(F2, np.array(e).reshape(2, 2)) for e in itertools.product(range(2), repeat=4)]
    ends = [T for T in ends if V.is_hom(V, T)]
    assert len(ends) == 4
    idem = [T for T in ends if T @ T == T]
    assert len(idem) == 2  # only 0 and 1
    assert decompose(V).dims == [2]


def test_decompose_examples():
    F2 = field_make(2)
    G = cyclic(2)
    assert decompose(trivial_module(G, F2)).dims == [1]
    V = perm_module(G, G.trivial, F2).direct_sum(perm_module(G, G.whole, F2))
    dec = decompose(V)
    assert sorted(dec.dims) == [1, 2] and dec.verify()


@pytest.mark.parametrize("spec,p,m", [("S 3", 2, 2), ("C 6", 2, 2), ("S 3", 3, 1), ("D 12", 3, 1), ("S 4", 2, 1)])
def test_decomposition_invariants_and_seed_stability(spec, p, m):
    G = build_group(spec)
    ctx = field_make(p, m)
    V = perm_module(G, G.trivial, ctx)
    Qs = G.p_subgroup_classes(p)
    perms = [perm_module(G, Q, ctx) for Q in Qs]
    shapes = set()
    for seed in range(5):
        dec = decompose(V, seed)
        assert dec.verify() and sum(dec.dims) == G.order
        shapes.add(tuple(sorted(Counter(
            (S.dim, tuple(hom_dim(S, M, "generic") for M in perms)) for S in dec.summands).items())))
    assert len(shapes) == 1


def test_s3_regular_module_in_char_2():
    # principal block: the projective cover of k (dim 2); the 2-dim simple is projective and occurs twice
    F4 = field_make(2, 2)
    G = build_group("S 3")
    dec = decompose(perm_module(G, G.trivial, F4))
    assert sorted(dec.dims) == [2, 2, 2]


# -- isomorphism -------------------------------------------------------------------------

def test_isomorphism_examples():
    F2, F4 = field_make(2), field_make(2, 2)
    G = cyclic(2)
    V = perm_module(G, G.trivial, F2)
    res = are_isomorphic(V, V)
    assert res and V.is_hom(V, res.certificate)
    assert not are_isomorphic(trivial_module(G, F2), V)
    C3 = cyclic(3)
    w = F4.primitive_element()
    a = module_from_elements(C3, F4, {C3.generators[0]: np.array([[w]])})
    b = module_from_elements(C3, F4, {C3.generators[0]: np.array([[F4.mul(w, w)]])})
    assert a.check() and b.check()
    assert hom_dim(a, b) == 0 and not are_isomorphic(a, b)


def test_isomorphism_after_change_of_basis():
    F3 = field_make(3)
    G = build_group("S 3")
    V = decompose(perm_module(G, G.trivial, F3)).summands[-1]
    rng = random.Random(0)
    while True:
        T = FqMatrix.wrap(F3, np.array([[rng.randrange(3) for _ in range(V.dim)] for _ in range(V.dim)]))
        if is_invertible(T):
            break
    W = V.conjugate_by(T)
    res = are_isomorphic(V, W, seed=3)
    assert res and V.is_hom(W, res.certificate)


# -- catalogs --------------------------------------------------------------------------------

def test_catalog_examples():
    F2, F4 = field_make(2), field_make(2, 2)
    cat = pperm_catalog(cyclic(2), 2, F2)
    assert sorted(e.module.dim for e in cat.entries) == [1, 2]
    K = build_group("K4")
    assert sorted(e.module.dim for e in pperm_catalog(K, 2, F2).entries) == [1, 2, 2, 2, 4]
    cat6 = pperm_catalog(build_group("C 6"), 2, F4)
    assert sorted(e.module.dim for e in cat6.entries) == [1, 1, 1, 2, 2, 2]
    with pytest.raises(ModuleError):
        pperm_catalog(cyclic(2), 3, F2)


@pytest.mark.parametrize("spec,p", [("C 4", 2), ("D 8", 2), ("Q8", 2), ("E 3 2", 3), ("C 9", 3)])
def test_pgroup_catalog_counts_subgroup_classes(spec, p):
    G = build_group(spec)
    cat = pperm_catalog(G, p, field_make(p))
    assert len(cat.entries) == len(G.subgroup_conjugacy_classes())
    for i in range(len(cat.entries)):
        for j in range(i):
            assert not are_isomorphic(cat.entries[i].module, cat.entries[j].module)


def test_catalog_manifest_and_conjugate_certificate():
    G = build_group("S 4")
    cat = pperm_catalog(G, 2, field_make(2))
    assert cat.certificates  # a non-normal 2-subgroup exists
    man = cat.manifest()
    assert [m["entry"] for m in man] == list(range(len(cat.entries)))
    assert all(len(m["hom_fingerprint"]) == len(cat.subgroups) for m in man)
    for i in range(len(cat.entries)):
        for j in range(i):
            assert not are_isomorphic(cat.entries[i].module, cat.entries[j].module)


def test_is_pperm():
    F2 = field_make(2)
    G = build_group("K4")
    cat = pperm_catalog(G, 2, F2)
    V = perm_module(G, G.trivial, F2).direct_sum(trivial_module(G, F2))
    assert is_pperm(V, cat)


# -- permeability ---------------------------------------------------------------------------

def test_regular_bimodule_is_permeable():
    for spec, p, F in [("C 2", 2, field_make(2)), ("S 3", 2, field_make(2)), ("C 3", 3, field_make(3))]:
        G = build_group(spec)
        GG, X = regular_bimodule(G, F)
        assert X.check()
        rep = is_permeable_bimodule(X, G, G, pperm_catalog(G, p, F))
        assert rep.permeable
        for row, Q in zip(rep.checked, G.p_subgroup_classes(p)):
            assert row["dim"] == G.order // Q.order


def test_tensor_with_regular_bimodule_is_the_module():
    F3 = field_make(3)
    G = build_group("S 3")
    GG, X = regular_bimodule(G, F3)
    for Q in G.all_subgroups():
        V = perm_module(G, Q, F3)
        T = tensor_over_group(X, G, G, V)
        assert T.dim == V.dim and T.check()
        assert hom_dim(T, V, "generic") == hom_dim(V, V)


def test_nonpermeable_k4_bimodule():
    # a 2-dimensional F4 K4-module where no element of order 2 acts trivially
    F4 = field_make(2, 2)
    H, G = build_group("K4"), cyclic(2)
    w = F4.primitive_element()
    M = module_from_elements(H, F4, {H.generators[0]: np.array([[1, 1], [0, 1]]),
                                     H.generators[1]: np.array([[1, w], [0, 1]])})
    assert M.check()
    cat = pperm_catalog(H, 2, F4)
    assert not is_pperm(M, cat)
    HG, X = bimodule_from_left(M, G)
    assert X.check()
    assert not is_permeable_bimodule(X, H, G, cat).permeable
    HG, Y = bimodule_from_left(trivial_module(H, F4), G)
    assert is_permeable_bimodule(Y, H, G, cat).permeable


def test_random_c2_bimodules_are_permeable():
    F2 = field_make(2)
    rng = random.Random(2024)
    cat = pperm_catalog(cyclic(2), 2, F2)
    for _ in range(10):
        n = rng.randrange(1, 7)
        A, B = random_commuting_involutions(n, rng)
        C2, HG, X = c2c2_bimodule(A, B, F2)
        assert X.check()
        assert is_permeable_bimodule(X, C2, C2, pperm_catalog(C2, 2, F2)).permeable
    with pytest.raises(ModuleError):
        is_permeable_bimodule(X, C2, C2, cat)  # catalog of a different group object
