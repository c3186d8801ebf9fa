"""Modules over F_q G given by generator matrices.

Hom spaces, splitting into indecomposable summands, isomorphism tests,
catalogs of p-permutation modules and the bimodule permeability check.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .exactla import poly as P
from .exactla.field import FieldCtx
from .exactla.linalg import (
    Echelon,
    FqMatrix,
    column_space_basis,
    crt_idempotent_polys,
    inverse,
    is_invertible,
    min_poly,
    nullspace,
    poly_eval_matrix,
    solve,
)
from .groups import Group, Subgroup, direct_product

IDLE_ROUNDS = 32
ISO_TRIALS = 64


class ModuleError(ValueError):
    pass


@dataclass(eq=False)
class ModuleRep:
    """A left F_q G-module: ``gens[s]`` is the matrix of generator element s."""

    group: Group
    ctx: FieldCtx
    dim: int
    gens: dict = field(repr=False)
    label: str = ""
    perm_subgroup: Subgroup | None = field(default=None, repr=False)

    def __post_init__(self):
        for s, M in self.gens.items():
            if M.shape != (self.dim, self.dim):
                raise ModuleError(f"generator {s} has shape {M.shape}, expected {self.dim}")
        if set(self.gens) != set(self.group.generators):
            raise ModuleError("matrices must be given for exactly the group's generators")

    def gen_matrix(self, s: int) -> FqMatrix:
        return FqMatrix.wrap(self.ctx, self.gens[s])

    @cached_property
    def element_matrices(self) -> np.ndarray:
        """rho(g) for every element, built along right multiplication by generators."""
        G, ctx, n = self.group, self.ctx, self.dim
        out = np.zeros((G.order, n, n), dtype=np.int64)
        done = np.zeros(G.order, dtype=bool)
        out[0] = np.eye(n, dtype=np.int64)
        done[0] = True
        frontier = [0]
        while frontier:
            nxt = []
            for x in frontier:
                for s in G.generators:
                    y = int(G.mul[x, s])
                    if not done[y]:
                        out[y] = ctx.matmul(out[x], self.gens[s])
                        done[y] = True
                        nxt.append(y)
            frontier = nxt
        return out

    def rho(self, g: int) -> FqMatrix:
        return FqMatrix.wrap(self.ctx, self.element_matrices[g])

    def check(self, samples: int = 64, seed: int = 0) -> bool:
        """Invertible generators and rho(g h) = rho(g) rho(h) on a sample of pairs."""
        ctx, G = self.ctx, self.group
        for s in G.generators:
            if not is_invertible(self.gen_matrix(s)):
                return False
        em = self.element_matrices
        rng = random.Random(f"check:{seed}")
        pairs = [(rng.randrange(G.order), rng.randrange(G.order)) for _ in range(samples)]
        # every relation among generators shows up as rho(gh) != rho(g) rho(h) for some pair
        pairs += [(g, s) for g in range(G.order) for s in G.generators] if G.order * self.dim <= 20000 else []
        for g, h in pairs:
            if not np.array_equal(em[int(G.mul[g, h])], ctx.matmul(em[g], em[h])):
                return False
        return True

    def submodule(self, basis: FqMatrix) -> "ModuleRep":
        """The action on the invariant subspace spanned by the columns of basis."""
        gens = {}
        for s, M in self.gens.items():
            img = FqMatrix.wrap(self.ctx, self.ctx.matmul(M, basis.a))
            x = solve(basis, img)
            if x is None:
                raise ModuleError("subspace is not invariant")
            gens[s] = x.a
        return ModuleRep(self.group, self.ctx, basis.cols, gens, label=f"sub({self.label})")

    def direct_sum(self, other: "ModuleRep") -> "ModuleRep":
        if other.group is not self.group or other.ctx != self.ctx:
            raise ModuleError("direct sum of modules over different groups or fields")
        n, m = self.dim, other.dim
        gens = {}
        for s in self.gens:
            M = np.zeros((n + m, n + m), dtype=np.int64)
            M[:n, :n] = self.gens[s]
            M[n:, n:] = other.gens[s]
            gens[s] = M
        return ModuleRep(self.group, self.ctx, n + m, gens, label=f"{self.label}+{other.label}")

    def conjugate_by(self, T: FqMatrix) -> "ModuleRep":
        """Same module in the basis given by the columns of the invertible matrix T."""
        Ti = inverse(T)
        gens = {s: (Ti @ FqMatrix.wrap(self.ctx, M) @ T).a for s, M in self.gens.items()}
        return ModuleRep(self.group, self.ctx, self.dim, gens, label=self.label)

    def is_hom(self, other: "ModuleRep", T: FqMatrix) -> bool:
        ctx = self.ctx
        return all(np.array_equal(ctx.matmul(T.a, self.gens[s]), ctx.matmul(other.gens[s], T.a))
                   for s in self.gens)


def _check_pair(V: ModuleRep, W: ModuleRep):
    if V.group is not W.group:
        raise ModuleError("modules over different groups")
    if V.ctx != W.ctx:
        raise ModuleError("modules over different fields")


def trivial_module(G: Group, ctx: FieldCtx) -> ModuleRep:
    return ModuleRep(G, ctx, 1, {s: np.ones((1, 1), dtype=np.int64) for s in G.generators}, label="k")


def perm_module(G: Group, Q: Subgroup, ctx: FieldCtx) -> ModuleRep:
    """k[G/Q] with the left translation action on cosets (minimal representatives)."""
    lc = G.left_cosets(Q)
    reps = np.array(lc.representatives, dtype=np.int64)
    n = len(reps)
    gens = {}
    for s in G.generators:
        M = np.zeros((n, n), dtype=np.int64)
        M[lc.coset_of[G.mul[s, reps]], np.arange(n)] = 1
        gens[s] = M
    return ModuleRep(G, ctx, n, gens, label=f"k[G/{Q.canonical_id if Q.canonical_id >= 0 else Q.order}]",
                     perm_subgroup=Q)


def module_from_elements(G: Group, ctx: FieldCtx, matrices: dict, label: str = "") -> ModuleRep:
    """Module from encoded generator matrices given as {element id: matrix}."""
    gens = {s: np.asarray(m, dtype=np.int64) for s, m in matrices.items()}
    dims = {m.shape[0] for m in gens.values()}
    if len(dims) != 1:
        raise ModuleError("generator matrices of different sizes")
    return ModuleRep(G, ctx, dims.pop(), gens, label=label)


# -- Hom spaces -----------------------------------------------------------------

def _orbit_hom_basis(V: ModuleRep, W: ModuleRep) -> list[FqMatrix]:
    """Basis of Hom(k[G/H], k[G/K]): one orbit-sum map per double coset HxK."""
    G, ctx = V.group, V.ctx
    H, K = V.perm_subgroup, W.perm_subgroup
    cH, cK = G.left_cosets(H).coset_of, G.left_cosets(K).coset_of
    g = np.arange(G.order)
    out = []
    for x in G.double_cosets(H, K).representatives:
        B = np.zeros((W.dim, V.dim), dtype=np.int64)
        B[cK[G.mul[g, x]], cH[g]] = 1
        out.append(FqMatrix.wrap(ctx, B))
    return out


def _spin_hom_basis(V: ModuleRep, W: ModuleRep) -> list[FqMatrix]:
    """Basis of Hom_G(V, W) by spinning V from seed vectors.

    V is spanned by words in the generators applied to seeds; an intertwiner is
    fixed by the images of the seeds, and each relation found while spinning
    becomes a linear condition on those images.
    """
    ctx = V.ctx
    n, m = V.dim, W.dim
    if n == 0 or m == 0:
        return []
    gens = list(V.group.generators)
    ech = Echelon(ctx, n, track=True)
    basis_vecs: list[np.ndarray] = []
    # how each basis vector arose: ("seed", index) or ("gen", parent, s)
    origin: list[tuple] = []
    relations: list[tuple] = []  # (parent, s, coefficients over basis vectors)
    seeds = 0
    for j in range(n):
        e = np.zeros(n, dtype=np.int64)
        e[j] = 1
        if ech.dim and ech.contains(e):
            continue
        ech.add(e)
        basis_vecs.append(e)
        origin.append(("seed", seeds))
        seeds += 1
        i = len(basis_vecs) - 1
        while i < len(basis_vecs):
            for s in gens:
                w = ctx.matmul(V.gens[s], basis_vecs[i])
                if ech.add(w):
                    basis_vecs.append(w)
                    origin.append(("gen", i, s))
                else:
                    relations.append((i, s, ech.express(w)))
            i += 1
        if ech.dim == n:
            break
    nu = seeds * m
    # images T(b_k) = L_k u with u the stacked seed images
    L = np.zeros((n, m, nu), dtype=np.int64)
    for k, org in enumerate(origin):
        if org[0] == "seed":
            L[k, :, org[1] * m:(org[1] + 1) * m] = np.eye(m, dtype=np.int64)
        else:
            L[k] = ctx.matmul(W.gens[org[2]], L[org[1]])
    N = np.eye(nu, dtype=np.int64)  # columns span the admissible u
    LN = L
    batch: list[np.ndarray] = []

    def flush():
        nonlocal N, LN, batch
        if not batch:
            return
        C = np.concatenate(batch, axis=0)
        batch = []
        if not C.any():
            return
        K = nullspace(FqMatrix.wrap(ctx, C)).a  # rows
        N = ctx.matmul(N, K.T)
        LN = ctx.matmul(LN.reshape(-1, LN.shape[-1]), K.T).reshape(n, m, -1)

    for parent, s, coeff in relations:
        if N.shape[1] == 0:
            break
        lhs = ctx.matmul(W.gens[s], LN[parent])
        nzk = np.flatnonzero(coeff)
        if nzk.size:
            rhs = ctx.matmul(coeff[nzk][None, :], LN[nzk].reshape(nzk.size, -1)).reshape(m, -1)
        else:
            rhs = np.zeros_like(lhs)
        batch.append(ctx.sub_a(lhs, rhs))
        if sum(b.shape[0] for b in batch) >= max(m, 64):
            flush()
    flush()
    if N.shape[1] == 0:
        return []
    Bmat = FqMatrix.wrap(ctx, np.stack(basis_vecs, axis=1))
    Binv = inverse(Bmat)
    out = []
    for c in range(N.shape[1]):
        TB = LN[:, :, c].T  # column k is T(b_k)
        out.append(FqMatrix.wrap(ctx, TB) @ Binv)
    return out


def hom_space(V: ModuleRep, W: ModuleRep, method: str = "auto") -> list[FqMatrix]:
    """Basis of {T : T rho_V(g) = rho_W(g) T}.

    ``orbit`` (permutation modules only) uses double-coset orbit sums,
    ``generic`` spins V from seed vectors; ``auto`` picks orbit when possible.
    """
    _check_pair(V, W)
    if method == "auto":
        method = "orbit" if V.perm_subgroup is not None and W.perm_subgroup is not None else "generic"
    if method == "orbit":
        if V.perm_subgroup is None or W.perm_subgroup is None:
            raise ModuleError("orbit method needs permutation modules")
        return _orbit_hom_basis(V, W)
    if method == "generic":
        return _spin_hom_basis(V, W)
    raise ModuleError(f"unknown hom method {method!r}")


def hom_dim(V: ModuleRep, W: ModuleRep, method: str = "auto") -> int:
    return len(hom_space(V, W, method))


def end_algebra(V: ModuleRep, method: str = "auto") -> list[FqMatrix]:
    return hom_space(V, V, method)


# -- decomposition ----------------------------------------------------------------

@dataclass
class Decomposition:
    module: ModuleRep
    idempotents: list
    summands: list
    inclusions: list
    projections: list
    seed: int

    @property
    def dims(self) -> list[int]:
        return [S.dim for S in self.summands]

    def verify(self) -> bool:
        V, ctx = self.module, self.module.ctx
        n = V.dim
        total = np.zeros((n, n), dtype=np.int64)
        for i, e in enumerate(self.idempotents):
            if not (e @ e == e):
                return False
            for j, f in enumerate(self.idempotents):
                if i != j and not (e @ f).is_zero():
                    return False
            if not V.is_hom(V, e):
                return False
            total = ctx.add_a(total, e.a)
        if not np.array_equal(total, np.eye(n, dtype=np.int64)):
            return False
        for I, Pm, e, S in zip(self.inclusions, self.projections, self.idempotents, self.summands):
            if not (I @ Pm == e) or not (Pm @ I).is_identity():
                return False
            if not V.is_hom(V, I @ Pm) or not S.is_hom(V, I):
                return False
        return sum(self.dims) == n


def _split_once(S: ModuleRep, rng: random.Random, end_method: str):
    """Try to split S with random endomorphisms; returns subspace bases or None."""
    ctx = S.ctx
    E = end_algebra(S, end_method)
    if len(E) <= 1:
        return None
    idle = 0
    while idle < IDLE_ROUNDS:
        coeffs = [rng.randrange(ctx.q) for _ in E]
        phi = np.zeros((S.dim, S.dim), dtype=np.int64)
        for c, M in zip(coeffs, E):
            if c:
                phi = ctx.add_a(phi, ctx.mul_a(c, M.a))
        phiM = FqMatrix.wrap(ctx, phi)
        f = min_poly(phiM)
        factors = P.factor_poly(ctx, f, seed=rng.randrange(1 << 30))
        if len(factors) > 1:
            idems = crt_idempotent_polys(ctx, f, factors)
            parts = []
            for poly_e in idems:
                e = poly_eval_matrix(ctx, poly_e, phiM)
                parts.append(column_space_basis(e))
            return parts
        idle += 1
    return None


def decompose(V: ModuleRep, seed: int = 0, end_method: str = "auto") -> Decomposition:
    """Split V into indecomposable summands (declared after IDLE_ROUNDS idle random tries)."""
    if V.dim < 1:
        raise ModuleError("cannot decompose the zero module")
    ctx = V.ctx
    rng = random.Random(f"decompose:{seed}")
    stack = [FqMatrix.identity(ctx, V.dim)]
    done: list[FqMatrix] = []
    while stack:
        I = stack.pop()
        S = V.submodule(I)
        parts = None if S.dim == 1 else _split_once(S, rng, end_method)
        if parts is None:
            done.append(I)
        else:
            for B in reversed(parts):
                stack.append(I @ B)
    done.sort(key=lambda I: I.cols)
    big = FqMatrix.wrap(ctx, np.concatenate([I.a for I in done], axis=1))
    Binv = inverse(big)
    projections, idempotents, summands, off = [], [], [], 0
    for I in done:
        Pm = FqMatrix.wrap(ctx, Binv.a[off: off + I.cols].copy())
        off += I.cols
        projections.append(Pm)
        idempotents.append(I @ Pm)
        summands.append(V.submodule(I))
    dec = Decomposition(V, idempotents, summands, done, projections, seed)
    if not dec.verify():
        raise AssertionError("decomposition failed exact verification")
    return dec


# -- isomorphism ----------------------------------------------------------------

@dataclass
class IsoResult:
    isomorphic: bool
    certificate: FqMatrix | None = None
    method: str = ""

    def __bool__(self):
        return self.isomorphic


def are_isomorphic(V: ModuleRep, W: ModuleRep, seed: int = 0) -> IsoResult:
    """Isomorphism test for indecomposable modules.

    Random elements of Hom(V, W) are tried first.  Failing that, all products
    psi_j phi_i of basis maps are scanned: End(V) is local, so V and W are
    isomorphic iff some such composite is invertible.
    """
    _check_pair(V, W)
    if V.dim != W.dim:
        return IsoResult(False, None, "dimension")
    ctx = V.ctx
    H = hom_space(V, W)
    if not H:
        return IsoResult(False, None, "zero-hom")
    rng = random.Random(f"iso:{seed}")
    for _ in range(ISO_TRIALS):
        T = np.zeros((W.dim, V.dim), dtype=np.int64)
        for M in H:
            c = rng.randrange(ctx.q)
            if c:
                T = ctx.add_a(T, ctx.mul_a(c, M.a))
        Tm = FqMatrix.wrap(ctx, T)
        if is_invertible(Tm):
            if not V.is_hom(W, Tm):
                raise AssertionError("sampled map is not a module map")
            return IsoResult(True, Tm, "sampled")
    Hb = hom_space(W, V)
    for phi in H:
        for psi in Hb:
            if is_invertible(psi @ phi):
                return IsoResult(True, phi, "basis-scan")
    return IsoResult(False, None, "basis-scan")


# -- p-permutation catalogs ---------------------------------------------------------

@dataclass
class CatalogEntry:
    module: ModuleRep
    source: int          # lattice id (or order) of the Q with k[G/Q] containing it
    vertex_hint: int     # order of the smallest such Q
    block: int | None = None


@dataclass
class PPermCatalog:
    group: Group
    p: int
    ctx: FieldCtx
    subgroups: list
    entries: list = field(default_factory=list)
    certificates: list = field(default_factory=list)

    def find(self, S: ModuleRep, seed: int = 0) -> int | None:
        for i, e in enumerate(self.entries):
            if e.module.dim == S.dim and are_isomorphic(S, e.module, seed):
                return i
        return None

    def perm_modules(self) -> list[ModuleRep]:
        return [perm_module(self.group, Q, self.ctx) for Q in self.subgroups]

    def fingerprint(self, i: int) -> tuple[int, ...]:
        S = self.entries[i].module
        return tuple(hom_dim(S, M, "generic") for M in self.perm_modules())

    def manifest(self) -> list[dict]:
        return [{"entry": i, "dim": e.module.dim, "source_order": e.vertex_hint,
                 "hom_fingerprint": list(self.fingerprint(i)), "block": e.block}
                for i, e in enumerate(self.entries)]


def _check_conjugate_pair(G: Group, subgroups, ctx: FieldCtx) -> dict | None:
    """Exhibit k[G/Q] ~ k[G/gQg^-1] for one Q with a distinct conjugate."""
    for Q in subgroups:
        for g in G.generators:
            Qg = G.conjugate_subgroup(Q, g)
            if Qg == Q:
                continue
            V, W = perm_module(G, Q, ctx), perm_module(G, Qg, ctx)
            lcQ, lcW = G.left_cosets(Q), G.left_cosets(Qg)
            # xQ -> x g^{-1} (gQg^{-1})
            T = np.zeros((W.dim, V.dim), dtype=np.int64)
            for i, x in enumerate(lcQ.representatives):
                T[lcW.coset_of[G.mul[x, G.inv[g]]], i] = 1
            Tm = FqMatrix.wrap(ctx, T)
            if not (V.is_hom(W, Tm) and is_invertible(Tm)):
                raise AssertionError("conjugate permutation modules failed the explicit isomorphism")
            return {"Q": Q.members, "g": g}
    return None


def pperm_catalog(G: Group, p: int, ctx: FieldCtx, seed: int = 0) -> PPermCatalog:
    """Indecomposable summands of k[G/Q], Q over p-subgroups up to conjugacy, deduplicated."""
    if ctx.p != p:
        raise ModuleError(f"field characteristic {ctx.p} does not match p={p}")
    subgroups = G.p_subgroup_classes(p)
    cat = PPermCatalog(G, p, ctx, subgroups)
    cert = _check_conjugate_pair(G, subgroups, ctx)
    if cert:
        cat.certificates.append(cert)
    for Q in subgroups:
        dec = decompose(perm_module(G, Q, ctx), seed)
        for S in dec.summands:
            if cat.find(S, seed) is None:
                cat.entries.append(CatalogEntry(S, Q.canonical_id, Q.order))
    return cat


def is_pperm(V: ModuleRep, catalog: PPermCatalog, seed: int = 0) -> bool:
    if V.group is not catalog.group or V.ctx != catalog.ctx:
        raise ModuleError("catalog does not match the module's group or field")
    if V.dim == 0:
        return True
    return all(catalog.find(S, seed) is not None for S in decompose(V, seed).summands)


# -- bimodules --------------------------------------------------------------------

def bimodule_group(H: Group, G: Group) -> Group:
    """H x G; (h, g) acts on a bimodule by x -> h x g^{-1}."""
    return direct_product(H, G)


def regular_bimodule(G: Group, ctx: FieldCtx) -> tuple[Group, ModuleRep]:
    """kG as a (G x G)-module."""
    GG = bimodule_group(G, G)
    n = G.order
    gens = {}
    for e in GG.generators:
        h, g = divmod(e, n)
        M = np.zeros((n, n), dtype=np.int64)
        x = np.arange(n)
        M[G.mul[G.mul[h, x], G.inv[g]], x] = 1
        gens[e] = M
    return GG, ModuleRep(GG, ctx, n, gens, label="kG")


def tensor_over_group(X: ModuleRep, H: Group, G: Group, V: ModuleRep) -> ModuleRep:
    """X (x)_{kG} V as an H-module, for X an (H x G)-module and V a G-module.

    The quotient of X (x) V by the span of x.g (x) v - x (x) g.v over generators g.
    """
    ctx = X.ctx
    nG = G.order
    if V.group is not G or V.ctx != ctx:
        raise ModuleError("V must be a module for G over the bimodule's field")
    n, m = X.dim, V.dim
    Xel = X.element_matrices
    rel_cols = []
    for g in G.generators:
        right = Xel[G.inv[g]]  # x.g = rho_X(1, g^{-1}) x
        rel_cols.append(ctx.sub_a(np.kron(right, np.eye(m, dtype=np.int64)),
                                  np.kron(np.eye(n, dtype=np.int64), V.gens[g])))
    ech = Echelon(ctx, n * m)
    if rel_cols:
        R = column_space_basis(FqMatrix.wrap(ctx, np.concatenate(rel_cols, axis=1)))
        for c in range(R.cols):
            ech.add(R.a[:, c])
    free = [c for c in range(n * m) if c not in set(ech.pivots)]
    gens = {}
    for h in H.generators:
        A = np.kron(Xel[h * nG], np.eye(m, dtype=np.int64))
        cols = A[:, free]
        res = np.stack([ech.reduce(cols[:, j])[0] for j in range(len(free))], axis=1) if free else \
            np.zeros((n * m, 0), dtype=np.int64)
        gens[h] = res[free, :]
    return ModuleRep(H, ctx, len(free), gens, label=f"{X.label}(x){V.label}")


@dataclass
class PermeabilityReport:
    permeable: bool
    checked: list = field(default_factory=list)


def is_permeable_bimodule(X: ModuleRep, H: Group, G: Group, catalog_H: PPermCatalog,
                          seed: int = 0) -> PermeabilityReport:
    """Is X (x)_{kG} k[G/Q] a p-permutation H-module for every p-subgroup Q of G?"""
    if catalog_H.group is not H or catalog_H.ctx != X.ctx:
        raise ModuleError("catalog does not match the left group or the field")
    rep = PermeabilityReport(True)
    for Q in G.p_subgroup_classes(catalog_H.p):
        T = tensor_over_group(X, H, G, perm_module(G, Q, X.ctx))
        ok = is_pperm(T, catalog_H, seed)
        rep.checked.append({"Q_order": Q.order, "dim": T.dim, "pperm": ok})
        if not ok:
            rep.permeable = False
    return rep


def bimodule_from_left(M: ModuleRep, G: Group) -> tuple[Group, ModuleRep]:
    """M (x) kG as an (H x G)-module: (h, g) sends m (x) x to hm (x) x g^{-1}."""
    H, ctx = M.group, M.ctx
    HG = bimodule_group(H, G)
    n = G.order
    x = np.arange(n)
    gens = {}
    for e in HG.generators:
        h, g = divmod(e, n)
        R = np.zeros((n, n), dtype=np.int64)
        R[G.mul[x, G.inv[g]], x] = 1
        gens[e] = np.kron(M.element_matrices[h], R)
    return HG, ModuleRep(HG, ctx, M.dim * n, gens, label=f"{M.label}(x)kG")
