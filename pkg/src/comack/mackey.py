"""The Mackey algebra basis, the cohomological Mackey algebra and the Yoshida algebra.

Elements of the cohomological Mackey algebra are stored in the basis of keys
``(H, K, x)`` with x in [H\\G/K], standing for the transitive span
G/H <- G/(H n xKx^{-1}) -> G/K.  Products can be formed two ways:

* ``span``: pull back the underlying spans and project each summand;
* ``yoshida``: compose the linearized endomorphisms of k[Omega_G] and read the
  result back in the basis.

Both are exact; the integer structure constants are field independent and are
reduced into the field only at the end.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple

import numpy as np

from .exactla.field import FieldCtx
from .exactla.linalg import FqMatrix
from .groups import Group
from .gsets import SpanKey, canonical_conjugate, fiber_product, omega, decompose_span, span_from_key


class MackeyError(ValueError):
    pass


class MackeyBasisKey(NamedTuple):
    """t^H_K x r^L_{K^x}: subgroup ids H, L, representative x in [H\\G/L], K <= H n xLx^{-1}."""

    H: int
    L: int
    x: int
    K: int


class CoMuKey(NamedTuple):
    """t^H_{H n xK} x r^K_{K n H^x}."""

    H: int
    K: int
    x: int


def mackey_basis(G: Group) -> list[MackeyBasisKey]:
    subs = G.all_subgroups()
    out = []
    for H in subs:
        for L in subs:
            for x in G.double_cosets(H, L).representatives:
                N = G.intersection(H, G.conjugate_subgroup(L, x))
                seen = set()
                for K in subs:
                    if K.order > N.order or not K <= N:
                        continue
                    c = canonical_conjugate(G, K, N).canonical_id
                    if c not in seen:
                        seen.add(c)
                        out.append(MackeyBasisKey(H.canonical_id, L.canonical_id, x, c))
    return sorted(out)


def comu_basis(G: Group) -> list[CoMuKey]:
    subs = G.all_subgroups()
    return [CoMuKey(H.canonical_id, K.canonical_id, x)
            for H in subs for K in subs for x in G.double_cosets(H, K).representatives]


def mackey_key_span(G: Group, key: MackeyBasisKey):
    """Span G/H <- G/K -> G/L of a Mackey basis key."""
    return span_from_key(G, SpanKey(key.H, key.L, key.x, key.K))


def _diag_subgroup(G: Group, H: int, K: int, x: int):
    subs = G.all_subgroups()
    return G.intersection(subs[H], G.conjugate_subgroup(subs[K], x))


def projection_index(G: Group, key: MackeyBasisKey) -> int:
    """|H n xLx^{-1} : K|, the scalar by which the key survives in the cohomological quotient."""
    return _diag_subgroup(G, key.H, key.L, key.x).order // G.all_subgroups()[key.K].order


def comu_key_span_key(G: Group, key: CoMuKey) -> SpanKey:
    return SpanKey(key.H, key.K, key.x, _diag_subgroup(G, key.H, key.K, key.x).canonical_id)


# -- elements -------------------------------------------------------------------

@dataclass
class CoMuElement:
    """Sparse combination of CoMuKeys; ``ctx=None`` means integer coefficients."""

    group: Group
    ctx: FieldCtx | None
    coefficients: dict = field(default_factory=dict)

    def add_term(self, key: CoMuKey, c):
        if self.ctx is None:
            v = self.coefficients.get(key, 0) + c
        else:
            v = self.ctx.add(self.coefficients.get(key, 0), c)
        if v:
            self.coefficients[key] = v
        else:
            self.coefficients.pop(key, None)

    def _check(self, other: "CoMuElement"):
        if other.group is not self.group:
            raise MackeyError("elements of different groups")
        if other.ctx is not self.ctx:
            raise MackeyError("elements over different fields")

    def __add__(self, other: "CoMuElement") -> "CoMuElement":
        self._check(other)
        out = CoMuElement(self.group, self.ctx, dict(self.coefficients))
        for k, c in other.coefficients.items():
            out.add_term(k, c)
        return out

    def __neg__(self) -> "CoMuElement":
        return self.scale(-1 if self.ctx is None else self.ctx.neg(1))

    def __sub__(self, other: "CoMuElement") -> "CoMuElement":
        return self + (-other)

    def scale(self, c) -> "CoMuElement":
        out = CoMuElement(self.group, self.ctx)
        for k, v in self.coefficients.items():
            out.add_term(k, v * c if self.ctx is None else self.ctx.mul(v, c))
        return out

    def __mul__(self, other: "CoMuElement") -> "CoMuElement":
        return comu_multiply(self, other)

    def __eq__(self, other):
        return (isinstance(other, CoMuElement) and other.group is self.group
                and other.ctx is self.ctx and other.coefficients == self.coefficients)

    def is_zero(self) -> bool:
        return not self.coefficients

    def items(self):
        return sorted(self.coefficients.items())

    def format(self) -> str:
        G = self.group
        lines = []
        for k, c in self.items():
            cs = str(c) if self.ctx is None else self.ctx.format(c)
            lines.append(f"t[{k.H}] x={G.name(k.x)} r[{k.K}] | {cs}")
        return "\n".join(lines)


def reduce_int(ctx: FieldCtx | None, c):
    if ctx is None:
        return c
    if isinstance(c, Fraction):
        if c.denominator % ctx.p == 0:
            raise MackeyError("denominator divisible by the characteristic")
        return ctx.div(ctx.from_ints(np.array([c.numerator]))[0].item(),
                       ctx.from_ints(np.array([c.denominator]))[0].item())
    return int(ctx.from_ints(np.array([int(c)]))[0])


def comu_project(G: Group, key: MackeyBasisKey, ctx: FieldCtx | None = None) -> CoMuElement:
    out = CoMuElement(G, ctx)
    out.add_term(CoMuKey(key.H, key.L, key.x), reduce_int(ctx, projection_index(G, key)))
    return out


# -- the algebra ----------------------------------------------------------------

class CoMuAlgebra:
    """Basis bookkeeping, integer structure constants and Yoshida matrices for one group."""

    def __init__(self, G: Group):
        self.G = G
        self.subs = G.all_subgroups()
        self.omega = omega(G)
        self.basis = comu_basis(G)
        self.index = {k: i for i, k in enumerate(self.basis)}
        self._by_left: dict[int, list[CoMuKey]] = {}
        for k in self.basis:
            self._by_left.setdefault(k.H, []).append(k)
        self._block_cache: dict[CoMuKey, np.ndarray] = {}
        self._sc_yoshida: dict[tuple, tuple] = {}
        self._sc_span: dict[tuple, tuple] = {}
        self._span_cache: dict = {}

    @classmethod
    def of(cls, G: Group) -> "CoMuAlgebra":
        alg = G.__dict__.get("_comu_algebra")
        if alg is None:
            alg = G.__dict__["_comu_algebra"] = cls(G)
        return alg

    @property
    def dim(self) -> int:
        return len(self.basis)

    def keys_from(self, H: int) -> list[CoMuKey]:
        return self._by_left.get(H, [])

    # Yoshida side: key (H,K,x) is the G-map kG/H -> kG/K, gH -> sum over the G-orbit of (H, xK)

    def block(self, key: CoMuKey) -> np.ndarray:
        """Integer |G:K| x |G:H| block of the Yoshida matrix of key."""
        B = self._block_cache.get(key)
        if B is None:
            G = self.G
            H, K = self.subs[key.H], self.subs[key.K]
            cH, cK = G.left_cosets(H).coset_of, G.left_cosets(K).coset_of
            B = np.zeros((len(G.left_cosets(K)), len(G.left_cosets(H))), dtype=np.int64)
            g = np.arange(G.order)
            B[cK[G.mul[g, key.x]], cH[g]] = 1
            self._block_cache[key] = B
        return B

    def yoshida_int(self, key: CoMuKey) -> np.ndarray:
        n = self.omega.size
        M = np.zeros((n, n), dtype=np.int64)
        cH = self.omega.component_for(self.subs[key.H])
        cK = self.omega.component_for(self.subs[key.K])
        M[cK.offset: cK.offset + cK.size, cH.offset: cH.offset + cH.size] = self.block(key)
        return M

    def read_block(self, H: int, K: int, B: np.ndarray) -> list[tuple[CoMuKey, int]]:
        """Coefficients of a G-map kG/H -> kG/K given as an integer block (column of H is 0)."""
        G = self.G
        cK = G.left_cosets(self.subs[K]).coset_of
        out = []
        for x in G.double_cosets(self.subs[H], self.subs[K]).representatives:
            c = int(B[cK[x], 0])
            if c:
                out.append((CoMuKey(H, K, x), c))
        return out

    def block_is_combination(self, H: int, K: int, B: np.ndarray) -> bool:
        R = np.zeros_like(B)
        for k, c in self.read_block(H, K, B):
            R += c * self.block(k)
        return bool(np.array_equal(R, B))

    def product_yoshida(self, a: CoMuKey, b: CoMuKey) -> tuple:
        """Integer structure constants of a x b (= b o a on k[Omega])."""
        if a.K != b.H:
            return ()
        hit = self._sc_yoshida.get((a, b))
        if hit is None:
            col = self.block(b) @ self.block(a)[:, :1]
            hit = self._sc_yoshida[(a, b)] = tuple(self.read_block(a.H, b.K, col))
        return hit

    def span(self, key: CoMuKey):
        sp = self._span_cache.get(key)
        if sp is None:
            sp = self._span_cache[key] = span_from_key(self.G, comu_key_span_key(self.G, key))
        return sp

    def product_span(self, a: CoMuKey, b: CoMuKey) -> tuple:
        """Integer structure constants of a x b through the pullback of spans."""
        if a.K != b.H:
            return ()
        hit = self._sc_span.get((a, b))
        if hit is None:
            G = self.G
            U, V = self.span(a), self.span(b)
            acc: dict[CoMuKey, int] = {}
            for sk, c in decompose_span(fiber_product(U, V)).coefficients.items():
                k = CoMuKey(sk.H, sk.K, sk.x)
                idx = _diag_subgroup(G, sk.H, sk.K, sk.x).order // self.subs[sk.L].order
                acc[k] = acc.get(k, 0) + c * idx
            hit = self._sc_span[(a, b)] = tuple(sorted((k, v) for k, v in acc.items() if v))
        return hit

    def identity(self, ctx: FieldCtx | None = None) -> CoMuElement:
        out = CoMuElement(self.G, ctx)
        for H in self.subs:
            out.add_term(CoMuKey(H.canonical_id, H.canonical_id, 0), 1)
        return out

    def key_element(self, key: CoMuKey, ctx: FieldCtx | None = None, c=1) -> CoMuElement:
        if key not in self.index:
            raise MackeyError(f"not a canonical basis key: {key}")
        out = CoMuElement(self.G, ctx)
        out.add_term(key, c)
        return out

    def yoshida_matrix(self, key: CoMuKey, ctx: FieldCtx) -> FqMatrix:
        return FqMatrix(ctx, ctx.from_ints(self.yoshida_int(key)))

    def element_matrix(self, el: CoMuElement) -> np.ndarray | FqMatrix:
        """Matrix of an element on k[Omega] (integer array in integer mode)."""
        n = self.omega.size
        if el.ctx is None:
            M = np.zeros((n, n), dtype=np.int64)
            for k, c in el.coefficients.items():
                M += c * self.yoshida_int(k)
            return M
        ctx = el.ctx
        M = np.zeros((n, n), dtype=np.int64)
        for k, c in el.coefficients.items():
            cH = self.omega.component_for(self.subs[k.H])
            cK = self.omega.component_for(self.subs[k.K])
            sub = M[cK.offset: cK.offset + cK.size, cH.offset: cH.offset + cH.size]
            sub[...] = ctx.add_a(sub, ctx.mul_a(c, self.block(k)))
        return FqMatrix(ctx, M)

    def from_matrix(self, M, ctx: FieldCtx | None = None) -> CoMuElement:
        """Basis coefficients of a G-endomorphism of k[Omega]; raises if M is not one."""
        arr = M.a if isinstance(M, FqMatrix) else np.asarray(M, dtype=np.int64)
        out = CoMuElement(self.G, ctx)
        comps = self.omega.components
        for cH in comps:
            for cK in comps:
                blk = arr[cK.offset: cK.offset + cK.size, cH.offset: cH.offset + cH.size]
                if not blk.any():
                    continue
                H, K = cH.subgroup.canonical_id, cK.subgroup.canonical_id
                R = np.zeros_like(blk)
                for x in self.G.double_cosets(cH.subgroup, cK.subgroup).representatives:
                    c = int(blk[self.G.left_cosets(cK.subgroup).coset_of[x], 0])
                    if c:
                        key = CoMuKey(H, K, x)
                        out.add_term(key, c)
                        if ctx is None:
                            R += c * self.block(key)
                        else:
                            R = ctx.add_a(R, ctx.mul_a(c, self.block(key)))
                if not np.array_equal(R, blk):
                    raise MackeyError("matrix is not a G-endomorphism of k[Omega]")
        return out


def _blocks_of(alg: CoMuAlgebra, el: CoMuElement) -> dict:
    """Group an element's terms into (H, K) blocks of its Yoshida matrix."""
    ctx = el.ctx
    out: dict[tuple, np.ndarray] = {}
    for k, c in el.coefficients.items():
        B = alg.block(k)
        acc = out.get((k.H, k.K))
        if ctx is None:
            term = c * B
            out[(k.H, k.K)] = term if acc is None else acc + term
        else:
            term = ctx.mul_a(c, B)
            out[(k.H, k.K)] = term if acc is None else ctx.add_a(acc, term)
    return out


def _first_columns(alg: CoMuAlgebra, el: CoMuElement) -> dict:
    """Column of the coset H in each (H, K) block: key (H, K, x) contributes at the cosets hxK."""
    G, ctx = alg.G, el.ctx
    out: dict[tuple, np.ndarray] = {}
    for k, c in el.coefficients.items():
        col = out.get((k.H, k.K))
        if col is None:
            col = out[(k.H, k.K)] = np.zeros((G.order // alg.subs[k.K].order, 1), dtype=np.int64)
        rows = np.unique(G.left_cosets(alg.subs[k.K]).coset_of[G.mul[alg.subs[k.H].array, k.x]])
        col[rows, 0] = col[rows, 0] + c if ctx is None else ctx.add_a(col[rows, 0], c)
    return out


def _cached_blocks(alg: CoMuAlgebra, el: CoMuElement) -> dict:
    snap = el.__dict__.get("_block_cache")
    if snap is not None and snap[0] == el.coefficients:
        return snap[1]
    blocks = _blocks_of(alg, el)
    el.__dict__["_block_cache"] = (dict(el.coefficients), blocks)
    return blocks


def _multiply_blocks(a: CoMuElement, b: CoMuElement) -> CoMuElement:
    alg = CoMuAlgebra.of(a.group)
    ctx = a.ctx
    A, B = _first_columns(alg, a), _cached_blocks(alg, b)
    b_by_left: dict[int, list] = {}
    for (K, L), blk in B.items():
        b_by_left.setdefault(K, []).append((L, blk))
    res: dict[tuple, np.ndarray] = {}
    for (H, K), col in A.items():
        for L, bblk in b_by_left.get(K, ()):
            term = bblk @ col if ctx is None else ctx.matmul(bblk, col)
            acc = res.get((H, L))
            res[(H, L)] = term if acc is None else (acc + term if ctx is None else ctx.add_a(acc, term))
    out = CoMuElement(a.group, ctx)
    for (H, L), col in res.items():
        for k, c in alg.read_block(H, L, col):
            out.add_term(k, c)
    return out


def comu_multiply(a: CoMuElement, b: CoMuElement, method: str = "yoshida") -> CoMuElement:
    """The product a x b (the Yoshida image of b composed after a).

    ``yoshida`` and ``span`` go through cached basis structure constants;
    ``matrix`` composes whole (H, K) blocks, which is faster for dense elements.
    """
    a._check(b)
    if method == "matrix":
        return _multiply_blocks(a, b)
    alg = CoMuAlgebra.of(a.group)
    ctx = a.ctx
    prod = alg.product_yoshida if method == "yoshida" else alg.product_span
    if method not in ("yoshida", "span"):
        raise MackeyError(f"unknown method {method!r}")
    by_left: dict[int, list] = {}
    for k, c in b.coefficients.items():
        by_left.setdefault(k.H, []).append((k, c))
    acc: dict[CoMuKey, int] = {}
    for ka, ca in a.coefficients.items():
        for kb, cb in by_left.get(ka.K, ()):
            cab = ca * cb if ctx is None else ctx.mul(ca, cb)
            for k, s in prod(ka, kb):
                if ctx is None:
                    acc[k] = acc.get(k, 0) + cab * s
                else:
                    acc[k] = ctx.add(acc.get(k, 0), ctx.mul(cab, reduce_int(ctx, s)))
    return CoMuElement(a.group, ctx, {k: v for k, v in acc.items() if v})


# -- verification ---------------------------------------------------------------

@dataclass
class YoshidaReport:
    group: str
    field: str
    basis_size: int
    omega_size: int
    products_checked: int
    mismatches: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.mismatches

    def as_dict(self) -> dict:
        return {"group": self.group, "field": self.field, "basis_size": self.basis_size,
                "omega_size": self.omega_size, "products_checked": self.products_checked,
                "passed": self.passed, "first_mismatch": self.mismatches[0] if self.mismatches else None}


def verify_yoshida(G: Group, ctx: FieldCtx) -> YoshidaReport:
    """Compare the span product with composed Yoshida matrices for every ordered basis pair.

    Non-composable pairs must give zero on both sides; composable pairs are
    compared coefficientwise after reduction into ctx, and the composed block
    is also checked to be exactly the recorded combination of basis blocks.
    """
    alg = CoMuAlgebra.of(G)
    rep = YoshidaReport(G.label, ctx.serialize() if hasattr(ctx, "serialize") else str(ctx),
                        alg.dim, alg.omega.size, 0)
    for a in alg.basis:
        for b in alg.basis:
            rep.products_checked += 1
            if a.K != b.H:
                # the pullback is empty exactly when the shared base components differ
                if fiber_product(alg.span(a), alg.span(b)).mid.size:
                    rep.mismatches.append({"a": tuple(a), "b": tuple(b), "yoshida": [], "span": "nonempty"})
                continue
            ys = alg.product_yoshida(a, b)
            ss = alg.product_span(a, b)
            yf = {k: reduce_int(ctx, c) for k, c in ys}
            sf = {k: reduce_int(ctx, c) for k, c in ss}
            yf = {k: v for k, v in yf.items() if v}
            sf = {k: v for k, v in sf.items() if v}
            full = alg.block(b) @ alg.block(a)
            if yf != sf or not alg.block_is_combination(a.H, b.K, full):
                if len(rep.mismatches) < 10:
                    rep.mismatches.append({"a": tuple(a), "b": tuple(b),
                                           "yoshida": sorted((tuple(k), v) for k, v in yf.items()),
                                           "span": sorted((tuple(k), v) for k, v in sf.items())})
    return rep


def dump_basis(G: Group, keys=None) -> list[str]:
    keys = comu_basis(G) if keys is None else keys
    return [f"t[{k.H}] x={G.name(k.x)} r[{k.K}] | 1" for k in keys]
