"""Center of F_q G, block idempotents and the center map into the cohomological Mackey algebra."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .exactla import poly as P
from .exactla.field import FieldCtx, field_make, multiplicative_order
from .exactla.linalg import (
    FqMatrix,
    column_space_basis,
    crt_idempotent_polys,
    min_poly,
    nullspace,
    rank,
    solve,
)
from .groups import Group
from .mackey import CoMuAlgebra, CoMuElement, CoMuKey, MackeyBasisKey, comu_multiply, projection_index
from .modrep import ModuleRep


class BlockError(ValueError):
    pass


def default_field_degree(G: Group, p: int) -> int:
    """Order of p modulo the p'-part of the exponent of G."""
    e = G.exponent
    while e % p == 0:
        e //= p
    return multiplicative_order(p, e) if e > 1 else 1


def default_field(G: Group, p: int) -> FieldCtx:
    return field_make(p, default_field_degree(G, p))


# -- the center ---------------------------------------------------------------------

class CenterAlgebra:
    """Z(F_q G) in the class-sum basis with integer structure constants reduced into ctx."""

    def __init__(self, G: Group, ctx: FieldCtx):
        self.G, self.ctx = G, ctx
        self.classes = G.conjugacy_classes()
        self.class_of = G.class_of
        self.r = len(self.classes)
        self.consts = _class_constants(G)
        self.table = ctx.from_ints(self.consts)  # table[i, j, k]: coefficient of C_k in C_i C_j

    @classmethod
    def of(cls, G: Group, ctx: FieldCtx) -> "CenterAlgebra":
        cache = G.__dict__.setdefault("_center_algebras", {})
        key = ctx.serialize()
        if key not in cache:
            cache[key] = cls(G, ctx)
        return cache[key]

    def mul_vec(self, u: np.ndarray, v: np.ndarray) -> np.ndarray:
        ctx = self.ctx
        # sum_{i,j} u_i v_j table[i, j, :]
        uv = ctx.mul_a(u[:, None], v[None, :]).reshape(1, -1)
        return ctx.matmul(uv, self.table.reshape(self.r * self.r, self.r))[0]

    def mult_matrix(self, u: np.ndarray) -> np.ndarray:
        """Matrix of v -> u v (columns are u C_j)."""
        ctx = self.ctx
        # column j = sum_i u_i table[i, j, :]
        return ctx.matmul(u[None, :], self.table.reshape(self.r, -1))[0].reshape(self.r, self.r).T.copy()

    def one(self) -> np.ndarray:
        v = np.zeros(self.r, dtype=np.int64)
        v[int(self.class_of[0])] = 1
        return v

    def power(self, u: np.ndarray, e: int) -> np.ndarray:
        result = self.one()
        while e:
            if e & 1:
                result = self.mul_vec(result, u)
            e >>= 1
            if e:
                u = self.mul_vec(u, u)
        return result

    def frobenius_fixed_dim(self) -> int:
        """dim {z : z^q = z}; equals the number of primitive idempotents."""
        ctx = self.ctx
        F = np.zeros((self.r, self.r), dtype=np.int64)
        for j in range(self.r):
            e = np.zeros(self.r, dtype=np.int64)
            e[j] = 1
            F[:, j] = self.power(e, ctx.q)
        D = ctx.sub_a(F, np.eye(self.r, dtype=np.int64))
        return len(nullspace(FqMatrix.wrap(ctx, D)).a)

    def frobenius_fixed_basis(self) -> np.ndarray:
        ctx = self.ctx
        F = np.zeros((self.r, self.r), dtype=np.int64)
        for j in range(self.r):
            e = np.zeros(self.r, dtype=np.int64)
            e[j] = 1
            F[:, j] = self.power(e, ctx.q)
        return nullspace(FqMatrix.wrap(ctx, ctx.sub_a(F, np.eye(self.r, dtype=np.int64)))).a


def _class_constants(G: Group) -> np.ndarray:
    """a[i, j, k] = #{(x, y) in C_i x C_j : x y = z} for a fixed z in C_k."""
    cache = G.__dict__.get("_class_constants")
    if cache is not None:
        return cache
    classes = G.conjugacy_classes()
    r = len(classes)
    cls_of = G.class_of
    sizes = np.array([len(c) for c in classes])
    a = np.zeros((r, r, r), dtype=np.int64)
    arrs = [np.array(c) for c in classes]
    for i in range(r):
        for j in range(r):
            prods = G.mul[np.ix_(arrs[i], arrs[j])].ravel()
            counts = np.bincount(cls_of[prods], minlength=r)
            a[i, j] = counts // sizes
    G.__dict__["_class_constants"] = a
    return a


@dataclass
class CenterElement:
    group: Group
    ctx: FieldCtx
    coefficients: np.ndarray  # by conjugacy class id

    @property
    def expanded(self) -> np.ndarray:
        """lambda_x for every element x."""
        return self.coefficients[self.group.class_of]

    def __mul__(self, other: "CenterElement") -> "CenterElement":
        return center_multiply(self, other)

    def __add__(self, other: "CenterElement") -> "CenterElement":
        return CenterElement(self.group, self.ctx, self.ctx.add_a(self.coefficients, other.coefficients))

    def __sub__(self, other: "CenterElement") -> "CenterElement":
        return CenterElement(self.group, self.ctx, self.ctx.sub_a(self.coefficients, other.coefficients))

    def __eq__(self, other):
        return (isinstance(other, CenterElement) and other.group is self.group and other.ctx == self.ctx
                and bool(np.array_equal(self.coefficients, other.coefficients)))

    def is_zero(self) -> bool:
        return not self.coefficients.any()

    def format(self) -> str:
        return " + ".join(f"{self.ctx.format(int(c))}*C{i}" for i, c in enumerate(self.coefficients) if c) or "0"


def center_basis(G: Group, ctx: FieldCtx) -> list[CenterElement]:
    r = len(G.conjugacy_classes())
    return [CenterElement(G, ctx, np.eye(r, dtype=np.int64)[i]) for i in range(r)]


def center_one(G: Group, ctx: FieldCtx) -> CenterElement:
    return CenterElement(G, ctx, CenterAlgebra.of(G, ctx).one())


def center_multiply(z1: CenterElement, z2: CenterElement) -> CenterElement:
    if z1.group is not z2.group or z1.ctx != z2.ctx:
        raise BlockError("center elements over different groups or fields")
    Z = CenterAlgebra.of(z1.group, z1.ctx)
    return CenterElement(z1.group, z1.ctx, Z.mul_vec(z1.coefficients, z2.coefficients))


def center_element_from_group_algebra(G: Group, ctx: FieldCtx, lam) -> CenterElement:
    """Center element from lambda values on elements; raises unless constant on classes."""
    lam = np.asarray(lam, dtype=np.int64)
    coeffs = np.zeros(len(G.conjugacy_classes()), dtype=np.int64)
    for i, c in enumerate(G.conjugacy_classes()):
        vals = set(lam[list(c)].tolist())
        if len(vals) != 1:
            raise BlockError("element is not central: coefficients vary on a conjugacy class")
        coeffs[i] = vals.pop()
    return CenterElement(G, ctx, coeffs)


# -- block idempotents --------------------------------------------------------------

@dataclass
class BlockIdempotent:
    element: CenterElement
    index: int
    iota_image: CoMuElement | None = None


def _split(Z: CenterAlgebra, e: np.ndarray, a: np.ndarray, seed: int) -> list[np.ndarray]:
    """Split the idempotent e by the element a e of the algebra Z e."""
    ctx = Z.ctx
    x = Z.mul_vec(a, e)
    Le = FqMatrix.wrap(ctx, Z.mult_matrix(e))
    basis = column_space_basis(Le)  # Z e
    if basis.cols <= 1:
        return [e]
    Lx = FqMatrix.wrap(ctx, Z.mult_matrix(x))
    restricted = solve(basis, Lx @ basis)
    f = min_poly(restricted)
    factors = P.factor_poly(ctx, f, seed=seed)
    if len(factors) <= 1:
        return [e]
    out = []
    for E in crt_idempotent_polys(ctx, f, factors):
        # evaluate E at x inside Z e, whose unit is e
        acc = np.zeros(Z.r, dtype=np.int64)
        for c in reversed(E.tolist()):
            acc = Z.mul_vec(acc, x)
            if c:
                acc = ctx.add_a(acc, ctx.mul_a(c, e))
        out.append(acc)
    return out


def block_idempotents(G: Group, ctx: FieldCtx, seed: int = 0) -> list[BlockIdempotent]:
    """Primitive idempotents of Z(F_q G), split deterministically by class sums.

    The count is checked against dim{z : z^q = z}; if class sums alone leave an
    idempotent unsplit, the Frobenius-fixed subalgebra finishes the job.
    """
    Z = CenterAlgebra.of(G, ctx)
    idems = [Z.one()]
    splitters = [np.eye(Z.r, dtype=np.int64)[i] for i in range(Z.r)]
    target = Z.frobenius_fixed_dim()
    for pool in (splitters, list(Z.frobenius_fixed_basis())):
        changed = True
        while changed and len(idems) < target:
            changed = False
            for a in pool:
                nxt = []
                for e in idems:
                    parts = _split(Z, e, a, seed)
                    changed |= len(parts) > 1
                    nxt.extend(parts)
                idems = nxt
        if len(idems) == target:
            break
    if len(idems) != target:
        raise AssertionError("block splitting did not reach the Frobenius-fixed count")
    # canonical order: by the smallest class with a nonzero coefficient, then coefficients
    idems.sort(key=lambda v: (int(np.flatnonzero(v)[0]), v.tolist()))
    principal = [i for i, v in enumerate(idems) if _augmentation(Z, v)]
    if principal:
        idems.insert(0, idems.pop(principal[0]))
    blocks = [BlockIdempotent(CenterElement(G, ctx, v), i) for i, v in enumerate(idems)]
    verify_blocks(blocks)
    return blocks


def _augmentation(Z: CenterAlgebra, v: np.ndarray) -> int:
    """Image under g -> 1, i.e. the action on the trivial module."""
    sizes = Z.ctx.from_ints(np.array([len(c) for c in Z.classes]))
    return int(Z.ctx.sum_a(Z.ctx.mul_a(v, sizes)))


def verify_blocks(blocks: list[BlockIdempotent]):
    if not blocks:
        raise AssertionError("no blocks")
    G, ctx = blocks[0].element.group, blocks[0].element.ctx
    total = np.zeros_like(blocks[0].element.coefficients)
    for b in blocks:
        e = b.element
        if e.is_zero() or not (e * e == e):
            raise AssertionError("block element is not a nonzero idempotent")
        for c in blocks:
            if c.index != b.index and not (e * c.element).is_zero():
                raise AssertionError("block idempotents are not orthogonal")
        total = ctx.add_a(total, e.coefficients)
    if not np.array_equal(total, CenterAlgebra.of(G, ctx).one()):
        raise AssertionError("block idempotents do not sum to 1")


def block_algebra_dim(b: BlockIdempotent) -> int:
    """dim F_q G b, the rank of right multiplication by b on the group basis."""
    G, ctx = b.element.group, b.element.ctx
    lam = b.element.expanded
    n = G.order
    # column x: x b = sum_y lam_y x y
    M = np.zeros((n, n), dtype=np.int64)
    x = np.arange(n)
    for y in np.flatnonzero(lam):
        rows = G.mul[x, y]
        M[rows, x] = ctx.add_a(M[rows, x], lam[y])
    return rank(FqMatrix.wrap(ctx, M))


def refinement_check(G: Group, p: int, m: int, seed: int = 0) -> dict:
    """Block counts over F_{p^m} and F_{p^{2m}}; a larger count means the first field is too small."""
    a = len(block_idempotents(G, field_make(p, m), seed))
    b = len(block_idempotents(G, field_make(p, 2 * m), seed))
    return {"m": m, "blocks": a, "blocks_doubled": b, "refined": b > a}


# -- the center map ---------------------------------------------------------------

def iota(z: CenterElement) -> CoMuElement:
    """Image of a central element: key (H, H, g) gets sum over h in H of lambda_{gh}."""
    G, ctx = z.group, z.ctx
    lam = z.expanded
    alg = CoMuAlgebra.of(G)
    out = CoMuElement(G, ctx)
    for H in alg.subs:
        hs = H.array
        for g in G.double_cosets(H, H).representatives:
            c = int(ctx.sum_a(lam[G.mul[g, hs]]))
            if c:
                out.add_term(CoMuKey(H.canonical_id, H.canonical_id, g), c)
    return out


def iota_int(G: Group, lam) -> CoMuElement:
    """The same formula with integer coefficients (lam indexed by element)."""
    lam = [int(v) for v in lam]
    alg = CoMuAlgebra.of(G)
    out = CoMuElement(G, None)
    for H in alg.subs:
        for g in G.double_cosets(H, H).representatives:
            out.add_term(CoMuKey(H.canonical_id, H.canonical_id, g),
                         sum(lam[int(G.mul[g, h])] for h in H.members))
    return out


def iota_with_denominators(G: Group, lam) -> dict:
    """sum_H 1/|H| sum_x lam_x proj(t^H_1 x r^H_1) with rational coefficients."""
    alg = CoMuAlgebra.of(G)
    out: dict[CoMuKey, Fraction] = {}
    for H in alg.subs:
        dc = G.double_cosets(H, H)
        for x in range(G.order):
            if not lam[x]:
                continue
            rep = dc.rep_of(x)
            key = MackeyBasisKey(H.canonical_id, H.canonical_id, rep, 0)
            ck = CoMuKey(H.canonical_id, H.canonical_id, rep)
            out[ck] = out.get(ck, Fraction(0)) + Fraction(int(lam[x]) * projection_index(G, key), H.order)
    return {k: v for k, v in out.items() if v}


def generator_elements(G: Group, ctx: FieldCtx | None = None) -> list[CoMuElement]:
    """t^K_H, r^K_H for H maximal in K and c_{s,H} for generators s: they generate the algebra.

    Transfers and restrictions along longer chains are products of these.
    """
    alg = CoMuAlgebra.of(G)
    out = []
    for H in alg.subs:
        for K in alg.subs:
            if H.order < K.order and H <= K and not any(
                    H.order < M.order < K.order and H <= M and M <= K for M in alg.subs):
                out.append(alg.key_element(CoMuKey(K.canonical_id, H.canonical_id, 0), ctx))
                out.append(alg.key_element(CoMuKey(H.canonical_id, K.canonical_id, 0), ctx))
        for s in G.generators:
            sH = G.conjugate_subgroup(H, s)
            x = G.double_cosets(sH, H).rep_of(s)
            out.append(alg.key_element(CoMuKey(sH.canonical_id, H.canonical_id, x), ctx))
    return out


@dataclass
class IotaReport:
    blocks: int
    idempotent: bool
    orthogonal: bool
    sums_to_one: bool
    central: bool | None
    keys: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.idempotent and self.orthogonal and self.sums_to_one and self.central is not False


def verify_iota_blocks(blocks: list[BlockIdempotent], check_central: bool = True) -> IotaReport:
    """iota(b) are orthogonal idempotents summing to 1 in the cohomological Mackey algebra."""
    G, ctx = blocks[0].element.group, blocks[0].element.ctx
    alg = CoMuAlgebra.of(G)
    imgs = []
    for b in blocks:
        if b.iota_image is None:
            b.iota_image = iota(b.element)
        imgs.append(b.iota_image)
    idem = all(comu_multiply(e, e, "matrix") == e for e in imgs)
    orth = all(comu_multiply(imgs[i], imgs[j], "matrix").is_zero()
               for i in range(len(imgs)) for j in range(len(imgs)) if i != j)
    total = CoMuElement(G, ctx)
    for e in imgs:
        total = total + e
    one = total == alg.identity(ctx)
    central = None
    if check_central:
        gens = generator_elements(G, ctx)
        central = all(comu_multiply(e, t, "matrix") == comu_multiply(t, e, "matrix")
                      for e in imgs for t in gens)
    return IotaReport(len(blocks), idem, orth, one, central, [len(e.coefficients) for e in imgs])


def verify_iota_homomorphism(G: Group, ctx: FieldCtx) -> bool:
    """iota(z1 z2) = iota(z1) iota(z2) for all pairs of class sums, and iota(1) = 1."""
    basis = center_basis(G, ctx)
    images = [iota(z) for z in basis]
    if iota(center_one(G, ctx)) != CoMuAlgebra.of(G).identity(ctx):
        return False
    for i, z1 in enumerate(basis):
        for j, z2 in enumerate(basis):
            if iota(z1 * z2) != comu_multiply(images[i], images[j]):
                return False
    return True


# -- modules and blocks -----------------------------------------------------------

def class_sum_matrices(V: ModuleRep) -> np.ndarray:
    ctx = V.ctx
    em = V.element_matrices
    return np.stack([ctx.sum_a(em[list(c)], axis=0) for c in V.group.conjugacy_classes()])


def block_action(V: ModuleRep, b: BlockIdempotent) -> FqMatrix:
    ctx = V.ctx
    S = class_sum_matrices(V)
    acc = np.zeros((V.dim, V.dim), dtype=np.int64)
    for c, M in zip(b.element.coefficients.tolist(), S):
        if c:
            acc = ctx.add_a(acc, ctx.mul_a(c, M))
    return FqMatrix.wrap(ctx, acc)


def block_of_module(V: ModuleRep, blocks: list[BlockIdempotent]) -> int:
    """Index of the unique block acting as the identity on the indecomposable V."""
    if not blocks or blocks[0].element.ctx != V.ctx or blocks[0].element.group is not V.group:
        raise BlockError("blocks and module disagree on group or field")
    S = class_sum_matrices(V)
    found = None
    for b in blocks:
        acc = np.zeros((V.dim, V.dim), dtype=np.int64)
        for c, M in zip(b.element.coefficients.tolist(), S):
            if c:
                acc = V.ctx.add_a(acc, V.ctx.mul_a(c, M))
        A = FqMatrix.wrap(V.ctx, acc)
        if A.is_identity():
            if found is not None:
                raise BlockError("two blocks act as the identity")
            found = b.index
        elif not A.is_zero():
            raise BlockError("a block acts neither as 0 nor as 1: module is decomposable across blocks")
    if found is None:
        raise BlockError("no block acts as the identity")
    return found


def block_report(G: Group, ctx: FieldCtx, seed: int = 0, with_iota: bool = False) -> dict:
    blocks = block_idempotents(G, ctx, seed)
    rows = []
    for b in blocks:
        row = {"index": b.index, "dim": block_algebra_dim(b),
               "lambda_by_class": [ctx.format(int(c)) for c in b.element.coefficients]}
        if with_iota:
            b.iota_image = iota(b.element)
            row["iota_keys"] = len(b.iota_image.coefficients)
        rows.append(row)
    return {"group": G.label, "field": ctx.serialize(), "seed": seed, "blocks": rows}
