"""The extraspecial-by-Q8 example: block census, Gaussian sums and the membership test."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import budget as _budget
from .blocks import block_idempotents, default_field
from .cartan import block_catalog, cartan_block
from .exactla.field import FieldCtx, field_make, is_prime, multiplicative_order
from .exactla.linalg import FqMatrix, in_image
from .groups import xq8

SOURCE_W_CONVENTION = "w^2 = 1"
W_CONVENTION = "w^2 = -1"


class CaseStudyError(ValueError):
    pass


def census_formula(p: int) -> tuple[int, int]:
    """(defect-zero blocks, nilpotent blocks) = ((p^2-1)/8, p)."""
    return (p * p - 1) // 8, p


def block_census(p: int, seed: int = 0, with_cartan: bool = True) -> dict:
    """Compare the computed number of blocks of xq8(p) over its default field against the formula."""
    if not is_prime(p) or p == 2:
        raise CaseStudyError("the census needs an odd prime")
    d0, nil = census_formula(p)
    report = {"p": p, "seed": seed, "formula_defect_zero": d0, "formula_nilpotent": nil,
              "formula_total": d0 + nil}
    try:
        G = xq8(p)
    except _budget.BudgetExceeded as exc:
        report.update(computed=None, status="budget", reason=str(exc))
        return report
    ctx = default_field(G, 2)
    blocks = block_idempotents(G, ctx, seed)
    report.update(order=G.order, field=ctx.serialize(), computed=len(blocks),
                  matches=len(blocks) == d0 + nil, status="computed")
    if with_cartan and G.order > _budget.current().max_lattice_order:
        report.update(cartan="budget")
    elif with_cartan:
        dets, sizes = [], []
        for b in blocks:
            C = cartan_block(G, b, block_catalog(G, 2, b, seed), blocks)
            dets.append(C.det)
            sizes.append(C.size)
        report.update(cartan_sizes=sizes, cartan_dets=dets,
                      defect_zero_like=sum(1 for s, d in zip(sizes, dets) if s == 1 and d == 1))
    return report


# -- Gaussian sums -------------------------------------------------------------------

@dataclass
class GaussData:
    p: int
    ctx: FieldCtx
    zeta: int
    w: int
    b: int
    t_values: list[int]
    t_of_zeta: int
    residues: list[int] = field(default_factory=list)

    @property
    def n(self) -> int:
        return (self.p - 1) // 4


def _smallest_generator(p: int) -> int:
    return next(g for g in range(2, p) if multiplicative_order(g, p) == p - 1)


def primitive_roots_of_unity(ctx: FieldCtx, p: int) -> list[int]:
    """zeta^k for k = 1..p-1, where zeta = g^((q-1)/p)."""
    if (ctx.q - 1) % p:
        raise AssertionError(f"{p} does not divide {ctx.q - 1}")
    z = ctx.pow(ctx.primitive_element(), (ctx.q - 1) // p)
    return [ctx.pow(z, k) for k in range(1, p)]


def gauss_data(p: int, seed: int = 0, zeta_power: int = 1) -> GaussData:
    """Gaussian-sum data at zeta^zeta_power, zeta = g^((2^m-1)/p) in F_{2^m}, m = ord_p(2)."""
    if not is_prime(p) or p % 4 != 1:
        raise CaseStudyError(f"p={p} must be a prime congruent to 1 mod 4")
    if zeta_power % p == 0:
        raise CaseStudyError("zeta_power must be prime to p")
    ctx = field_make(2, multiplicative_order(2, p), seed)
    z0 = ctx.pow(ctx.primitive_element(), (ctx.q - 1) // p)
    zeta = ctx.pow(z0, zeta_power)
    w = next(x for x in range(2, p) if (x * x + 1) % p == 0)
    b = _smallest_generator(p)
    n = (p - 1) // 4
    t = []
    for i in range(n):
        acc = 0
        for k in range(4):
            acc = ctx.add(acc, ctx.pow(zeta, pow(w, k, p) * pow(b, i, p) % p))
        t.append(acc)
    residues = sorted({x * x % p for x in range(1, p)})
    t_z = 0
    for x in residues:
        t_z = ctx.add(t_z, ctx.pow(zeta, x))
    data = GaussData(p, ctx, zeta, w, b, t, t_z, residues)
    check_gauss(data)
    return data


def check_gauss(d: GaussData):
    ctx, p = d.ctx, d.p
    if ctx.pow(d.zeta, p) != 1 or d.zeta == 1:
        raise AssertionError("zeta is not a primitive p-th root of unity")
    if pow(d.w, 2, p) != p - 1 or pow(d.w, 4, p) != 1:
        raise AssertionError("w does not have order 4")
    if multiplicative_order(d.b, p) != p - 1:
        raise AssertionError("b does not generate F_p^x")
    if p % 8 == 1:
        if d.t_of_zeta not in (0, 1):
            raise AssertionError("t(zeta) is not in {0, 1}")
        k = (p - 1) // 8
        for ti in d.t_values:
            if ctx.pow(ti, 2 ** k) != ti:
                raise AssertionError("t_i is not in the expected subfield")


def t_sum_with_nonresidue(d: GaussData) -> int:
    """t(zeta) + t(zeta^c) for the smallest quadratic non-residue c."""
    c = next(x for x in range(2, d.p) if x not in d.residues)
    other = 0
    for x in d.residues:
        other = d.ctx.add(other, d.ctx.pow(d.zeta, x * c % d.p))
    return d.ctx.add(d.t_of_zeta, other)


def build_M(d: GaussData) -> FqMatrix:
    n = d.n
    return FqMatrix.wrap(d.ctx, np.array([[d.t_values[(i + j) % n] for j in range(n)] for i in range(n)],
                                         dtype=np.int64))


def alternating_witness(d: GaussData) -> FqMatrix:
    v = np.array([[1 - (i % 2)] for i in range(d.n)], dtype=np.int64)
    return FqMatrix.wrap(d.ctx, v)


@dataclass
class Verdict:
    member: bool
    witness: list[int] | None
    alternating_witness_works: bool


def membership_test(d: GaussData) -> Verdict:
    """Is the all-ones vector in the image of M - Id?"""
    if d.p % 8 != 1:
        raise CaseStudyError(f"p={d.p} must be congruent to 1 mod 8")
    M = build_M(d)
    A = M - FqMatrix.identity(d.ctx, d.n)
    ones = FqMatrix.wrap(d.ctx, np.ones((d.n, 1), dtype=np.int64))
    res = in_image(A, ones)
    alt = (A @ alternating_witness(d)) == ones
    wit = [int(x) for x in res.witness.a[:, 0]] if res.member else None
    return Verdict(res.member, wit, bool(alt))


def gauss_report(p: int, seed: int = 0) -> dict:
    """Both branches: the first zeta^k with t = 0 and the first with t = 1."""
    branches = {}
    for k in range(1, p):
        d = gauss_data(p, seed, k)
        key = d.ctx.format(d.t_of_zeta)
        if key in branches:
            continue
        v = membership_test(d)
        branches[key] = {
            "zeta_power": k, "zeta": d.ctx.format(d.zeta), "t_of_zeta": key,
            "t_values": [d.ctx.format(x) for x in d.t_values],
            "t_plus_t_nonresidue": d.ctx.format(t_sum_with_nonresidue(d)),
            "member": v.member,
            "witness": None if v.witness is None else [d.ctx.format(x) for x in v.witness],
            "alternating_witness": v.alternating_witness_works,
        }
        if len(branches) == 2:
            break
    d = gauss_data(p, seed)
    return {"p": p, "seed": seed, "field": d.ctx.serialize(), "w": d.w, "b": d.b,
            "source_convention": SOURCE_W_CONVENTION, "implemented_convention": W_CONVENTION,
            "branches": [branches[k] for k in sorted(branches)]}
