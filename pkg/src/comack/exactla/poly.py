"""Univariate polynomials over a FieldCtx.

A polynomial is a 1-d int64 array of encoded coefficients, lowest degree
first, with no trailing zeros (the zero polynomial is the empty array).
"""

from __future__ import annotations

import random

import numpy as np

from .field import FieldCtx


def poly(ctx: FieldCtx, coeffs) -> np.ndarray:
    return trim(np.asarray(list(coeffs), dtype=np.int64))


def trim(f: np.ndarray) -> np.ndarray:
    nz = np.flatnonzero(f)
    return f[: nz[-1] + 1] if nz.size else f[:0]


def degree(f: np.ndarray) -> int:
    return len(f) - 1


def is_zero(f) -> bool:
    return len(f) == 0


def one(ctx) -> np.ndarray:
    return np.array([1], dtype=np.int64)


def x_poly(ctx) -> np.ndarray:
    return np.array([0, 1], dtype=np.int64)


def add(ctx, f, g):
    n = max(len(f), len(g))
    a = np.zeros(n, dtype=np.int64)
    b = np.zeros(n, dtype=np.int64)
    a[: len(f)] = f
    b[: len(g)] = g
    return trim(ctx.add_a(a, b))


def sub(ctx, f, g):
    n = max(len(f), len(g))
    a = np.zeros(n, dtype=np.int64)
    b = np.zeros(n, dtype=np.int64)
    a[: len(f)] = f
    b[: len(g)] = g
    return trim(ctx.sub_a(a, b))


def scale(ctx, c: int, f):
    return trim(ctx.mul_a(c, f))


def mul(ctx, f, g):
    if not len(f) or not len(g):
        return np.zeros(0, dtype=np.int64)
    if ctx.m == 1:
        return trim(np.convolve(f, g) % ctx.p)
    m = ctx.m
    fd = ctx.digits[f].T
    gd = ctx.digits[g].T
    prod = np.zeros((2 * m - 1, len(f) + len(g) - 1), dtype=np.int64)
    for i in range(m):
        if not fd[i].any():
            continue
        for j in range(m):
            if gd[j].any():
                prod[i + j] += np.convolve(fd[i], gd[j])
    prod %= ctx.p
    cd = (ctx.reduction.T @ prod) % ctx.p
    return trim(ctx.encode_digits(cd.T))


def divmod_(ctx, f, g):
    if not len(g):
        raise ZeroDivisionError("polynomial division by zero")
    dg = len(g) - 1
    r = np.array(f, dtype=np.int64)
    if len(r) <= dg:
        return np.zeros(0, dtype=np.int64), trim(r)
    inv = ctx.inv(int(g[-1]))
    qt = np.zeros(len(r) - dg, dtype=np.int64)
    for k in range(len(r) - 1, dg - 1, -1):
        c = int(r[k])
        if not c:
            continue
        c = ctx.mul(c, inv)
        qt[k - dg] = c
        r[k - dg : k + 1] = ctx.sub_a(r[k - dg : k + 1], ctx.mul_a(c, g))
    return trim(qt), trim(r[:dg])


def mod(ctx, f, g):
    return divmod_(ctx, f, g)[1]


def monic(ctx, f):
    if not len(f):
        return f
    return scale(ctx, ctx.inv(int(f[-1])), f)


def gcd(ctx, f, g):
    """Monic gcd."""
    f, g = trim(np.array(f, dtype=np.int64)), trim(np.array(g, dtype=np.int64))
    while len(g):
        f, g = g, mod(ctx, f, g)
    return monic(ctx, f)


def xgcd(ctx, f, g):
    """Return (d, s, t) with s f + t g = d monic."""
    r0, r1 = trim(np.array(f, dtype=np.int64)), trim(np.array(g, dtype=np.int64))
    s0, s1 = one(ctx), np.zeros(0, dtype=np.int64)
    t0, t1 = np.zeros(0, dtype=np.int64), one(ctx)
    while len(r1):
        qt, r = divmod_(ctx, r0, r1)
        r0, r1 = r1, r
        s0, s1 = s1, sub(ctx, s0, mul(ctx, qt, s1))
        t0, t1 = t1, sub(ctx, t0, mul(ctx, qt, t1))
    if not len(r0):
        return r0, s0, t0
    c = ctx.inv(int(r0[-1]))
    return scale(ctx, c, r0), scale(ctx, c, s0), scale(ctx, c, t0)


def lcm(ctx, f, g):
    if not len(f) or not len(g):
        return np.zeros(0, dtype=np.int64)
    return monic(ctx, divmod_(ctx, mul(ctx, f, g), gcd(ctx, f, g))[0])


def mulmod(ctx, f, g, h):
    return mod(ctx, mul(ctx, f, g), h)


def powmod(ctx, f, e: int, h):
    result = mod(ctx, one(ctx), h)
    base = mod(ctx, f, h)
    while e:
        if e & 1:
            result = mulmod(ctx, result, base, h)
        e >>= 1
        if e:
            base = mulmod(ctx, base, base, h)
    return result


def power(ctx, f, e: int):
    result = one(ctx)
    while e:
        if e & 1:
            result = mul(ctx, result, f)
        e >>= 1
        if e:
            f = mul(ctx, f, f)
    return result


def derivative(ctx, f):
    if len(f) <= 1:
        return np.zeros(0, dtype=np.int64)
    k = ctx.from_ints(np.arange(1, len(f)))
    return trim(ctx.mul_a(k, f[1:]))


def evaluate(ctx, f, a: int) -> int:
    acc = 0
    for c in reversed(f.tolist()):
        acc = ctx.add(ctx.mul(acc, a), c)
    return acc


def compose_pth_root(ctx, f):
    """g with g(x)^p == f(x), for f with zero derivative."""
    p = ctx.p
    coeffs = f[::p]
    # a^{1/p} = a^{q/p}
    return trim(ctx.pow_a(coeffs, ctx.q // p))


def format_poly(ctx, f, var: str = "x") -> str:
    if not len(f):
        return "0"
    terms = []
    for i in range(len(f) - 1, -1, -1):
        c = int(f[i])
        if not c:
            continue
        cs = ctx.format(c)
        if "+" in cs:
            cs = f"({cs})"
        mono = "" if i == 0 else (var if i == 1 else f"{var}^{i}")
        if not mono:
            terms.append(cs)
        elif c == 1:
            terms.append(mono)
        else:
            terms.append(f"{cs}*{mono}")
    return " + ".join(terms)


# -- factorization ------------------------------------------------------------

def squarefree_decomposition(ctx, f):
    """Return [(g, k)] with f = lc * prod g^k and each g squarefree, pairwise coprime."""
    f = monic(ctx, f)
    out = []
    _sqf(ctx, f, 1, out)
    merged: dict[tuple, int] = {}
    for g, k in out:
        if len(g) > 1:
            key = tuple(g.tolist())
            merged[key] = merged.get(key, 0) + k
    return [(np.array(k_, dtype=np.int64), m) for k_, m in merged.items()]


def _sqf(ctx, f, mult, out):
    if len(f) <= 1:
        return
    df = derivative(ctx, f)
    if not len(df):
        _sqf(ctx, compose_pth_root(ctx, f), mult * ctx.p, out)
        return
    c = gcd(ctx, f, df)
    w = divmod_(ctx, f, c)[0]
    i = 1
    while len(w) > 1:
        y = gcd(ctx, w, c)
        z = divmod_(ctx, w, y)[0]
        if len(z) > 1:
            out.append((monic(ctx, z), i * mult))
        i += 1
        w = y
        c = divmod_(ctx, c, y)[0]
    if len(c) > 1:
        _sqf(ctx, compose_pth_root(ctx, c), mult * ctx.p, out)


def _frobenius_matrix(ctx, f):
    """Matrix of h -> h^q on F_q[x]/(f) in the monomial basis (columns)."""
    n = len(f) - 1
    xq = powmod(ctx, x_poly(ctx), ctx.q, f)
    cols = np.zeros((n, n), dtype=np.int64)
    cur = one(ctx)
    for i in range(n):
        cols[: len(cur), i] = cur
        cur = mulmod(ctx, cur, xq, f)
    return cols


def distinct_degree(ctx, f):
    """f monic squarefree -> [(g_d, d)] with g_d the product of degree-d factors."""
    out = []
    n = len(f) - 1
    if n <= 0:
        return out
    if n == 1:
        return [(f, 1)]
    frob = _frobenius_matrix(ctx, f)
    # h = x^{q^d} mod f, advanced by the (F_q-linear) Frobenius; rest | f so
    # gcds against rest stay valid
    h = np.zeros(n, dtype=np.int64)
    h[1] = 1
    rest = f
    d = 0
    x = x_poly(ctx)
    while 2 * (d + 1) <= len(rest) - 1:
        d += 1
        h = ctx.matmul(frob, h)
        g = gcd(ctx, rest, sub(ctx, trim(h.copy()), x))
        if len(g) > 1:
            out.append((g, d))
            rest = divmod_(ctx, rest, g)[0]
    if len(rest) > 1:
        out.append((rest, len(rest) - 1))
    return out


def _trace_poly(ctx, h, f, d):
    """sum_{i < m d} h^{2^i} mod f, for characteristic 2."""
    acc = mod(ctx, h, f)
    cur = acc
    for _ in range(ctx.m * d - 1):
        cur = mulmod(ctx, cur, cur, f)
        acc = add(ctx, acc, cur)
    return acc


def equal_degree(ctx, f, d: int, rng: random.Random):
    """Split f (monic, squarefree, all factors of degree d) into irreducibles."""
    n = len(f) - 1
    if n == d:
        return [f]
    while True:
        h = trim(np.array([rng.randrange(ctx.q) for _ in range(n)], dtype=np.int64))
        if len(h) <= 1:
            continue
        if ctx.p == 2:
            t = _trace_poly(ctx, h, f, d)
        else:
            t = sub(ctx, powmod(ctx, h, (ctx.q ** d - 1) // 2, f), one(ctx))
        g = gcd(ctx, f, t)
        if 1 < len(g) < len(f):
            return equal_degree(ctx, g, d, rng) + equal_degree(ctx, divmod_(ctx, f, g)[0], d, rng)


def is_irreducible(ctx, f) -> bool:
    f = trim(np.asarray(f, dtype=np.int64))
    if len(f) <= 1:
        return False
    if len(f) == 2:
        return True
    f = monic(ctx, f)
    if len(gcd(ctx, f, derivative(ctx, f))) > 1:
        return False
    dd = distinct_degree(ctx, f)
    return len(dd) == 1 and dd[0][1] == len(f) - 1


def factor_poly(ctx, f, seed: int = 0):
    """Irreducible monic factors of f with multiplicities, sorted canonically.

    The leading coefficient is dropped; the product of the factors is monic(f).
    """
    f = trim(np.asarray(f, dtype=np.int64))
    if len(f) <= 1:
        raise ValueError("cannot factor a constant polynomial")
    rng = random.Random(f"factor:{seed}")
    found: dict[tuple, int] = {}
    for g, k in squarefree_decomposition(ctx, f):
        for gd, d in distinct_degree(ctx, g):
            for h in equal_degree(ctx, gd, d, rng):
                key = tuple(monic(ctx, h).tolist())
                found[key] = found.get(key, 0) + k
    return sorted(((np.array(k_, dtype=np.int64), e) for k_, e in found.items()),
                  key=lambda t: (len(t[0]), t[0].tolist()))
