"""Dense matrices over F_q: row reduction, solving, kernels, minimal polynomials."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np

from . import poly as P
from .field import FieldCtx


class FqMatrix:
    """A rows x cols matrix over ``ctx`` backed by an int64 array of encoded entries."""

    __slots__ = ("ctx", "a")

    def __init__(self, ctx: FieldCtx, entries):
        a = np.array(entries, dtype=np.int64)
        if a.ndim == 1:
            a = a.reshape(1, -1) if a.size else a.reshape(0, 0)
        if a.ndim != 2:
            raise ValueError("FqMatrix needs a 2-d array")
        if a.size and (a.min() < 0 or a.max() >= ctx.q):
            raise ValueError("entries out of range for the field")
        self.ctx = ctx
        self.a = a

    @classmethod
    def wrap(cls, ctx, a):
        obj = cls.__new__(cls)
        obj.ctx = ctx
        obj.a = a
        return obj

    @classmethod
    def zeros(cls, ctx, rows, cols):
        return cls.wrap(ctx, np.zeros((rows, cols), dtype=np.int64))

    @classmethod
    def identity(cls, ctx, n):
        return cls.wrap(ctx, np.eye(n, dtype=np.int64))

    @classmethod
    def from_ints(cls, ctx, entries):
        return cls.wrap(ctx, ctx.from_ints(np.atleast_2d(np.asarray(entries, dtype=np.int64))))

    @property
    def rows(self):
        return self.a.shape[0]

    @property
    def cols(self):
        return self.a.shape[1]

    @property
    def shape(self):
        return self.a.shape

    def _check(self, other):
        if not isinstance(other, FqMatrix):
            raise TypeError("expected an FqMatrix")
        if other.ctx != self.ctx:
            raise ValueError("field mismatch")

    def __matmul__(self, other):
        self._check(other)
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        return FqMatrix.wrap(self.ctx, self.ctx.matmul(self.a, other.a))

    def __add__(self, other):
        self._check(other)
        if self.shape != other.shape:
            raise ValueError("shape mismatch")
        return FqMatrix.wrap(self.ctx, self.ctx.add_a(self.a, other.a))

    def __sub__(self, other):
        self._check(other)
        if self.shape != other.shape:
            raise ValueError("shape mismatch")
        return FqMatrix.wrap(self.ctx, self.ctx.sub_a(self.a, other.a))

    def __neg__(self):
        return FqMatrix.wrap(self.ctx, self.ctx.neg_a(self.a))

    def scale(self, c: int):
        return FqMatrix.wrap(self.ctx, self.ctx.mul_a(c, self.a))

    def __eq__(self, other):
        return isinstance(other, FqMatrix) and self.ctx == other.ctx and self.shape == other.shape \
            and bool((self.a == other.a).all())

    __hash__ = None

    @property
    def T(self):
        return FqMatrix.wrap(self.ctx, self.a.T.copy())

    def is_zero(self) -> bool:
        return not self.a.any()

    def is_identity(self) -> bool:
        return self.rows == self.cols and bool((self.a == np.eye(self.rows, dtype=np.int64)).all())

    def copy(self):
        return FqMatrix.wrap(self.ctx, self.a.copy())

    def __repr__(self):
        return f"FqMatrix({self.ctx.serialize()}, {self.a.tolist()})"

    def format(self) -> str:
        return "\n".join(" ".join(self.ctx.format(int(x)) for x in row) for row in self.a)


# -- row reduction --------------------------------------------------------------

def _rref_array(ctx, a, max_col=None):
    """In-place reduced row echelon form; returns pivot columns."""
    rows, cols = a.shape
    max_col = cols if max_col is None else max_col
    pivots = []
    r = 0
    for c in range(max_col):
        if r == rows:
            break
        nz = np.flatnonzero(a[r:, c])
        if not nz.size:
            continue
        k = r + nz[0]
        if k != r:
            a[[r, k]] = a[[k, r]]
        lead = int(a[r, c])
        if lead != 1:
            a[r] = ctx.mul_a(ctx.inv(lead), a[r])
        others = np.flatnonzero(a[:, c])
        others = others[others != r]
        if others.size:
            a[others] = ctx.sub_a(a[others], ctx.mul_a(a[others, c][:, None], a[r][None, :]))
        pivots.append(c)
        r += 1
    return pivots


def rref(m: FqMatrix):
    """Return (R, pivots, rank) with R the reduced row echelon form of m."""
    a = m.a.copy()
    pivots = _rref_array(m.ctx, a)
    return FqMatrix.wrap(m.ctx, a), pivots, len(pivots)


def rank(m: FqMatrix) -> int:
    return rref(m)[2]


def nullspace(m: FqMatrix) -> FqMatrix:
    """Rows form a basis of {x : m x = 0}."""
    ctx = m.ctx
    r, pivots, k = rref(m)
    n = m.cols
    free = [c for c in range(n) if c not in set(pivots)]
    out = np.zeros((len(free), n), dtype=np.int64)
    for i, fcol in enumerate(free):
        out[i, fcol] = 1
        if k:
            out[i, pivots] = ctx.neg_a(r.a[:k, fcol])
    return FqMatrix.wrap(ctx, out)


def left_nullspace(m: FqMatrix) -> FqMatrix:
    return nullspace(m.T)


def solve(a: FqMatrix, b: FqMatrix):
    """A solution x of a x = b (b a column or matrix), or None."""
    a._check(b)
    if a.rows != b.rows:
        raise ValueError("shape mismatch in solve")
    ctx = a.ctx
    aug = np.concatenate([a.a, b.a], axis=1)
    pivots = _rref_array(ctx, aug, max_col=a.cols)
    k = len(pivots)
    if aug[k:, a.cols:].any():
        return None
    x = np.zeros((a.cols, b.cols), dtype=np.int64)
    if k:
        x[pivots] = aug[:k, a.cols:]
    return FqMatrix.wrap(ctx, x)


@dataclass
class ImageTest:
    member: bool
    witness: FqMatrix | None = None

    def __bool__(self):
        return self.member


def in_image(a: FqMatrix, b: FqMatrix) -> ImageTest:
    """Is b (a column) in the column space of a?  The witness satisfies a w = b."""
    x = solve(a, b)
    if x is None:
        return ImageTest(False)
    if not (a @ x == b):
        raise AssertionError("solve returned a non-solution")
    return ImageTest(True, x)


def inverse(m: FqMatrix) -> FqMatrix:
    if m.rows != m.cols:
        raise ValueError("inverse of a non-square matrix")
    x = solve(m, FqMatrix.identity(m.ctx, m.rows))
    if x is None:
        raise ZeroDivisionError("matrix is singular")
    return x


def is_invertible(m: FqMatrix) -> bool:
    return m.rows == m.cols and rank(m) == m.rows


def column_space_basis(m: FqMatrix) -> FqMatrix:
    """Columns of the result are a basis of the column space of m."""
    r, pivots, _ = rref(m.T)
    return FqMatrix.wrap(m.ctx, r.a[: len(pivots)].T.copy())


# -- incremental echelon form -----------------------------------------------------

class Echelon:
    """A growing subspace of F_q^n kept in reduced row echelon form.

    With ``track=True`` each row also records its expression in terms of the
    vectors passed to :meth:`add`, in insertion order.
    """

    def __init__(self, ctx: FieldCtx, n: int, track: bool = False):
        self.ctx = ctx
        self.n = n
        self.rows = np.zeros((0, n), dtype=np.int64)
        self.pivots: list[int] = []
        self.track = track
        self.comb = np.zeros((0, 0), dtype=np.int64)
        self.count = 0

    @property
    def dim(self):
        return len(self.pivots)

    def reduce(self, v):
        """Return (residual, coefficients c) with v = residual + c @ rows."""
        v = np.asarray(v, dtype=np.int64)
        if not self.pivots:
            return v.copy(), np.zeros(0, dtype=np.int64)
        c = v[..., self.pivots]
        return self.ctx.sub_a(v, self.ctx.matmul(c, self.rows)), c

    def contains(self, v) -> bool:
        return not self.reduce(v)[0].any()

    def express(self, v):
        """Coefficients of v in terms of the added vectors, or None if v is outside."""
        res, c = self.reduce(v)
        if res.any():
            return None
        if not self.track:
            raise ValueError("express() needs track=True")
        if not len(c):
            return np.zeros(self.count, dtype=np.int64)
        return self.ctx.matmul(c, self.comb)

    def add(self, v) -> bool:
        """Insert v; returns False if v was already in the span."""
        ctx = self.ctx
        res, c = self.reduce(v)
        if self.track:
            # res = v - c @ rows = v - (c @ comb) @ added
            self.comb = np.concatenate([self.comb, np.zeros((self.comb.shape[0], 1), dtype=np.int64)], axis=1)
            new_comb = np.zeros(self.count + 1, dtype=np.int64)
            new_comb[self.count] = 1
            if len(c):
                new_comb[: self.count] = ctx.neg_a(ctx.matmul(c, self.comb[:, : self.count]))
        self.count += 1
        nz = np.flatnonzero(res)
        if not nz.size:
            if self.track:
                self.count -= 1
                self.comb = self.comb[:, : self.count]
            return False
        piv = int(nz[0])
        inv = ctx.inv(int(res[piv]))
        res = ctx.mul_a(inv, res)
        if self.track:
            new_comb = ctx.mul_a(inv, new_comb)
        col = self.rows[:, piv].copy()
        hit = np.flatnonzero(col)
        if hit.size:
            self.rows[hit] = ctx.sub_a(self.rows[hit], ctx.mul_a(col[hit][:, None], res[None, :]))
            if self.track:
                self.comb[hit] = ctx.sub_a(self.comb[hit], ctx.mul_a(col[hit][:, None], new_comb[None, :]))
        order = int(np.searchsorted(self.pivots, piv))
        self.pivots.insert(order, piv)
        self.rows = np.insert(self.rows, order, res, axis=0)
        if self.track:
            self.comb = np.insert(self.comb, order, new_comb, axis=0)
        return True


# -- minimal polynomials ------------------------------------------------------------

def local_min_poly(ctx, a, v):
    """Monic generator of {f : f(a) v = 0} and the Krylov vectors v, av, ..."""
    n = a.shape[0]
    ech = Echelon(ctx, n, track=True)
    krylov = []
    cur = np.asarray(v, dtype=np.int64)
    while True:
        coeffs = ech.express(cur) if ech.dim else (None if cur.any() else np.zeros(0, dtype=np.int64))
        if coeffs is not None:
            k = len(krylov)
            f = np.zeros(k + 1, dtype=np.int64)
            f[:k] = ctx.neg_a(coeffs) if k else f[:k]
            f[k] = 1
            return P.trim(f), krylov
        ech.add(cur)
        krylov.append(cur)
        cur = ctx.matmul(a, cur)


def min_poly(m: FqMatrix):
    """Exact minimal polynomial: lcm of local minimal polynomials over a Krylov cover."""
    if m.rows != m.cols:
        raise ValueError("min_poly needs a square matrix")
    ctx, a, n = m.ctx, m.a, m.rows
    if n == 0:
        return P.one(ctx)
    span = Echelon(ctx, n)
    result = P.one(ctx)
    for j in range(n):
        e = np.zeros(n, dtype=np.int64)
        e[j] = 1
        if span.contains(e):
            continue
        f, kr = local_min_poly(ctx, a, e)
        result = P.lcm(ctx, result, f)
        for v in kr:
            span.add(v)
        if span.dim == n:
            break
    return result


def poly_eval_matrix(ctx, f, m: FqMatrix) -> FqMatrix:
    """f(m) by Horner's rule."""
    n = m.rows
    acc = np.zeros((n, n), dtype=np.int64)
    eye = np.eye(n, dtype=np.int64)
    for c in reversed(f.tolist()):
        acc = ctx.matmul(acc, m.a)
        if c:
            acc = ctx.add_a(acc, ctx.mul_a(c, eye))
    return FqMatrix.wrap(ctx, acc)


def crt_idempotent_polys(ctx, f, factors):
    """For f = prod g_i^{k_i}, polynomials E_i with E_i = 1 mod g_i^{k_i}, 0 mod the rest."""
    parts = [P.power(ctx, g, k) for g, k in factors]
    out = []
    for i, part in enumerate(parts):
        cof = P.divmod_(ctx, P.monic(ctx, f), part)[0]
        d, s, t = P.xgcd(ctx, cof, part)
        if len(d) != 1:
            raise AssertionError("primary components are not coprime")
        out.append(P.mod(ctx, P.mul(ctx, s, cof), P.monic(ctx, f)))
    return out


# -- csv ------------------------------------------------------------------------

def to_csv(m: FqMatrix) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    for row in m.a:
        w.writerow([m.ctx.format(int(x)) for x in row])
    return buf.getvalue()


def from_csv(ctx, text: str) -> FqMatrix:
    rows = [[ctx.parse(c) for c in row] for row in csv.reader(io.StringIO(text)) if row]
    return FqMatrix(ctx, rows)
