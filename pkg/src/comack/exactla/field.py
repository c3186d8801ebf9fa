"""Finite fields F_{p^m} with integer-encoded elements.

An element a_0 + a_1 t + ... + a_{m-1} t^{m-1} of F_p[t]/(modulus) is stored as
the integer a_0 + a_1 p + ... + a_{m-1} p^{m-1}.  Prime-field elements are
therefore the integers 0..p-1 and integer constants embed as ``n % p``.

Multiplication goes through discrete log tables built from a primitive
element; addition is XOR in characteristic 2, plain modular arithmetic for
prime fields and digit-wise otherwise.  Every array operation accepts numpy
integer arrays and broadcasts.
"""

from __future__ import annotations

import functools
import random
import re

import numpy as np

MAX_FIELD_SIZE = 1 << 16


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def prime_factors(n: int) -> list[int]:
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def multiplicative_order(a: int, n: int) -> int:
    """Order of a in (Z/n)^x; n must be coprime to a."""
    if n == 1:
        return 1
    if np.gcd(a, n) != 1:
        raise ValueError(f"{a} is not a unit mod {n}")
    k, x = 1, a % n
    while x != 1:
        x = x * a % n
        k += 1
    return k


# -- small polynomial helpers over F_p (python int lists, low degree first) --

def _ptrim(f):
    while f and f[-1] == 0:
        f.pop()
    return f


def _pmod(a, f, p):
    a = list(a)
    inv = pow(f[-1], p - 2, p)
    df = len(f) - 1
    for k in range(len(a) - 1, df - 1, -1):
        c = a[k] * inv % p
        if c:
            for i in range(df + 1):
                a[k - df + i] = (a[k - df + i] - c * f[i]) % p
    return _ptrim(a[:df] if len(a) > df else a)


def _pmulmod(a, b, f, p):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % p
    return _pmod(out, f, p)


def _ppowmod(a, e, f, p):
    result = [1]
    base = _pmod(a, f, p)
    while e:
        if e & 1:
            result = _pmulmod(result, base, f, p)
        base = _pmulmod(base, base, f, p)
        e >>= 1
    return result


def _pgcd(a, b, p):
    a, b = _ptrim(list(a)), _ptrim(list(b))
    while b:
        a, b = b, _pmod(a, b, p)
    return a


def _psub(a, b, p):
    n = max(len(a), len(b))
    a = list(a) + [0] * (n - len(a))
    b = list(b) + [0] * (n - len(b))
    return _ptrim([(x - y) % p for x, y in zip(a, b)])


def is_irreducible_fp(f, p: int) -> bool:
    """Rabin's test for a polynomial over F_p given low degree first."""
    f = _ptrim(list(f))
    m = len(f) - 1
    if m < 1:
        return False
    if m == 1:
        return True
    x = [0, 1]
    # x^{p^m} == x mod f
    h = x
    for _ in range(m):
        h = _ppowmod(h, p, f, p)
    if _psub(h, x, p):
        return False
    for r in prime_factors(m):
        h = x
        for _ in range(m // r):
            h = _ppowmod(h, p, f, p)
        g = _pgcd(f, _psub(h, x, p), p)
        if len(g) > 1:
            return False
    return True


class FieldCtx:
    """The field F_{p^m} = F_p[t]/(modulus)."""

    def __init__(self, p: int, m: int, modulus):
        if not is_prime(p):
            raise ValueError(f"p={p} is not prime")
        if m < 1:
            raise ValueError("extension degree must be >= 1")
        modulus = tuple(int(c) % p for c in modulus)
        if len(modulus) != m + 1 or modulus[-1] != 1:
            raise ValueError("modulus must be monic of degree m")
        if m > 1 and not is_irreducible_fp(modulus, p):
            raise ValueError(f"modulus {modulus} is reducible over F_{p}")
        self.p = p
        self.m = m
        self.q = p ** m
        if self.q > MAX_FIELD_SIZE:
            raise ValueError(f"field of size {self.q} exceeds table limit")
        self.modulus = modulus
        self._build_tables()

    # -- construction ------------------------------------------------------

    def _slow_mul(self, a: int, b: int) -> int:
        da, db = self._decode(a), self._decode(b)
        prod = _pmulmod(da, db, list(self.modulus), self.p) if self.m > 1 else [da[0] * db[0] % self.p]
        return self._encode(prod)

    def _decode(self, a: int) -> list[int]:
        out = []
        for _ in range(self.m):
            out.append(a % self.p)
            a //= self.p
        return out

    def _encode(self, coeffs) -> int:
        v = 0
        for c in reversed(list(coeffs)[: self.m]):
            v = v * self.p + int(c)
        return v

    def _build_tables(self):
        p, m, q = self.p, self.m, self.q
        self.pw = p ** np.arange(m, dtype=np.int64)
        self.digits = np.array([self._decode(a) for a in range(q)], dtype=np.int64).reshape(q, m)
        # smallest primitive element
        factors = prime_factors(q - 1)
        gen = None
        for g in range(1, q):
            ok = True
            for r in factors:
                if self._slow_pow(g, (q - 1) // r) == 1:
                    ok = False
                    break
            if ok:
                gen = g
                break
        if gen is None:  # q == 2
            gen = 1
        self.gen = gen
        exp = [1]
        for _ in range(q - 2):
            exp.append(self._slow_mul(exp[-1], gen))
        log = [0] * q
        for k, e in enumerate(exp):
            log[e] = k
        self._exp_list = exp + exp
        self._log_list = log
        self.exp_table = np.array(self._exp_list, dtype=np.int64)
        self.log_table = np.array(log, dtype=np.int64)
        # coefficient vectors of t^s mod modulus for s < 2m-1
        red = np.zeros((max(2 * m - 1, 1), m), dtype=np.int64)
        for s in range(2 * m - 1):
            v = [0] * s + [1]
            r = _pmod(v, list(self.modulus), p) if m > 1 else [1]
            red[s, : len(r)] = r
        self.reduction = red
        if p != 2 and m > 1 and q <= 2048:
            a = np.arange(q)
            self._add_table = self.encode_digits((self.digits[a][:, None, :] + self.digits[a][None, :, :]) % p)
        else:
            self._add_table = None

    def _slow_pow(self, a: int, e: int) -> int:
        r = 1
        while e:
            if e & 1:
                r = self._slow_mul(r, a)
            a = self._slow_mul(a, a)
            e >>= 1
        return r

    # -- identity ------------------------------------------------------------

    def __eq__(self, other):
        return isinstance(other, FieldCtx) and (self.p, self.m, self.modulus) == (other.p, other.m, other.modulus)

    def __hash__(self):
        return hash((self.p, self.m, self.modulus))

    def __repr__(self):
        return f"FieldCtx({self.serialize()})"

    def serialize(self) -> str:
        return f"{self.p}^{self.m}/" + ",".join(map(str, self.modulus))

    @classmethod
    def deserialize(cls, text: str) -> "FieldCtx":
        mt = re.fullmatch(r"\s*(\d+)\^(\d+)/([\d,\s]+)", text)
        if not mt:
            raise ValueError(f"bad field descriptor {text!r}")
        return cls(int(mt.group(1)), int(mt.group(2)), [int(c) for c in mt.group(3).split(",")])

    # -- scalars -------------------------------------------------------------

    def __call__(self, n: int) -> int:
        """Image of the integer n in the prime subfield."""
        return int(n) % self.p

    def add(self, a: int, b: int) -> int:
        if self.p == 2:
            return a ^ b
        if self.m == 1:
            return (a + b) % self.p
        return int(self.add_a(a, b))

    def neg(self, a: int) -> int:
        if self.p == 2:
            return a
        if self.m == 1:
            return (-a) % self.p
        return int(self.neg_a(np.int64(a)))

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        if self.m == 1:
            return a * b % self.p
        return self._exp_list[self._log_list[a] + self._log_list[b]]

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of 0 in finite field")
        if self.m == 1:
            return pow(a, self.p - 2, self.p)
        return self._exp_list[(self.q - 1 - self._log_list[a]) % (self.q - 1)]

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def pow(self, a: int, e: int) -> int:
        if a == 0:
            if e < 0:
                raise ZeroDivisionError("0 to a negative power")
            return 1 if e == 0 else 0
        k = (self._log_list[a] * e) % (self.q - 1) if self.m > 1 else None
        if self.m == 1:
            return pow(a, e % (self.p - 1), self.p)
        return self._exp_list[k]

    def frobenius(self, a: int, k: int = 1) -> int:
        return self.pow(a, self.p ** k)

    def elements(self):
        return range(self.q)

    def element_order(self, a: int) -> int:
        if a == 0:
            raise ValueError("0 has no multiplicative order")
        if self.m == 1:
            return multiplicative_order(a, self.p)
        return (self.q - 1) // int(np.gcd(self._log_list[a], self.q - 1))

    def primitive_element(self) -> int:
        return self.gen

    def format(self, a: int) -> str:
        """Render as ``a0+a1*t+...`` with zero terms dropped."""
        coeffs = self._decode(int(a))
        terms = []
        for i, c in enumerate(coeffs):
            if not c:
                continue
            if i == 0:
                terms.append(str(c))
            else:
                mono = "t" if i == 1 else f"t^{i}"
                terms.append(mono if c == 1 else f"{c}*{mono}")
        return "+".join(terms) if terms else "0"

    def parse(self, text: str) -> int:
        text = text.strip().replace(" ", "")
        if text == "0":
            return 0
        coeffs = [0] * self.m
        for term in text.split("+"):
            mt = re.fullmatch(r"(?:(\d+)\*?)?(t(?:\^(\d+))?)?", term)
            if not mt or term == "":
                raise ValueError(f"bad field element {text!r}")
            c = int(mt.group(1)) if mt.group(1) else 1
            deg = 0 if not mt.group(2) else (int(mt.group(3)) if mt.group(3) else 1)
            if deg >= self.m:
                raise ValueError(f"degree {deg} too large for F_{self.q}")
            coeffs[deg] = (coeffs[deg] + c) % self.p
        return self._encode(coeffs)

    # -- arrays --------------------------------------------------------------

    def encode_digits(self, d):
        """Digits along the last axis -> encoded elements."""
        return np.asarray(d, dtype=np.int64) @ self.pw

    def add_a(self, a, b):
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        if self.p == 2:
            return a ^ b
        if self.m == 1:
            return (a + b) % self.p
        if self._add_table is not None:
            return self._add_table[a, b]
        return self.encode_digits((self.digits[a] + self.digits[b]) % self.p)

    def neg_a(self, a):
        a = np.asarray(a, dtype=np.int64)
        if self.p == 2:
            return a.copy()
        if self.m == 1:
            return (-a) % self.p
        return self.encode_digits((-self.digits[a]) % self.p)

    def sub_a(self, a, b):
        if self.p == 2:
            return np.asarray(a, dtype=np.int64) ^ np.asarray(b, dtype=np.int64)
        if self.m == 1:
            return (np.asarray(a, dtype=np.int64) - b) % self.p
        return self.add_a(a, self.neg_a(b))

    def mul_a(self, a, b):
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        if self.m == 1:
            return (a * b) % self.p
        out = self.exp_table[self.log_table[a] + self.log_table[b]]
        return np.where((a == 0) | (b == 0), 0, out)

    def inv_a(self, a):
        a = np.asarray(a, dtype=np.int64)
        if np.any(a == 0):
            raise ZeroDivisionError("inverse of 0 in finite field")
        if self.m == 1:
            return np.array([pow(int(x), self.p - 2, self.p) for x in a.ravel()], dtype=np.int64).reshape(a.shape)
        return self.exp_table[(self.q - 1 - self.log_table[a]) % (self.q - 1)]

    def pow_a(self, a, e: int):
        a = np.asarray(a, dtype=np.int64)
        if self.m == 1:
            return np.array([pow(int(x), e, self.p) for x in a.ravel()], dtype=np.int64).reshape(a.shape)
        out = self.exp_table[(self.log_table[a] * e) % (self.q - 1)]
        if e == 0:
            return np.ones_like(a)
        return np.where(a == 0, 0, out)

    def from_ints(self, a):
        """Embed integer arrays in the prime subfield."""
        return np.asarray(a, dtype=np.int64) % self.p

    def matmul(self, a, b):
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        if self.m == 1:
            return (a @ b) % self.p
        m = self.m
        ad = np.moveaxis(self.digits[a], -1, 0)
        bd = np.moveaxis(self.digits[b], -1, 0)
        prod = None
        for i in range(m):
            if not ad[i].any():
                continue
            for j in range(m):
                if not bd[j].any():
                    continue
                term = ad[i] @ bd[j]
                if prod is None:
                    prod = np.zeros((2 * m - 1,) + term.shape, dtype=np.int64)
                prod[i + j] += term
        if prod is None:
            return np.zeros(a.shape[:-1] + b.shape[1:], dtype=np.int64)
        prod %= self.p
        cd = np.tensordot(self.reduction.T, prod, axes=(1, 0)) % self.p
        return self.encode_digits(np.moveaxis(cd, 0, -1))

    def sum_a(self, a, axis=0):
        """Field sum along an axis."""
        a = np.asarray(a, dtype=np.int64)
        if self.p == 2:
            return np.bitwise_xor.reduce(a, axis=axis) if a.shape[axis] else np.zeros(np.delete(a.shape, axis), dtype=np.int64)
        if self.m == 1:
            return a.sum(axis=axis) % self.p
        return self.encode_digits(self.digits[a].sum(axis=axis) % self.p)


@functools.lru_cache(maxsize=None)
def field_make(p: int, m: int = 1, seed: int = 0) -> FieldCtx:
    """Return F_{p^m} with a modulus chosen by a seeded search.

    The prime field uses the modulus ``x`` (coefficients ``(0, 1)``).
    """
    if not is_prime(p):
        raise ValueError(f"p={p} is not prime")
    if m < 1:
        raise ValueError("extension degree must be >= 1")
    if m == 1:
        return FieldCtx(p, 1, (0, 1))
    rng = random.Random(f"modulus:{p}:{m}:{seed}")
    while True:
        coeffs = [rng.randrange(p) for _ in range(m)] + [1]
        if coeffs[0] == 0:
            continue
        if is_irreducible_fp(coeffs, p):
            return FieldCtx(p, m, coeffs)
