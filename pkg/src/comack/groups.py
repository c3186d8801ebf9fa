"""Finite groups as multiplication tables, with subgroups, cosets and conjugacy.

Elements are the integers 0..n-1 with 0 the identity.  The numbering is fixed
by a breadth-first closure from the recipe's generators, so every downstream
basis is reproducible.
"""

from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Hashable, Sequence

import numpy as np

from . import budget as _budget
from .exactla.field import is_prime


class GroupError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class Subgroup:
    parent: "Group" = field(repr=False)
    members: tuple[int, ...]
    canonical_id: int = -1

    @property
    def order(self) -> int:
        return len(self.members)

    @cached_property
    def mask(self) -> np.ndarray:
        m = np.zeros(self.parent.order, dtype=bool)
        m[list(self.members)] = True
        return m

    @cached_property
    def array(self) -> np.ndarray:
        return np.array(self.members, dtype=np.int64)

    @cached_property
    def generators(self) -> tuple[int, ...]:
        """A small generating set, chosen greedily in element order."""
        G = self.parent
        gens: list[int] = []
        cur = np.zeros(G.order, dtype=bool)
        cur[0] = True
        for x in self.members:
            if not cur[x]:
                gens.append(x)
                cur = G._closure_mask(gens)
        return tuple(gens)

    def __contains__(self, x) -> bool:
        return bool(self.mask[x])

    def __eq__(self, other):
        return isinstance(other, Subgroup) and other.parent is self.parent and other.members == self.members

    def __hash__(self):
        return hash(self.members)

    def __le__(self, other: "Subgroup") -> bool:
        return bool(np.all(other.mask[self.array]))

    def __repr__(self):
        return f"Subgroup(order={self.order}, id={self.canonical_id})"


@dataclass(frozen=True)
class DoubleCosets:
    left: Subgroup
    right: Subgroup
    representatives: tuple[int, ...]
    coset_of: np.ndarray = field(repr=False)
    sizes: tuple[int, ...] = field(repr=False)

    def __len__(self):
        return len(self.representatives)

    def rep_of(self, g: int) -> int:
        return self.representatives[int(self.coset_of[g])]


@dataclass(frozen=True)
class LeftCosets:
    """Cosets gH: ``coset_of[g]`` indexes ``representatives`` (minimal elements)."""

    subgroup: Subgroup
    representatives: tuple[int, ...]
    coset_of: np.ndarray = field(repr=False)

    def __len__(self):
        return len(self.representatives)


class Group:
    """A finite group given by its full multiplication table."""

    def __init__(self, mul: np.ndarray, generators: Sequence[int], label: str = "",
                 names: Sequence[str] | None = None):
        mul = np.asarray(mul, dtype=np.int64)
        n = mul.shape[0]
        if mul.shape != (n, n):
            raise GroupError("multiplication table must be square")
        if not (np.array_equal(mul[0], np.arange(n)) and np.array_equal(mul[:, 0], np.arange(n))):
            raise GroupError("0 must be a two-sided identity")
        inv = np.argmax(mul == 0, axis=1)
        if not np.all(mul[np.arange(n), inv] == 0) or not np.all(mul[inv, np.arange(n)] == 0):
            raise GroupError("some element has no inverse")
        self.mul = mul
        self.inv = inv
        self.generators = tuple(int(g) for g in generators)
        self.label = label
        self.names = tuple(names) if names is not None else None
        if n > 1 and self._closure_mask(self.generators).sum() != n:
            raise GroupError("generators do not generate the group")

    @property
    def order(self) -> int:
        return self.mul.shape[0]

    def __len__(self):
        return self.order

    def __repr__(self):
        return f"Group({self.label or '?'}, order={self.order})"

    def name(self, g: int) -> str:
        return self.names[g] if self.names else str(g)

    def element(self, name: str) -> int:
        if not self.names:
            raise KeyError("group has no element names")
        return self.names.index(name)

    # -- elementary operations ------------------------------------------------

    def m(self, a: int, b: int) -> int:
        return int(self.mul[a, b])

    def conj(self, g: int, x: int) -> int:
        """g x g^{-1}."""
        return int(self.mul[self.mul[g, x], self.inv[g]])

    def power(self, x: int, k: int) -> int:
        r = 0
        if k < 0:
            x, k = int(self.inv[x]), -k
        while k:
            if k & 1:
                r = int(self.mul[r, x])
            x = int(self.mul[x, x])
            k >>= 1
        return r

    @cached_property
    def element_orders(self) -> np.ndarray:
        n = self.order
        orders = np.zeros(n, dtype=np.int64)
        cur = np.arange(n)
        k = 1
        while (orders == 0).any():
            hit = (cur == 0) & (orders == 0)
            orders[hit] = k
            cur = self.mul[cur, np.arange(n)]
            k += 1
        return orders

    @cached_property
    def exponent(self) -> int:
        return int(np.lcm.reduce(self.element_orders))

    @cached_property
    def is_abelian(self) -> bool:
        return bool(np.array_equal(self.mul, self.mul.T))

    def check_associative(self, samples: int | None = None, seed: int = 0) -> bool:
        n = self.order
        mul = self.mul
        if samples is None and n <= 512:
            for a in range(n):
                # (a b) c == a (b c) for all b, c
                if not np.array_equal(mul[mul[a]][:, :], mul[a][mul]):
                    return False
            return True
        rng = np.random.default_rng(seed)
        k = samples or 100000
        a, b, c = (rng.integers(0, n, k) for _ in range(3))
        return bool(np.all(mul[mul[a, b], c] == mul[a, mul[b, c]]))

    # -- subgroups ----------------------------------------------------------------

    def _closure_mask(self, gens) -> np.ndarray:
        n = self.order
        mask = np.zeros(n, dtype=bool)
        mask[0] = True
        gens = np.array([g for g in gens if g != 0], dtype=np.int64)
        if not gens.size:
            return mask
        frontier = np.array([0], dtype=np.int64)
        while frontier.size:
            new = np.unique(self.mul[np.ix_(frontier, gens)].ravel())
            new = new[~mask[new]]
            mask[new] = True
            frontier = new
        return mask

    def subgroup(self, gens: Sequence[int] = ()) -> Subgroup:
        """Subgroup generated by gens (canonical id attached when the lattice is known)."""
        mask = self._closure_mask(list(gens))
        return self._subgroup_from_mask(mask)

    def _subgroup_from_mask(self, mask) -> Subgroup:
        members = tuple(int(x) for x in np.flatnonzero(mask))
        sid = self.__dict__.get("_lattice_index", {}).get(members, -1)
        if sid >= 0:
            return self.all_subgroups()[sid]
        return Subgroup(self, members, sid)

    def subgroup_from_members(self, members) -> Subgroup:
        members = tuple(sorted(int(x) for x in members))
        mask = np.zeros(self.order, dtype=bool)
        mask[list(members)] = True
        if not self._closure_mask(members).sum() == len(members):
            raise GroupError("members are not closed under multiplication")
        return self._subgroup_from_mask(mask)

    @property
    def trivial(self) -> Subgroup:
        return self.subgroup(())

    @property
    def whole(self) -> Subgroup:
        return self.subgroup(self.generators)

    def all_subgroups(self, bound: int | None = None) -> list[Subgroup]:
        """Every subgroup once, sorted by (order, members)."""
        cached = self.__dict__.get("_lattice")
        if cached is not None:
            return cached
        limit = bound if bound is not None else _budget.current().max_lattice_order
        if self.order > limit:
            raise _budget.BudgetExceeded(
                f"subgroup lattice of a group of order {self.order} exceeds the bound {limit}")
        n = self.order
        cyclic: dict[bytes, tuple[np.ndarray, int]] = {}
        for g in range(n):
            mask = self._closure_mask([g])
            key = np.packbits(mask).tobytes()
            if key not in cyclic:
                cyclic[key] = (mask, g)
        found: dict[bytes, np.ndarray] = {}
        queue = deque()
        for key, (mask, _) in cyclic.items():
            found[key] = mask
            queue.append(mask)
        cyc_gens = [g for _, g in cyclic.values() if g != 0]
        while queue:
            mask = queue.popleft()
            members = np.flatnonzero(mask)
            for g in cyc_gens:
                if mask[g]:
                    continue
                # <H, g>: close H u {g} under right multiplication by its generators
                joined = self._join(mask, members, g)
                key = np.packbits(joined).tobytes()
                if key not in found:
                    found[key] = joined
                    queue.append(joined)
        subs = sorted((tuple(int(x) for x in np.flatnonzero(mk)) for mk in found.values()),
                      key=lambda t: (len(t), t))
        lattice = [Subgroup(self, mem, i) for i, mem in enumerate(subs)]
        self.__dict__["_lattice"] = lattice
        self.__dict__["_lattice_index"] = {s.members: s.canonical_id for s in lattice}
        return lattice

    def _join(self, mask, members, g):
        gens = list(Subgroup(self, tuple(int(x) for x in members)).generators) + [g]
        return self._closure_mask(gens)

    def subgroup_id(self, H: Subgroup) -> int:
        self.all_subgroups()
        return self.__dict__["_lattice_index"][H.members]

    def conjugate_subgroup(self, H: Subgroup, g: int) -> Subgroup:
        """g H g^{-1}."""
        mem = self.mul[self.mul[g, H.array], self.inv[g]]
        mask = np.zeros(self.order, dtype=bool)
        mask[mem] = True
        return self._subgroup_from_mask(mask)

    def intersection(self, H: Subgroup, K: Subgroup) -> Subgroup:
        return self._subgroup_from_mask(H.mask & K.mask)

    def normalizer(self, H: Subgroup) -> Subgroup:
        keep = [g for g in range(self.order) if self.conjugate_subgroup(H, g) == H]
        return self.subgroup_from_members(keep)

    def centralizer_of(self, xs: Sequence[int]) -> Subgroup:
        xs = np.asarray(list(xs), dtype=np.int64)
        if not xs.size:
            return self.whole
        ok = np.all(self.mul[:, xs] == self.mul[xs, :].T, axis=1)
        return self._subgroup_from_mask(ok)

    @cached_property
    def center(self) -> Subgroup:
        ok = np.all(self.mul == self.mul.T, axis=1)
        return self._subgroup_from_mask(ok)

    def is_normal(self, H: Subgroup) -> bool:
        return all(self.conjugate_subgroup(H, g) == H for g in self.generators)

    def is_cyclic(self) -> bool:
        return bool(np.any(self.element_orders == self.order))

    def is_p_group(self, p: int) -> bool:
        n = self.order
        while n % p == 0:
            n //= p
        return n == 1

    # -- cosets ---------------------------------------------------------------

    def left_cosets(self, H: Subgroup) -> LeftCosets:
        cache = self.__dict__.setdefault("_lc_cache", {})
        hit = cache.get(H.members)
        if hit is None:
            hit = cache[H.members] = self._left_cosets(H)
        return hit

    def _left_cosets(self, H: Subgroup) -> LeftCosets:
        n = self.order
        coset_of = np.full(n, -1, dtype=np.int64)
        reps = []
        for g in range(n):
            if coset_of[g] >= 0:
                continue
            coset_of[self.mul[g, H.array]] = len(reps)
            reps.append(g)
        return LeftCosets(H, tuple(reps), coset_of)

    def double_cosets(self, H: Subgroup, K: Subgroup) -> DoubleCosets:
        """H\\G/K with the minimal element of each double coset as representative."""
        for S in (H, K):
            if S.parent is not self:
                raise GroupError("subgroup of a different group")
        cache = self.__dict__.setdefault("_dc_cache", {})
        hit = cache.get((H.members, K.members))
        if hit is None:
            hit = cache[(H.members, K.members)] = self._double_cosets(H, K)
        return hit

    def _double_cosets(self, H: Subgroup, K: Subgroup) -> DoubleCosets:
        n = self.order
        coset_of = np.full(n, -1, dtype=np.int64)
        reps, sizes = [], []
        for x in range(n):
            if coset_of[x] >= 0:
                continue
            xk = self.mul[x, K.array]
            orbit = np.unique(self.mul[np.ix_(H.array, xk)].ravel())
            coset_of[orbit] = len(reps)
            reps.append(x)
            sizes.append(int(orbit.size))
        return DoubleCosets(H, K, tuple(reps), coset_of, tuple(sizes))

    # -- conjugacy --------------------------------------------------------------

    @cached_property
    def _classes(self):
        n = self.order
        class_of = np.full(n, -1, dtype=np.int64)
        classes = []
        all_g = np.arange(n)
        for x in range(n):
            if class_of[x] >= 0:
                continue
            cl = np.unique(self.mul[self.mul[all_g, x], self.inv[all_g]])
            class_of[cl] = len(classes)
            classes.append(tuple(int(c) for c in cl))
        return classes, class_of

    def conjugacy_classes(self) -> list[tuple[int, ...]]:
        return self._classes[0]

    @property
    def class_of(self) -> np.ndarray:
        return self._classes[1]

    def subgroup_conjugacy_classes(self) -> list[tuple[int, ...]]:
        """Partition of the lattice ids into conjugacy classes, ordered by first id."""
        cached = self.__dict__.get("_subgroup_classes")
        if cached is not None:
            return cached
        subs = self.all_subgroups()
        cls_of = [-1] * len(subs)
        classes = []
        for s in subs:
            if cls_of[s.canonical_id] >= 0:
                continue
            orbit = {s.canonical_id}
            frontier = [s]
            while frontier:
                nxt = []
                for t in frontier:
                    for g in self.generators:
                        u = self.conjugate_subgroup(t, g)
                        if u.canonical_id not in orbit:
                            orbit.add(u.canonical_id)
                            nxt.append(u)
                frontier = nxt
            for i in orbit:
                cls_of[i] = len(classes)
            classes.append(tuple(sorted(orbit)))
        self.__dict__["_subgroup_classes"] = classes
        self.__dict__["_subgroup_class_of"] = cls_of
        return classes

    def subgroup_class_of(self, H: Subgroup) -> int:
        self.subgroup_conjugacy_classes()
        return self.__dict__["_subgroup_class_of"][self.subgroup_id(H)]

    def are_conjugate(self, H: Subgroup, K: Subgroup) -> int | None:
        """Some g with g H g^{-1} = K, or None."""
        if H.order != K.order:
            return None
        for g in range(self.order):
            if self.conjugate_subgroup(H, g) == K:
                return g
        return None

    def p_subgroup_classes(self, p: int) -> list[Subgroup]:
        """One representative per conjugacy class of p-subgroups, ordered by (order, members).

        Uses the full lattice when it is small enough, otherwise the lattice of
        a Sylow subgroup with G-conjugacy deduplication.
        """
        if self.order <= _budget.current().max_lattice_order:
            subs = self.all_subgroups()
            return [subs[c[0]] for c in self.subgroup_conjugacy_classes() if is_p_power(subs[c[0]].order, p)]
        P = self.sylow(p)
        local = _restrict(self, P)
        reps: list[Subgroup] = []
        for Q in local.all_subgroups():
            Qg = self.subgroup_from_members(P.array[list(Q.members)])
            if not any(R.order == Qg.order and self.are_conjugate(Qg, R) is not None for R in reps):
                reps.append(Qg)
        return sorted(reps, key=lambda s: (s.order, s.members))

    def sylow(self, p: int) -> Subgroup:
        if not is_prime(p):
            raise GroupError(f"{p} is not prime")
        target = 1
        n = self.order
        while n % p == 0:
            target *= p
            n //= p
        pelts = [g for g in range(self.order) if is_p_power(int(self.element_orders[g]), p) and g]
        mask = self._closure_mask([])
        gens: list[int] = []
        while mask.sum() < target:
            for g in pelts:
                if mask[g]:
                    continue
                trial = self._closure_mask(gens + [g])
                if is_p_power(int(trial.sum()), p):
                    gens.append(g)
                    mask = trial
                    break
            else:
                raise AssertionError("Sylow search stalled")
        return self._subgroup_from_mask(mask)


def is_p_power(n: int, p: int) -> bool:
    while n % p == 0 and n > 1:
        n //= p
    return n == 1


def _restrict(G: Group, H: Subgroup) -> Group:
    """H as a group in its own right (element i <-> H.members[i])."""
    idx = {g: i for i, g in enumerate(H.members)}
    arr = H.array
    sub = G.mul[np.ix_(arr, arr)]
    table = np.vectorize(idx.__getitem__)(sub) if sub.size else sub
    gens = [idx[g] for g in H.generators]
    names = [G.name(g) for g in H.members] if G.names else None
    return Group(table, gens, label=f"sub({G.label})", names=names)


def as_group(G: Group, H: Subgroup) -> Group:
    return _restrict(G, H)


# -- construction ---------------------------------------------------------------

def from_generators(gens: Sequence[Hashable], mul: Callable, identity: Hashable, label: str,
                    namer: Callable | None = None, max_order: int | None = None) -> Group:
    """Closure of gens under mul; elements numbered in breadth-first order."""
    limit = max_order if max_order is not None else _budget.current().max_order
    elems = [identity]
    index = {identity: 0}
    right = {k: [] for k in range(len(gens))}
    i = 0
    while i < len(elems):
        x = elems[i]
        for k, s in enumerate(gens):
            y = mul(x, s)
            if y not in index:
                index[y] = len(elems)
                elems.append(y)
                if len(elems) > limit:
                    raise _budget.BudgetExceeded(f"group {label} has order > {limit}")
            right[k].append(index[y])
        i += 1
    n = len(elems)
    rperm = [np.array(right[k], dtype=np.int64) for k in range(len(gens))]
    # column y of the table from the breadth-first tree: x*(y' s) = (x*y') s
    table = np.zeros((n, n), dtype=np.int64)
    table[:, 0] = np.arange(n)
    done = np.zeros(n, dtype=bool)
    done[0] = True
    for yi in range(n):
        for k in range(len(gens)):
            z = int(rperm[k][yi])
            if not done[z]:
                table[:, z] = rperm[k][table[:, yi]]
                done[z] = True
    gen_ids = [index[s] for s in gens]
    names = [namer(e) for e in elems] if namer else None
    return Group(table, gen_ids, label=label, names=names)


def cyclic(n: int) -> Group:
    if n < 1:
        raise GroupError("cyclic group needs n >= 1")
    table = (np.arange(n)[:, None] + np.arange(n)[None, :]) % n
    return Group(table, [1] if n > 1 else [], label=f"C{n}", names=[f"g^{k}" if k else "1" for k in range(n)])


def elementary_abelian(p: int, k: int) -> Group:
    if not is_prime(p) or k < 1:
        raise GroupError("elementary abelian group needs a prime p and k >= 1")
    gens = [tuple(int(i == j) for i in range(k)) for j in range(k)]
    return from_generators(gens, lambda a, b: tuple((x + y) % p for x, y in zip(a, b)),
                           tuple([0] * k), f"E{p}^{k}", namer=lambda e: "".join(map(str, e)))


def klein4() -> Group:
    G = elementary_abelian(2, 2)
    G.label = "K4"
    return G


def dihedral(n: int) -> Group:
    """Dihedral group of order n (n even, n >= 2)."""
    if n < 2 or n % 2:
        raise GroupError("dihedral group order must be even and >= 2")
    k = n // 2

    def mul(a, b):
        (r1, s1), (r2, s2) = a, b
        return ((r1 + (-r2 if s1 else r2)) % k, s1 ^ s2)

    gens = [(1 % k, 0), (0, 1)] if k > 1 else [(0, 1)]
    return from_generators(gens, mul, (0, 0), f"D{n}",
                           namer=lambda e: ("r^%d" % e[0] if e[0] else "1") + ("s" if e[1] else ""))


def _matmul2(a, b, p):
    return ((a[0] * b[0] + a[1] * b[2]) % p, (a[0] * b[1] + a[1] * b[3]) % p,
            (a[2] * b[0] + a[3] * b[2]) % p, (a[2] * b[1] + a[3] * b[3]) % p)


def sum_of_two_squares_minus_one(p: int) -> tuple[int, int]:
    """Lexicographically smallest (x, y) with x^2 + y^2 = -1 mod p."""
    for x in range(p):
        for y in range(p):
            if (x * x + y * y + 1) % p == 0:
                return x, y
    raise AssertionError(f"no x, y with x^2+y^2=-1 mod {p}")


def quaternion_matrices(p: int):
    """Generators i, j of Q8 inside GL_2(F_p) as flat 4-tuples."""
    x, y = sum_of_two_squares_minus_one(p)
    i = (0, p - 1, 1, 0)
    j = (x % p, y % p, y % p, (-x) % p)
    return i, j


def quaternion8() -> Group:
    p = 3
    i, j = quaternion_matrices(p)
    ident = (1, 0, 0, 1)
    mul = lambda a, b: _matmul2(a, b, p)
    k = mul(i, j)
    neg = lambda a: tuple((-c) % p for c in a)
    labels = {ident: "1", neg(ident): "-1", i: "i", neg(i): "-i", j: "j", neg(j): "-j", k: "k", neg(k): "-k"}
    return from_generators([i, j], mul, ident, "Q8", namer=labels.__getitem__)


def _cycle_name(perm) -> str:
    seen, out = set(), []
    for s in range(len(perm)):
        if s in seen or perm[s] == s:
            continue
        cyc, t = [s], perm[s]
        seen.add(s)
        while t != s:
            cyc.append(t)
            seen.add(t)
            t = perm[t]
        out.append("(" + ",".join(str(c + 1) for c in cyc) + ")")
    return "".join(out) or "()"


def symmetric(n: int) -> Group:
    if n < 1 or n > 5:
        raise GroupError("symmetric group supported for 1 <= n <= 5")
    ident = tuple(range(n))
    if n == 1:
        return from_generators([], None, ident, "S1", namer=_cycle_name)
    swap = tuple([1, 0] + list(range(2, n)))
    cyc = tuple(list(range(1, n)) + [0])
    gens = [swap] if n == 2 else [swap, cyc]
    # (a*b)(k) = a(b(k))
    return from_generators(gens, lambda a, b: tuple(a[b[k]] for k in range(n)), ident, f"S{n}",
                           namer=_cycle_name)


def _heis_mul(p):
    def mul(u, v):
        return ((u[0] + v[0]) % p, (u[1] + v[1]) % p, (u[2] + v[2] + u[0] * v[1]) % p)
    return mul


def extraspecial_p3(p: int) -> Group:
    """Extra-special group of order p^3 and exponent p (Heisenberg group mod p)."""
    if not is_prime(p) or p == 2:
        raise GroupError("extraspecial_p3 needs an odd prime")
    gens = [(1, 0, 0), (0, 1, 0)]
    return from_generators(gens, _heis_mul(p), (0, 0, 0), f"X{p}^3",
                           namer=lambda e: f"a{e[0]}b{e[1]}z{e[2]}")


def _symplectic_heis_mul(p):
    """Heisenberg group as F_p^2 x F_p with (v,c)(w,d) = (v+w, c+d+omega(v,w)/2)."""
    half = pow(2, -1, p)

    def mul(u, v):
        return ((u[0] + v[0]) % p, (u[1] + v[1]) % p,
                (u[2] + v[2] + half * (u[0] * v[1] - u[1] * v[0])) % p)
    return mul


def xq8(p: int) -> Group:
    """X_{p^3} semidirect Q8, with Q8 <= SL_2(F_p) acting on X/Z(X) and fixing the center."""
    if not is_prime(p) or p == 2:
        raise GroupError("xq8 needs an odd prime")
    cap = _budget.current().max_order
    if 8 * p ** 3 > cap:
        raise _budget.BudgetExceeded(f"xq8({p}) has order {8 * p ** 3} > budget {cap}")
    i, j = quaternion_matrices(p)
    mat = lambda a, b: _matmul2(a, b, p)
    hmul = _symplectic_heis_mul(p)

    # determinant-one matrices preserve omega, so (v, c) -> (q v, c) is an automorphism
    def act(q, x):
        return ((q[0] * x[0] + q[1] * x[1]) % p, (q[2] * x[0] + q[3] * x[1]) % p, x[2])

    def mul(u, v):
        (x, q), (y, r) = u, v
        return (hmul(x, act(q, y)), mat(q, r))

    ident = ((0, 0, 0), (1, 0, 0, 1))
    gens = [((1, 0, 0), ident[1]), ((0, 1, 0), ident[1]), ((0, 0, 0), i), ((0, 0, 0), j)]
    G = from_generators(gens, mul, ident, f"XQ8({p})")
    if G.order != 8 * p ** 3:
        raise AssertionError("xq8 construction has the wrong order")
    return G


def direct_product(A: Group, B: Group) -> Group:
    n1, n2 = A.order, B.order
    table = (A.mul[:, None, :, None] * n2 + B.mul[None, :, None, :]).reshape(n1 * n2, n1 * n2)
    gens = [g * n2 for g in A.generators] + [h for h in B.generators]
    names = None
    if A.names or B.names:
        names = [f"({A.name(a)},{B.name(b)})" for a in range(n1) for b in range(n2)]
    return Group(table, gens, label=f"{A.label}x{B.label}", names=names)


# -- group description mini-language -----------------------------------------------

_TOKEN = re.compile(r"\s*(prod|XQ8|K4|Q8|C|E|D|S|X|\(|\)|,|\d+)")


def parse_group_spec(text: str):
    """Parse ``C n | E p n | K4 | D n | Q8 | S n | X p | XQ8 p | prod(spec,spec)``."""
    tokens = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        mt = _TOKEN.match(text, pos)
        if not mt:
            raise GroupError(f"cannot parse group spec {text!r} at {pos}")
        tokens.append(mt.group(1))
        pos = mt.end()
        while pos < len(text) and text[pos].isspace():
            pos += 1

    def parse(i):
        if i >= len(tokens):
            raise GroupError(f"truncated group spec {text!r}")
        t = tokens[i]
        if t == "prod":
            if tokens[i + 1: i + 2] != ["("]:
                raise GroupError("prod needs parentheses")
            a, i = parse(i + 2)
            if tokens[i: i + 1] != [","]:
                raise GroupError("prod needs two arguments")
            b, i = parse(i + 1)
            if tokens[i: i + 1] != [")"]:
                raise GroupError("unclosed prod(")
            return ("prod", a, b), i + 1
        if t in ("K4", "Q8"):
            return (t,), i + 1
        arity = {"C": 1, "D": 1, "S": 1, "X": 1, "XQ8": 1, "E": 2}.get(t)
        if arity is None:
            raise GroupError(f"unexpected token {t!r}")
        args = tokens[i + 1: i + 1 + arity]
        if len(args) != arity or not all(a.isdigit() for a in args):
            raise GroupError(f"{t} needs {arity} integer argument(s)")
        return (t, *map(int, args)), i + 1 + arity

    tree, end = parse(0)
    if end != len(tokens):
        raise GroupError(f"trailing tokens in group spec {text!r}")
    return tree


def format_group_spec(tree) -> str:
    if tree[0] == "prod":
        return f"prod({format_group_spec(tree[1])},{format_group_spec(tree[2])})"
    return " ".join(str(t) for t in tree)


def build_group(spec) -> Group:
    """Build a group from a description string or parsed tuple."""
    tree = parse_group_spec(spec) if isinstance(spec, str) else tuple(spec)
    kind = tree[0]
    if kind == "C":
        G = cyclic(tree[1])
    elif kind == "E":
        G = elementary_abelian(tree[1], tree[2])
    elif kind == "K4":
        G = klein4()
    elif kind == "D":
        G = dihedral(tree[1])
    elif kind == "Q8":
        G = quaternion8()
    elif kind == "S":
        G = symmetric(tree[1])
    elif kind == "X":
        G = extraspecial_p3(tree[1])
    elif kind == "XQ8":
        G = xq8(tree[1])
    elif kind == "prod":
        G = direct_product(build_group(tree[1]), build_group(tree[2]))
    else:
        raise GroupError(f"unknown group kind {kind!r}")
    G.label = format_group_spec(tree)
    return G
