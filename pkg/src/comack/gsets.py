"""Finite G-sets, spans of G-sets and their Burnside-group decomposition.

A span ``(X <-b- Z -a-> Y)`` is stored with a concrete middle G-set.  When both
bases are disjoint unions of coset spaces (for instance Omega_G, the union of
G/L over every subgroup L) each transitive span has a canonical key
``(H, K, x, L)``: left component G/H, right component G/K, double coset
representative x in [H\\G/K] and stabilizer L <= H n xKx^{-1}, the latter
canonical up to conjugation by H n xKx^{-1}.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .exactla.field import FieldCtx
from .exactla.linalg import FqMatrix
from .groups import Group, Subgroup


class GSetError(ValueError):
    pass


@dataclass(frozen=True)
class Component:
    subgroup: Subgroup
    offset: int
    size: int


@dataclass(eq=False)
class GSet:
    """Points 0..n-1 with ``act[g, point]`` the action of element g."""

    group: Group
    act: np.ndarray = field(repr=False)
    components: tuple[Component, ...] | None = None
    label: str = ""

    @property
    def size(self) -> int:
        return self.act.shape[1]

    def __len__(self):
        return self.size

    def check_action(self, samples: int = 2000, seed: int = 0) -> bool:
        G, act = self.group, self.act
        if not np.array_equal(act[0], np.arange(self.size)):
            return False
        if self.size <= 256 and G.order <= 256:
            # act[g h] == act[g][act[h]] for all g, h
            for g in range(G.order):
                if not np.array_equal(act[G.mul[g]], act[g][act]):
                    return False
            return True
        rng = np.random.default_rng(seed)
        g, h = rng.integers(0, G.order, (2, samples))
        x = rng.integers(0, self.size, samples)
        return bool(np.all(act[G.mul[g, h], x] == act[g, act[h, x]]))

    @property
    def component_of(self) -> np.ndarray:
        out = np.empty(self.size, dtype=np.int64)
        for i, c in enumerate(self._require_components()):
            out[c.offset: c.offset + c.size] = i
        return out

    def _require_components(self) -> tuple[Component, ...]:
        if self.components is None:
            raise GSetError("G-set has no coset-space structure")
        return self.components

    def component_for(self, H: Subgroup) -> Component:
        for c in self._require_components():
            if c.subgroup == H:
                return c
        raise GSetError(f"no component G/H for {H}")

    def point(self, H: Subgroup, g: int = 0) -> int:
        """The point gH of the component G/H."""
        c = self.component_for(H)
        return c.offset + int(self.group.left_cosets(H).coset_of[g])

    def orbit_index(self, pt: int) -> tuple[int, int]:
        """(canonical id of the component subgroup, coset representative)."""
        c = self._require_components()[int(self.component_of[pt])]
        reps = self.group.left_cosets(c.subgroup).representatives
        return c.subgroup.canonical_id, reps[pt - c.offset]

    def orbits(self) -> list[np.ndarray]:
        return _orbits(self.group, self.act)

    def stabilizer(self, pt: int) -> Subgroup:
        return self.group._subgroup_from_mask(self.act[:, pt] == pt)


def _orbits(G: Group, act: np.ndarray) -> list[np.ndarray]:
    n = act.shape[1]
    seen = np.zeros(n, dtype=bool)
    gens = list(G.generators)
    out = []
    for s in range(n):
        if seen[s]:
            continue
        orb = [s]
        seen[s] = True
        frontier = np.array([s])
        while frontier.size:
            nxt = np.unique(act[np.ix_(gens, frontier)].ravel()) if gens else frontier[:0]
            nxt = nxt[~seen[nxt]]
            seen[nxt] = True
            orb.extend(nxt.tolist())
            frontier = nxt
        out.append(np.array(sorted(orb), dtype=np.int64))
    return out


def _coset_action(G: Group, H: Subgroup) -> np.ndarray:
    lc = G.left_cosets(H)
    reps = np.array(lc.representatives, dtype=np.int64)
    return lc.coset_of[G.mul[:, reps]]


def coset_space(G: Group, H: Subgroup) -> GSet:
    act = _coset_action(G, H)
    return GSet(G, act, (Component(H, 0, act.shape[1]),), label=f"G/{H.canonical_id}")


def disjoint_union(G: Group, subgroups) -> GSet:
    comps, acts, off = [], [], 0
    for H in subgroups:
        a = _coset_action(G, H)
        acts.append(a + off)
        comps.append(Component(H, off, a.shape[1]))
        off += a.shape[1]
    act = np.concatenate(acts, axis=1) if acts else np.zeros((G.order, 0), dtype=np.int64)
    return GSet(G, act, tuple(comps))


def omega(G: Group) -> GSet:
    """Union of G/L over all subgroups L, in lattice order."""
    cache = G.__dict__.get("_omega")
    if cache is None:
        cache = disjoint_union(G, G.all_subgroups())
        cache.label = "Omega"
        G.__dict__["_omega"] = cache
    return cache


# -- spans --------------------------------------------------------------------

class SpanKey(NamedTuple):
    """Transitive span G/H <- G/L -> G/K with right map gL -> gxK (subgroup ids)."""

    H: int
    K: int
    x: int
    L: int


@dataclass(eq=False)
class Span:
    mid: GSet
    left_map: np.ndarray
    right_map: np.ndarray
    left_base: GSet
    right_base: GSet

    def check(self) -> bool:
        b, a = self.left_map, self.right_map
        act = self.mid.act
        return bool(np.array_equal(self.left_base.act[:, b], b[act])
                    and np.array_equal(self.right_base.act[:, a], a[act]))

    def format(self) -> str:
        parts = []
        for orb in self.mid.orbits():
            z = int(orb[0])
            parts.append(f"{self.left_base.orbit_index(int(self.left_map[z]))}<-{len(orb)}->"
                         f"{self.right_base.orbit_index(int(self.right_map[z]))}")
        return "(X <-b- Z -a-> Y): " + ", ".join(parts)


@dataclass
class BurnsideElement:
    """Integer combination of canonical transitive spans over (X, Y)."""

    left_base: GSet
    right_base: GSet
    coefficients: dict = field(default_factory=dict)

    def add_key(self, key: SpanKey, c: int = 1):
        v = self.coefficients.get(key, 0) + c
        if v:
            self.coefficients[key] = v
        else:
            self.coefficients.pop(key, None)

    def __add__(self, other: "BurnsideElement") -> "BurnsideElement":
        out = BurnsideElement(self.left_base, self.right_base, dict(self.coefficients))
        for k, c in other.coefficients.items():
            out.add_key(k, c)
        return out

    def __eq__(self, other):
        return (isinstance(other, BurnsideElement) and self.left_base is other.left_base
                and self.right_base is other.right_base and self.coefficients == other.coefficients)

    def items(self):
        return sorted(self.coefficients.items())

    def cardinality(self) -> int:
        """Total number of points of the represented middle G-set."""
        G = self.left_base.group
        subs = G.all_subgroups()
        return sum(c * (G.order // subs[k.L].order) for k, c in self.coefficients.items())


def identity_span(X: GSet) -> Span:
    pts = np.arange(X.size)
    return Span(X, pts, pts, X, X)


def _conj_members(G: Group, g_arr: np.ndarray, L: np.ndarray) -> np.ndarray:
    """Rows g L g^{-1} (sorted) for each g in g_arr."""
    rows = G.mul[G.mul[g_arr[:, None], L[None, :]], G.inv[g_arr][:, None]]
    rows.sort(axis=1)
    return rows


def _sid(G: Group, H: Subgroup) -> int:
    return H.canonical_id if H.canonical_id >= 0 else G.subgroup_id(H)


def canonical_conjugate(G: Group, L: Subgroup, N: Subgroup) -> Subgroup:
    """The N-conjugate of L with lexicographically smallest member tuple."""
    rows = _conj_members(G, N.array, L.array)
    order = np.lexsort(rows.T[::-1])
    return G.subgroup_from_members(rows[order[0]].tolist())


def canonicalize_orbit(G: Group, mid_act: np.ndarray, b: np.ndarray, a: np.ndarray,
                       X: GSet, Y: GSet, orbit: np.ndarray) -> SpanKey:
    """Canonical key of one orbit of a span between coset-structured bases."""
    comp_x = X._require_components()[int(X.component_of[b[orbit[0]]])]
    H = comp_x.subgroup
    base_pt = comp_x.offset  # the coset H itself
    hits = orbit[b[orbit] == base_pt]
    if not hits.size:
        raise GSetError("left map is not equivariant onto a coset component")
    z = int(hits[0])
    comp_y = Y._require_components()[int(Y.component_of[a[z]])]
    K = comp_y.subgroup
    lcK = G.left_cosets(K)
    y = lcK.representatives[int(a[z]) - comp_y.offset]
    dc = G.double_cosets(H, K)
    x = dc.rep_of(y)
    # move z by some h in H so that a(z) becomes xK
    target = lcK.coset_of[x]
    hs = H.array
    ok = lcK.coset_of[G.mul[G.inv[hs], y]] == target
    h0 = int(hs[np.argmax(ok)])
    z2 = int(mid_act[G.inv[h0], z])
    stab = G._subgroup_from_mask(mid_act[:, z2] == z2)
    xK = G.conjugate_subgroup(K, x)
    N = G.intersection(H, xK)
    L = canonical_conjugate(G, stab, N)
    return SpanKey(_sid(G, H), _sid(G, K), int(x), _sid(G, L))


def decompose_span(span: Span) -> BurnsideElement:
    G = span.mid.group
    out = BurnsideElement(span.left_base, span.right_base)
    for orb in span.mid.orbits():
        out.add_key(canonicalize_orbit(G, span.mid.act, span.left_map, span.right_map,
                                       span.left_base, span.right_base, orb))
    return out


def fiber_product(U: Span, V: Span) -> Span:
    """Pullback of U's right map and V's left map, with the diagonal action."""
    if U.right_base is not V.left_base:
        raise GSetError("spans do not share the middle base")
    G = U.mid.group
    a_u, b_v = U.right_map, V.left_map
    by_pt = defaultdict(list)
    for v, y in enumerate(b_v.tolist()):
        by_pt[y].append(v)
    pairs = [(u, v) for u, y in enumerate(a_u.tolist()) for v in by_pt.get(y, ())]
    nv = V.mid.size
    if not pairs:
        empty = np.zeros(0, dtype=np.int64)
        return Span(GSet(G, np.zeros((G.order, 0), dtype=np.int64)), empty, empty,
                    U.left_base, V.right_base)
    uu = np.array([p[0] for p in pairs], dtype=np.int64)
    vv = np.array([p[1] for p in pairs], dtype=np.int64)
    code = uu * nv + vv
    lookup = np.full(U.mid.size * nv, -1, dtype=np.int64)
    lookup[code] = np.arange(len(pairs))
    act = lookup[U.mid.act[:, uu] * nv + V.mid.act[:, vv]]
    return Span(GSet(G, act), U.left_map[uu], V.right_map[vv], U.left_base, V.right_base)


def span_product(U: Span, V: Span) -> BurnsideElement:
    """Class of the pullback U x_Y V decomposed into canonical keys."""
    return decompose_span(fiber_product(U, V))


def span_from_key(G: Group, key: SpanKey, X: GSet | None = None, Y: GSet | None = None) -> Span:
    """The span G/H <- G/L -> G/K, gL -> (gH, gxK), embedded in X and Y (default Omega)."""
    subs = G.all_subgroups()
    H, K, L = subs[key.H], subs[key.K], subs[key.L]
    X = X if X is not None else omega(G)
    Y = Y if Y is not None else omega(G)
    if not (L <= H and L <= G.conjugate_subgroup(K, key.x)):
        raise GSetError(f"invalid span key {key}")
    mid = coset_space(G, L)
    reps = np.array(G.left_cosets(L).representatives, dtype=np.int64)
    cx, cy = X.component_for(H), Y.component_for(K)
    b = cx.offset + G.left_cosets(H).coset_of[reps]
    a = cy.offset + G.left_cosets(K).coset_of[G.mul[reps, key.x]]
    return Span(mid, b, a, X, Y)


def beta_generator(G: Group, kind: str, H: Subgroup, K: Subgroup | None = None, g: int = 0) -> Span:
    """Span of a Mackey generator over Omega x Omega.

    ``t``: transfer from H up to K (H <= K), ``G/K <- G/H = G/H``.
    ``r``: restriction from K down to H (H <= K), ``G/H = G/H -> G/K``.
    ``c``: conjugation c_{g,H}, ``G/gHg^-1 = G/gHg^-1 -> G/H`` with x gHg^-1 -> x g H.
    """
    Om = omega(G)
    if kind in ("t", "r"):
        if K is None or not H <= K:
            raise GSetError(f"{kind} needs H <= K")
        if kind == "t":
            return span_from_key(G, SpanKey(_sid(G, K), _sid(G, H), 0, _sid(G, H)), Om, Om)
        return span_from_key(G, SpanKey(_sid(G, H), _sid(G, K), 0, _sid(G, H)), Om, Om)
    if kind == "c":
        gH = G.conjugate_subgroup(H, g)
        mid = coset_space(G, gH)
        reps = np.array(G.left_cosets(gH).representatives, dtype=np.int64)
        b = Om.component_for(gH).offset + np.arange(len(reps))
        a = Om.component_for(H).offset + G.left_cosets(H).coset_of[G.mul[reps, g]]
        return Span(mid, b, a, Om, Om)
    raise GSetError(f"unknown generator kind {kind!r}")


def linearize_int(span: Span) -> np.ndarray:
    """Integer matrix of a_* b^*: column x is the sum of a(z) over z with b(z) = x."""
    M = np.zeros((span.right_base.size, span.left_base.size), dtype=np.int64)
    np.add.at(M, (span.right_map, span.left_map), 1)
    return M


def linearize(span: Span, ctx: FieldCtx) -> FqMatrix:
    return FqMatrix(ctx, ctx.from_ints(linearize_int(span)))


def linearize_element(el: BurnsideElement) -> np.ndarray:
    G = el.left_base.group
    M = np.zeros((el.right_base.size, el.left_base.size), dtype=np.int64)
    for k, c in el.coefficients.items():
        M += c * linearize_int(span_from_key(G, k, el.left_base, el.right_base))
    return M
