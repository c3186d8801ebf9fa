"""Cartan matrices of blocks of the cohomological Mackey algebra."""

from __future__ import annotations

import io
import csv
from dataclasses import dataclass, field

from .blocks import BlockIdempotent, block_action, block_of_module
from .exactla.intmat import IntMatrix, int_det
from .groups import Group, is_p_power
from .exactla.linalg import column_space_basis
from .modrep import CatalogEntry, PPermCatalog, decompose, hom_dim, perm_module


class CartanError(ValueError):
    pass


@dataclass
class CartanMatrix:
    row_labels: list[str]
    matrix: IntMatrix
    metadata: dict = field(default_factory=dict)

    @property
    def size(self) -> int:
        return self.matrix.rows

    @property
    def det(self) -> int:
        return abs(int_det(self.matrix))

    def is_symmetric(self) -> bool:
        return self.matrix.is_symmetric()

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow([""] + self.row_labels)
        for lab, row in zip(self.row_labels, self.matrix.tolist()):
            w.writerow([lab] + row)
        return buf.getvalue()

    def format(self) -> str:
        width = max([len(s) for s in self.row_labels] + [1])
        cells = max([len(str(x)) for r in self.matrix.tolist() for x in r] + [1])
        lines = [f"{lab:>{width}} | " + " ".join(f"{x:>{cells}}" for x in row)
                 for lab, row in zip(self.row_labels, self.matrix.tolist())]
        lines.append(f"det = {self.det}")
        return "\n".join(lines)

    def as_dict(self) -> dict:
        return {"rows": self.row_labels, "matrix": self.matrix.tolist(), "det": self.det, **self.metadata}


def _require_pgroup(P: Group, p: int):
    if not is_p_power(P.order, p):
        raise CartanError(f"group of order {P.order} is not a {p}-group")


def cartan_pgroup(P: Group, p: int) -> CartanMatrix:
    """Entry (Q, Q') = number of double cosets Q\\P/Q' over subgroup classes sorted by (order, id)."""
    _require_pgroup(P, p)
    subs = P.all_subgroups()
    classes = sorted(P.subgroup_conjugacy_classes(), key=lambda c: (subs[c[0]].order, c[0]))
    reps = [subs[c[0]] for c in classes]
    rows = [[len(P.double_cosets(Q, R).representatives) for R in reps] for Q in reps]
    # the count does not depend on the chosen representatives
    for i, c in enumerate(classes):
        alt = subs[c[-1]]
        for j, R in enumerate(reps):
            if len(P.double_cosets(alt, R).representatives) != rows[i][j]:
                raise AssertionError("double-coset count depends on the class representative")
    labels = [f"Q{Q.canonical_id}(|{Q.order}|)" for Q in reps]
    return CartanMatrix(labels, IntMatrix(rows), {"group": P.label, "p": p, "path": "pgroup"})


def block_entries(G: Group, block: BlockIdempotent, catalog: PPermCatalog, blocks) -> list[int]:
    """Catalog indices whose module lies in the given block (sets entry.block as a side effect)."""
    if block.element.ctx != catalog.ctx or block.element.group is not G:
        raise CartanError("block and catalog disagree on group or field")
    out = []
    for i, e in enumerate(catalog.entries):
        if e.block is None:
            e.block = block_of_module(e.module, blocks)
        if e.block == block.index:
            out.append(i)
    return out


def block_catalog(G: Group, p: int, block: BlockIdempotent, seed: int = 0) -> PPermCatalog:
    """The catalog entries of one block, from the summands b.k[G/Q] over p-subgroup classes Q."""
    ctx = block.element.ctx
    subgroups = G.p_subgroup_classes(p)
    cat = PPermCatalog(G, p, ctx, subgroups)
    for Q in subgroups:
        M = perm_module(G, Q, ctx)
        basis = column_space_basis(block_action(M, block))
        if basis.cols == 0:
            continue
        for S in decompose(M.submodule(basis), seed).summands:
            if cat.find(S, seed) is None:
                cat.entries.append(CatalogEntry(S, Q.canonical_id, Q.order, block.index))
    return cat


def cartan_block(G: Group, block: BlockIdempotent, catalog: PPermCatalog, blocks) -> CartanMatrix:
    """Entry (V, W) = dim Hom(V, W) over the catalog entries lying in the block."""
    idx = block_entries(G, block, catalog, blocks)
    if not idx:
        raise CartanError(f"block {block.index} has no catalog entries")
    idx.sort(key=lambda i: (catalog.entries[i].vertex_hint, catalog.entries[i].source,
                            catalog.entries[i].module.dim, i))
    mods = [catalog.entries[i].module for i in idx]
    rows = [[hom_dim(V, W, "generic") for W in mods] for V in mods]
    labels = [f"E{i}(dim {catalog.entries[i].module.dim})" for i in idx]
    return CartanMatrix(labels, IntMatrix(rows), {"group": G.label, "p": catalog.p,
                                                  "block": block.index, "path": "block"})


@dataclass
class CriterionReport:
    group: str
    p: int
    cyclic: bool
    det: int

    @property
    def holds(self) -> bool:
        return self.cyclic == (self.det != 0)

    def as_dict(self) -> dict:
        return {"group": self.group, "p": self.p, "cyclic": self.cyclic, "det": self.det,
                "criterion_holds": self.holds}


def cyclic_criterion_report(P: Group, p: int) -> CriterionReport:
    """Nondegenerate Cartan matrix iff P is cyclic."""
    C = cartan_pgroup(P, p)
    rep = CriterionReport(P.label, p, P.is_cyclic(), C.det)
    if not rep.holds:
        raise AssertionError(f"cyclic criterion fails for {P.label}")
    return rep


def same_fingerprint(A: CartanMatrix, B: CartanMatrix) -> bool:
    """Equality up to a simultaneous row/column permutation (backtracking search)."""
    a, b = A.matrix.tolist(), B.matrix.tolist()
    n = len(a)
    if n != len(b):
        return False

    def sig(m, i):
        return (m[i][i], tuple(sorted(m[i])), tuple(sorted(r[i] for r in m)))

    sa, sb = [sig(a, i) for i in range(n)], [sig(b, i) for i in range(n)]
    if sorted(sa) != sorted(sb):
        return False
    perm: list[int] = []
    used = [False] * n

    def extend(i) -> bool:
        if i == n:
            return True
        for j in range(n):
            if used[j] or sa[i] != sb[j]:
                continue
            if all(a[i][k] == b[j][perm[k]] and a[k][i] == b[perm[k]][j] for k in range(i)):
                used[j] = True
                perm.append(j)
                if extend(i + 1):
                    return True
                perm.pop()
                used[j] = False
        return False

    return extend(0)
