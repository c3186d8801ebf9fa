"""Integer matrices with exact (fraction-free) determinants."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class IntMatrix:
    entries: tuple[tuple[int, ...], ...]

    def __init__(self, entries):
        rows = tuple(tuple(int(x) for x in row) for row in entries)
        if rows and len({len(r) for r in rows}) != 1:
            raise ValueError("ragged integer matrix")
        object.__setattr__(self, "entries", rows)

    @property
    def rows(self) -> int:
        return len(self.entries)

    @property
    def cols(self) -> int:
        return len(self.entries[0]) if self.entries else 0

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def tolist(self) -> list[list[int]]:
        return [list(r) for r in self.entries]

    def is_symmetric(self) -> bool:
        return all(self.entries[i][j] == self.entries[j][i]
                   for i in range(self.rows) for j in range(i))

    def permuted(self, perm) -> "IntMatrix":
        """Simultaneous row/column relabelling: new[i][j] = old[perm[i]][perm[j]]."""
        return IntMatrix([[self.entries[a][b] for b in perm] for a in perm])

    def det(self) -> int:
        return int_det(self)


def int_det(m) -> int:
    """Bareiss fraction-free elimination; exact for arbitrary-size integers."""
    a = [list(r) for r in (m.entries if isinstance(m, IntMatrix) else m)]
    n = len(a)
    if any(len(r) != n for r in a):
        raise ValueError("determinant of a non-square matrix")
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        akk = a[k][k]
        for i in range(k + 1, n):
            aik = a[i][k]
            row_i, row_k = a[i], a[k]
            for j in range(k + 1, n):
                row_i[j] = (row_i[j] * akk - aik * row_k[j]) // prev
            row_i[k] = 0
        prev = akk
    return sign * a[n - 1][n - 1]
