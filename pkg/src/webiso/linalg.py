"""Exact linear algebra over the rationals (dense rows of ``mpq``)."""
from __future__ import annotations

from typing import Sequence

from .rationals import ZERO, Q, mpq

__all__ = ["RowReducer", "rref", "rank", "nullspace", "solve", "inverse", "matmul", "span_contains"]


class RowReducer:
    """Incremental Gaussian elimination.

    Rows are fed one at a time; independent rows are kept in echelon form
    keyed by pivot column with the pivot normalized to 1.
    """

    def __init__(self, ncols: int):
        self.ncols = ncols
        self.pivots: dict[int, list] = {}
        self._order: list[int] = []

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def reduce(self, row: Sequence) -> list:
        row = list(row)
        for p in self._order:
            c = row[p]
            if c != 0:
                prow = self.pivots[p]
                for j in range(p, self.ncols):
                    if prow[j] != 0:
                        row[j] -= c * prow[j]
        return row

    def add(self, row: Sequence) -> bool:
        """Insert ``row``; return True when it was independent of the rows so far."""
        if self.rank == self.ncols:
            return False
        row = self.reduce(row)
        for j, c in enumerate(row):
            if c != 0:
                inv = 1 / c
                self.pivots[j] = [ZERO] * j + [v * inv for v in row[j:]]
                self._order.append(j)
                self._order.sort()
                return True
        return False

    def reduced_rows(self) -> dict[int, list]:
        """Fully reduced echelon rows keyed by pivot."""
        rows = {p: list(r) for p, r in self.pivots.items()}
        order = sorted(rows)
        for idx in range(len(order) - 1, -1, -1):
            p = order[idx]
            for q in order[:idx]:
                c = rows[q][p]
                if c != 0:
                    rp = rows[p]
                    rq = rows[q]
                    for j in range(p, self.ncols):
                        if rp[j] != 0:
                            rq[j] -= c * rp[j]
        return rows

    def nullspace(self) -> list[list]:
        rows = self.reduced_rows()
        free = [j for j in range(self.ncols) if j not in rows]
        basis = []
        for f in free:
            v = [ZERO] * self.ncols
            v[f] = mpq(1)
            for p, r in rows.items():
                if r[f] != 0:
                    v[p] = -r[f]
            basis.append(v)
        return basis


def rref(rows: Sequence[Sequence], ncols: int | None = None) -> tuple[list[list], list[int]]:
    """Reduced row echelon form; returns (nonzero rows, pivot columns)."""
    rows = [[Q(x) for x in r] for r in rows]
    if ncols is None:
        ncols = len(rows[0]) if rows else 0
    red = RowReducer(ncols)
    for r in rows:
        red.add(r)
    full = red.reduced_rows()
    piv = sorted(full)
    return [full[p] for p in piv], piv


def rank(rows: Sequence[Sequence], ncols: int | None = None) -> int:
    return len(rref(rows, ncols)[1])


def nullspace(rows: Sequence[Sequence], ncols: int) -> list[list]:
    red = RowReducer(ncols)
    for r in rows:
        red.add([Q(x) for x in r])
    return red.nullspace()


def solve(columns: Sequence[Sequence], target: Sequence) -> list | None:
    """Coefficients ``a`` with ``sum_k a_k columns[k] = target``, or None.

    The solution with all free coordinates set to zero is returned, so the
    answer is deterministic.
    """
    k = len(columns)
    length = len(target)
    red = RowReducer(k + 1)
    for i in range(length):
        red.add([Q(col[i]) for col in columns] + [Q(target[i])])
    rows = red.reduced_rows()
    if k in rows:
        return None
    sol = [ZERO] * k
    for p, r in rows.items():
        sol[p] = r[k]
    return sol


def span_contains(vectors: Sequence[Sequence], v: Sequence) -> bool:
    return solve(vectors, v) is not None if vectors else all(x == 0 for x in v)


def matmul(a: Sequence[Sequence], b: Sequence[Sequence]) -> list[list]:
    inner = len(b)
    cols = len(b[0]) if b else 0
    out = []
    for row in a:
        out.append([sum((row[t] * b[t][j] for t in range(inner) if row[t] != 0), ZERO) for j in range(cols)])
    return out


def inverse(a: Sequence[Sequence]) -> list[list]:
    m = len(a)
    red = RowReducer(2 * m)
    for i, row in enumerate(a):
        red.add([Q(x) for x in row] + [mpq(1) if j == i else ZERO for j in range(m)])
    rows = red.reduced_rows()
    if any(p not in rows for p in range(m)) or any(p >= m for p in rows):
        raise ValueError("matrix is singular")
    return [rows[p][m:] for p in range(m)]
