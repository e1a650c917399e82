"""Finite-dimensional Lie algebras given by structure constants.

Elements are coefficient vectors (lists of rationals) with respect to the
basis ``e_1..e_m``; ``lam[r][s][u]`` is the ``e_u`` coefficient of
``[e_r, e_s]``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .linalg import RowReducer, nullspace, rank, rref, solve
from .rationals import ZERO, Q, mpq

__all__ = [
    "StructureConstants",
    "LieAlgebraError",
    "span_basis",
    "coordinates",
    "centralizer",
    "derived",
    "center",
    "restricted_ad",
    "killing_form",
]


class LieAlgebraError(ValueError):
    pass


@dataclass(frozen=True)
class StructureConstants:
    m: int
    lam: tuple  # lam[r][s] is a tuple of m rationals

    @classmethod
    def from_array(cls, lam) -> "StructureConstants":
        m = len(lam)
        return cls(m, tuple(tuple(tuple(Q(x) for x in lam[r][s]) for s in range(m)) for r in range(m)))

    @classmethod
    def from_brackets(cls, m: int, brackets: dict) -> "StructureConstants":
        """Build from a sparse table ``{(r, s): {u: coeff}}`` (0-based, r < s)."""
        lam = [[[ZERO] * m for _ in range(m)] for _ in range(m)]
        for (r, s), out in brackets.items():
            for u, c in out.items():
                lam[r][s][u] = Q(c)
                lam[s][r][u] = -Q(c)
        return cls.from_array(lam)

    def bracket(self, u: Sequence, v: Sequence) -> list:
        out = [ZERO] * self.m
        for r, ur in enumerate(u):
            if ur == 0:
                continue
            row = self.lam[r]
            for s, vs in enumerate(v):
                if vs == 0:
                    continue
                c = ur * vs
                for k, x in enumerate(row[s]):
                    if x != 0:
                        out[k] += c * x
        return out

    def basis_vector(self, r: int) -> list:
        return [mpq(1) if k == r else ZERO for k in range(self.m)]

    def antisymmetry_defect(self):
        for r in range(self.m):
            for s in range(self.m):
                for u in range(self.m):
                    if self.lam[r][s][u] != -self.lam[s][r][u]:
                        return (r, s, u)
        return None

    def jacobi_defect(self):
        """First triple (r, s, t) violating Jacobi, or None."""
        e = [self.basis_vector(r) for r in range(self.m)]
        for r in range(self.m):
            for s in range(r + 1, self.m):
                for t in range(s + 1, self.m):
                    a = self.bracket(e[r], self.bracket(e[s], e[t]))
                    b = self.bracket(e[s], self.bracket(e[t], e[r]))
                    c = self.bracket(e[t], self.bracket(e[r], e[s]))
                    if any(x + y + z != 0 for x, y, z in zip(a, b, c)):
                        return (r, s, t)
        return None

    def change_basis(self, rows: Sequence[Sequence]) -> "StructureConstants":
        """Structure constants in the basis whose elements are ``rows`` (an invertible matrix)."""
        rows = [[Q(x) for x in r] for r in rows]
        k = len(rows)
        lam = [[[ZERO] * k for _ in range(k)] for _ in range(k)]
        for a in range(k):
            for b in range(a + 1, k):
                br = self.bracket(rows[a], rows[b])
                co = solve(rows, br)
                if co is None:
                    raise LieAlgebraError("new basis does not span a subalgebra")
                lam[a][b] = co
                lam[b][a] = [-x for x in co]
        return StructureConstants.from_array(lam)

    def to_json(self):
        out = []
        for r in range(self.m):
            for s in range(r + 1, self.m):
                v = self.lam[r][s]
                if any(x != 0 for x in v):
                    out.append({"pair": [r + 1, s + 1], "bracket": {str(u + 1): str(x) for u, x in enumerate(v) if x != 0}})
        return {"m": self.m, "brackets": out}


def span_basis(vectors: Sequence[Sequence], m: int | None = None) -> list[list]:
    """Reduced echelon basis of the span (deterministic)."""
    vectors = [list(v) for v in vectors]
    if not vectors:
        return []
    rows, _ = rref(vectors, m if m is not None else len(vectors[0]))
    return rows


def coordinates(basis: Sequence[Sequence], v: Sequence) -> list | None:
    return solve(basis, v)


def centralizer(sc: StructureConstants, subset: Sequence[Sequence], within: Sequence[Sequence]) -> list[list]:
    """Basis of ``{x in span(within) : [x, s] = 0 for s in subset}``."""
    within = list(within)
    if not within:
        return []
    if not subset:
        return span_basis(within, sc.m)
    k = len(within)
    rows = []
    for s in subset:
        images = [sc.bracket(w, s) for w in within]
        for u in range(sc.m):
            rows.append([images[a][u] for a in range(k)])
    ker = nullspace(rows, k)
    vecs = [[sum((c[a] * within[a][u] for a in range(k)), ZERO) for u in range(sc.m)] for c in ker]
    return span_basis(vecs, sc.m)


def derived(sc: StructureConstants, basis: Sequence[Sequence]) -> list[list]:
    """Basis of ``[span(basis), span(basis)]``."""
    out = RowReducer(sc.m)
    for a in range(len(basis)):
        for b in range(a + 1, len(basis)):
            out.add(sc.bracket(basis[a], basis[b]))
    rows = out.reduced_rows()
    return [rows[p] for p in sorted(rows)]


def center(sc: StructureConstants) -> list[list]:
    e = [sc.basis_vector(r) for r in range(sc.m)]
    return centralizer(sc, e, e)


def restricted_ad(sc: StructureConstants, basis: Sequence[Sequence], x: Sequence) -> list[list]:
    """Matrix of ``ad_x`` on the invariant subspace ``span(basis)`` (columns = images)."""
    k = len(basis)
    mat = [[ZERO] * k for _ in range(k)]
    for b in range(k):
        co = solve(basis, sc.bracket(x, basis[b]))
        if co is None:
            raise LieAlgebraError("subspace is not ad-invariant")
        for a in range(k):
            mat[a][b] = co[a]
    return mat


def killing_form(sc: StructureConstants, basis: Sequence[Sequence]) -> list[list]:
    """Killing form of the subalgebra ``span(basis)`` in that basis."""
    ads = [restricted_ad(sc, basis, x) for x in basis]
    k = len(basis)

    def trace_prod(a, b):
        return sum((a[i][j] * b[j][i] for i in range(k) for j in range(k)), ZERO)

    return [[trace_prod(ads[a], ads[b]) for b in range(k)] for a in range(k)]


def is_independent(vectors: Sequence[Sequence]) -> bool:
    return rank(vectors) == len(vectors) if vectors else True
