"""Vector fields on a line and the reduction of the component matrix.

A field ``g(t) d/dt`` is represented by the :class:`~webiso.jets.UniJet` of
``g`` at the base point.  The component matrix of a diagonal symmetry
algebra has one such jet per (basis field, variable) pair; its column ``i``
is a homomorphic image of the algebra in the fields on the ``x_i`` line.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

from .algebra import StructureConstants, centralizer, derived, killing_form, span_basis
from .jets import UniJet, uni_reversion, uni_series_compose
from .linalg import RowReducer, nullspace, rank, solve
from .rationals import ONE, ZERO, Q, mpq, qstr

__all__ = [
    "LineField",
    "LineFieldError",
    "line_bracket",
    "line_order",
    "rectify",
    "transform_field",
    "LineAlgebraReduction",
    "reduce_line_algebra",
    "ComponentMatrix",
    "Sl2Block",
    "NBlock",
    "BlockDecomposition",
    "block_normal_form",
]

LineField = UniJet


class LineFieldError(ValueError):
    pass


def _same_frame(g: UniJet, h: UniJet):
    if g.order != h.order or g.center != h.center:
        raise LineFieldError(f"line fields differ in order/center: ({g.order}, {g.center}) vs ({h.order}, {h.center})")


def line_bracket(g: UniJet, h: UniJet) -> UniJet:
    """``[g, h] = g h' - h g'``, correct to order ``W - 1``."""
    _same_frame(g, h)
    if g.order == 0:
        raise LineFieldError("bracket of order-0 jets carries no information")
    k = g.order - 1
    return g.truncate(k) * h.derivative() - h.truncate(k) * g.derivative()


def line_order(g: UniJet):
    """Order of vanishing at the center; ``math.inf`` for a jet that is zero to its order."""
    for k, c in enumerate(g.coeffs):
        if c != 0:
            return k
    return math.inf


def rectify(g: UniJet) -> UniJet:
    """Coordinate ``y`` with ``y(center) = center`` and ``y' = 1/g``; then ``g d/dt = d/dy``.

    The result is correct to order ``W + 1``.
    """
    if g.value == 0:
        raise LineFieldError("cannot rectify a field vanishing at the base point")
    return g.reciprocal().integral(g.center)


def transform_field(h: UniJet, y: UniJet) -> UniJet:
    """Component of the field ``h d/dt`` in the coordinate ``y`` (with ``y(center) = center``)."""
    if y.value != y.center:
        raise LineFieldError("coordinate changes must fix the base point")
    yp = y.derivative()
    k = min(h.order, yp.order)
    prod = h.truncate(k) * yp.truncate(k)
    inv = uni_reversion(y.truncate(k))
    return uni_series_compose(prod, inv)


def _coeff_rows(jets: Sequence[UniJet], order: int) -> list[list]:
    return [list(j.coeffs[: order + 1]) for j in jets]


def _combine(coeffs: Sequence, jets: Sequence[UniJet]) -> UniJet:
    order, center = jets[0].order, jets[0].center
    out = [ZERO] * (order + 1)
    for a, j in zip(coeffs, jets):
        if a != 0:
            for k, c in enumerate(j.coeffs):
                out[k] += a * c
    return UniJet(order, center, tuple(out))


def _poly_jet(coeffs, order: int, center) -> UniJet:
    """Jet of ``sum_k coeffs[k] s^k`` where ``s = t - center``."""
    return UniJet.from_coeffs(coeffs, order, center)


@dataclass(frozen=True)
class LineAlgebraReduction:
    dim: int
    change: UniJet | None
    normal_basis: tuple
    c: mpq
    transformed: tuple  # the input fields written in the new coordinate

    def to_json(self):
        return {
            "dim": self.dim,
            "change": None if self.change is None else [qstr(x) for x in self.change.coeffs],
            "center": None if self.change is None else qstr(self.change.center),
            "c": qstr(self.c),
        }


def _line_structure(basis: Sequence[UniJet]) -> StructureConstants:
    k = basis[0].order - 1
    vecs = _coeff_rows([b.truncate(k) for b in basis], k)
    if rank(vecs) < len(basis):
        raise LineFieldError("basis becomes dependent after losing one order; raise the working order")
    lam = [[[ZERO] * len(basis) for _ in basis] for _ in basis]
    for a in range(len(basis)):
        for b in range(a + 1, len(basis)):
            br = line_bracket(basis[a], basis[b])
            co = solve(vecs, list(br.coeffs))
            if co is None:
                raise LineFieldError("line fields are not closed under the bracket")
            lam[a][b] = co
            lam[b][a] = [-x for x in co]
    return StructureConstants.from_array(lam)


def reduce_line_algebra(fields: Sequence[UniJet]) -> LineAlgebraReduction:
    """Dimension, rectifying coordinate and normal basis of a closed span of line fields.

    In the new coordinate ``y`` (absolute, with ``y(center) = center``) the
    span is ``{1}``, ``{1, y}`` or ``{1, y, y^2}``.  The distinguished
    generator (the field itself, the derived generator, or the nilpotent
    element with vanishing first derivative at the center) is scaled to
    agree at the center with the first input field that does not vanish there.
    """
    fields = list(fields)
    if not fields:
        return LineAlgebraReduction(0, None, (), ZERO, ())
    for g in fields[1:]:
        _same_frame(fields[0], g)
    W, b = fields[0].order, fields[0].center
    red = RowReducer(W + 1)
    basis = []
    for g in fields:
        if red.add(list(g.coeffs)):
            basis.append(g)
    dim = len(basis)
    if dim == 0:
        return LineAlgebraReduction(0, None, (), ZERO, tuple(fields))
    if dim > 3:
        raise LineFieldError(f"span of dimension {dim} > 3: not the column of a symmetry algebra")
    sc = _line_structure(basis) if dim > 1 else None
    lead = next((g for g in fields if g.value != 0), None)
    if lead is None:
        raise LineFieldError("every field vanishes at the base point (degenerate base point)")
    v = lead.value
    if dim == 1:
        F = lead
    elif dim == 2:
        F = _combine(sc.lam[0][1], basis)
        if F.value == 0:
            raise LineFieldError("derived generator vanishes at the base point")
        F = F * (v / F.value)
    else:
        F = _sl2_nilpotent(basis, sc) * v
    y = rectify(F)
    transformed = tuple(transform_field(g, y) for g in fields)
    for g in transformed:
        if any(c != 0 for c in g.coeffs[3:]):
            raise LineFieldError("field is not of degree <= 2 in the rectifying coordinate")
    k = transformed[0].order
    ident = UniJet.identity(k, b)
    normal = (UniJet.constant(1, k, b), ident, ident * ident)[:dim]
    return LineAlgebraReduction(dim, y, normal, ZERO, transformed)


def _sl2_nilpotent(jets: Sequence[UniJet], sc: StructureConstants) -> UniJet:
    """Nilpotent element of a 3-dim line algebra with value 1 and zero slope at the center."""
    m = len(jets)
    vecs = [[mpq(1) if a == b else ZERO for a in range(m)] for b in range(m)]
    coeff = _nilpotent_coefficients(sc, vecs, [[j.coeffs[0] for j in jets], [j.coeffs[1] for j in jets]])
    return _combine(coeff, jets)


def _nilpotent_coefficients(sc: StructureConstants, s_basis: Sequence[Sequence], evals: Sequence[Sequence], slope=ZERO) -> list:
    """Element ``x`` of ``span(s_basis)`` (a split 3-dim simple algebra) with ``ad_x`` nilpotent,
    ``evals[0]·x = 1`` and ``evals[1]·x = slope``; ``evals[k][a]`` is the k-th Taylor
    coefficient of basis element ``a`` in the chosen column.
    Returns coordinates of ``x`` with respect to ``s_basis``.
    """
    k = len(s_basis)
    # E0: value and slope vanish
    ker = nullspace([list(evals[0]), list(evals[1])], k)
    if len(ker) != 1:
        raise LineFieldError("degenerate column: no unique element vanishing to second order")
    e0 = ker[0]
    part = solve([[evals[0][a], evals[1][a]] for a in range(k)], [ONE, Q(slope)])
    if part is None:
        raise LineFieldError("no element with value 1 at the base point (degenerate base point)")
    kil = killing_form(sc, s_basis)

    def form(u, v):
        return sum((u[a] * kil[a][b] * v[b] for a in range(k) for b in range(k)), ZERO)

    denom = 2 * form(part, e0)
    if denom == 0:
        raise LineFieldError("Killing form degenerate on the column (not a simple algebra)")
    lam = -form(part, part) / denom
    return [part[a] + lam * e0[a] for a in range(k)]


# ---------------------------------------------------------------------------
# component matrix
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ComponentMatrix:
    """``entries[j][i]`` is the component of basis field ``j`` along ``x_{i+1}``."""

    entries: tuple

    def __post_init__(self):
        rows = tuple(tuple(r) for r in self.entries)
        if rows:
            n = len(rows[0])
            for r in rows:
                if len(r) != n:
                    raise LineFieldError("ragged component matrix")
            for i in range(n):
                c = rows[0][i].center
                o = rows[0][i].order
                for r in rows:
                    if r[i].center != c or r[i].order != o:
                        raise LineFieldError(f"column {i + 1} mixes centers or orders")
        object.__setattr__(self, "entries", rows)

    @property
    def m(self) -> int:
        return len(self.entries)

    @property
    def n(self) -> int:
        return len(self.entries[0]) if self.entries else 0

    def column(self, i: int) -> list[UniJet]:
        return [r[i] for r in self.entries]

    def combine(self, v: Sequence, i: int) -> UniJet:
        return _combine(v, self.column(i))

    def values_at_base(self) -> list[list]:
        return [[e.value for e in row] for row in self.entries]


@dataclass(frozen=True)
class Sl2Block:
    columns: tuple  # 0-based original column indices, block order
    constants: tuple
    rows: tuple  # indices of (F, H, E) in the normalized row order

    @property
    def p(self) -> int:
        return len(self.columns)


@dataclass(frozen=True)
class NBlock:
    columns: tuple
    constants: tuple
    rows: tuple  # (F, E)


@dataclass(frozen=True)
class BlockDecomposition:
    sl2_blocks: tuple
    n_blocks: tuple
    affine_rows: tuple
    constant_rows: tuple
    row_transform: tuple  # rows = new basis elements in old coordinates
    column_permutation: tuple
    changes: tuple  # per original column: coordinate change or None
    normalized: tuple  # normalized[j][i]: new row j, original column i
    zero_columns: tuple = field(default=())

    @property
    def counts(self) -> tuple[int, int, int]:
        return (len(self.sl2_blocks), len(self.n_blocks), len(self.constant_rows))

    def to_json(self):
        return {
            "S": len(self.sl2_blocks),
            "N": len(self.n_blocks),
            "C": len(self.constant_rows),
            "sl2_blocks": [
                {"columns": [c + 1 for c in b.columns], "constants": [qstr(x) for x in b.constants], "p": b.p, "rows": [r + 1 for r in b.rows]}
                for b in self.sl2_blocks
            ],
            "n_blocks": [
                {"columns": [c + 1 for c in b.columns], "constants": [qstr(x) for x in b.constants], "rows": [r + 1 for r in b.rows]}
                for b in self.n_blocks
            ],
            "affine_rows": [r + 1 for r in self.affine_rows],
            "constant_rows": [r + 1 for r in self.constant_rows],
            "row_transform": [[qstr(x) for x in row] for row in self.row_transform],
            "column_permutation": [c + 1 for c in self.column_permutation],
            "zero_columns": [c + 1 for c in self.zero_columns],
        }


class _Reducer:
    def __init__(self, M: ComponentMatrix, sc: StructureConstants):
        if sc.m != M.m:
            raise LineFieldError(f"structure constants for {sc.m} fields, matrix has {M.m} rows")
        self.M, self.sc = M, sc
        self.m, self.n = M.m, M.n
        self.changes: list = [None] * self.n
        self.used: set[int] = set()

    def proj(self, v, i) -> UniJet:
        return self.M.combine(v, i)

    def image_dim(self, R, i) -> int:
        return rank([list(self.proj(v, i).coeffs) for v in R]) if R else 0

    def kernel(self, R, i) -> list[list]:
        rows = [list(self.proj(v, i).coeffs) for v in R]
        ncoef = len(rows[0])
        mat = [[rows[a][k] for a in range(len(R))] for k in range(ncoef)]
        ker = nullspace(mat, len(R))
        vecs = [[sum((c[a] * R[a][u] for a in range(len(R))), ZERO) for u in range(self.m)] for c in ker]
        return span_basis(vecs, self.m) if vecs else []

    def rectify_column(self, F, k) -> UniJet:
        g = self.proj(F, k)
        if g.value == 0:
            raise LineFieldError(f"column {k + 1}: block generator vanishes at the base point (degenerate base point)")
        y = rectify(g)
        self.changes[k] = y
        return y

    def in_coordinate(self, v, k) -> UniJet:
        y = self.changes[k]
        g = self.proj(v, k)
        return g if y is None else transform_field(g, y)


def _expect(jet: UniJet, coeffs, what: str):
    want = UniJet.from_coeffs(coeffs, jet.order, jet.center)
    if jet != want:
        raise LineFieldError(f"{what}: expected {[qstr(c) for c in want.coeffs[:4]]}, got {[qstr(c) for c in jet.coeffs[:4]]}")


def _slopes(n: int):
    """0, 1, -1, 2, ...: each other column rules out at most one slope, so n + 1 values suffice."""
    for k in range(n + 1):
        yield mpq((k + 1) // 2 if k % 2 else -(k // 2))


def block_normal_form(M: ComponentMatrix, sc: StructureConstants) -> BlockDecomposition:
    """Row operations, coordinate changes and a column permutation bringing ``M``
    to the block shape: sl(2) blocks with rows ``(1, s+c_k, (s+c_k)^2)``,
    then n blocks with rows ``(1, s+c_k)`` followed by constants, then
    constant rows.  ``s = y_k - b_k`` is the shifted rectified coordinate.

    Columns are treated in increasing order; a block starts at the first
    unused column whose image has the required dimension, and its constant
    there is 0.
    """
    red = _Reducer(M, sc)
    m, n = red.m, red.n
    R = [sc.basis_vector(r) for r in range(m)]
    sl2_raw, n_raw = [], []

    while True:
        dims = {i: red.image_dim(R, i) for i in range(n) if i not in red.used}
        if any(d > 3 for d in dims.values()):
            raise LineFieldError("a column carries a line algebra of dimension > 3")
        i = next((i for i in sorted(dims) if dims[i] == 3), None)
        if i is None:
            break
        K = red.kernel(R, i)
        C = centralizer(sc, K, R)
        s = derived(sc, C)
        if len(s) != 3:
            raise LineFieldError(f"column {i + 1}: no 3-dimensional simple factor found")
        evals = [[red.proj(v, i).coeffs[k] for v in s] for k in (0, 1)]
        # zero slope in column i unless that F vanishes at the base in another column
        for slope in _slopes(n):
            co = _nilpotent_coefficients(sc, s, evals, slope)
            F = [sum((co[a] * s[a][u] for a in range(3)), ZERO) for u in range(m)]
            cols = [k for k in range(n) if k not in red.used and not red.proj(F, k).is_zero()]
            if all(red.proj(F, k).value != 0 for k in cols):
                break
        else:
            raise LineFieldError(f"column {i + 1}: every tried sl(2) generator vanishes at the base point in some column")
        e0 = nullspace(evals, 3)[0]
        E0 = [sum((e0[a] * s[a][u] for a in range(3)), ZERO) for u in range(m)]
        H1 = sc.bracket(F, E0)
        mu_vec = sc.bracket(H1, E0)
        piv = next(u for u in range(m) if E0[u] != 0)
        mu = mu_vec[piv] / E0[piv]
        if mu == 0:
            raise LineFieldError(f"column {i + 1}: degenerate sl(2) triple")
        E = [x * 2 / mu for x in E0]
        H = [x / mu for x in H1]
        for k in cols:
            red.rectify_column(F, k)
        # shift so that the constant of column i is 0: conjugation by exp(c ad F)
        c0 = red.in_coordinate(H, i).coeffs[0]
        if c0 != 0:
            E = [e - 2 * c0 * h + c0 * c0 * f for e, h, f in zip(E, H, F)]
            H = [h - c0 * f for h, f in zip(H, F)]
        consts = {}
        for k in cols:
            h = red.in_coordinate(H, k)
            c = h.coeffs[0]
            _expect(red.in_coordinate(F, k), [1], f"column {k + 1}, sl(2) generator F")
            _expect(h, [c, 1], f"column {k + 1}, sl(2) generator H")
            _expect(red.in_coordinate(E, k), [c * c, 2 * c, 1], f"column {k + 1}, sl(2) generator E")
            consts[k] = c
        red.used.update(cols)
        sl2_raw.append((cols, consts, (F, H, E)))
        R = K

    while True:
        dims = {i: red.image_dim(R, i) for i in range(n) if i not in red.used}
        if any(d > 2 for d in dims.values()):
            raise LineFieldError("a column carries a 3-dimensional algebra outside the sl(2) blocks")
        i = next((i for i in sorted(dims) if dims[i] == 2), None)
        if i is None:
            break
        K = red.kernel(R, i)
        C = centralizer(sc, K, R)
        d = derived(sc, C)
        if len(d) != 1:
            raise LineFieldError(f"column {i + 1}: derived algebra of the factor is not 1-dimensional")
        F = d[0]
        fv = red.proj(F, i).value
        if fv == 0:
            raise LineFieldError(f"column {i + 1}: factor generator vanishes at the base point (degenerate base point)")
        F = [x / fv for x in F]
        # E in span(C) with [F, E] = F and value 0 in column i
        kc = len(C)
        brs = [sc.bracket(F, c) for c in C]
        vals = [red.proj(c, i).value for c in C]
        columns = [brs[a] + [vals[a]] for a in range(kc)]
        co = solve(columns, F + [ZERO])
        if co is None:
            raise LineFieldError(f"column {i + 1}: no normalizing element for the n factor")
        E = [sum((co[a] * C[a][u] for a in range(kc)), ZERO) for u in range(m)]
        cols = [k for k in range(n) if k not in red.used and not red.proj(F, k).is_zero()]
        consts = {}
        for k in cols:
            red.rectify_column(F, k)
            e = red.in_coordinate(E, k)
            c = e.coeffs[0]
            _expect(red.in_coordinate(F, k), [1], f"column {k + 1}, n generator F")
            _expect(e, [c, 1], f"column {k + 1}, n generator E")
            consts[k] = c
        red.used.update(cols)
        n_raw.append((cols, consts, [F, E]))
        R = K

    # remaining rows: abelian and central; basis with echelon values at the base point
    if R:
        vals = [[red.proj(v, k).value for k in range(n)] for v in R]
        rr = RowReducer(n + m)
        for v, val in zip(R, vals):
            rr.add(val + list(v))
        rows = rr.reduced_rows()
        if any(p >= n for p in rows):
            raise LineFieldError("a central element vanishes at the base point (parallelizable web or degenerate base point)")
        R = [rows[p][n:] for p in sorted(rows)]
    # canonical E: no component along the centre at the centre's pivot columns
    if R:
        zvals = [[red.proj(z, k).value for k in range(n)] for z in R]
        pivots = [next(k for k in range(n) if zv[k] != 0) for zv in zvals]
        for blk in n_raw:
            E = blk[2][1]
            for z, zv, p in zip(R, zvals, pivots):
                ev = red.proj(E, p).value
                if ev != 0:
                    E = [a - ev / zv[p] * b for a, b in zip(E, z)]
            blk[2][1] = E

    new_rows: list[list] = []
    sl2_blocks, n_blocks = [], []
    for cols, consts, (F, H, E) in sl2_raw:
        base = len(new_rows)
        new_rows += [F, H, E]
        order = _distinct_first(cols, consts)
        sl2_blocks.append(Sl2Block(tuple(order), tuple(consts[k] for k in order), (base, base + 1, base + 2)))
    affine = []
    for cols, consts, (F, E) in n_raw:
        base = len(new_rows)
        new_rows += [F, E]
        affine += [base, base + 1]
        n_blocks.append(NBlock(tuple(cols), tuple(consts[k] for k in cols), (base, base + 1)))
    constant_rows = list(range(len(new_rows), len(new_rows) + len(R)))
    new_rows += R
    if len(new_rows) != m or rank(new_rows) != m:
        raise LineFieldError("normalized rows do not form a basis")

    # remaining columns: rectify by the first row that is nonzero at the base point
    rest = [k for k in range(n) if k not in red.used]
    zero_cols = []
    for k in rest:
        entries = [red.proj(v, k) for v in new_rows]
        if all(e.is_zero() for e in entries):
            zero_cols.append(k)
            continue
        lead = next((e for e in entries if e.value != 0), None)
        if lead is None:
            raise LineFieldError(f"column {k + 1}: all fields vanish at the base point (degenerate base point)")
        y = rectify(lead * (1 / lead.value))
        red.changes[k] = y

    normalized = tuple(tuple(red.in_coordinate(v, k) for k in range(n)) for v in new_rows)
    block_cols = set()
    for blk in sl2_blocks:
        F, H, E = blk.rows
        for k in range(n):
            if k in blk.columns:
                c = blk.constants[blk.columns.index(k)]
                _expect(normalized[F][k], [1], f"row {F + 1}, column {k + 1}")
                _expect(normalized[H][k], [c, 1], f"row {H + 1}, column {k + 1}")
                _expect(normalized[E][k], [c * c, 2 * c, 1], f"row {E + 1}, column {k + 1}")
            else:
                for r in blk.rows:
                    _expect(normalized[r][k], [], f"row {r + 1}, column {k + 1}")
        block_cols.update(blk.columns)
    for blk in n_blocks:
        F, E = blk.rows
        for k in range(n):
            if k in blk.columns:
                c = blk.constants[blk.columns.index(k)]
                _expect(normalized[F][k], [1], f"row {F + 1}, column {k + 1}")
                _expect(normalized[E][k], [c, 1], f"row {E + 1}, column {k + 1}")
            elif k in block_cols or any(k in b.columns for b in n_blocks):
                _expect(normalized[F][k], [], f"row {F + 1}, column {k + 1}")
                _expect(normalized[E][k], [], f"row {E + 1}, column {k + 1}")
            else:
                _expect(normalized[F][k], [], f"row {F + 1}, column {k + 1}")
                _expect(normalized[E][k], [normalized[E][k].value], f"row {E + 1}, column {k + 1}")
    all_block_cols = block_cols | {k for b in n_blocks for k in b.columns}
    for r in constant_rows:
        for k in range(n):
            if k in all_block_cols:
                _expect(normalized[r][k], [], f"row {r + 1}, column {k + 1}")
            else:
                _expect(normalized[r][k], [normalized[r][k].value], f"row {r + 1}, column {k + 1}")
    for blk in sl2_blocks:
        if blk.p < 3 or len(set(blk.constants[:3])) < 3:
            raise LineFieldError("sl(2) block without three distinct constants: evaluation matrix is rank deficient")

    perm = [k for b in sl2_blocks for k in b.columns] + [k for b in n_blocks for k in b.columns]
    perm += [k for k in rest if k not in zero_cols] + zero_cols
    return BlockDecomposition(
        sl2_blocks=tuple(sl2_blocks),
        n_blocks=tuple(n_blocks),
        affine_rows=tuple(affine),
        constant_rows=tuple(constant_rows),
        row_transform=tuple(tuple(r) for r in new_rows),
        column_permutation=tuple(perm),
        changes=tuple(red.changes),
        normalized=normalized,
        zero_columns=tuple(zero_cols),
    )


def _distinct_first(cols: Sequence[int], consts: dict) -> list[int]:
    """Block column order: the leading column, then columns with new constants first."""
    first, seen, later = [], set(), []
    for k in cols:
        if consts[k] not in seen and len(first) < 3:
            first.append(k)
            seen.add(consts[k])
        else:
            later.append(k)
    return first + later
