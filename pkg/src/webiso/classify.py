"""Decomposition of a symmetry algebra into sl(2), n and abelian factors.

Two routes are provided and are expected to agree:

* :func:`decompose_factors` works from the structure constants alone
  (centre, derived series, centroid splitting, Chevalley triples);
* :func:`block_route` reduces the component matrix of the fields
  (:func:`webiso.linefields.block_normal_form`).

Model brackets: sl(2) = <F, H, E> with [F,H] = F, [H,E] = E, [F,E] = 2H;
n = <F, E> with [F,E] = F.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass, field, replace
from typing import Sequence

from .algebra import (
    LieAlgebraError,
    StructureConstants,
    center,
    centralizer,
    derived,
    killing_form,
    restricted_ad,
    span_basis,
)
from .linalg import RowReducer, nullspace, rank, solve
from .linefields import BlockDecomposition, ComponentMatrix, LineFieldError, block_normal_form
from .rationals import ONE, ZERO, mpq, qstr
from .symmetry import PhiError, SymmetrySolution, WebSpec, combine_fields, induced_phi

__all__ = [
    "ClassificationError",
    "structure_constants",
    "Factor",
    "FactorDecomposition",
    "decompose_factors",
    "block_route",
    "BoundReport",
    "check_theorem_bound",
    "factor_action_profile",
    "model_algebra",
]

SEED = 20240531


class ClassificationError(ValueError):
    """The algebra is not a product of the admissible factor types (or input is inconsistent)."""


def structure_constants(sol: SymmetrySolution) -> StructureConstants:
    if sol.structure is None:
        raise ClassificationError(f"bracket closure failed: {sol.closure_message}")
    sc = sol.structure
    if sc.antisymmetry_defect() is not None:
        raise ClassificationError("structure constants are not antisymmetric")
    bad = sc.jacobi_defect()
    if bad is not None:
        raise ClassificationError(f"Jacobi identity fails for basis elements {tuple(i + 1 for i in bad)}")
    return sc


@dataclass(frozen=True)
class Factor:
    kind: str  # "sl2" | "n" | "abelian"
    generators: tuple  # coefficient vectors in the solution basis
    names: tuple
    action: str | None = None  # "tangent" | "transverse"
    phis: tuple | None = None
    note: str = ""

    def to_json(self):
        out = {
            "type": self.kind,
            "generators": {nm: [qstr(x) for x in g] for nm, g in zip(self.names, self.generators)},
        }
        if self.action is not None:
            out["action"] = self.action
        if self.phis is not None:
            out["phi"] = {nm: p.to_json() for nm, p in zip(self.names, self.phis)}
        if self.note:
            out["note"] = self.note
        return out


@dataclass(frozen=True)
class FactorDecomposition:
    S: int
    N: int
    C: int
    factors: tuple
    derived_dim: int
    second_derived_dim: int
    transform: tuple = field(default=())  # rows: generators in factor order

    @property
    def m(self) -> int:
        return 3 * self.S + 2 * self.N + self.C

    @property
    def counts(self) -> tuple[int, int, int]:
        return (self.S, self.N, self.C)

    def to_json(self):
        return {
            "S": self.S,
            "N": self.N,
            "C": self.C,
            "derived_dims": [self.derived_dim, self.second_derived_dim],
            "factors": [f.to_json() for f in self.factors],
        }


def model_algebra(S: int, N: int, C: int) -> StructureConstants:
    """Structure constants of sl(2)^S x n^N x R^C in the generator order F,H,E,...,F,E,...,Z."""
    m = 3 * S + 2 * N + C
    br = {}
    for s in range(S):
        F, H, E = 3 * s, 3 * s + 1, 3 * s + 2
        br[(F, H)] = {F: 1}
        br[(H, E)] = {E: 1}
        br[(F, E)] = {H: 2}
    for j in range(N):
        F, E = 3 * S + 2 * j, 3 * S + 2 * j + 1
        br[(F, E)] = {F: 1}
    return StructureConstants.from_brackets(m, br)


def _combo(coeffs: Sequence, vecs: Sequence[Sequence], m: int) -> list:
    return [sum((c * v[u] for c, v in zip(coeffs, vecs) if c != 0), ZERO) for u in range(m)]


def _rational_eigen(mat: list[list]):
    """Rational eigenvalues (with multiplicity) of a square rational matrix, or None."""
    import sympy

    k = len(mat)
    M = sympy.Matrix(k, k, lambda i, j: sympy.Rational(int(mat[i][j].numerator), int(mat[i][j].denominator)))
    lam = sympy.Symbol("lam")
    poly = sympy.Poly(M.charpoly(lam).as_expr(), lam)
    roots = sympy.roots(poly, filter="Q")
    if sum(roots.values()) != k:
        return None
    return {mpq(int(r.p), int(r.q)): mult for r, mult in roots.items()}


def _eigenspace(mat: list[list], lam) -> list[list]:
    k = len(mat)
    shifted = [[mat[i][j] - (lam if i == j else ZERO) for j in range(k)] for i in range(k)]
    return nullspace(shifted, k)


def _split_simple_ideals(sc: StructureConstants, g2: list[list], S: int, rng: random.Random) -> list[list[list]]:
    """Split a semisimple ideal with S simple 3-dim summands using its centroid."""
    if S == 1:
        return [g2]
    d = len(g2)
    ads = [restricted_ad(sc, g2, x) for x in g2]
    # T in End(g2) commuting with every ad_x: unknowns T[a][b] at index a*d + b
    rows = []
    for A in ads:
        for i in range(d):
            for j in range(d):
                row = [ZERO] * (d * d)
                for k in range(d):
                    row[i * d + k] += A[k][j]
                    row[k * d + j] -= A[i][k]
                rows.append(row)
    cent = nullspace(rows, d * d)
    if len(cent) != S:
        raise ClassificationError(f"centroid of the semisimple part has dimension {len(cent)}, expected {S}")
    for _ in range(20):
        coeffs = [mpq(rng.randint(1, 997)) for _ in cent]
        flat = _combo(coeffs, cent, d * d)
        T = [[flat[i * d + j] for j in range(d)] for i in range(d)]
        eig = _rational_eigen(T)
        if eig is None or any(mult != 3 for mult in eig.values()):
            continue
        ideals = []
        for lam in sorted(eig):
            space = _eigenspace(T, lam)
            if len(space) != 3:
                break
            ideals.append(span_basis([_combo(v, g2, sc.m) for v in space], sc.m))
        else:
            return sorted(ideals, key=lambda I: _lead_key(I[0]))
    raise ClassificationError("could not split the semisimple part into simple ideals")


def _lead_key(v):
    for k, x in enumerate(v):
        if x != 0:
            return (k, [str(y) for y in v])
    return (len(v), [])


def _isotropic_vector(K: list[list]):
    """Nonzero rational x with x^T K x = 0 for a 3x3 symmetric form, or None.

    The form is diagonalized by congruence; a zero pivot gives an isotropic
    vector directly, otherwise the diagonal conic goes to Legendre's method.
    """
    import sympy
    from sympy.solvers.diophantine.diophantine import diop_ternary_quadratic_normal

    D = [list(r) for r in K]
    P = [[ONE if i == j else ZERO for j in range(3)] for i in range(3)]
    for i in range(3):
        if D[i][i] == 0:
            return [P[r][i] for r in range(3)]
        for j in range(i + 1, 3):
            t = D[i][j] / D[i][i]
            if t == 0:
                continue
            for r in range(3):
                P[r][j] -= t * P[r][i]
            for r in range(3):
                D[r][j] -= t * D[r][i]
            for c in range(3):
                D[j][c] -= t * D[i][c]
    d = [D[i][i] for i in range(3)]
    den = math.lcm(*(int(v.denominator) for v in d))
    coef, scale = _legendre_normal([int(v * den) for v in d])
    y = sympy.symbols("y0:3", integer=True)
    sol = diop_ternary_quadratic_normal(sum(sympy.Integer(q) * y[k] ** 2 for k, q in enumerate(coef)))
    if sol is None or sol[0] is None or all(c == 0 for c in sol):
        return None
    ys = [scale[k] * int(sol[k]) for k in range(3)]
    x = [sum((P[r][k] * ys[k] for k in range(3)), ZERO) for r in range(3)]
    if sum(x[a] * K[a][b] * x[b] for a in range(3) for b in range(3)) != 0:
        raise ClassificationError("conic solver returned a non-isotropic vector")
    return x


def _legendre_normal(coef: list[int]):
    """Squarefree, pairwise coprime ``q`` and ``scale`` with
    ``sum coef_k y_k^2 = 0  <=>  sum q_k Y_k^2 = 0`` under ``y_k = scale_k Y_k``."""
    from sympy.ntheory.factor_ import core

    coef = list(coef)
    scale = [ONE, ONE, ONE]
    while True:
        g = math.gcd(*coef)
        coef = [a // g for a in coef]
        for k, a in enumerate(coef):
            q = core(abs(a)) * (1 if a > 0 else -1)
            scale[k] /= math.isqrt(a // q)
            coef[k] = q
        for i, j, k in ((0, 1, 2), (0, 2, 1), (1, 2, 0)):
            g = math.gcd(coef[i], coef[j])
            if g > 1:
                coef[i] //= g
                coef[j] //= g
                coef[k] *= g
                scale[k] *= g
                break
        else:
            return coef, scale


def _chevalley(sc: StructureConstants, ideal: list[list]):
    """(F, H, E) in ``ideal`` with the model sl(2) brackets, or None if not split over Q."""
    m = sc.m
    K = killing_form(sc, ideal)
    x = _isotropic_vector(K)
    if x is None:
        return None
    e = _combo(x, ideal, m)
    f0 = None
    for v in ideal:
        if any(c != 0 for c in sc.bracket(e, sc.bracket(e, v))):
            f0 = v
            break
    if f0 is None:
        raise ClassificationError("isotropic element is not nilpotent of rank 2")
    h0 = sc.bracket(e, f0)
    he = sc.bracket(h0, e)
    piv = next(u for u in range(m) if e[u] != 0)
    c = he[piv] / e[piv]
    if c == 0:
        raise ClassificationError("degenerate Chevalley construction")
    h = [v * 2 / c for v in h0]
    # f with [e, f] = h and [h, f] = -2 f, f in the ideal
    cols = []
    for v in ideal:
        ev = sc.bracket(e, v)
        hv = sc.bracket(h, v)
        cols.append(ev + [a + 2 * b for a, b in zip(hv, v)])
    co = solve(cols, h + [ZERO] * m)
    if co is None:
        raise ClassificationError("no Chevalley partner found")
    f = _combo(co, ideal, m)
    F = e
    H = [-v / 2 for v in h]
    E = [-v for v in f]
    return F, H, E


def _indefinite(K: list[list]) -> bool:
    import sympy

    M = sympy.Matrix(3, 3, lambda i, j: sympy.Rational(int(K[i][j].numerator), int(K[i][j].denominator)))
    ev = M.eigenvals()
    signs = {sympy.sign(sympy.re(sympy.N(v, 30))) for v in ev}
    return 1 in signs and -1 in signs


def decompose_factors(sc: StructureConstants, values: Sequence[Sequence] | None = None, seed: int = SEED) -> FactorDecomposition:
    """Invariant route.

    ``values`` (optional, ``m x n``) are the values of the basis fields at
    the base point; when given they fix the normalizations that the
    structure constants leave open (scale of ``F`` in n factors and the
    central part of ``E``) the same way as the block route.
    """
    rng = random.Random(seed)
    m = sc.m
    allv = [sc.basis_vector(r) for r in range(m)]
    Z = center(sc)
    g1 = derived(sc, allv)
    g2 = derived(sc, g1)
    C, d1, d2 = len(Z), len(g1), len(g2)
    if d2 % 3:
        raise ClassificationError(f"second derived algebra has dimension {d2}, not a multiple of 3")
    S, N = d2 // 3, d1 - d2
    if m != 3 * S + 2 * N + C:
        raise ClassificationError(f"m = {m} but 3S + 2N + C = {3 * S + 2 * N + C} (S={S}, N={N}, C={C})")
    factors = []
    rows = []
    if S:
        if derived(sc, g2) != span_basis(g2, m):
            raise ClassificationError("second derived algebra is not perfect")
        for ideal in _split_simple_ideals(sc, g2, S, rng):
            trip = _chevalley(sc, ideal)
            if trip is None:
                K = killing_form(sc, ideal)
                if not _indefinite(K):
                    raise ClassificationError("compact 3-dimensional simple factor (not sl(2))")
                factors.append(Factor("sl2", tuple(tuple(v) for v in ideal), ("X1", "X2", "X3"), note="not split over Q"))
                rows += ideal
                continue
            factors.append(Factor("sl2", tuple(tuple(v) for v in trip), ("F", "H", "E")))
            rows += list(trip)
    if N:
        r = centralizer(sc, g2, allv)
        r1 = derived(sc, r)
        if len(r1) != N:
            raise ClassificationError(f"derived algebra of the solvable part has dimension {len(r1)}, expected {N}")
        Fs = None
        for _ in range(30):
            x = _combo([mpq(rng.randint(-999, 999)) for _ in r], r, m)
            A = restricted_ad(sc, r1, x)
            eig = _rational_eigen(A)
            if eig is None or any(mult != 1 for mult in eig.values()):
                continue
            Fs = [_combo(_eigenspace(A, lam)[0], r1, m) for lam in eig]
            break
        if Fs is None:
            raise ClassificationError("could not diagonalize the action on the derived algebra")
        Fs = [_normalize_lead(v) for v in Fs]
        Fs.sort(key=_lead_key)
        Es = []
        for j in range(N):
            cols = []
            for v in r:
                out = []
                for k in range(N):
                    out += sc.bracket(v, Fs[k])
                cols.append(out)
            target = []
            for k in range(N):
                target += [-x if k == j else ZERO for x in Fs[k]]
            co = solve(cols, target)
            if co is None:
                raise ClassificationError("no normalizing element for an n factor")
            Es.append(_combo(co, r, m))
        fix = []
        for j in range(N):
            corr = list(Es[j])
            for k in range(N):
                if k == j:
                    continue
                co = solve(Fs, sc.bracket(Es[j], Es[k]))
                if co is None:
                    raise ClassificationError("n factors do not commute")
                corr = [a - co[k] * b for a, b in zip(corr, Fs[k])]
            fix.append(corr)
        Es = fix
        if values is not None:
            Fs, Es = _normalize_n(Fs, Es, Z, values, m)
        for F, E in zip(Fs, Es):
            factors.append(Factor("n", (tuple(F), tuple(E)), ("F", "E")))
            rows += [F, E]
    if C:
        Zb = _center_basis(Z, values, m)
        factors.append(Factor("abelian", tuple(tuple(z) for z in Zb), tuple(f"Z{k + 1}" for k in range(C))))
        rows += Zb
    if rank(rows) != m:
        raise ClassificationError("factor generators do not form a basis")
    new = sc.change_basis(rows)
    model = _model_in_factor_order(factors)
    if model is not None and new.lam != model.lam:
        raise ClassificationError("factor brackets do not match the model algebras")
    return FactorDecomposition(S, N, C, tuple(factors), d1, d2, tuple(tuple(r) for r in rows))


def _model_in_factor_order(factors) -> StructureConstants | None:
    """Model brackets in factor order; None when a non-split sl(2) form leaves them unnormalized."""
    m = sum(len(f.generators) for f in factors)
    br = {}
    pos = 0
    for f in factors:
        if f.kind == "sl2":
            if f.names != ("F", "H", "E"):
                return None
            F, H, E = pos, pos + 1, pos + 2
            br[(F, H)] = {F: 1}
            br[(H, E)] = {E: 1}
            br[(F, E)] = {H: 2}
        elif f.kind == "n":
            br[(pos, pos + 1)] = {pos: 1}
        pos += len(f.generators)
    return StructureConstants.from_brackets(m, br)


def _normalize_lead(v):
    piv = next(x for x in v if x != 0)
    return [x / piv for x in v]


def _values_of(vec, values, m):
    n = len(values[0])
    return [sum((vec[r] * values[r][i] for r in range(m) if vec[r] != 0), ZERO) for i in range(n)]


def _center_basis(Z, values, m):
    if values is None:
        return [list(z) for z in Z]
    n = len(values[0])
    rr = RowReducer(n + m)
    for z in Z:
        rr.add(_values_of(z, values, m) + list(z))
    rows = rr.reduced_rows()
    if any(p >= n for p in rows):
        raise ClassificationError("a central element vanishes at the base point")
    return [rows[p][n:] for p in sorted(rows)]


def _normalize_n(Fs, Es, Z, values, m):
    """Scale F to value 1 in its first nonzero column, E to value 0 there, and reduce E modulo the centre."""
    outF, outE = [], []
    Zb = _center_basis(Z, values, m)
    zvals = [_values_of(z, values, m) for z in Zb]
    pivots = [next(k for k, x in enumerate(zv) if x != 0) for zv in zvals]
    for F, E in zip(Fs, Es):
        fv = _values_of(F, values, m)
        i = next((k for k, x in enumerate(fv) if x != 0), None)
        if i is None:
            raise ClassificationError("an n factor generator vanishes at the base point")
        F = [x / fv[i] for x in F]
        ev = _values_of(E, values, m)
        E = [a - ev[i] * b for a, b in zip(E, F)]
        for z, zv, p in zip(Zb, zvals, pivots):
            e_p = _values_of(E, values, m)[p]
            if e_p != 0:
                E = [a - e_p / zv[p] * b for a, b in zip(E, z)]
        outF.append(F)
        outE.append(E)
    return outF, outE


def block_route(sol: SymmetrySolution, sc: StructureConstants | None = None) -> BlockDecomposition:
    """Constructive reduction of the component matrix."""
    sc = sc if sc is not None else structure_constants(sol)
    M = ComponentMatrix(tuple(tuple(X.components) for X in sol.basis))
    try:
        return block_normal_form(M, sc)
    except (LineFieldError, LieAlgebraError) as exc:
        raise ClassificationError(f"block reduction failed: {exc}") from exc


@dataclass(frozen=True)
class BoundReport:
    applicable: bool
    passed: bool
    checks: tuple  # (label, instantiated, enforced, ok)

    def to_json(self):
        return {
            "applicable": self.applicable,
            "passed": self.passed,
            "checks": [{"inequality": a, "instantiated": b, "enforced": c, "holds": d} for a, b, c, d in self.checks],
        }


def check_theorem_bound(d: FactorDecomposition, n: int, parallelizable: bool) -> BoundReport:
    if parallelizable:
        return BoundReport(False, True, ())
    S, N, C = d.S, d.N, d.C
    checks = []
    tot = 3 * S + 2 * N + C
    checks.append(("3S+2N+C <= n", f"{tot} <= {n}", True, tot <= n))
    if S == 0 and N == 0:
        checks.append(("C < n", f"{C} < {n}", True, C < n))
    big = 4 * S + 2 * N + C - 1
    checks.append(("n >= 4S+2N+C-1", f"{n} >= {big}", S > 1, n >= big))
    passed = all(ok for _, _, enforced, ok in checks if enforced)
    return BoundReport(True, passed, tuple(checks))


def factor_action_profile(d: FactorDecomposition, sol: SymmetrySolution, w: WebSpec | None = None) -> FactorDecomposition:
    """Attach the induced ``phi`` of every generator and the tangent/transverse flag."""
    w = w if w is not None else sol.web
    W = w.order
    out = []
    transverse_sl2 = 0
    for f in d.factors:
        phis = []
        for g in f.generators:
            X = combine_fields(g, sol.basis)
            try:
                phis.append(induced_phi(X, w))
            except PhiError as exc:
                raise ClassificationError(f"{f.kind} generator is not a certified symmetry: {exc}") from exc
        tangent = all(p.is_zero(W - 2) for p in phis)
        action = "tangent" if tangent else "transverse"
        if f.kind == "sl2" and not tangent:
            transverse_sl2 += 1
        out.append(replace(f, action=action, phis=tuple(phis)))
    if transverse_sl2 > 1:
        raise ClassificationError(f"{transverse_sl2} sl(2) factors are transverse to the level sets of f")
    return replace(d, factors=tuple(out))
