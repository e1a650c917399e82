"""Infinitesimal isomorphisms of an (n+1)-web ``(x_1, ..., x_n, f)``.

A diagonal field ``X = sum_i X_i(x_i) d/dx_i`` preserves the web exactly
when ``X f`` is a function of ``f``.  Writing ``r_j = f_j / f_1`` and
``L_j u = u_j - r_j u_1``, that is equivalent to ``L_j(X f) = 0`` for
``j = 2..n`` near a point where ``f_1 != 0``, and

    L_j(X f) = (X_j' - X_1') f_j + sum_k X_k G_jk,
    G_jk = f_jk - r_j f_1k,

which is linear in the unknown Taylor coefficients of the ``X_k``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Sequence

from .algebra import StructureConstants
from .expr import (
    Expression,
    ExpressionError,
    degree_profile,
    expand_scaled,
    expression_from_json,
    parse_expression,
    to_text,
)
from .jets import JetError, MultiJet, UniJet, grlex_key, jet_partial, uni_compose, uni_reversion, uni_series_compose
from .linalg import RowReducer, rank, rref, solve
from .linefields import line_bracket
from .rationals import ZERO, Q, mpq, qstr

__all__ = [
    "WebError",
    "WebSpec",
    "ValidationReport",
    "validate_web",
    "DiagonalField",
    "apply_field",
    "SymmetryCertificate",
    "is_symmetry",
    "exactness_order",
    "PhiResult",
    "PhiError",
    "induced_phi",
    "SymmetrySolution",
    "solve_symmetries",
    "orbit_rank",
    "ParallelizabilityVerdict",
    "parallelizability_test",
]

EXACT_ORDER_CAP = 20


class WebError(ValueError):
    """The data do not define a web at the base point."""


@dataclass(frozen=True)
class WebSpec:
    n: int
    f: Expression
    base: tuple
    order: int = 8

    def __post_init__(self):
        if self.n < 2:
            raise WebError("a web needs n >= 2 coordinates")
        base = tuple(Q(b) for b in self.base)
        if len(base) != self.n:
            raise WebError(f"base point has {len(base)} coordinates, expected {self.n}")
        if self.order < 2:
            raise WebError("working order must be at least 2")
        object.__setattr__(self, "base", base)

    @classmethod
    def from_text(cls, text: str, n: int, base: Sequence, order: int = 8) -> "WebSpec":
        return cls(n, parse_expression(text, n), tuple(Q(b) for b in base), order)

    @classmethod
    def from_json(cls, doc: dict, order: int | None = None) -> "WebSpec":
        try:
            n = int(doc["n"])
            f = doc["f"]
            base = doc.get("base", ["0"] * n)
        except (KeyError, TypeError, ValueError) as exc:
            raise WebError(f"malformed web document: {exc}") from exc
        e = parse_expression(f, n) if isinstance(f, str) else expression_from_json(f, n)
        W = order if order is not None else int(doc.get("order", 8))
        return cls(n, e, tuple(Q(str(b)) for b in base), W)

    def to_json(self) -> dict:
        return {"n": self.n, "f": to_text(self.f), "base": [qstr(b) for b in self.base], "order": self.order}

    def with_order(self, order: int) -> "WebSpec":
        return WebSpec(self.n, self.f, self.base, order)

    def expansion(self, order: int) -> tuple:
        """``(q, jet)`` with ``f = exp(q) * jet`` near the base point."""
        return expand_scaled(self.f, self.base, order)

    @cached_property
    def scaled_jet(self) -> tuple:
        return self.expansion(self.order)

    @property
    def f_jet(self) -> MultiJet:
        """Order-W jet of ``f`` (divided by its transcendental unit, if any)."""
        return self.scaled_jet[1]

    @property
    def unit(self) -> mpq:
        return self.scaled_jet[0]


@dataclass(frozen=True)
class ValidationReport:
    valid: bool
    partials: tuple
    value: mpq | None
    unit: mpq
    vanishing: tuple
    message: str

    def to_json(self):
        return {
            "valid": self.valid,
            "partials": [qstr(p) for p in self.partials],
            "value": None if self.value is None else qstr(self.value),
            "unit_exponent": qstr(self.unit),
            "vanishing_partials": [i for i in self.vanishing],
            "message": self.message,
        }


def validate_web(w: WebSpec) -> ValidationReport:
    """Check that ``f`` expands at the base point and that every ``f_i`` is nonzero there."""
    try:
        q, jet = w.scaled_jet
    except (ExpressionError, JetError) as exc:
        return ValidationReport(False, (), None, ZERO, (), f"expansion failed: {exc}")
    partials = []
    for i in range(1, w.n + 1):
        e = [0] * w.n
        e[i - 1] = 1
        partials.append(jet.coefficient(e))
    vanishing = tuple(i + 1 for i, p in enumerate(partials) if p == 0)
    if vanishing:
        names = ", ".join(f"df/dx{i}" for i in vanishing)
        msg = f"not a web at the base point: {names} vanish(es)"
    else:
        msg = "ok"
    return ValidationReport(not vanishing, tuple(partials), jet.constant_term, q, vanishing, msg)


def require_valid(w: WebSpec) -> ValidationReport:
    rep = validate_web(w)
    if not rep.valid:
        raise WebError(rep.message)
    return rep


# ---------------------------------------------------------------------------
# diagonal fields
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DiagonalField:
    """``X = sum_i X_i(x_i) d/dx_i``; ``components[i]`` is the jet of ``X_{i+1}`` at ``base_{i+1}``.

    Components are read as the polynomials their truncations define, so a
    field may be padded to a higher order.
    """

    components: tuple

    def __post_init__(self):
        comps = tuple(self.components)
        if not comps:
            raise ValueError("a diagonal field needs at least one component")
        order = comps[0].order
        for c in comps:
            if not isinstance(c, UniJet):
                raise TypeError("components must be UniJets")
            if c.order != order:
                raise ValueError("components of a diagonal field must share one order")
        object.__setattr__(self, "components", comps)

    @property
    def n(self) -> int:
        return len(self.components)

    @property
    def order(self) -> int:
        return self.components[0].order

    @property
    def base(self) -> tuple:
        return tuple(c.center for c in self.components)

    @classmethod
    def from_polynomials(cls, polys: Sequence[Sequence], base: Sequence, order: int) -> "DiagonalField":
        """Components given as coefficient lists in the absolute variables ``x_i``."""
        return cls(tuple(UniJet.from_polynomial([Q(c) for c in p], order, b) for p, b in zip(polys, base)))

    @classmethod
    def from_shifted(cls, coeffs: Sequence[Sequence], base: Sequence, order: int) -> "DiagonalField":
        """Components given as coefficient lists in ``t_i = x_i - base_i``."""
        return cls(tuple(UniJet.from_coeffs([Q(c) for c in p], order, b) for p, b in zip(coeffs, base)))

    @classmethod
    def from_expressions(cls, texts: Sequence[str], base: Sequence, order: int) -> "DiagonalField":
        """Components given as expressions, the ``i``-th in the single variable ``x_i``."""
        n = len(texts)
        comps = []
        for i, text in enumerate(texts):
            e = parse_expression(text, n) if isinstance(text, str) else text
            q, jet = expand_scaled(e, base, order)
            if q != 0:
                raise ExpressionError("field components must be rational at the base point")
            for alpha in jet.coeffs:
                if any(a for k, a in enumerate(alpha) if k != i):
                    raise ExpressionError(f"component {i + 1} depends on a variable other than x{i + 1}")
            comps.append(jet.restrict_to_axis(i + 1))
        return cls(tuple(comps))

    def padded(self, order: int) -> "DiagonalField":
        if order <= self.order:
            return self.truncate(order)
        return DiagonalField(tuple(UniJet.from_coeffs(c.coeffs, order, c.center) for c in self.components))

    def truncate(self, order: int) -> "DiagonalField":
        return DiagonalField(tuple(c.truncate(order) for c in self.components))

    def values(self) -> list:
        return [c.value for c in self.components]

    def degree(self) -> int:
        return max(c.degree() for c in self.components)

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.components)

    def __add__(self, other: "DiagonalField") -> "DiagonalField":
        return DiagonalField(tuple(a + b for a, b in zip(self.components, other.components)))

    def __sub__(self, other: "DiagonalField") -> "DiagonalField":
        return DiagonalField(tuple(a - b for a, b in zip(self.components, other.components)))

    def scale(self, q) -> "DiagonalField":
        return DiagonalField(tuple(c * Q(q) for c in self.components))

    def bracket(self, other: "DiagonalField") -> "DiagonalField":
        """Componentwise bracket, correct to order ``W - 1``."""
        return DiagonalField(tuple(line_bracket(a, b) for a, b in zip(self.components, other.components)))

    def vector(self, order: int | None = None) -> list:
        """Coefficients ordered by degree first, then variable."""
        k = self.order if order is None else order
        return [self.components[i].coeffs[e] for e in range(k + 1) for i in range(self.n)]

    def to_json(self):
        return {"components": [[qstr(c) for c in comp.coeffs] for comp in self.components], "variables": "shifted"}


def combine_fields(coeffs: Sequence, fields: Sequence[DiagonalField]) -> DiagonalField:
    out = None
    for a, X in zip(coeffs, fields):
        if a == 0:
            continue
        term = X.scale(a)
        out = term if out is None else out + term
    if out is None:
        out = fields[0].scale(0)
    return out


def apply_field(X: DiagonalField, a: MultiJet) -> MultiJet:
    """``sum_i X_i * d a / d x_i`` at order ``W - 1``."""
    if X.n != a.n:
        raise JetError(f"field has {X.n} components, jet has {a.n} variables")
    if X.base != a.base:
        raise JetError("field and jet are based at different points")
    W = a.order - 1
    if X.order < W:
        raise JetError(f"field components of order {X.order} < {W}")
    acc = MultiJet.zero(a.n, W, a.base)
    for i, comp in enumerate(X.components):
        d = jet_partial(a, i + 1)
        if d.is_zero() or comp.is_zero():
            continue
        acc = acc + _times_univariate(d, comp, i + 1)
    return acc


def _times_univariate(a: MultiJet, g: UniJet, i: int) -> MultiJet:
    """``a * g(t_i)`` at the order of ``a``."""
    out: dict = {}
    W = a.order
    for e, c in enumerate(g.coeffs[: W + 1]):
        if c == 0:
            continue
        for alpha, v in a.coeffs.items():
            if sum(alpha) + e > W:
                continue
            beta = list(alpha)
            beta[i - 1] += e
            beta = tuple(beta)
            out[beta] = out.get(beta, ZERO) + v * c
    return MultiJet._raw(a.n, W, a.base, {k: v for k, v in out.items() if v != 0})


# ---------------------------------------------------------------------------
# certificates
# ---------------------------------------------------------------------------


def exactness_order(f: Expression, field_degree: int) -> int | None:
    """Working order from which a vanishing residual proves an exact symmetry.

    For ``f = exp(L) P/Q`` with degrees ``(d1, d2, l)`` the residual
    ``f_1 * L_j(X f)`` equals ``exp(2L) R / Q^5`` with
    ``deg R <= e + 2 d1 + 3 (d2 + l - 1)``, ``e`` the field degree.
    A polynomial whose Taylor expansion vanishes to its degree is zero.
    """
    prof = degree_profile(f)
    if prof is None:
        return None
    d1, d2, ell = prof
    inc = d2 + ell - 1
    bound = max(field_degree + 2 * d1 + 3 * inc, 0)
    return bound + 2


@dataclass(frozen=True)
class SymmetryCertificate:
    is_symmetry: bool
    order_checked: int
    exact: bool
    exact_from_order: int | None
    failure: tuple | None  # (pair, exponent vector, residual coefficient)

    def to_json(self):
        fail = None
        if self.failure is not None:
            pair, alpha, val = self.failure
            fail = {"pair": list(pair), "monomial": list(alpha), "residual": qstr(val)}
        return {
            "is_symmetry": self.is_symmetry,
            "order_checked": self.order_checked,
            "exact": self.exact,
            "exact_from_order": self.exact_from_order,
            "first_failure": fail,
        }


@lru_cache(maxsize=16)
def _pivot_ratios(fj: MultiJet) -> tuple:
    """``(f_j / f_1, f_j)`` at order ``W - 2`` for ``j = 1..n`` (the first ratio is 1)."""
    W = fj.order
    inv1 = (jet_partial(fj, 1) ** -1).truncate(W - 2)
    out = []
    for j in range(1, fj.n + 1):
        dj = jet_partial(fj, j).truncate(W - 2)
        out.append((dj * inv1, dj))
    return tuple(out)


def residuals(X: DiagonalField, fj: MultiJet) -> list[MultiJet]:
    """``L_j(X f)`` for ``j = 2..n`` at order ``W - 2`` (``W`` the order of ``fj``)."""
    W = fj.order
    Xf = apply_field(X.padded(W - 1), fj)
    d1X = jet_partial(Xf, 1)
    ratios = _pivot_ratios(fj)
    return [jet_partial(Xf, j) - ratios[j - 1][0] * d1X for j in range(2, fj.n + 1)]


def is_symmetry(X: DiagonalField, w: WebSpec, exact: bool = True) -> SymmetryCertificate:
    """Check ``d(Xf) ^ df = 0`` through the pivot residuals ``L_j(X f)``.

    With ``exact`` set and ``f`` of the form ``exp(L) P/Q`` the order is
    raised (up to :data:`EXACT_ORDER_CAP`) so that the check is a proof for
    the polynomial field ``X``.
    """
    need = exactness_order(w.f, X.degree()) if exact else None
    W = w.order
    if need is not None and need > W and need <= EXACT_ORDER_CAP:
        W = need
    fj = w.f_jet if W == w.order else w.expansion(W)[1]
    if X.base != fj.base:
        raise JetError("field and web are based at different points")
    for j, res in enumerate(residuals(X, fj), start=2):
        if not res.is_zero():
            alpha = min(res.coeffs, key=grlex_key)
            return SymmetryCertificate(False, W - 2, need is not None and W >= need, need, ((1, j), alpha, res.coeffs[alpha]))
    return SymmetryCertificate(True, W - 2, need is not None and W >= need, need, None)


class PhiError(ValueError):
    pass


@dataclass(frozen=True)
class PhiResult:
    """``phi`` with ``X f~ = phi(f~)`` where ``f = exp(unit) f~``; centered at ``f~(base)``."""

    phi: UniJet
    unit: mpq

    def is_zero(self, order: int | None = None) -> bool:
        p = self.phi if order is None else self.phi.truncate(min(order, self.phi.order))
        return p.is_zero()

    def to_json(self):
        return {"center": qstr(self.phi.center), "coefficients": [qstr(c) for c in self.phi.coeffs], "unit_exponent": qstr(self.unit)}


def induced_phi(X: DiagonalField, w: WebSpec) -> PhiResult:
    """Restrict to the ``x_1`` axis, where ``f`` is invertible, and read ``phi`` off there."""
    fj = w.f_jet
    W = fj.order
    Xf = apply_field(X.padded(W - 1), fj)
    fc = fj.restrict_to_axis(1).truncate(W - 1)
    xc = Xf.restrict_to_axis(1)
    phi = uni_series_compose(xc, uni_reversion(fc))
    check = uni_compose(phi, fj.truncate(W - 1)).truncate(W - 2)
    if check != Xf.truncate(W - 2):
        raise PhiError("X f is not a function of f to the working order")
    return PhiResult(phi, w.unit)


# ---------------------------------------------------------------------------
# solver
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SymmetrySolution:
    web: WebSpec
    degree_cap: int
    basis: tuple
    dims_by_order: tuple
    orders: tuple
    stabilized: bool
    closure_order: int
    structure: StructureConstants | None
    closure_message: str = "ok"
    timings: dict = field(default_factory=dict, compare=False)

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def W(self) -> int:
        return self.web.order

    @property
    def closed(self) -> bool:
        return self.structure is not None

    def value_matrix(self) -> list[list]:
        return [X.values() for X in self.basis]

    def to_json(self):
        return {
            "dim": self.dim,
            "dims_by_order": [{"order": k, "dim": d} for k, d in zip(self.orders, self.dims_by_order)],
            "stabilized": self.stabilized,
            "degree_cap": self.degree_cap,
            "closure": {"order": self.closure_order, "closed": self.closed, "message": self.closure_message},
            "basis": [X.to_json()["components"] for X in self.basis],
        }


def _equation_jets(fj: MultiJet):
    """``f_j`` (at order W-2) and ``G_jk`` for j = 2..n, k = 1..n."""
    n = fj.n
    d = [jet_partial(fj, i) for i in range(1, n + 1)]  # order W-1
    dd = [[jet_partial(d[j], k + 1) for k in range(n)] for j in range(n)]  # order W-2
    ratios = _pivot_ratios(fj)
    dT = [dj for _, dj in ratios]
    G = {}
    for j in range(1, n):
        r = ratios[j][0]
        for k in range(n):
            G[(j, k)] = dd[j][k] - r * dd[0][k]
    return dT, G


def solve_symmetries(w: WebSpec, degree_cap: int | None = None) -> SymmetrySolution:
    """Linear system for the Taylor coefficients of the components, to order ``W - 2``.

    ``dims_by_order[k]`` is the dimension of the space of ``(k+1)``-jets of
    components compatible with the equations of order ``<= k``; each entry
    bounds the dimension of the true symmetry algebra from above.
    """
    import time

    t0 = time.perf_counter()
    require_valid(w)
    n, W = w.n, w.order
    D = W - 1 if degree_cap is None else degree_cap
    if not 0 <= D <= W - 1:
        raise ValueError(f"degree cap must lie in 0..{W - 1}")
    fj = w.f_jet
    dT, G = _equation_jets(fj)
    ncols = n * (D + 1)

    def col(k, e):
        return e * n + k

    rows: dict = {}
    for k in range(n):
        for e in range(D + 1):
            c = col(k, e)
            for j in range(1, n):
                parts = [G[(j, k)].shift_monomial(k + 1, e)]
                if e >= 1 and k == j:
                    parts.append(dT[j].shift_monomial(j + 1, e - 1, mpq(e)))
                if e >= 1 and k == 0:
                    parts.append(dT[j].shift_monomial(1, e - 1, mpq(-e)))
                for part in parts:
                    for alpha, v in part.coeffs.items():
                        key = (sum(alpha), j, alpha)
                        row = rows.get(key)
                        if row is None:
                            row = rows[key] = {}
                        row[c] = row.get(c, ZERO) + v
    t1 = time.perf_counter()
    red = RowReducer(ncols)
    by_order: dict[int, list] = {}
    for key in sorted(rows, key=lambda k: (k[0], k[1], grlex_key(k[2]))):
        by_order.setdefault(key[0], []).append(rows[key])
    dims, orders = [], []
    first = min(3, W - 2)
    for k in range(W - 1):
        for row in by_order.get(k, []):
            dense = [ZERO] * ncols
            for c, v in row.items():
                dense[c] = v
            red.add(dense)
        if k >= first:
            orders.append(k)
            dims.append(n * (min(D, k + 1) + 1) - red.rank)
    t2 = time.perf_counter()
    null = red.nullspace()
    basis_vecs = rref(null, ncols)[0] if null else []
    basis = tuple(
        DiagonalField(tuple(UniJet(D, w.base[k], tuple(v[col(k, e)] for e in range(D + 1))) for k in range(n))) for v in basis_vecs
    )
    stabilized = len(dims) >= 3 and dims[-1] == dims[-2] == dims[-3]
    closure_order = max(min(D - 1, W - 3), 0)
    sc, msg = _structure(basis, closure_order)
    t3 = time.perf_counter()
    return SymmetrySolution(
        web=w,
        degree_cap=D,
        basis=basis,
        dims_by_order=tuple(dims),
        orders=tuple(orders),
        stabilized=stabilized,
        closure_order=closure_order,
        structure=sc,
        closure_message=msg,
        timings={"assemble": t1 - t0, "eliminate": t2 - t1, "basis_and_closure": t3 - t2},
    )


def _structure(basis: Sequence[DiagonalField], order: int):
    """Structure constants of ``basis`` from brackets compared at ``order``."""
    m = len(basis)
    if m == 0:
        return StructureConstants.from_array([]), "empty basis"
    if basis[0].order < 1:
        return None, "components of order 0 carry no bracket information"
    vecs = [X.truncate(order).vector() for X in basis]
    if rank(vecs) < m:
        return None, f"basis elements become dependent at order {order}; raise the working order"
    lam = [[[ZERO] * m for _ in range(m)] for _ in range(m)]
    for a in range(m):
        for b in range(a + 1, m):
            br = basis[a].bracket(basis[b]).truncate(order)
            co = solve(vecs, br.vector())
            if co is None:
                return None, f"bracket of basis elements {a + 1} and {b + 1} leaves the span at order {order}"
            lam[a][b] = co
            lam[b][a] = [-x for x in co]
    return StructureConstants.from_array(lam), "ok"


def orbit_rank(sol_or_fields) -> int:
    """Rank of the matrix of component values at the base point."""
    fields = sol_or_fields.basis if isinstance(sol_or_fields, SymmetrySolution) else sol_or_fields
    if not fields:
        return 0
    return rank([X.values() for X in fields])


@dataclass(frozen=True)
class ParallelizabilityVerdict:
    verdict: str  # "parallelizable" | "not parallelizable" | "inconsistent"
    branch_symmetry: bool
    branch_normal_form: bool
    order: int
    kernel_dim: int
    normal_form_linear_to_order: int
    normal_form_order: int

    def to_json(self):
        return {
            "verdict": self.verdict,
            "to_order": self.order,
            "symmetry_branch": {"parallelizable": self.branch_symmetry, "vanishing_symmetries": self.kernel_dim},
            "normal_form_branch": {
                "parallelizable": self.branch_normal_form,
                "linear_to_order": self.normal_form_linear_to_order,
                "order": self.normal_form_order,
            },
        }


def parallelizability_test(
    w: WebSpec, sol: SymmetrySolution | None = None, degree_cap: int | None = None, normal_form=None
) -> ParallelizabilityVerdict:
    """Two independent checks: a symmetry vanishing at the base point, and a linear normal form.

    The normal form is judged at order ``W - 1``: the symmetry equations
    at order ``W - 2`` constrain exactly the ``(W-1)``-jet of the
    components, which sees the ``W``-jet of ``f`` only through its
    derivatives.  A normal form already computed at order ``>= W - 1``
    may be passed in; truncation commutes with the construction.
    """
    from .normalform import compute_normal_form

    if sol is None:
        sol = solve_symmetries(w, degree_cap)
    kernel = sol.dim - orbit_rank(sol)
    a = kernel > 0
    nf_order = w.order - 1
    if normal_form is None or normal_form.order < nf_order:
        normal_form = compute_normal_form(w.with_order(nf_order))
    lin = min(normal_form.linear_to_order, nf_order)
    b = lin >= nf_order
    verdict = "inconsistent" if a != b else ("parallelizable" if a else "not parallelizable")
    return ParallelizabilityVerdict(verdict, a, b, w.order, kernel, lin, nf_order)
