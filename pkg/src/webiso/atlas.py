"""Catalogue of example webs with their claimed symmetry algebras, and verification.

Generic functions in the families are replaced by fixed representatives,
recorded on each entry.  A verification report compares the computed
algebra with the claim; a mismatch gives status ``discrepancy`` and is a
normal outcome, not an error.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .analysis import Analysis, analyze
from .classify import ClassificationError, decompose_factors
from .expr import Expression, Var, const, expand_scaled, substitute
from .jets import MultiJet, UniJet, grlex_key
from .linalg import rank
from .rationals import Q, qstr
from .symmetry import (
    DiagonalField,
    PhiError,
    WebError,
    WebSpec,
    _structure,
    apply_field,
    induced_phi,
    is_symmetry,
    validate_web,
)

__all__ = [
    "Generator",
    "Claim",
    "AtlasEntry",
    "VerificationReport",
    "LemmaError",
    "atlas_entries",
    "get_entry",
    "catalogue_json",
    "verify_entry",
    "theta_expression",
    "pde_residual",
    "build_f_l1",
    "build_f_l2",
    "lemma_fields",
]


class LemmaError(ValueError):
    """Input to a lemma builder does not satisfy its hypothesis."""


# ---------------------------------------------------------------------------
# builders
# ---------------------------------------------------------------------------


def theta_expression(j: int, a: int, b: int, cj) -> Expression:
    """``(x_j - x_a - c_j (x_b - x_a)) / (1 + x_b - x_a)``."""
    xa, xb, xj = Var(a), Var(b), Var(j)
    return (xj - xa - const(cj) * (xb - xa)) / (const(1) + xb - xa)


def pde_residual(h: Expression, nvars: int, weights: dict, quadratic: bool, point: Sequence, order: int) -> MultiJet:
    """Jet of ``sum_j ((y_j+c_j)^2 - (y_j+c_j)) d_j h - rhs`` at ``point``.

    ``weights`` maps a 1-based variable of ``h`` to ``c_j``; ``rhs`` is
    ``h^2 - h`` when ``quadratic`` is set and 0 otherwise.  The result has
    order ``order - 1``.
    """
    q, hj = expand_scaled(h, point, order)
    if q != 0:
        raise LemmaError("h must be rational at the base point")
    out = MultiJet.zero(nvars, order - 1, hj.base)
    for j, c in weights.items():
        u = MultiJet.variable(j, nvars, order - 1, hj.base) + Q(c)
        out = out + (u * u - u) * hj.partial(j)
    if quadratic:
        ht = hj.truncate(order - 1)
        out = out - (ht * ht - ht)
    return out


def _require_zero(res: MultiJet, what: str):
    if not res.is_zero():
        alpha = min(res.coeffs, key=grlex_key)
        raise LemmaError(f"{what}: residual coefficient {qstr(res.coeffs[alpha])} at monomial {list(alpha)}")


def lemma_fields(n: int, first: int, cs: Sequence, base: Sequence, order: int) -> tuple:
    """``F = sum d_i``, ``H = sum (x_i + c_i) d_i``, ``E = sum (x_i + c_i)^2 d_i`` over
    ``i = first, first+1, ...`` with the given constants."""
    polys = {"F": [], "H": [], "E": []}
    act = {first - 1 + k: Q(c) for k, c in enumerate(cs)}
    for i in range(n):
        if i in act:
            c = act[i]
            polys["F"].append([1])
            polys["H"].append([c, 1])
            polys["E"].append([c * c, 2 * c, 1])
        else:
            for k in polys:
                polys[k].append([0])
    return tuple(DiagonalField.from_polynomials(polys[k], base, order) for k in ("F", "H", "E"))


def _lemma_args(h: Expression, c: Sequence, n: int, p: int, base):
    if not 3 <= p <= n:
        raise LemmaError(f"need 3 <= p <= n, got p={p}, n={n}")
    if len(c) != p - 2:
        raise LemmaError(f"expected {p - 2} constants c_3..c_p, got {len(c)}")
    cs = [Q(x) for x in c]
    base = tuple(Q(b) for b in (base if base is not None else [0] * n))
    mapping = {}
    for k in range(1, n - 1):
        j = k + 2
        mapping[k] = theta_expression(j, 1, 2, cs[k - 1]) if j <= p else Var(j)
    ypoint = []
    for k in range(1, n - 1):
        j = k + 2
        if j <= p:
            b1, b2, bj = base[0], base[1], base[j - 1]
            den = 1 + b2 - b1
            if den == 0:
                raise LemmaError("1 + x_2 - x_1 vanishes at the base point")
            ypoint.append((bj - b1 - cs[k - 1] * (b2 - b1)) / den)
        else:
            ypoint.append(base[j - 1])
    weights = {k: cs[k - 1] for k in range(1, p - 1)}
    return cs, base, mapping, ypoint, weights


def build_f_l1(h: Expression, c: Sequence, n: int, p: int, base=None, order: int = 8) -> Expression:
    """``x_1 + (1 + x_2 - x_1) h(theta_3, ..., theta_p, x_{p+1}, ..., x_n)``.

    ``h`` is an expression in ``n - 2`` variables (``y_3..y_p`` then
    ``x_{p+1}..x_n``) that must solve
    ``sum ((y_j+c_j)^2 - (y_j+c_j)) d_j h = h^2 - h``.  The relations
    ``F.f = 1``, ``H.f = f``, ``E.f = f^2`` are checked on jets before
    returning.
    """
    cs, base, mapping, ypoint, weights = _lemma_args(h, c, n, p, base)
    _require_zero(pde_residual(h, n - 2, weights, True, ypoint, order), "h does not solve h-equation with right side h^2 - h")
    f = Var(1) + (const(1) + Var(2) - Var(1)) * substitute(h, mapping)
    w = WebSpec(n, f, base, order)
    fj = w.f_jet
    F, H, E = lemma_fields(n, 1, [0, 1] + cs, base, order - 1)
    ft = fj.truncate(order - 1)
    targets = {"F": MultiJet.constant(1, n, order - 1, base), "H": ft, "E": ft * ft}
    for name, X in zip("FHE", (F, H, E)):
        if apply_field(X, fj) != targets[name]:
            raise LemmaError(f"relation for {name} fails on the jet of f")
    return f


def build_f_l2(h: Expression, c: Sequence, n: int, p: int, base=None, order: int = 8) -> Expression:
    """``h(theta_3, ..., theta_p, x_{p+1}, ..., x_n)`` for ``h`` annihilated by
    ``sum ((y_j+c_j)^2 - (y_j+c_j)) d_j``; requires ``p > 3`` (for ``p = 3``
    the result cannot depend on ``x_1, x_2, x_3``)."""
    if p <= 3:
        raise LemmaError("p must exceed 3: with p = 3 the function is independent of x_1, x_2, x_3")
    cs, base, mapping, ypoint, weights = _lemma_args(h, c, n, p, base)
    _require_zero(pde_residual(h, n - 2, weights, False, ypoint, order), "h is not annihilated by the operator")
    f = substitute(h, mapping)
    w = WebSpec(n, f, base, order)
    rep = validate_web(w)
    if not rep.valid:
        raise WebError(rep.message)
    fj = w.f_jet
    zero = MultiJet.zero(n, order - 1, base)
    for name, X in zip("FHE", lemma_fields(n, 1, [0, 1] + cs, base, order - 1)):
        if apply_field(X, fj) != zero:
            raise LemmaError(f"relation {name}.f = 0 fails on the jet of f")
    return f


# ---------------------------------------------------------------------------
# catalogue
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Generator:
    name: str
    components: tuple  # the i-th component is an expression in x_i
    phi: tuple | None = None  # claimed X.f as polynomial coefficients in f (absolute), () for zero

    def field(self, base, order: int) -> DiagonalField:
        return DiagonalField.from_expressions(list(self.components), base, order)

    def to_json(self):
        out = {"name": self.name, "components": list(self.components)}
        if self.phi is not None:
            out["phi"] = [qstr(Q(c)) for c in self.phi]
        return out


@dataclass(frozen=True)
class Claim:
    dim: int | None = None
    counts: tuple | None = None  # (S, N, C)
    parallelizable: bool = False
    generators: tuple = ()
    actions: tuple = ()  # (factor type, action) pairs
    source: str = ""

    @property
    def empty(self) -> bool:
        return self.dim is None and self.counts is None and not self.generators and not self.actions

    def to_json(self):
        out = {"source": self.source, "parallelizable": self.parallelizable}
        if self.dim is not None:
            out["dim"] = self.dim
        if self.counts is not None:
            out["S"], out["N"], out["C"] = self.counts
        if self.actions:
            out["actions"] = [{"type": k, "action": a} for k, a in self.actions]
        if self.generators:
            out["generators"] = [g.to_json() for g in self.generators]
        return out


@dataclass(frozen=True)
class AtlasEntry:
    id: str
    title: str
    n: int
    f: str
    base: tuple
    claim: Claim
    order: int = 8
    representative: str = ""

    def web(self) -> WebSpec:
        return WebSpec.from_text(self.f, self.n, self.base, self.order)

    def to_json(self):
        return {
            "id": self.id,
            "title": self.title,
            "web": {"n": self.n, "f": self.f, "base": [qstr(Q(b)) for b in self.base], "order": self.order},
            "representative": self.representative,
            "claimed": self.claim.to_json(),
        }


def _d(n: int, idx: Sequence[int], name: str, phi=None) -> Generator:
    """Sum of ``d/dx_i`` over ``idx`` (1-based)."""
    return Generator(name, tuple("1" if i + 1 in idx else "0" for i in range(n)), phi)


def _lin(n: int, shifts: dict, name: str, phi=None, square: bool = False) -> Generator:
    """``sum (x_i + s_i) d_i`` (or its square) over the keys of ``shifts``."""
    comps = []
    for i in range(1, n + 1):
        if i not in shifts:
            comps.append("0")
            continue
        s = Q(shifts[i])
        t = f"x{i}" if s == 0 else f"(x{i}+{qstr(s)})"
        comps.append(f"{t}^2" if square else t)
    return Generator(name, tuple(comps), phi)


def _sl2_gens(n: int, shifts: dict, phis=(None, None, None), suffix: str = "") -> tuple:
    idx = sorted(shifts)
    return (
        _d(n, idx, "F" + suffix, phis[0]),
        _lin(n, shifts, "H" + suffix, phis[1]),
        _lin(n, shifts, "E" + suffix, phis[2], square=True),
    )


ID = (0, 1)  # phi = identity
ZERO_PHI = ()


def _theta_text(j: int, a: int, b: int, c) -> str:
    c = qstr(Q(c))
    return f"((x{j}-x{a}-({c})*(x{b}-x{a}))/(1+x{b}-x{a}))"


def _sample_h(u: str) -> str:
    return f"(1+({u})+2*({u})^3)"


_G2 = "x2+x3+x2*x3^2+x2^3*x3"  # representative with no symmetries of (x2, x3, g)


def _g2(a: str, b: str) -> str:
    return _G2.replace("x2", "A").replace("x3", "B").replace("A", a).replace("B", b)


def _l1_text(c3) -> str:
    u = f"({_theta_text(3, 1, 2, c3)}+{qstr(Q(c3))})"
    return f"x1+(1+x2-x1)*({u}/(2*{u}-1))"


def _composite_text(c3, c6, c7) -> str:
    u3 = f"({_theta_text(3, 1, 2, c3)}+{qstr(Q(c3))})"
    u6 = f"({_theta_text(6, 4, 5, c6)}+{qstr(Q(c6))})"
    u7 = f"({_theta_text(7, 4, 5, c7)}+{qstr(Q(c7))})"
    J = f"(({u6}-1)*{u7}/({u6}*({u7}-1)))"
    return f"x1+(1+x2-x1)*({u3}/(1+{J}-{J}*{u3}))"


L2_F = "(3+x1*x2-x1-3*x2+x4+3*x3+x3*x4-x3*x1-x2*x4)/(4+x1*x2-2*x1-2*x2+2*x4+2*x3+x3*x4-x3*x2-x1*x4)"
L2_INVARIANT = "((x1+2-1)*(x2+3))/((x1+2)*(x2+3-1))"  # h(y3, y4) for c3 = 2, c4 = 3


def atlas_entries() -> list[AtlasEntry]:
    E = []
    E.append(AtlasEntry(
        "parallelizable-n3", "linear web", 3, "x1+x2+x3", (0, 0, 0),
        Claim(4, None, True, (_d(3, [1], "Z1"), _d(3, [2], "Z2"), _d(3, [3], "Z3"), _lin(3, {1: 0, 2: 0, 3: 0}, "D")),
              source="parallelizable webs have n+1 symmetries"),
    ))
    E.append(AtlasEntry(
        "commutative-n3-m1a", "x + g(y, z)", 3, f"x1+{_g2('x2', 'x3')}", (0, 1, 2),
        Claim(1, (0, 0, 1), generators=(_d(3, [1], "Z1", (1,)),), source="dimension 3, commutative, generated by d/dx"),
        representative=f"g(y, z) = {_g2('y', 'z')}",
    ))
    E.append(AtlasEntry(
        "commutative-n3-m1b", "x + g(y - x, z)", 3, f"x1+{_g2('(x2-x1)', 'x3')}", (0, 1, 2),
        Claim(1, (0, 0, 1), generators=(_d(3, [1, 2], "Z1", (1,)),), source="dimension 3, commutative, generated by d/dx + d/dy"),
        representative=f"a = 1, g(u, z) = {_g2('u', 'z')}",
    ))
    E.append(AtlasEntry(
        "commutative-n3-m1c", "x + g(y - x, z - x)", 3, f"x1+{_g2('(x2-x1)', '(x3-x1)')}", (0, 1, 3),
        Claim(1, (0, 0, 1), generators=(_d(3, [1, 2, 3], "Z1", (1,)),), source="dimension 3, commutative, generated by d/dx + d/dy + d/dz"),
        representative=f"a = 1, g(u, v) = {_g2('u', 'v')}",
    ))
    E.append(AtlasEntry(
        "commutative-n3-m2", "x + h(y - z)", 3, "x1+(x2-x3)+(x2-x3)^3", (0, 1, 2),
        Claim(2, (0, 0, 2), generators=(_d(3, [1], "Z1", (1,)), _d(3, [2, 3], "Z2", ())),
              source="dimension 3, commutative of dimension 2"),
        representative="a = 0, h(u) = u + u^3",
    ))
    E.append(AtlasEntry(
        "commutative-n4-m2", "x1 + x2 + g(x3, x4)", 4, f"x1+x2+{_g2('x3', 'x4')}", (0, 1, 2, 3),
        Claim(2, (0, 0, 2), generators=(_d(4, [1], "Z1", (1,)), _d(4, [2], "Z2", (1,))),
              source="commutative examples with m < n - 1"),
        representative=f"g(y, z) = {_g2('y', 'z')}",
    ))
    E.append(AtlasEntry(
        "commutative-n4-m3", "x1 + x2 + g(x3 - x4)", 4, "x1+x2+(x3-x4)+(x3-x4)^3", (0, 1, 2, 3),
        Claim(3, (0, 0, 3), generators=(_d(4, [1], "Z1", (1,)), _d(4, [2], "Z2", (1,)), _d(4, [3, 4], "Z3", ())),
              source="commutative examples with m = n - 1"),
        representative="g(u) = u + u^3",
    ))
    h = _sample_h
    E.append(AtlasEntry(
        "n-subcase1-n3", "x + exp(y) h(z)", 3, f"x1+exp(x2)*{h('x3')}", (0, 0, 1),
        Claim(2, (0, 1, 0), generators=(_d(3, [1], "F", (1,)), Generator("E", ("x1", "1", "0"), ID)),
              actions=(("n", "transverse"),), source="dimension 3, algebra n, sub-case 1"),
        representative="h(u) = 1 + u + 2u^3",
    ))
    E.append(AtlasEntry(
        "n-subcase2-n3", "x + exp(y) h(z - y)", 3, f"x1+exp(x2)*{h('x3-x2')}", (0, 0, 1),
        Claim(2, (0, 1, 0), generators=(_d(3, [1], "F", (1,)), Generator("E", ("x1", "1", "1"), ID)),
              actions=(("n", "transverse"),), source="dimension 3, algebra n, sub-case 2"),
        representative="h(u) = 1 + u + 2u^3",
    ))
    E.append(AtlasEntry(
        "n-subcase3-n3", "a x + (b + y - x) h(z)", 3, f"x1+(1+x2-x1)*{h('x3')}", (0, 1, 2),
        Claim(2, (0, 1, 0), generators=(_d(3, [1, 2], "F", (1,)), Generator("E", ("x1", "x2+1", "0"), ID)),
              actions=(("n", "transverse"),), source="dimension 3, algebra n, sub-case 3"),
        representative="a = 1, b = 1, h(u) = 1 + u + 2u^3",
    ))
    E.append(AtlasEntry(
        "n-subcase4-n3", "a x + exp(z) h((b + y - x) exp(-z))", 3, f"x1+exp(x3)*{h('(1+x2-x1)*exp(-x3)')}", (0, 1, 0),
        Claim(2, (0, 1, 0), generators=(_d(3, [1, 2], "F", (1,)), Generator("E", ("x1", "x2+1", "1"), ID)),
              actions=(("n", "transverse"),), source="dimension 3, algebra n, sub-case 4"),
        representative="a = 1, b = 1, h(u) = 1 + u + 2u^3",
    ))
    d5 = "(1+(x2-x1)*3-(x3-x1))"
    E.append(AtlasEntry(
        "n-subcase5-n3", "a x + D h(P / D)", 3, f"x1+{d5}*{h(f'((x3-x1)-2*(x2-x1))/{d5}')}", (0, 1, 3),
        Claim(2, (0, 1, 0), generators=(_d(3, [1, 2, 3], "F", (1,)), Generator("E", ("x1", "x2+1", "x3+2"), ID)),
              actions=(("n", "transverse"),), source="dimension 3, algebra n, sub-case 5"),
        representative="a = 1, b = 1, c = 2, h(u) = 1 + u + 2u^3",
    ))
    E.append(AtlasEntry(
        "n-plus-R-n3", "(1 + y - x) exp(z)", 3, "(1+x2-x1)*exp(x3)", (0, 1, 2),
        Claim(3, (0, 1, 1), generators=(_d(3, [1, 2], "F", ()), Generator("E", ("x1", "x2+1", "0"), ID), _d(3, [3], "Z", ID)),
              actions=(("n", "transverse"), ("abelian", "transverse")), source="dimension 3, algebra n + R"),
    ))
    E.append(AtlasEntry(
        "n-example-n4", "product example, N = 1", 4, "(1+x2-x1)*exp(x3+x4)", (0, 0, 0, 0),
        Claim(4, (0, 1, 2), generators=(_d(4, [1, 2], "F", ()), Generator("E", ("x1", "x2+1", "0", "0"), ID),
                                        _d(4, [3], "Z3", ID), _d(4, [4], "Z4", ID)),
              actions=(("n", "transverse"), ("abelian", "transverse")), source="n-factor construction"),
    ))
    E.append(AtlasEntry(
        "n-example-n4-N2", "product example, N = 2", 4, "(1+x2-x1)*(1+x4-x3)", (0, 0, 0, 0),
        Claim(4, (0, 2, 0), generators=(_d(4, [1, 2], "F1", ()), Generator("E1", ("x1", "x2+1", "0", "0"), ID),
                                        _d(4, [3, 4], "F2", ()), Generator("E2", ("0", "0", "x3", "x4+1"), ID)),
              actions=(("n", "transverse"), ("n", "transverse")), source="n-factor construction"),
    ))
    E.append(AtlasEntry(
        "sl2-abc-n3", "(a yz + b zx + c xy)/(a x + b y + c z), a + b + c = 0", 3,
        "(x2*x3+x3*x1-2*x1*x2)/(x1+x2-2*x3)", (0, 1, 2),
        Claim(3, (1, 0, 0), generators=_sl2_gens(3, {1: 0, 2: 0, 3: 0}, ((-1,), ID, (0, 0, -1))),
              actions=(("sl2", "transverse"),), source="sl(2) webs in dimension 3"),
        order=10, representative="(a, b, c) = (1, 1, -2)",
    ))
    E.append(AtlasEntry(
        "sl2-family-n3", "lambda family", 3,
        "((x3+2)*(x2+1)+(x3+2)*x1-2*x1*(x2+1))/(x1+(x2+1)-2*(x3+2))", (0, 1, 2),
        Claim(3, (1, 0, 0), generators=_sl2_gens(3, {1: 0, 2: 1, 3: 2}, ((-1,), ID, (0, 0, -1))),
              actions=(("sl2", "transverse"),), source="dimension 3, algebra sl(2)"),
        representative="(lambda, b, c) = (1, 1, 2)",
    ))
    E.append(AtlasEntry(
        "crossratio-n4", "cross-ratio", 4, "(x1*x2+x3*x4-x1*x3-x2*x4)/(x1*x2+x3*x4-x3*x2-x1*x4)", (0, 1, 2, 3),
        Claim(3, (1, 0, 0), generators=_sl2_gens(4, {1: 0, 2: 0, 3: 0, 4: 0}, (ZERO_PHI,) * 3),
              actions=(("sl2", "tangent"),), source="5-web with sl(2) orbits in the level sets"),
    ))
    E.append(AtlasEntry(
        "l2-example-n4", "explicit tangent sl(2) example", 4, L2_F, (0, 0, 0, 0),
        Claim(3, (1, 0, 0), generators=_sl2_gens(4, {1: 0, 2: 1, 3: 2, 4: 3}, (ZERO_PHI,) * 3),
              actions=(("sl2", "tangent"),), source="tangent sl(2) example, c = (0, 1, 2, 3)"),
        representative=f"h(y3, y4) = {L2_INVARIANT.replace('x1', 'y3').replace('x2', 'y4')}",
    ))
    E.append(AtlasEntry(
        "l1-example-n3", "transverse sl(2) from h = u / ((1-K) u + K)", 3, _l1_text(3), (0, 0, 0),
        Claim(3, (1, 0, 0), generators=_sl2_gens(3, {1: 0, 2: 1, 3: 3}, ((1,), ID, (0, 0, 1))),
              actions=(("sl2", "transverse"),), source="transverse sl(2) construction, p = 3"),
        representative="c3 = 3, K = -1, h(y) = u/(2u - 1) with u = y + 3",
    ))
    E.append(AtlasEntry(
        "composite-n7", "two sl(2) factors", 7, _composite_text(3, 2, 3), (0,) * 7,
        Claim(6, (2, 0, 0),
              generators=_sl2_gens(7, {1: 0, 2: 1, 3: 3}, ((1,), ID, (0, 0, 1)), "1")
              + _sl2_gens(7, {4: 0, 5: 1, 6: 2, 7: 3}, (ZERO_PHI,) * 3, "2"),
              actions=(("sl2", "transverse"), ("sl2", "tangent")), source="composite with two sl(2) factors, n >= 7"),
        representative="c3 = 3, c6 = 2, c7 = 3, h = u3/(1 + J - J u3) with J the invariant of the tangent factor",
    ))
    return E


def get_entry(entry_id: str) -> AtlasEntry:
    for e in atlas_entries():
        if e.id == entry_id:
            return e
    raise KeyError(entry_id)


def catalogue_json():
    return {"entries": [e.to_json() for e in atlas_entries()]}


# ---------------------------------------------------------------------------
# verification
# ---------------------------------------------------------------------------


@dataclass
class VerificationReport:
    entry: AtlasEntry
    status: str
    analysis: Analysis | None
    generators: list = field(default_factory=list)
    dimension: dict = field(default_factory=dict)
    differences: list = field(default_factory=list)
    alarms: list = field(default_factory=list)

    def to_json(self):
        out = {
            "id": self.entry.id,
            "status": self.status,
            "claimed": self.entry.claim.to_json(),
            "representative": self.entry.representative,
            "dimension": self.dimension,
            "generators": self.generators,
            "differences": list(self.differences),
            "alarms": list(self.alarms),
        }
        if self.analysis is not None:
            out["computed"] = self.analysis.to_json()
        return out


def _phi_matches(phi, claimed, order: int) -> bool:
    want = UniJet.from_polynomial([Q(c) for c in claimed] or [0], phi.phi.order, phi.phi.center)
    k = min(order, phi.phi.order)
    return phi.phi.truncate(k) == want.truncate(k)


def verify_entry(entry: AtlasEntry | str, degree_cap: int | None = None) -> VerificationReport:
    if isinstance(entry, str):
        entry = get_entry(entry)
    w = entry.web()
    rep = validate_web(w)
    if not rep.valid:
        return VerificationReport(entry, "discrepancy", None, differences=[f"web invalid at base point: {rep.message}"])
    a = analyze(w, degree_cap)
    claim = entry.claim
    sol = a.solution
    W = w.order
    diffs, gens_out, certified = [], [], []
    for g in claim.generators:
        X = g.field(w.base, sol.degree_cap)
        cert = is_symmetry(X, w)
        item = {"name": g.name, "certificate": cert.to_json()}
        if not cert.is_symmetry:
            diffs.append(f"claimed generator {g.name} is not a symmetry")
        else:
            certified.append((g, X, cert))
            try:
                phi = induced_phi(X, w)
                item["phi"] = phi.to_json()
                if g.phi is not None:
                    ok = _phi_matches(phi, g.phi, W - 2)
                    item["phi_matches_claim"] = ok
                    if not ok:
                        diffs.append(f"{g.name}.f differs from the claimed function")
            except PhiError as exc:
                item["phi_error"] = str(exc)
                diffs.append(f"{g.name}: {exc}")
        gens_out.append(item)
    vecs = [X.vector() for _, X, _ in certified]
    lower = rank(vecs) if vecs else 0
    all_exact = bool(certified) and all(c.exact for _, _, c in certified)
    if certified:
        span = rank([X.vector() for X in sol.basis] + vecs)
        if span > sol.dim:
            a.alarms.append("a certified generator lies outside the computed solution space")
    upper_general = w.n + 1 if a.parallelizable else w.n
    exact = all_exact and (lower == sol.dim or lower == upper_general)
    dim_info = {
        "computed": sol.dim,
        "lower_bound": lower,
        "lower_bound_exact_certificates": all_exact,
        "upper_bound": sol.dim,
        "exact": exact,
    }
    if certified and lower == len(certified) and lower == sol.dim:
        sc, msg = _structure([X for _, X, _ in certified], max(min(sol.degree_cap - 1, W - 3), 0))
        if sc is None:
            diffs.append(f"claimed generators do not close: {msg}")
        elif claim.counts is not None and not a.parallelizable:
            try:
                got = decompose_factors(sc).counts
                dim_info["generator_counts"] = list(got)
                if got != tuple(claim.counts):
                    diffs.append(f"claimed generators give (S,N,C) = {got}, claim says {tuple(claim.counts)}")
            except ClassificationError as exc:
                diffs.append(f"claimed generators: {exc}")
    if claim.dim is not None and claim.dim != sol.dim:
        diffs.append(f"dimension: claimed {claim.dim}, computed {sol.dim}")
    if claim.parallelizable != a.parallelizable:
        diffs.append(f"parallelizable: claimed {claim.parallelizable}, computed {a.parallelizable}")
    if claim.counts is not None and a.counts is not None and tuple(claim.counts) != a.counts:
        diffs.append(f"(S,N,C): claimed {tuple(claim.counts)}, computed {a.counts}")
    if claim.actions and a.decomposition is not None:
        got = sorted((f.kind, f.action) for f in a.decomposition.factors if f.kind != "abelian")
        want = sorted((k, x) for k, x in claim.actions if k != "abelian")
        if got != want:
            diffs.append(f"action profile: claimed {want}, computed {got}")
    alarms = list(a.alarms)
    if alarms:
        status = "discrepancy"
    elif diffs:
        status = "discrepancy"
    elif claim.empty:
        status = "computed-only"
    else:
        status = "confirmed"
    return VerificationReport(entry, status, a, gens_out, dim_info, diffs, alarms)
