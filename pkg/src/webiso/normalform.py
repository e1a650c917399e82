"""Formal normal form of ``f`` under ``x_i -> g_i(x_i)`` and ``f -> theta(f)``.

After translating the base point to the origin the normal form is

    x_1 + ... + x_n + sum_{i<j} x_i x_j a_ij(x),   sum a_ij(0) = 0.

Conventions fixing the remaining freedom:

* order 1: ``g_i'(0) = a_1 / a_i`` and ``theta'(0) = 1 / a_1`` where
  ``a_i = f_i(base)``;
* order k >= 2: ``g_i(t) = t + gamma_i t^k`` removes the pure monomial
  ``t_i^k`` and ``theta(s) = s + tau s^k`` removes the component of the
  mixed degree-k part along ``(sum t_i)^k`` for the coefficientwise inner
  product.  At ``k = 2`` this is exactly ``sum a_ij(0) = 0``.

With these conventions the normal form of ``f(lambda x)`` is
``nf(lambda t) / lambda``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .expr import Var, const, substitute
from .jets import MultiJet, UniJet, monomials, substitute_diagonal, uni_compose, uni_series_compose
from .rationals import ZERO, Q, mpq, qstr
from .symmetry import WebSpec, require_valid

__all__ = ["NormalFormResult", "NormalFormError", "compute_normal_form", "HomothetyReport", "homothety_uniqueness_check"]


class NormalFormError(RuntimeError):
    """A postcondition of the normal form failed (an internal error)."""


@dataclass(frozen=True)
class NormalFormResult:
    nf: MultiJet
    g: tuple  # g[i](u) = x_i, centered at u = 0, g[i](0) = base_i
    theta: UniJet  # centered at f(base), theta(f(base)) = 0
    a_quadratic: dict  # (i, j) -> a_ij(0), 1-based, i < j
    linear_to_order: int
    unit: mpq

    @property
    def order(self) -> int:
        return self.nf.order

    @property
    def is_linear(self) -> bool:
        return self.linear_to_order >= self.nf.order

    def nonlinear_coefficients(self, degree: int) -> dict:
        return self.nf.homogeneous_part(degree)

    def to_json(self):
        return {
            "order": self.order,
            "linear_to_order": self.linear_to_order,
            "a_quadratic": {f"{i},{j}": qstr(v) for (i, j), v in sorted(self.a_quadratic.items())},
            "nf": self.nf.dump().splitlines(),
            "g": [[qstr(c) for c in gi.coeffs] for gi in self.g],
            "theta": {"center": qstr(self.theta.center), "coefficients": [qstr(c) for c in self.theta.coeffs]},
            "unit_exponent": qstr(self.unit),
        }


def _mixed_weights(n: int, k: int) -> dict:
    """Multinomial coefficients of ``(sum t_i)^k`` on the non-pure monomials of degree k."""
    out = {}
    for alpha in monomials(n, k):
        if sum(alpha) != k or max(alpha) == k:
            continue
        w = math.factorial(k)
        for a in alpha:
            w //= math.factorial(a)
        out[alpha] = mpq(w)
    return out


def _pure(n: int, i: int, k: int) -> tuple:
    e = [0] * n
    e[i] = k
    return tuple(e)


def compute_normal_form(w: WebSpec) -> NormalFormResult:
    require_valid(w)
    fj = w.f_jet
    n, W = fj.n, fj.order
    zero = (ZERO,) * n
    value = fj.constant_term
    h = MultiJet._raw(n, W, zero, {a: c for a, c in fj.coeffs.items() if any(a)})
    a = [fj.coefficient(_pure(n, i, 1)) for i in range(n)]

    g_tot = [UniJet.from_coeffs([0, a[0] / a[i]], W, 0) for i in range(n)]
    th_tot = UniJet.from_coeffs([0, 1 / a[0]], W, 0)
    h = substitute_diagonal(h, g_tot)
    h = h * (1 / a[0])

    for k in range(2, W + 1):
        part = h.homogeneous_part(k)
        if not part:
            continue
        weights = _mixed_weights(n, k)
        num = sum((part.get(al, ZERO) * wt for al, wt in weights.items()), ZERO)
        den = sum((wt * wt for wt in weights.values()), ZERO)
        tau = -num / den
        gam = [-part.get(_pure(n, i, k), ZERO) - tau for i in range(n)]
        if tau == 0 and all(x == 0 for x in gam):
            continue
        gk = [UniJet.from_coeffs([0, 1] + [0] * (k - 2) + [gam[i]], W, 0) for i in range(n)]
        h = substitute_diagonal(h, gk)
        if tau != 0:
            h = h + _power_tail(h, k) * tau
        g_tot = [uni_series_compose(g_tot[i], gk[i]) for i in range(n)]
        th_k = UniJet.from_coeffs([0, 1] + [0] * (k - 2) + [tau], W, 0)
        th_tot = uni_series_compose(th_k, th_tot)

    g = tuple(UniJet(W, ZERO, (w.base[i],) + g_tot[i].coeffs[1:]) for i in range(n))
    theta = UniJet(W, value, th_tot.coeffs)
    _check(h, n, W)
    recon = uni_compose(theta, substitute_diagonal(fj, g))
    if recon != h:
        raise NormalFormError("reconstruction theta o f o g = nf failed")
    aq = {}
    for i in range(n):
        for j in range(i + 1, n):
            e = [0] * n
            e[i] += 1
            e[j] += 1
            aq[(i + 1, j + 1)] = h.coefficient(e)
    lowest = min((sum(al) for al in h.coeffs if sum(al) >= 2), default=None)
    lin = W if lowest is None else lowest - 1
    return NormalFormResult(h, g, theta, aq, lin, w.unit)


def _power_tail(h: MultiJet, k: int) -> MultiJet:
    """``h^k`` for ``h`` without constant term, using only the terms that reach order W."""
    W = h.order
    lo = h.truncate(W - k + 1)
    lo = MultiJet._raw(h.n, W, h.base, dict(lo.coeffs))
    acc = lo
    for _ in range(k - 1):
        acc = acc * lo
    return acc


def _check(h: MultiJet, n: int, W: int):
    for i in range(n):
        if h.coefficient(_pure(n, i, 1)) != 1:
            raise NormalFormError("linear part is not x_1 + ... + x_n")
    for alpha, c in h.coeffs.items():
        d = sum(alpha)
        if d == 0:
            raise NormalFormError("nonzero constant term")
        if d == 1:
            continue
        if max(alpha) == d:
            raise NormalFormError(f"pure monomial {alpha} survived")
    for k in range(2, W + 1):
        part = h.homogeneous_part(k)
        if part and sum((part.get(al, ZERO) * wt for al, wt in _mixed_weights(n, k).items()), ZERO) != 0:
            raise NormalFormError(f"degree-{k} part not orthogonal to (sum t)^{k}")


@dataclass(frozen=True)
class HomothetyReport:
    lam: mpq
    ok: bool
    order: int
    mismatches: tuple  # (exponent, expected, got)

    def to_json(self):
        return {
            "lambda": qstr(self.lam),
            "ok": self.ok,
            "order": self.order,
            "mismatches": [{"monomial": list(a), "expected": qstr(e), "got": qstr(g)} for a, e, g in self.mismatches],
        }


def rescaled_web(w: WebSpec, lam) -> WebSpec:
    """The web ``f(lambda x)`` at the base point ``base / lambda``."""
    lam = Q(lam)
    if lam == 0:
        raise ValueError("lambda must be nonzero")
    f2 = substitute(w.f, {i: const(lam) * Var(i) for i in range(1, w.n + 1)})
    return WebSpec(w.n, f2, tuple(b / lam for b in w.base), w.order)


def homothety_uniqueness_check(w: WebSpec, lam, base_result: NormalFormResult | None = None) -> HomothetyReport:
    lam = Q(lam)
    ref = base_result if base_result is not None else compute_normal_form(w)
    other = compute_normal_form(rescaled_web(w, lam))
    bad = []
    keys = set(ref.nf.coeffs) | set(other.nf.coeffs)
    for alpha in sorted(keys, key=lambda a: (sum(a), a)):
        want = ref.nf.coefficient(alpha) * lam ** (sum(alpha) - 1)
        got = other.nf.coefficient(alpha)
        if want != got:
            bad.append((alpha, want, got))
    return HomothetyReport(lam, not bad, ref.order, tuple(bad))
