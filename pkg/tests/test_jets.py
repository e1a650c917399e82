from __future__ import annotations

import math

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from webiso.expr import expand_to_jet, parse_expression
from webiso.jets import (
    JetError,
    MultiJet,
    UniJet,
    jet_mul,
    jet_partial,
    log1p_series,
    exp_series,
    monomials,
    substitute_diagonal,
    uni_compose,
    uni_reversion,
    uni_series_compose,
)
from webiso.rationals import Q, mpq


def jet(text, n, order, base=None):
    return expand_to_jet(parse_expression(text, n), base or [0] * n, order)


def test_products():
    assert jet("1+x1", 1, 2) * jet("1-x1", 1, 2) == jet("1-x1^2", 1, 2)
    a = jet("1+x1+x2", 2, 3)
    assert a * MultiJet.constant(1, 2, 3) == a
    s = jet("x1+x2", 2, 3)
    cube = s * s * s
    for alpha in monomials(2, 3):
        if sum(alpha) == 3:
            want = math.comb(3, alpha[0])
            assert cube.coefficient(alpha) == want


def test_mismatch_rejected():
    with pytest.raises(JetError):
        jet("x1", 2, 3) * jet("x1", 2, 4)
    with pytest.raises(JetError):
        jet("x1", 2, 3) + jet("x1", 2, 3, [1, 0])


def test_partials():
    assert jet_partial(jet("x1^2*x2", 2, 4), 1) == jet("2*x1*x2", 2, 3)
    assert jet_partial(jet("5", 2, 3), 2).is_zero()
    assert jet_partial(jet("exp(x1+x2)", 2, 3), 1) == jet("exp(x1+x2)", 2, 2)
    with pytest.raises(JetError):
        jet_partial(jet("x1", 2, 3), 3)


def test_uni_compose_examples():
    a = jet("x1+x2", 2, 2)
    assert uni_compose(UniJet.identity(2, 0), a) == a
    sq = UniJet.from_coeffs([0, 0, 1], 2, 0)
    assert uni_compose(sq, a) == jet("x1^2+2*x1*x2+x2^2", 2, 2)
    b = jet("x1+x2+x1*x2", 2, 4)
    out = uni_compose(log1p_series(4), b)
    assert all(c == 0 for al, c in out.coeffs.items() if al[0] and al[1])
    assert out == jet("x1-x1^2/2+x1^3/3-x1^4/4+x2-x2^2/2+x2^3/3-x2^4/4", 2, 4)


def test_substitute_diagonal_examples():
    a = jet("x1+x2", 2, 4)
    ident = [UniJet.identity(4, 0)] * 2
    assert substitute_diagonal(a, ident) == a
    sq = [UniJet.from_coeffs([0, 0, 1], 4, 0)] * 2
    assert substitute_diagonal(a, sq, check_invertible=False) == jet("x1^2+x2^2", 2, 4)
    with pytest.raises(JetError):
        substitute_diagonal(a, sq)
    em1 = exp_series(4) - UniJet.constant(1, 4)
    out = substitute_diagonal(jet("x1+x2+x1*x2", 2, 4), [em1, em1])
    for al, c in out.coeffs.items():
        assert c == mpq(1, math.factorial(al[0]) * math.factorial(al[1]))
    assert len(out.coeffs) == 14


def test_reversion_examples():
    t = UniJet.identity(4, 0)
    assert uni_reversion(t) == t
    assert uni_reversion(UniJet.from_coeffs([0, 2], 4, 0)) == UniJet.from_coeffs([0, mpq(1, 2)], 4, 0)
    g = UniJet.from_coeffs([0, 1, 1], 4, 0)
    r = uni_reversion(g)
    assert r.coeffs == (0, 1, -1, 2, -5)
    assert uni_series_compose(g, r) == t
    with pytest.raises(JetError):
        uni_reversion(UniJet.from_coeffs([0, 0, 1], 4, 0))


def test_mul_against_sympy():
    x, y, z = sympy.symbols("x1 x2 x3")
    p = "1+2*x1-x2/3+x1*x3^2"
    q = "3-x3+x1*x2-5/7*x2^2"
    got = jet(p, 3, 5) * jet(q, 3, 5)
    prod = sympy.Poly(sympy.expand(sympy.sympify(p.replace("^", "**")) * sympy.sympify(q.replace("^", "**"))), x, y, z)
    want = {m: c for m, c in zip(prod.monoms(), prod.coeffs()) if sum(m) <= 5}
    assert {a: sympy.Rational(int(c.numerator), int(c.denominator)) for a, c in got.coeffs.items()} == want


def test_upto_keeps_order():
    a = jet("1+x1+x2^2", 2, 5)
    b = jet_mul(a, a, upto=2)
    assert b.order == 5
    assert b.coeffs == {k: v for k, v in (a * a).coeffs.items() if sum(k) <= 2}


coef = st.fractions(-3, 3, max_denominator=4).map(lambda f: Q(f"{f.numerator}/{f.denominator}"))
N, W = 2, 4
mons = monomials(N, W)


def jets_(const_term=None):
    def build(cs):
        d = {m: c for m, c in zip(mons, cs) if c != 0}
        if const_term is not None:
            d[(0,) * N] = Q(const_term)
        return MultiJet.from_polynomial(d, N, W)

    return st.lists(coef, min_size=len(mons), max_size=len(mons)).map(build)


def unijets(c0=None, c1=None):
    def build(cs):
        cs = list(cs)
        if c0 is not None:
            cs[0] = Q(c0)
        if c1 is not None and cs[1] == 0:
            cs[1] = Q(c1)
        return UniJet.from_coeffs(cs, W, 0)

    return st.lists(coef, min_size=W + 1, max_size=W + 1).map(build)


@settings(max_examples=50, deadline=None)
@given(jets_(), jets_(), jets_())
def test_ring_axioms(a, b, c):
    assert (a * b) * c == a * (b * c)
    assert a * b == b * a
    assert a * (b + c) == a * b + a * c


@settings(max_examples=50, deadline=None)
@given(jets_(), jets_())
def test_leibniz(a, b):
    for i in (1, 2):
        lhs = jet_partial(a * b, i)
        rhs = a.truncate(W - 1) * jet_partial(b, i) + b.truncate(W - 1) * jet_partial(a, i)
        assert lhs == rhs


@settings(max_examples=40, deadline=None)
@given(unijets(), jets_(const_term=0))
def test_chain_rule(theta, a):
    lhs = jet_partial(uni_compose(theta, a), 1)
    rhs = uni_compose(theta.derivative(), a.truncate(W - 1)) * jet_partial(a, 1)
    assert lhs == rhs


@settings(max_examples=40, deadline=None)
@given(jets_(), unijets(0, 1), unijets(0, 1), unijets(0, 1), unijets(0, 1))
def test_substitution_functorial(a, g1, g2, h1, h2):
    once = substitute_diagonal(substitute_diagonal(a, [g1, g2]), [h1, h2])
    comp = substitute_diagonal(a, [uni_series_compose(g1, h1), uni_series_compose(g2, h2)])
    assert once == comp


@settings(max_examples=60, deadline=None)
@given(unijets(0, 1))
def test_reversion_involution(g):
    assert uni_reversion(uni_reversion(g)) == g
    assert uni_series_compose(g, uni_reversion(g)) == UniJet.identity(W, 0)
