from __future__ import annotations

import sympy
from hypothesis import given, settings
from hypothesis import strategies as st
import pytest

from webiso.expr import (
    Add,
    Const,
    Div,
    ExpressionSyntaxError,
    TranscendentalScaleError,
    Var,
    degree_profile,
    evaluate,
    expand_scaled,
    expand_to_jet,
    expression_from_json,
    expression_to_json,
    node_count,
    parse_expression,
    to_text,
)
from webiso.jets import MultiJet
from webiso.rationals import Q, mpq, parse_rational, qstr

from conftest import CROSS, to_sympy


def sym_coeffs(text, n, base, order):
    xs = sympy.symbols(f"x1:{n + 1}")
    ts = sympy.symbols(f"t1:{n + 1}")
    e = sympy.sympify(text.replace("^", "**"), locals={f"x{i + 1}": xs[i] for i in range(n)})
    e = e.subs({xs[i]: ts[i] + to_sympy(Q(base[i])) for i in range(n)}, simultaneous=True)
    s = sympy.Symbol("s")
    ser = sympy.series(e.subs({t: s * t for t in ts}), s, 0, order + 1).removeO()
    poly = sympy.Poly(sympy.expand(ser.subs(s, 1)), *ts)
    return {m: c for m, c in zip(poly.monoms(), poly.coeffs())}


def test_rationals_roundtrip():
    assert parse_rational("-3/6") == mpq(-1, 2)
    assert qstr(mpq(4, 2)) == "2"
    assert qstr(mpq(-1, 3)) == "-1/3"
    with pytest.raises(ValueError):
        parse_rational("1/0")


def test_parse_simple_sum():
    e = parse_expression("x1 + x2 + x3", 3)
    assert e == Add(Add(Var(1), Var(2)), Var(3))


def test_parse_cross_ratio_tree():
    e = parse_expression(CROSS, 4)
    assert isinstance(e, Div)
    assert evaluate(e, [0, 1, 2, 3]) == mpq(3, 4)


@pytest.mark.parametrize(
    "text, fragment",
    [
        ("x1 ^ (1/2)", "non-integer exponent"),
        ("x5 + 1", "out of range"),
        ("x1 + * x2", "position"),
        ("sin(x1)", "unknown function"),
        ("(x1 + x2", "position"),
    ],
)
def test_parse_errors(text, fragment):
    with pytest.raises(ExpressionSyntaxError) as info:
        parse_expression(text, 3)
    assert fragment in str(info.value)


def test_negative_and_parenthesized_exponents():
    e = parse_expression("x1^(-2) + x2^-1", 2)
    assert evaluate(e, [2, 4]) == mpq(1, 4) + mpq(1, 4)


def test_text_and_json_roundtrip():
    for text in ["x1+x2*x3", "exp(x1-x2)/(1+x3)^3", CROSS.replace("x4", "x3"), "-(x1-2/3*x2)^2"]:
        e = parse_expression(text, 4)
        assert parse_expression(to_text(e), 4) == e
        assert evaluate(expression_from_json(expression_to_json(e), 4), [2, 2, 3, 5]) == evaluate(e, [2, 2, 3, 5])


def test_expand_linear_and_exp():
    j = expand_to_jet(parse_expression("x1+x2", 2), [0, 0], 3)
    assert j.coeffs == {(1, 0): 1, (0, 1): 1}
    j = expand_to_jet(parse_expression("exp(x1)", 1), [0], 3)
    assert [j.coefficient((k,)) for k in range(4)] == [1, 1, mpq(1, 2), mpq(1, 6)]


def test_cross_ratio_constant_term():
    j = expand_to_jet(parse_expression(CROSS, 4), [0, 1, 2, 3], 2)
    assert j.constant_term == mpq(3, 4)


def test_division_by_zero_names_subtree():
    with pytest.raises(Exception) as info:
        expand_to_jet(parse_expression("1/(x1-x2)", 2), [1, 1], 3)
    assert "x1" in str(info.value)


def test_transcendental_scale():
    e = parse_expression("(1+x1)*exp(x2)", 2)
    q, jet = expand_scaled(e, [0, 2], 4)
    assert q == 2 and jet.constant_term == 1
    with pytest.raises(TranscendentalScaleError):
        expand_to_jet(e, [0, 2], 4)
    assert expand_to_jet(e, [0, 2], 4, drop_unit=True) == jet


def test_degree_profile():
    assert degree_profile(parse_expression(CROSS, 4)) == (2, 2, 0)
    assert degree_profile(parse_expression("(1+x2-x1)*exp(x3+x4)", 4)) == (1, 0, 1)
    assert degree_profile(parse_expression("x1+exp(x2)", 2)) is None


@pytest.mark.parametrize(
    "text, n, base, order",
    [
        (CROSS, 4, (0, 1, 2, 3), 4),
        ("(1+x2-x1)*exp(x3+x4)", 4, (0, 0, 0, 0), 4),
        ("x1/(2-x2)^3 + x1*x2^2", 2, ("1/2", "1/3"), 6),
        ("exp(x1*x2-1/2*x1)", 2, (0, 1), 5),
    ],
)
def test_expansion_matches_sympy(text, n, base, order):
    jet = expand_to_jet(parse_expression(text, n), [Q(b) for b in base], order)
    want = sym_coeffs(text, n, base, order)
    got = {a: to_sympy(c) for a, c in jet.coeffs.items()}
    assert got == {a: c for a, c in want.items() if c != 0}


small = st.integers(-3, 3)
leaf = st.one_of(st.builds(lambda i: Var(i), st.integers(1, 2)), st.builds(lambda k: Const(Q(k)), small))


def _tree(children):
    return st.one_of(
        st.builds(lambda a, b: a + b, children, children),
        st.builds(lambda a, b: a - b, children, children),
        st.builds(lambda a, b: a * b, children, children),
    )


exprs = st.recursive(leaf, _tree, max_leaves=6)
points = st.tuples(st.fractions(-2, 2, max_denominator=3), st.fractions(-2, 2, max_denominator=3))


@settings(max_examples=60, deadline=None)
@given(exprs, exprs, points)
def test_expansion_is_a_ring_map(e1, e2, p):
    base = [Q(f"{x.numerator}/{x.denominator}") for x in p]
    a, b = expand_to_jet(e1, base, 4), expand_to_jet(e2, base, 4)
    assert expand_to_jet(e1 + e2, base, 4) == a + b
    assert expand_to_jet(e1 - e2, base, 4) == a - b
    assert expand_to_jet(e1 * e2, base, 4) == a * b
    assert a.constant_term == evaluate(e1, base)


@settings(max_examples=40, deadline=None)
@given(exprs, points)
def test_self_quotient_is_one(e, p):
    base = [Q(f"{x.numerator}/{x.denominator}") for x in p]
    if evaluate(e, base) == 0:
        return
    assert expand_to_jet(e / e, base, 4) == MultiJet.constant(1, 2, 4, base)


def test_node_limit():
    text = "+".join(["x1"] * 6000)
    with pytest.raises(Exception):
        parse_expression(text, 1)
    assert node_count(parse_expression("x1*x2+1", 2)) == 5
