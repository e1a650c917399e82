from __future__ import annotations

import pytest
import sympy
from conftest import L2F, verified

from webiso.atlas import (
    L2_INVARIANT,
    LemmaError,
    atlas_entries,
    build_f_l1,
    build_f_l2,
    catalogue_json,
    get_entry,
    pde_residual,
)
from webiso.expr import parse_expression
from webiso.symmetry import WebError, validate_web

IDS = [e.id for e in atlas_entries()]


def to_sym(expr, n):
    xs = sympy.symbols(f"x1:{n + 1}")
    return sympy.sympify(str(expr).replace("^", "**"), locals={f"x{i + 1}": xs[i] for i in range(n)})


def test_catalogue_shape():
    assert len(IDS) == len(set(IDS))
    doc = catalogue_json()
    assert [e["id"] for e in doc["entries"]] == IDS
    for e in atlas_entries():
        assert e.claim.source
        if e.claim.parallelizable:
            assert e.claim.counts is None and e.claim.dim == e.n + 1
        else:
            S, N, C = e.claim.counts
            assert e.claim.dim == 3 * S + 2 * N + C


@pytest.mark.parametrize("entry_id", IDS)
def test_entry_validates(entry_id):
    assert validate_web(get_entry(entry_id).web()).valid


def test_unknown_entry():
    with pytest.raises(KeyError):
        get_entry("no-such-entry")


def test_constant_half_is_not_a_solution():
    h = parse_expression("1/2", 1)
    res = pde_residual(h, 1, {1: 3}, True, [0], 6)
    # left side 0, right side h^2 - h = -1/4
    assert res.constant_term == sympy.Rational(1, 4)
    with pytest.raises(LemmaError):
        build_f_l1(h, [3], 3, 3)


def test_l1_accepts_ode_solution():
    v = sympy.Symbol("v")
    hv = v / (2 * v - 1)
    assert sympy.simplify((v**2 - v) * sympy.diff(hv, v) - (hv**2 - hv)) == 0
    h = parse_expression("(x1+3)/(2*(x1+3)-1)", 1)
    f = build_f_l1(h, [3], 3, 3)
    assert validate_web(get_entry("l1-example-n3").web()).valid
    assert sympy.cancel(to_sym(f, 3) - to_sym(get_entry("l1-example-n3").f, 3)) == 0


def test_l1_rejects_extra_dependence():
    # h = y4 does not solve the equation: its y-derivatives vanish but h^2 != h
    with pytest.raises(LemmaError):
        build_f_l1(parse_expression("x2", 2), [3], 4, 3)


def test_l2_reproduces_example():
    h = parse_expression(L2_INVARIANT, 2)
    f = build_f_l2(h, [2, 3], 4, 4, base=(0, 1, 2, 3))
    assert sympy.cancel(to_sym(f, 4) - to_sym(L2F, 4)) == 0


def test_l2_needs_p_above_three():
    with pytest.raises(LemmaError):
        build_f_l2(parse_expression("x1", 1), [2], 3, 3)


def test_l2_constant_is_not_a_web():
    with pytest.raises(WebError):
        build_f_l2(parse_expression("5", 2), [2, 3], 4, 4, base=(0, 1, 2, 3))


def test_l2_rejects_non_invariant():
    with pytest.raises(LemmaError):
        build_f_l2(parse_expression("x1+x2", 2), [2, 3], 4, 4, base=(0, 1, 2, 3))


@pytest.mark.parametrize("entry_id", ["parallelizable-n3", "n-example-n4", "sl2-abc-n3", "crossratio-n4"])
def test_confirmed(entry_id):
    r = verified(entry_id)
    assert r.status == "confirmed" and not r.alarms
    assert r.dimension["exact"]


def test_parallelizable_entry():
    r = verified("parallelizable-n3")
    assert r.dimension["computed"] == 4
    assert r.analysis.parallelizable


def test_subcase1_discrepancy_is_reported():
    r = verified("n-subcase1-n3")
    assert r.status == "discrepancy" and not r.alarms
    assert r.dimension["computed"] == 3
    assert r.analysis.counts == (0, 1, 1)
    assert any("dim" in d for d in r.differences)


@pytest.mark.slow
def test_composite():
    r = verified("composite-n7")
    assert r.status == "confirmed" and not r.alarms
    assert r.analysis.counts == (2, 0, 0)
    actions = sorted(f.action for f in r.analysis.decomposition.factors)
    assert actions == ["tangent", "transverse"]
