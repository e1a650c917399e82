from __future__ import annotations

import itertools

import pytest
import sympy
from conftest import DD, NPROD, from_sympy, solution, web

from webiso.atlas import get_entry
from webiso.jets import MultiJet
from webiso.symmetry import (
    DiagonalField,
    WebError,
    apply_field,
    induced_phi,
    is_symmetry,
    orbit_rank,
    parallelizability_test,
    require_valid,
    validate_web,
)


def field(comps, w, order=None):
    return DiagonalField.from_expressions(list(comps), w.base, order or w.order - 1)


def test_validate_examples():
    r = validate_web(web("x1+x2+x3", 3, (5, -1, 2)))
    assert r.valid and list(r.partials) == [1, 1, 1]
    bad = validate_web(web("x1+x2*x3", 3, (0, 0, 0)))
    assert not bad.valid and 2 in bad.vanishing
    with pytest.raises(WebError):
        require_valid(web("x1+x2*x3", 3, (0, 0, 0)))
    dd = validate_web(web(DD, 3, (0, 1, 2)))
    assert dd.valid
    x1, x2, x3 = sympy.symbols("x1 x2 x3")
    f = (x2 * x3 + x3 * x1 - 2 * x1 * x2) / (x1 + x2 - 2 * x3)
    pt = {x1: 0, x2: 1, x3: 2}
    assert [from_sympy(sympy.diff(f, v).subs(pt)) for v in (x1, x2, x3)] == list(dd.partials)


def test_apply_field():
    w = web("x1+x2+x3", 3, (0, 0, 0))
    X = field(["1", "1", "1"], w)
    out = apply_field(X, w.f_jet)
    assert out.constant_term == 3 and all(c == 0 for a, c in out.coeffs.items() if any(a))
    w2 = web("x1+x2", 2, (0, 0))
    out = apply_field(field(["x1", "x2+1"], w2), w2.f_jet)
    assert out == MultiJet.from_polynomial({(0, 0): 1, (1, 0): 1, (0, 1): 1}, 2, out.order)
    w8 = web(NPROD, 4, (0, 0, 0, 0))
    assert apply_field(field(["1", "1", "0", "0"], w8), w8.f_jet).is_zero()


def test_is_symmetry_examples():
    w = web("x1+x2+x3", 3, (0, 0, 0))
    assert is_symmetry(field(["1", "1", "1"], w), w).is_symmetry
    cr = get_entry("l2-example-n4").web()
    E = field(["x1^2", "(x2+1)^2", "(x3+2)^2", "(x4+3)^2"], cr)
    cert = is_symmetry(E, cr)
    assert cert.is_symmetry and cert.exact
    assert induced_phi(E, cr).is_zero()
    w2 = web("x1+x2^2", 2, (0, 1))
    bad = is_symmetry(field(["0", "1"], w2), w2)
    assert not bad.is_symmetry and bad.failure is not None


def test_induced_phi():
    w = web("x1+x2+x3", 3, (0, 0, 0))
    phi = induced_phi(field(["1", "1", "1"], w), w).phi
    assert phi.coeffs[0] == 3 and not any(phi.coeffs[1:])
    w8 = web(NPROD, 4, (0, 0, 0, 0))
    for comps in (["x1", "x2+1", "0", "0"], ["0", "0", "1", "0"]):
        p = induced_phi(field(comps, w8), w8).phi
        assert p.center == 1 and list(p.coeffs[:2]) == [1, 1] and not any(p.coeffs[2:])
    l1 = get_entry("l1-example-n3").web()
    H = induced_phi(field(["x1", "x2+1", "x3+3"], l1), l1).phi
    E = induced_phi(field(["x1^2", "(x2+1)^2", "(x3+3)^2"], l1), l1).phi
    c = H.center
    assert H.coeffs[:2] == (c, 1) and not any(H.coeffs[2:])
    assert E.coeffs[:3] == (c * c, 2 * c, 1) and not any(E.coeffs[3:])


@pytest.mark.parametrize(
    "text,n,base,dim",
    [
        ("x1+x2+x3", 3, (0, 0, 0), 4),
        ("x1+(x2-x3)+(x2-x3)^3", 3, (0, 0, 0), 2),
        (NPROD, 4, (0, 0, 0, 0), 4),
        (DD, 3, (0, 1, 2), 3),
    ],
)
def test_solve_dimensions(text, n, base, dim):
    sol = solution(text, n, base)
    assert sol.dim == dim and sol.stabilized
    dims = list(sol.dims_by_order)
    assert dims == sorted(dims, reverse=True)
    for X in sol.basis:
        assert is_symmetry(X, sol.web, exact=False).is_symmetry


def test_commutative_span():
    sol = solution("x1+(x2-x3)+(x2-x3)^3", 3, (0, 0, 0))
    vals = sorted(tuple(X.values()) for X in sol.basis)
    assert vals == [(0, 1, 1), (1, 0, 0)]
    assert all(X.degree() == 0 for X in sol.basis)


def test_orbit_rank():
    w = web("x1+x2+x3", 3, (0, 0, 0))
    assert orbit_rank([field(["1", "1", "1"], w)]) == 1
    assert orbit_rank([field(["0", "0", "0"], w)]) == 0
    assert orbit_rank(solution(NPROD, 4, (0, 0, 0, 0))) == 4


def test_parallelizability():
    for text, n, base in [("x1+x2+x3", 3, (0, 0, 0)), ("x1+x2+x1*x2", 2, (0, 0))]:
        v = parallelizability_test(web(text, n, base))
        assert v.verdict == "parallelizable" and v.branch_symmetry and v.branch_normal_form
    v = parallelizability_test(web(DD, 3, (0, 1, 2)))
    assert v.verdict == "not parallelizable" and not v.branch_symmetry and not v.branch_normal_form


@pytest.mark.parametrize("entry_id", ["sl2-abc-n3", "crossratio-n4", "l1-example-n3", "n-example-n4"])
def test_generators_against_sympy(entry_id):
    """Symbolic oracle: d(Xf) ^ df = 0 for every catalogue generator, in closed form."""
    e = get_entry(entry_id)
    xs = sympy.symbols(f"x1:{e.n + 1}")
    f = sympy.sympify(str(e.f).replace("^", "**"), locals={f"x{i + 1}": xs[i] for i in range(e.n)})
    w = e.web()
    sol = solution(str(e.f), e.n, tuple(e.base), e.order)
    for g in e.claim.generators:
        comps = [sympy.sympify(c.replace("^", "**"), locals={f"x{i + 1}": xs[i] for i in range(e.n)}) for c in g.components]
        Xf = sum(c * sympy.diff(f, v) for c, v in zip(comps, xs))
        for i, j in itertools.combinations(range(e.n), 2):
            minor = sympy.diff(Xf, xs[i]) * sympy.diff(f, xs[j]) - sympy.diff(Xf, xs[j]) * sympy.diff(f, xs[i])
            assert sympy.cancel(sympy.together(minor)) == 0
        X = DiagonalField.from_expressions(list(g.components), w.base, w.order - 1)
        assert is_symmetry(X, w).is_symmetry
    assert len(e.claim.generators) <= sol.dim


def test_non_symmetry_detected_symbolically_too():
    x1, x2, x3 = sympy.symbols("x1 x2 x3")
    f = (x2 * x3 + x3 * x1 - 2 * x1 * x2) / (x1 + x2 - 2 * x3)
    Xf = x1 * sympy.diff(f, x1)
    minor = sympy.diff(Xf, x1) * sympy.diff(f, x2) - sympy.diff(Xf, x2) * sympy.diff(f, x1)
    assert sympy.simplify(minor) != 0
    w = web(DD, 3, (0, 1, 2))
    assert not is_symmetry(field(["x1", "0", "0"], w), w).is_symmetry
