from __future__ import annotations

import pytest
from conftest import CROSS, DD, NPROD, web

from webiso.jets import UniJet, substitute_diagonal, uni_compose
from webiso.normalform import compute_normal_form, homothety_uniqueness_check, rescaled_web
from webiso.rationals import Q


def check_invariants(nf, n):
    h = nf.nf
    for i in range(n):
        e = [0] * n
        e[i] = 1
        assert h.coefficient(e) == 1
    for alpha, c in h.coeffs.items():
        assert sum(alpha) >= 1
        if sum(alpha) >= 2:
            assert max(alpha) < sum(alpha)
    assert sum(nf.a_quadratic.values()) == 0


def test_sum_is_fixed():
    w = web("x1+x2+x3", 3, (0, 0, 0))
    nf = compute_normal_form(w)
    assert nf.is_linear and nf.nf == w.f_jet
    for g in nf.g:
        assert g == UniJet.identity(w.order, 0)
    assert nf.theta == UniJet.identity(w.order, 0)


def test_multiplicative_web_is_linear():
    nf = compute_normal_form(web("x1+x2+x1*x2", 2, (0, 0), 8))
    assert nf.is_linear and nf.linear_to_order == 8
    check_invariants(nf, 2)


def test_dd_is_nonlinear():
    nf = compute_normal_form(web(DD, 3, (0, 1, 2)))
    assert nf.linear_to_order <= 2
    assert any(c != 0 for a, c in nf.nf.coeffs.items() if 2 <= sum(a) <= 3)
    check_invariants(nf, 3)


@pytest.mark.parametrize(
    "text,n,base",
    [(DD, 3, (0, 1, 2)), (CROSS, 4, (0, 1, 2, 3)), (NPROD, 4, (0, 0, 0, 0)), ("x1+x2+x1*x2^2", 2, (0, 0)), ("x1+x2+x3+x1*x2*x3", 3, (1, 2, 3))],
)
def test_reconstruction(text, n, base):
    w = web(text, n, base)
    nf = compute_normal_form(w)
    assert uni_compose(nf.theta, substitute_diagonal(w.f_jet, list(nf.g))) == nf.nf
    check_invariants(nf, n)


@pytest.mark.parametrize("lam", ["1", "2", "-1", "1/2"])
@pytest.mark.parametrize("text,n,base", [(DD, 3, (0, 1, 2)), (CROSS, 4, (0, 1, 2, 3)), ("x1+x2+x1*x2^2", 2, (0, 0))])
def test_homothety(text, n, base, lam):
    rep = homothety_uniqueness_check(web(text, n, base), Q(lam))
    assert rep.ok, rep.mismatches[:3]


def test_homothety_scale_three():
    w = web("x1+x2+x1*x2^2", 2, (0, 0))
    a = compute_normal_form(w).nf.homogeneous_part(3)
    b = compute_normal_form(rescaled_web(w, 3)).nf.homogeneous_part(3)
    assert a and any(a.values())
    assert {k: 9 * v for k, v in a.items()} == b


def test_homothety_rejects_zero():
    with pytest.raises(ValueError):
        rescaled_web(web("x1+x2", 2, (0, 0)), 0)
