"""Acceptance criteria AC1 to AC10; a summary line per criterion is printed at the end of the run."""
from __future__ import annotations

import json
import random
import time

from conftest import CROSS, DD, L2F, NPROD, verified, web

from webiso.analysis import analyze
from webiso.atlas import atlas_entries, get_entry
from webiso.cli import main
from webiso.jets import UniJet, substitute_diagonal, uni_compose
from webiso.linefields import line_bracket
from webiso.normalform import compute_normal_form, homothety_uniqueness_check
from webiso.rationals import Q, mpq
from webiso.symmetry import DiagonalField, apply_field, induced_phi, is_symmetry

IDS = [e.id for e in atlas_entries()]


def fields(w, texts):
    return [DiagonalField.from_expressions(t, w.base, w.order - 1) for t in texts]


def test_ac1():
    """parallelizable web x1+x2+x3: dimension 4 = n+1, both branches parallelizable, under 10 s"""
    t = time.perf_counter()
    a = analyze(web("x1+x2+x3", 3, (0, 0, 0), 8))
    elapsed = time.perf_counter() - t
    assert a.solution.dim == 4 and a.solution.stabilized
    assert a.verdict.verdict == "parallelizable"
    assert a.verdict.branch_symmetry and a.verdict.branch_normal_form
    assert not a.alarms
    assert elapsed < 10


def test_ac2():
    """sl(2) web (a,b,c)=(1,1,-2) at W=10: exact dimension 3, (1,0,0), profile and bound 3 <= 3, under 60 s"""
    t = time.perf_counter()
    a = analyze(web(DD, 3, (0, 1, 2), 10))
    elapsed = time.perf_counter() - t
    assert a.solution.dim == 3 and a.solution.stabilized
    assert a.counts == (1, 0, 0)
    assert a.block.counts == (1, 0, 0)
    assert all(f.action in ("transverse", "tangent") for f in a.decomposition.factors)
    assert a.bound.passed and ("3S+2N+C <= n", "3 <= 3", True, True) in a.bound.checks
    assert not a.alarms
    r = verified("sl2-abc-n3")
    assert r.dimension["exact"] and r.dimension["lower_bound"] == 3
    assert elapsed < 60


def test_ac3():
    """n construction, n=4: four generators certified, exact dimension 4, (0,1,2), n factor transverse with phi_F = 0, phi_E = id"""
    t = time.perf_counter()
    w = web(NPROD, 4, (0, 0, 0, 0))
    gens = fields(w, [["1", "1", "0", "0"], ["x1", "x2+1", "0", "0"], ["0", "0", "1", "0"], ["0", "0", "0", "1"]])
    for X in gens:
        assert is_symmetry(X, w).is_symmetry
    r = verified("n-example-n4")
    assert r.status == "confirmed"
    assert r.dimension["computed"] == 4 and r.dimension["lower_bound"] == 4 and r.dimension["exact"]
    a = r.analysis
    assert a.counts == (0, 1, 2)
    nfac = next(f for f in a.decomposition.factors if f.kind == "n")
    assert nfac.action == "transverse"
    phiF, phiE = nfac.phis
    assert phiF.is_zero()
    assert phiE.phi == UniJet.identity(phiE.phi.order, phiE.phi.center)
    assert induced_phi(gens[0], w).is_zero()
    ident = induced_phi(gens[1], w).phi
    assert ident == UniJet.identity(ident.order, ident.center)
    assert time.perf_counter() - t < 30


def test_ac4():
    """cross-ratio 5-web: the sl(2) triple is certified with all phi = 0, decomposition (1,0,0) tangent"""
    w = web(CROSS, 4, (0, 1, 2, 3))
    F, H, E = fields(w, [["1"] * 4, ["x1", "x2", "x3", "x4"], ["x1^2", "x2^2", "x3^2", "x4^2"]])
    for X in (F, H, E):
        cert = is_symmetry(X, w)
        assert cert.is_symmetry and cert.exact
        assert induced_phi(X, w).is_zero()
    r = verified("crossratio-n4")
    assert r.status == "confirmed"
    assert r.analysis.counts == (1, 0, 0)
    assert [f.action for f in r.analysis.decomposition.factors] == ["tangent"]


def test_ac5():
    """explicit four-variable example, c=(0,1,2,3): F.f = H.f = E.f = 0 exactly"""
    w = web(L2F, 4, (0, 1, 2, 3))
    c = [0, 1, 2, 3]
    F, H, E = fields(
        w,
        [["1"] * 4, [f"x{i + 1}+{c[i]}" for i in range(4)], [f"(x{i + 1}+{c[i]})^2" for i in range(4)]],
    )
    for X in (F, H, E):
        cert = is_symmetry(X, w)
        assert cert.is_symmetry and cert.exact
        assert apply_field(X, w.f_jet).is_zero()
        assert induced_phi(X, w).is_zero()
    assert str(get_entry("l2-example-n4").f) == L2F


def test_ac6():
    """bracket calculus: power formula for r,s <= 5, antisymmetry and Jacobi on 100 triples, sl(2) constants of {1,t,t^2}"""
    W = 12
    mono = lambda r: UniJet.from_coeffs([0] * r + [1], W, 0)  # noqa: E731
    for r in range(6):
        for s in range(6):
            want = UniJet.from_coeffs([0] * (r + s - 1) + [s - r], W - 1, 0) if r + s else UniJet.constant(0, W - 1, 0)
            assert line_bracket(mono(r), mono(s)) == want
    rng = random.Random(2024)
    rnd = lambda: UniJet.from_coeffs([mpq(rng.randint(-9, 9), rng.randint(1, 4)) for _ in range(9)], 8, 0)  # noqa: E731
    for _ in range(100):
        a, b, c = rnd(), rnd(), rnd()
        assert line_bracket(a, b) == -line_bracket(b, a)
        jac = line_bracket(a.truncate(7), line_bracket(b, c)) + line_bracket(b.truncate(7), line_bracket(c, a)) + line_bracket(c.truncate(7), line_bracket(a, b))
        assert jac.is_zero()
    F, H, E = mono(0), mono(1), mono(2)
    assert line_bracket(F, H) == F.truncate(W - 1)
    assert line_bracket(H, E) == E.truncate(W - 1)
    assert line_bracket(F, E) == (H * 2).truncate(W - 1)


def test_ac7(monkeypatch, tmp_path, capsys):
    """classifier cross-validation: invariant route and block route give the same (S,N,C) on every atlas entry; disagreement exits 3"""
    checked = 0
    for i in IDS:
        a = verified(i).analysis
        assert not any("routes disagree" in x for x in a.alarms)
        if a.parallelizable:
            continue
        assert a.block is not None and a.block.counts == a.decomposition.counts, i
        checked += 1
    assert checked == len(IDS) - 1

    from webiso import analysis

    real = analysis.block_route

    def shifted(sol, sc):
        bd = real(sol, sc)
        return type(bd)(**{**bd.__dict__, "constant_rows": bd.constant_rows + (sol.dim,)})

    monkeypatch.setattr(analysis, "block_route", shifted)
    p = tmp_path / "w.json"
    p.write_text(json.dumps({"n": 3, "f": DD, "base": ["0", "1", "2"], "order": 10}))
    assert main(["analyze", str(p), "--no-normal-form"]) == 3
    capsys.readouterr()


def test_ac8():
    """normal form: reconstruction exact on every atlas entry, homothety covariance on three entries, x+y+xy linear to order 8"""
    for i in IDS:
        w = get_entry(i).web()
        nf = verified(i).analysis.normal_form
        assert nf is not None and nf.order == w.order
        assert uni_compose(nf.theta, substitute_diagonal(w.f_jet, list(nf.g))) == nf.nf, i
        assert sum(nf.a_quadratic.values()) == 0
    for i in ("sl2-abc-n3", "crossratio-n4", "commutative-n3-m2"):
        w = get_entry(i).web()
        for lam in ("2", "-1", "1/2"):
            assert homothety_uniqueness_check(w, Q(lam)).ok, (i, lam)
    lin = compute_normal_form(web("x1+x2+x1*x2", 2, (0, 0), 8))
    assert lin.is_linear and lin.linear_to_order == 8


def test_ac9():
    """bound sweep: 3S+2N+C <= n, commutative C < n, and n >= 4S+2N+C-1 when S > 1"""
    seen_big = False
    for i in IDS:
        r = verified(i)
        if r.status != "confirmed" or r.analysis.parallelizable:
            continue
        S, N, C = r.analysis.counts
        n = r.entry.n
        assert 3 * S + 2 * N + C <= n, i
        if S == 0 and N == 0:
            assert C < n, i
        if S > 1:
            seen_big = True
            assert n >= 4 * S + 2 * N + C - 1, i
        assert r.analysis.bound.passed, i
    assert seen_big


def test_ac10(tmp_path, capsys):
    """discrepancy report: atlas verify --all runs without alarms and lists discrepancies with computed decompositions"""
    out = tmp_path / "atlas"
    code = main(["atlas", "verify", "--all", "--out-dir", str(out)])
    capsys.readouterr()
    assert code == 0
    summary = json.loads((out / "summary.json").read_text())
    assert summary["alarms"] == []
    assert len(summary["entries"]) == len(IDS)
    for d in summary["discrepancies"]:
        assert d["differences"] and d["computed"] is not None
        assert {"S", "N", "C", "factors"} <= set(d["computed"])
    statuses = {e["id"]: e["status"] for e in summary["entries"]}
    assert all(s in ("confirmed", "discrepancy", "computed-only") for s in statuses.values())
    for i in IDS:
        assert (out / f"{i}.json").exists()
