from __future__ import annotations

import json
import subprocess
import sys

import pytest
from conftest import DD

from webiso.cli import EXIT_ALARM, EXIT_INVALID, EXIT_OK, EXIT_USAGE, main


def write(tmp_path, name, doc):
    p = tmp_path / name
    p.write_text(json.dumps(doc))
    return str(p)


@pytest.fixture
def dd_file(tmp_path):
    return write(tmp_path, "dd.json", {"n": 3, "f": DD, "base": ["0", "1", "2"], "order": 10})


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_analyze_dd(dd_file, capsys):
    code, out, _ = run(["analyze", dd_file], capsys)
    assert code == EXIT_OK
    doc = json.loads(out)
    assert doc["config"] == {"order": 10, "degree_cap": 9, "flags": doc["config"]["flags"]}
    assert doc["version"] and doc["config"]["flags"]
    res = doc["result"]
    assert res["symmetries"]["dim"] == 3
    cl = res["classification"]
    assert (cl["S"], cl["N"], cl["C"]) == (1, 0, 0)
    assert cl["factors"][0]["action"] in ("transverse", "tangent")
    assert cl["bound_checks"]["passed"]
    assert res["alarms"] == []


def test_deterministic(dd_file, tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert main(["analyze", dd_file, "-o", str(a)]) == EXIT_OK
    assert main(["analyze", dd_file, "-o", str(b)]) == EXIT_OK
    assert a.read_bytes() == b.read_bytes()


def test_usage_errors(tmp_path, capsys):
    assert run(["analyze", str(tmp_path / "missing.json")], capsys)[0] == EXIT_USAGE
    assert run([], capsys)[0] == EXIT_USAGE
    assert run(["frobnicate"], capsys)[0] == EXIT_USAGE
    bad = write(tmp_path, "bad.json", [1, 2])
    assert run(["analyze", bad], capsys)[0] == EXIT_USAGE
    garbage = tmp_path / "g.json"
    garbage.write_text("{not json")
    assert run(["analyze", str(garbage)], capsys)[0] == EXIT_USAGE
    w = write(tmp_path, "w.json", {"n": 2, "f": "x1+x2", "base": ["0", "0"]})
    assert run(["analyze", w, "-W", "3"], capsys)[0] == EXIT_USAGE
    assert run(["analyze", w, "-D", "8"], capsys)[0] == EXIT_USAGE
    assert run(["atlas", "verify"], capsys)[0] == EXIT_USAGE
    assert run(["atlas", "verify", "nope"], capsys)[0] == EXIT_USAGE


def test_invalid_web(tmp_path, capsys):
    w = write(tmp_path, "w.json", {"n": 3, "f": "x1+x2*x3", "base": ["0", "0", "0"]})
    code, _, err = run(["analyze", w], capsys)
    assert code == EXIT_INVALID and "invalid web" in err
    w = write(tmp_path, "p.json", {"n": 2, "f": "x1+*x2", "base": ["0", "0"]})
    assert run(["analyze", w], capsys)[0] == EXIT_INVALID


def test_parallelizable_command(tmp_path, capsys):
    w = write(tmp_path, "w.json", {"n": 3, "f": "x1+x2+x3", "base": ["0", "0", "0"]})
    code, out, _ = run(["parallelizable", w], capsys)
    assert code == EXIT_OK
    assert json.loads(out)["result"]["verdict"] == "parallelizable"
    code, out, _ = run(["analyze", w], capsys)
    res = json.loads(out)["result"]
    assert res["symmetries"]["dim"] == 4 and res["classification"] == "not applicable (parallelizable web)"


def test_normal_form_command(tmp_path, capsys):
    w = write(tmp_path, "w.json", {"n": 2, "f": "x1+x2+x1*x2^2", "base": ["0", "0"]})
    code, out, _ = run(["normal-form", w, "--homothety", "2", "-1", "1/2"], capsys)
    assert code == EXIT_OK
    res = json.loads(out)["result"]
    assert not res["linear"] and all(h["ok"] for h in res["homothety"])


def test_verify_field(dd_file, tmp_path, capsys):
    fld = write(tmp_path, "f.json", {"components": ["x1^2", "x2^2", "x3^2"]})
    code, out, _ = run(["verify-field", dd_file, fld], capsys)
    assert code == EXIT_OK
    res = json.loads(out)["result"]
    assert res["certificate"]["is_symmetry"] and res["certificate"]["exact"]
    assert res["phi"]["coefficients"][:3] == ["-4/9", "4/3", "-1"]  # -(f(base) + s)^2 with f(base) = -2/3
    coeffs = write(tmp_path, "c.json", {"components": [["1"], ["1"], ["1"]]})
    code, out, _ = run(["verify-field", dd_file, coeffs], capsys)
    assert code == EXIT_OK and json.loads(out)["result"]["phi"]["coefficients"][0] == "-1"
    not_sym = write(tmp_path, "n.json", {"components": [["0", "1"], [], []]})
    code, out, _ = run(["verify-field", dd_file, not_sym], capsys)
    assert code == EXIT_OK and not json.loads(out)["result"]["certificate"]["is_symmetry"]
    mixed = write(tmp_path, "m.json", {"components": ["x1", ["1"], "0"]})
    assert run(["verify-field", dd_file, mixed], capsys)[0] == EXIT_USAGE


def test_atlas_list(capsys):
    code, out, _ = run(["atlas", "list"], capsys)
    assert code == EXIT_OK
    ids = [e["id"] for e in json.loads(out)["entries"]]
    assert "parallelizable-n3" in ids and "crossratio-n4" in ids


def test_atlas_verify_one(tmp_path, capsys):
    code, out, _ = run(["atlas", "verify", "parallelizable-n3"], capsys)
    assert code == EXIT_OK
    doc = json.loads(out)
    assert doc["entries"] == [{"id": "parallelizable-n3", "status": "confirmed", "dim": 4, "exact": True}]
    assert doc["report"]["status"] == "confirmed"
    d = tmp_path / "reports"
    assert main(["atlas", "verify", "n-subcase1-n3", "sl2-abc-n3", "--out-dir", str(d)]) == EXIT_OK
    summary = json.loads((d / "summary.json").read_text())
    assert [x["id"] for x in summary["discrepancies"]] == ["n-subcase1-n3"]
    assert summary["discrepancies"][0]["computed"]["N"] == 1
    assert json.loads((d / "sl2-abc-n3.json").read_text())["result"]["status"] == "confirmed"


def test_alarm_exit_code(monkeypatch, dd_file, capsys):
    from webiso import analysis

    real = analysis.block_route

    def wrong(sol, sc):
        bd = real(sol, sc)
        return type(bd)(**{**bd.__dict__, "constant_rows": (0,)})

    monkeypatch.setattr(analysis, "block_route", wrong)
    code, out, _ = run(["analyze", dd_file], capsys)
    assert code == EXIT_ALARM
    assert any("disagree" in a for a in json.loads(out)["result"]["alarms"])


def test_console_script(dd_file):
    p = subprocess.run([sys.executable, "-m", "webiso.cli", "analyze", dd_file, "--no-normal-form"], capture_output=True, text=True)
    assert p.returncode == 0 and json.loads(p.stdout)["result"]["symmetries"]["dim"] == 3
