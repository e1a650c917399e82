from __future__ import annotations

import functools

import pytest
import sympy

from webiso.rationals import mpq
from webiso.symmetry import WebSpec, solve_symmetries

DD = "(x2*x3+x3*x1-2*x1*x2)/(x1+x2-2*x3)"
CROSS = "(x1*x2+x3*x4-x1*x3-x2*x4)/(x1*x2+x3*x4-x3*x2-x1*x4)"
NPROD = "(1+x2-x1)*exp(x3+x4)"
L2F = "(3+x1*x2-x1-3*x2+x4+3*x3+x3*x4-x3*x1-x2*x4)/(4+x1*x2-2*x1-2*x2+2*x4+2*x3+x3*x4-x3*x2-x1*x4)"


def to_sympy(q):
    return sympy.Rational(int(q.numerator), int(q.denominator))


def from_sympy(r):
    r = sympy.Rational(r)
    return mpq(int(r.p), int(r.q))


@functools.lru_cache(maxsize=None)
def web(text: str, n: int, base: tuple, order: int = 8) -> WebSpec:
    return WebSpec.from_text(text, n, base, order)


@functools.lru_cache(maxsize=None)
def solution(text: str, n: int, base: tuple, order: int = 8):
    return solve_symmetries(web(text, n, base, order))


@pytest.fixture
def dd_web():
    return web(DD, 3, (0, 1, 2), 10)


@pytest.fixture
def n8_web():
    return web(NPROD, 4, (0, 0, 0, 0))


@functools.lru_cache(maxsize=None)
def verified(entry_id: str):
    from webiso.atlas import verify_entry

    return verify_entry(entry_id)


_AC_RESULTS: dict = {}


def pytest_runtest_logreport(report):
    name = report.nodeid.rsplit("::", 1)[-1]
    if not name.startswith("test_ac"):
        return
    if report.when == "call" or report.outcome != "passed":
        prev = _AC_RESULTS.get(name)
        if prev is None or prev == "PASS":
            _AC_RESULTS[name] = "PASS" if report.outcome == "passed" else "FAIL"


def pytest_terminal_summary(terminalreporter):
    if not _AC_RESULTS:
        return
    import test_acceptance

    terminalreporter.section("acceptance criteria")
    for k in range(1, 11):
        name = f"test_ac{k}"
        doc = (getattr(test_acceptance, name).__doc__ or "").strip().splitlines()[0]
        terminalreporter.write_line(f"AC{k:<2} {_AC_RESULTS.get(name, 'NOT RUN'):7} {doc}")
