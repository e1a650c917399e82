"""Command-line front end.

Exit codes: 0 success, 1 usage error or unreadable input, 2 invalid web,
3 internal consistency alarm.
"""
from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import __version__
from .expr import ExpressionError
from .jets import JetError
from .rationals import Q

EXIT_OK, EXIT_USAGE, EXIT_INVALID, EXIT_ALARM = 0, 1, 2, 3
DEFAULT_ORDER = 8

FLAGS = {
    "exp_arguments": "exp(L) with L(base) rational carried as an exact unit exp(q)",
    "symmetry_equations": "pivot form L_j(Xf) = 0, j = 2..n",
    "closure_order": "min(D-1, W-3)",
    "parallelizability_normal_form_order": "W-1",
    "normal_form_linear_convention": "g_i'(0) = a_1/a_i, theta'(0) = 1/a_1",
    "block_tie_break": "column first",
    "bound_n_ge_4S+2N+C-1": "enforced only when S > 1",
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, ensure_ascii=False) + "\n"


def _emit(doc, out: str | None):
    text = _dump(doc)
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _envelope(command: str, W, D, result) -> dict:
    return {
        "tool": "webiso",
        "version": __version__,
        "command": command,
        "config": {"order": W, "degree_cap": D, "flags": FLAGS},
        "result": result,
    }


def _read_json(path: str):
    try:
        return json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise UsageError(f"no such file: {path}")
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read {path}: {exc}")


def _load_web(path: str, order: int | None):
    from .symmetry import WebSpec

    doc = _read_json(path)
    if not isinstance(doc, dict):
        raise UsageError(f"{path}: expected a JSON object")
    w = WebSpec.from_json(doc, order)
    if order is None and "order" not in doc:
        w = w.with_order(DEFAULT_ORDER)
    return w


def _config(w, degree_cap):
    W = w.order
    if W < 4:
        raise UsageError(f"order W = {W} must be at least 4")
    D = W - 1 if degree_cap is None else degree_cap
    if not 0 <= D <= W - 1:
        raise UsageError(f"degree cap D = {D} must lie in 0..W-1 = 0..{W - 1}")
    return W, D


def cmd_analyze(args) -> int:
    from .analysis import analyze

    w = _load_web(args.web, args.order)
    W, D = _config(w, args.degree_cap)
    a = analyze(w, D, normal_form=not args.no_normal_form)
    _emit(_envelope("analyze", W, D, a.to_json()), args.out)
    return EXIT_ALARM if a.alarms else EXIT_OK


def cmd_normal_form(args) -> int:
    from .normalform import compute_normal_form, homothety_uniqueness_check

    w = _load_web(args.web, args.order)
    W, D = _config(w, None)
    nf = compute_normal_form(w)
    res = {"web": w.to_json(), "normal_form": nf.to_json(), "linear": nf.is_linear}
    bad = False
    if args.homothety:
        reps = [homothety_uniqueness_check(w, Q(x), nf) for x in args.homothety]
        res["homothety"] = [r.to_json() for r in reps]
        bad = not all(r.ok for r in reps)
    _emit(_envelope("normal-form", W, D, res), args.out)
    return EXIT_ALARM if bad else EXIT_OK


def cmd_parallelizable(args) -> int:
    from .symmetry import parallelizability_test

    w = _load_web(args.web, args.order)
    W, D = _config(w, args.degree_cap)
    v = parallelizability_test(w, degree_cap=D)
    _emit(_envelope("parallelizable", W, D, v.to_json()), args.out)
    return EXIT_ALARM if v.verdict == "inconsistent" else EXIT_OK


def _load_field(path: str, w, order: int):
    from .symmetry import DiagonalField

    doc = _read_json(path)
    comps = doc.get("components") if isinstance(doc, dict) else None
    if not isinstance(comps, list) or len(comps) != w.n:
        raise UsageError(f"{path}: expected 'components' with {w.n} entries")
    if all(isinstance(c, str) for c in comps):
        return DiagonalField.from_expressions(comps, w.base, order)
    if all(isinstance(c, list) for c in comps):
        try:
            polys = [[Q(str(x)) for x in c] for c in comps]
        except ValueError as exc:
            raise UsageError(f"{path}: {exc}")
        return DiagonalField.from_polynomials(polys, w.base, order)
    raise UsageError(f"{path}: components must be all coefficient lists or all expressions")


def cmd_verify_field(args) -> int:
    from .symmetry import PhiError, induced_phi, is_symmetry, require_valid

    w = _load_web(args.web, args.order)
    W, D = _config(w, None)
    require_valid(w)
    X = _load_field(args.field, w, W - 1)
    cert = is_symmetry(X, w)
    res = {"web": w.to_json(), "field": X.to_json(), "certificate": cert.to_json()}
    if cert.is_symmetry:
        try:
            res["phi"] = induced_phi(X, w).to_json()
        except PhiError as exc:
            res["phi_error"] = str(exc)
            _emit(_envelope("verify-field", W, D, res), args.out)
            return EXIT_ALARM
    _emit(_envelope("verify-field", W, D, res), args.out)
    return EXIT_OK


def cmd_atlas_list(args) -> int:
    from .atlas import catalogue_json

    doc = {"tool": "webiso", "version": __version__, **catalogue_json()}
    _emit(doc, args.out)
    return EXIT_OK


def _verify_one(entry_id: str) -> dict:
    from .atlas import verify_entry

    return verify_entry(entry_id).to_json()


def cmd_atlas_verify(args) -> int:
    from .atlas import atlas_entries

    known = [e.id for e in atlas_entries()]
    if args.all:
        ids = known
    else:
        if not args.ids:
            raise UsageError("give entry ids or --all")
        missing = [i for i in args.ids if i not in known]
        if missing:
            raise UsageError(f"unknown atlas entries: {', '.join(missing)}")
        ids = list(args.ids)
    if args.jobs > 1 and len(ids) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            reports = list(pool.map(_verify_one, ids))
    else:
        reports = [_verify_one(i) for i in ids]
    orders = {e.id: e.order for e in atlas_entries()}
    if args.out_dir:
        d = Path(args.out_dir)
        d.mkdir(parents=True, exist_ok=True)
        for r in reports:
            W = orders[r["id"]]
            (d / f"{r['id']}.json").write_text(_dump(_envelope("atlas verify", W, W - 1, r)))
    summary = {
        "tool": "webiso",
        "version": __version__,
        "flags": FLAGS,
        "entries": [
            {"id": r["id"], "status": r["status"], "dim": r["dimension"].get("computed"), "exact": r["dimension"].get("exact")}
            for r in reports
        ],
        "discrepancies": [
            {
                "id": r["id"],
                "differences": r["differences"],
                "computed": (r.get("computed") or {}).get("classification"),
                "symmetries": (r.get("computed") or {}).get("symmetries"),
            }
            for r in reports
            if r["status"] == "discrepancy"
        ],
        "alarms": [{"id": r["id"], "alarms": r["alarms"]} for r in reports if r["alarms"]],
    }
    if len(ids) == 1 and not args.out_dir:
        summary["report"] = reports[0]
    _emit(summary, args.out)
    if args.out_dir:
        (Path(args.out_dir) / "summary.json").write_text(_dump(summary))
    return EXIT_ALARM if summary["alarms"] else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="webiso", description="Infinitesimal isomorphisms of (n+1)-webs x_1, ..., x_n, f.")
    p.add_argument("--version", action="version", version=f"webiso {__version__}")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    def web_cmd(name, func, help_, cap=True):
        s = sub.add_parser(name, help=help_)
        s.add_argument("web", help="web description (JSON)")
        s.add_argument("--order", "-W", type=int, default=None, help="working order W (default: from file, else 8)")
        if cap:
            s.add_argument("--degree-cap", "-D", type=int, default=None, help="degree cap D (default W-1)")
        s.add_argument("--out", "-o", default=None, help="write the report here instead of stdout")
        s.set_defaults(func=func)
        return s

    a = web_cmd("analyze", cmd_analyze, "full pipeline")
    a.add_argument("--no-normal-form", action="store_true", help="skip the normal form stage")
    nf = web_cmd("normal-form", cmd_normal_form, "formal normal form", cap=False)
    nf.add_argument("--homothety", nargs="*", default=[], metavar="LAMBDA", help="also check covariance under x -> lambda x")
    web_cmd("parallelizable", cmd_parallelizable, "two-branch parallelizability test")
    vf = web_cmd("verify-field", cmd_verify_field, "certify a diagonal vector field", cap=False)
    vf.add_argument("field", help="field description (JSON)")

    at = sub.add_parser("atlas", help="catalogue of example webs")
    asub = at.add_subparsers(dest="atlas_command", parser_class=_Parser)
    ls = asub.add_parser("list", help="print the catalogue")
    ls.add_argument("--out", "-o", default=None)
    ls.set_defaults(func=cmd_atlas_list)
    vr = asub.add_parser("verify", help="verify entries against their claims")
    vr.add_argument("ids", nargs="*")
    vr.add_argument("--all", action="store_true")
    vr.add_argument("--jobs", "-j", type=int, default=1)
    vr.add_argument("--out-dir", default=None, help="write one report per entry plus summary.json")
    vr.add_argument("--out", "-o", default=None)
    vr.set_defaults(func=cmd_atlas_verify)
    return p


def main(argv=None) -> int:
    from .classify import ClassificationError
    from .symmetry import WebError

    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if not hasattr(args, "func"):
            raise UsageError("missing command")
        return args.func(args)
    except UsageError as exc:
        print(f"webiso: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (WebError, ExpressionError, JetError) as exc:
        print(f"webiso: invalid web: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except ClassificationError as exc:
        print(f"webiso: consistency alarm: {exc}", file=sys.stderr)
        return EXIT_ALARM


if __name__ == "__main__":
    sys.exit(main())
