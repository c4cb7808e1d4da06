"""Command line front end: ``doubleore <command> [session] [options]``."""
from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

from . import analysis, dedata, extension, session
from .catalog import PARAMS, ParameterConstraintViolated, builtin
from .exactla import FieldError, field_from_name, scalar_str
from .ncalg import AlphabetMismatch, RuleError
from .report import FAIL, INCONCLUSIVE, PASS, UNSUPPORTED, CertReport, dumps

COMMANDS = ["validate", "build", "pbw", "hilbert", "det-sigma", "invert-sigma", "check-double",
            "exact-seq", "twist", "normal", "order", "subdims", "koszul", "example", "run"]
DEFAULT_CHECKS = ["validate", "pbw", "hilbert", "check-double"]

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_INTERNAL = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="doubleore",
                                 description="Build and certify double Ore extensions.")
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("session", nargs="?",
                    help="session file (omit with --example); 'run' executes its [options] checks")
    ap.add_argument("--field", help="q or fp:<prime>; overrides the session file")
    ap.add_argument("--max-degree", type=int, default=None,
                    help="degree bound for certificates (default 5)")
    ap.add_argument("--json", metavar="PATH", help="write the JSON report here ('-' for stdout)")
    ap.add_argument("--example", "--name", dest="example", choices=sorted(PARAMS),
                    help="use a builtin example instead of a session file")
    ap.add_argument("--param", "--params", dest="params", action="append", default=[],
                    metavar="K=V", help="builtin parameter, repeatable (h=2 or 'p=2,b=3')")
    ap.add_argument("--element", action="append", default=[],
                    help="element of B (normal, subdims); repeatable")
    ap.add_argument("--enumerate", action="store_true", help="normal: exhaustive search over F_p")
    ap.add_argument("--degree", type=int, help="normal --enumerate: degree to search")
    ap.add_argument("--max", type=int, default=100, help="order: largest power tried")
    ap.add_argument("--timing", action="store_true", help="print wall time per check")
    return ap


def _params(items: list[str]) -> dict:
    out = {}
    for item in items:
        for part in item.split(","):
            if not part.strip():
                continue
            if "=" not in part:
                raise UsageError(f"parameter {part!r} is not of the form name=value")
            k, v = part.split("=", 1)
            out[k.strip()] = v.strip()
    return out


def _load(args):
    """Return (DEData, SessionFile or None, max_degree)."""
    if args.example:
        F = field_from_name(args.field or "q")
        spec = builtin(args.example, _params(args.params), F)
        return spec.data, None, args.max_degree if args.max_degree is not None else 5
    if not args.session:
        raise UsageError("give a session file or --example NAME")
    text = Path(args.session).read_text(encoding="utf-8")
    sf = session.parse(text, field_override=args.field)
    bound = args.max_degree if args.max_degree is not None else sf.options.get("max_degree", 5)
    return session.to_data(sf), sf, bound


def _timed(fn, *a, **kw):
    t = time.perf_counter()
    rep = fn(*a, **kw)
    rep.elapsed = time.perf_counter() - t
    return rep


def _build_or_report(d):
    try:
        return extension.build(d), None
    except extension.ValidationFailed as e:
        return None, e.report


def _elements(b, texts):
    out = []
    for t in texts:
        try:
            expr = session.parse_expression(t)
            out.append(b.nf(session.evaluate(expr, b.alphabet, b.field)))
        except session.SessionError as e:
            raise UsageError(f"--element {t!r}: {e}") from None
    return out


def run(args) -> list[CertReport]:
    if args.command == "example":
        return _example(args)
    d, sf, bound = _load(args)
    cmd = args.command
    if cmd == "run":
        checks = (sf.options.get("checks") if sf else None) or DEFAULT_CHECKS
        bad = [c for c in checks if c not in COMMANDS or c in ("run", "example")]
        if bad:
            raise UsageError(f"unknown check(s) in [options]: {', '.join(bad)}")
        out = []
        for c in checks:
            out.extend(r for r in run(argparse.Namespace(**{**vars(args), "command": c}))
                       if r not in out)
        return out
    reports: list[CertReport] = []
    if cmd == "validate":
        reports.append(_timed(d.base.check_confluence, max(bound, 3), check="base_confluence"))
        reports.append(_timed(dedata.validate_hom, d))
        reports.append(_timed(dedata.check_r3_formulas, d))
        reports.append(_timed(dedata.check_r3_by_ambiguity, d))
        return reports
    if cmd in ("det-sigma", "invert-sigma"):
        return _sigma_commands(cmd, d)
    if cmd in ("exact-seq", "twist"):
        trimmed = dedata.trim(d)
        b, bad = _build_or_report(trimmed)
        if bad is not None:
            return [bad]
        fn = analysis.exact_sequence_check if cmd == "exact-seq" else analysis.g_twist_check
        rep = _timed(fn, b, bound)
        if not d.trimmed:
            rep.notes.append("computed on the trimmed data (delta = 0, tau = 0)")
        return [rep]
    b, bad = _build_or_report(d)
    if bad is not None:
        return [bad]
    if cmd == "build":
        return b.reports + [CertReport("build", PASS, details={
            "rules": b.rules_text(), "provenance": b.provenance})]
    if cmd == "pbw":
        return [_timed(extension.certify_pbw, b, bound)]
    if cmd == "hilbert":
        return [_timed(extension.certify_pbw, b, bound), _timed(extension.certify_hilbert, b, bound)]
    if cmd == "check-double":
        return [_timed(extension.certify_double, b, bound),
                _timed(extension.factor_ring_check, b),
                _timed(extension.noetherian_condition, b)]
    if cmd == "normal":
        return _normal(args, b)
    if cmd == "order":
        e = dedata.det_sigma(d)
        t = time.perf_counter()
        res = analysis.endo_order(e, args.max)
        if isinstance(res, analysis.ExceedsBound):
            rep = CertReport("endo_order", INCONCLUSIVE, bound=args.max,
                             details={"order": str(res)}, notes=["order bound is on powers of det sigma"])
        else:
            rep = CertReport("endo_order", PASS, bound=args.max, details={"order": res})
        rep.elapsed = time.perf_counter() - t
        return [rep]
    if cmd == "subdims":
        els = _elements(b, args.element)
        if not els:
            raise UsageError("subdims needs at least one --element")
        t = time.perf_counter()
        dims = analysis.subalgebra_dims(b, els, bound)
        rep = CertReport("subalgebra_dims", PASS, bound=bound, details={
            "elements": [e.render(b.alphabet) for e in els], "dims": dims})
        rep.elapsed = time.perf_counter() - t
        return [rep]
    if cmd == "koszul":
        return [_timed(analysis.koszul_numeric_check, b, bound)]
    raise UsageError(f"unhandled command {cmd}")


def _sigma_commands(cmd, d) -> list[CertReport]:
    alpha = d.base.alphabet
    try:
        e = dedata.det_sigma(d)
    except dedata.EndomorphismViolation as exc:
        return [CertReport("det_sigma", FAIL, witnesses=[{"reason": str(exc)}])]
    if cmd == "det-sigma":
        variants = dedata.naive_det_variants(d)
        return [CertReport("det_sigma", PASS, bound=d._cache.get("det_checked_to"),
                           details={"images": e.render(), "variants": variants["variants"]})]
    reports = []
    inv = dedata.invert_endo(e)
    if inv is None:
        reports.append(CertReport("invert_det_sigma", FAIL,
                                  witnesses=[{"reason": "det sigma is not invertible"}]))
        return reports
    reports.append(CertReport("invert_det_sigma", PASS, details={"inverse": inv.render()}))
    phi = dedata.right_inverse_phi(d, inv)
    if isinstance(phi, dedata.Unsupported):
        reports.append(CertReport("right_inverse_phi", UNSUPPORTED, notes=[phi.reason]))
        return reports
    images = {alpha.names[g]: [[x.render(alpha) for x in row] for row in m]
              for g, m in sorted(phi.images.items())}
    reports.append(CertReport("right_inverse_phi", PASS, details={"phi": images}))
    reports.append(_timed(dedata.verify_phi, d, phi))
    return reports


def _normal(args, b) -> list[CertReport]:
    if args.enumerate:
        if args.degree is None:
            raise UsageError("normal --enumerate needs --degree")
        t = time.perf_counter()
        res = analysis.enumerate_normal(b, args.degree)
        if isinstance(res, dedata.Unsupported):
            rep = CertReport("enumerate_normal", UNSUPPORTED, notes=[res.reason])
        else:
            n = len(b.basis(args.degree))
            rep = CertReport("enumerate_normal", PASS, bound=args.degree, details={
                "points_searched": analysis.projective_count(n, b.field.p),
                "normal": [c.render() for c in res]})
        rep.elapsed = time.perf_counter() - t
        return [rep]
    els = _elements(b, args.element)
    if not els:
        raise UsageError("normal needs --element EXPR or --enumerate --degree N")
    reports = []
    for z in els:
        t = time.perf_counter()
        try:
            cert = analysis.check_normal(b, z)
        except ValueError as e:
            raise UsageError(str(e)) from None
        if cert is None:
            rep = CertReport("check_normal", FAIL, witnesses=[
                {"element": z.render(b.alphabet), "reason": "not normal"}])
        else:
            rep = CertReport("check_normal", PASS, details=cert.render())
        rep.elapsed = time.perf_counter() - t
        reports.append(rep)
    return reports


def _example(args) -> list[CertReport]:
    if not args.example:
        raise UsageError("example needs --name NAME")
    F = field_from_name(args.field or "q")
    spec = builtin(args.example, _params(args.params), F)
    text = session.render(session.from_data(spec.data))
    rep = CertReport("example", PASS, details={
        "name": spec.name, "params": {k: scalar_str(v) for k, v in spec.params.items()},
        "session": text})
    return [rep]


def _print(reports, timing: bool, out=None):
    out = out or sys.stdout
    for r in reports:
        line = r.summary()
        if timing and r.elapsed is not None:
            line += f"  [{r.elapsed:.3f}s]"
        print(line, file=out)
        for w in r.witnesses[:5]:
            print(f"    witness: {w}", file=out)
        if len(r.witnesses) > 5:
            print(f"    ... {len(r.witnesses) - 5} more witnesses", file=out)
        for k, v in r.details.items():
            if k in ("subchecks", "session"):
                continue
            print(f"    {k}: {v}", file=out)
        if "session" in r.details:
            print(r.details["session"], file=out, end="")
        for note in r.notes:
            print(f"    note: {note}", file=out)


def exit_code(reports) -> int:
    return EXIT_FAIL if any(r.verdict == FAIL for r in reports) else EXIT_OK


def main(argv=None) -> int:
    ap = _parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        reports = run(args)
    except (UsageError, session.SessionError, FieldError, ParameterConstraintViolated,
            dedata.NonHomogeneous, AlphabetMismatch, RuleError, KeyError, OSError) as e:
        print(f"doubleore: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as e:  # noqa: BLE001
        print(f"doubleore: internal error: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_INTERNAL
    if args.json != "-":
        _print(reports, args.timing)
    if args.json:
        text = dumps(reports)
        if args.json == "-":
            sys.stdout.write(text)
        else:
            Path(args.json).write_text(text, encoding="utf-8")
    return exit_code(reports)


if __name__ == "__main__":
    sys.exit(main())
