"""Command-line entry point: ``nillaurent <command> ...``.

Exit codes: 0 success, 1 domain error, 2 parse or usage error, 3 a
property check failed.  ``--json`` prints one canonical JSON object
{ring, result, precision, meta}; otherwise the result is printed on the
first line followed by ``key: value`` lines for the metadata.
"""

from __future__ import annotations

import argparse
import json
import os
import re
import sys
from fractions import Fraction

from gmpy2 import mpq

from . import diffeo, fock, nil_laurent, suites, symplectic, witt
from .errors import NilLaurentError, ParseError
from .laurent import INF, LaurentSeries, format_series, mul_inverse, residue
from .parse import parse_fock_state, parse_rational, parse_ring, parse_series
from .ring import RingDescriptor, RingElement

EXIT_OK, EXIT_DOMAIN, EXIT_USAGE, EXIT_PROPERTY = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def __init__(self, *a, **kw):
        kw.setdefault("allow_abbrev", False)
        super().__init__(*a, **kw)
        # let "-1/2" through as a value (argparse only knows -3 and -0.5)
        self._negative_number_matcher = re.compile(r"^-\d+(/\d+)?$|^-\d*\.\d+$")

    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


# --- output ---


def _color(code: str, text: str, stream) -> str:
    if os.environ.get("NL_COLOR", "1") == "0" or not getattr(stream, "isatty", lambda: False)():
        return text
    return f"\033[{code}m{text}\033[0m"


def _scalar_string(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (Fraction, int)) or type(v).__name__ == "mpq":
        return str(Fraction(int(v.numerator), int(v.denominator)) if not isinstance(v, int) else v)
    return str(v)


def _decimal(v: float) -> str:
    return f"{v:.15g}"


def encode(value):
    """JSON form of a result value (exact strings except for floats)."""
    if isinstance(value, LaurentSeries):
        s = value.classical()
        return {
            "type": "series",
            "precision": None if s.prec == INF else {"num": int(s.prec), "den": s.den},
            "terms": [
                {"num": n, "den": s.den, "coeff": str(c)} for n, c in sorted(s.coeffs.items()) if n < s.prec
            ],
        }
    if isinstance(value, RingElement):
        return {"type": "scalar", "value": str(value)}
    if isinstance(value, bool):
        return {"type": "bool", "value": value}
    if isinstance(value, float):
        return {"type": "decimal", "value": _decimal(value)}
    if isinstance(value, fock.FockVector):
        return {
            "type": "fock",
            "terms": [
                {"modes": [str(Fraction(m, value.q)) for m in mono], "coeff": _scalar_string(c)}
                for mono, c in sorted(value.terms.items())
            ],
        }
    if isinstance(value, dict) and value.get("type") == "matrix":
        return value
    return {"type": "scalar", "value": _scalar_string(value)}


def _human(value) -> str:
    if isinstance(value, LaurentSeries):
        return format_series(value.classical())
    if isinstance(value, float):
        return _decimal(value)
    if isinstance(value, dict) and value.get("type") == "matrix":
        basis = value["basis"]
        width = max(len(e) for row in value["entries"] for e in row)
        lines = ["basis: " + " ".join(f"x^{n}" if n != 1 else "x" for n in basis)]
        lines += ["  ".join(e.rjust(width) for e in row) for row in value["entries"]]
        return "\n".join(lines)
    return _scalar_string(value)


def _jsonable(v):
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if v is None or isinstance(v, (bool, int, str)):
        return v
    if isinstance(v, float):
        return _decimal(v)
    return _scalar_string(v)


def _precision(value):
    if isinstance(value, LaurentSeries) and value.prec != INF:
        return int(value.prec)
    return None


def emit(args, ring: str, value, meta: dict | None = None, out=None):
    out = out or sys.stdout
    meta = meta or {}
    if args.json:
        doc = {"ring": ring, "result": encode(value), "precision": _precision(value), "meta": _jsonable(meta)}
        out.write(json.dumps(doc, sort_keys=True) + "\n")
        return
    out.write(_human(value) + "\n")
    for k in sorted(meta):
        out.write(_color("2", f"{k}: {_human_meta(meta[k])}", out) + "\n")


def _human_meta(v) -> str:
    if isinstance(v, (list, tuple)):
        return ", ".join(_human_meta(x) for x in v)
    return _scalar_string(v) if not isinstance(v, float) else _decimal(v)


# --- operand helpers ---


def _ring(args) -> RingDescriptor:
    return parse_ring(args.ring)


def _series(args, text: str | None, ring: RingDescriptor, flag: str, truncate: bool = True) -> LaurentSeries:
    if text is None:
        raise UsageError(f"missing {flag}")
    s = parse_series(text, ring)
    if truncate and s.prec == INF:
        s = s.truncate(args.prec * s.den)
    return s


def _is_power_series(s: LaurentSeries) -> bool:
    return s.den == 1 and all(n >= 1 for n in s.coeffs)


def _group_element(s: LaurentSeries):
    return diffeo.FormalDiffeo(s) if _is_power_series(s) else nil_laurent.certify(s)


# --- commands ---


def cmd_compose(args):
    ring = _ring(args)
    g = _series(args, args.g, ring, "--g")
    h = _series(args, args.h, ring, "--h")
    if _is_power_series(g) and _is_power_series(h):
        result = diffeo.compose(diffeo.FormalDiffeo(g), diffeo.FormalDiffeo(h)).series
        group = "G"
    else:
        result = nil_laurent.compose(nil_laurent.certify(g), nil_laurent.certify(h)).series
        group = "G-check"
    emit(args, str(ring), result, {"group": group})


def cmd_invert(args):
    ring = _ring(args)
    s = _series(args, args.series or args.g, ring, "--series")
    elem = _group_element(s)
    if isinstance(elem, diffeo.FormalDiffeo):
        emit(args, str(ring), diffeo.comp_inverse(elem).series, {"group": "G"})
        return
    inv, its = nil_laurent.comp_inverse(elem)
    emit(args, str(ring), inv.series, {"group": "G-check", "iterations": its, "nu": elem.nu})


def cmd_mulinv(args):
    ring = _ring(args)
    s = _series(args, args.series or args.g, ring, "--series", truncate=False)
    emit(args, str(ring), mul_inverse(s, args.prec))


def cmd_pair(args):
    ring = _ring(args)
    g = _series(args, args.g, ring, "--g", truncate=False)
    h = _series(args, args.h, ring, "--h", truncate=False)
    emit(args, str(ring), symplectic.pairing(g, h))


def cmd_residue(args):
    ring = _ring(args)
    if args.g is not None and args.h is not None:
        g = _series(args, args.g, ring, "--g", truncate=False)
        h = _series(args, args.h, ring, "--h", truncate=False)
        emit(args, str(ring), symplectic.residue_form(g, h), {"form": "res(g dh)"})
        return
    s = _series(args, args.series, ring, "--series", truncate=False)
    emit(args, str(ring), residue(s))


def cmd_spmatrix(args):
    ring = _ring(args)
    f = nil_laurent.certify(_series(args, args.series or args.g, ring, "--series"))
    m = symplectic.sp_matrix(f, symplectic.PairingWindow(args.window))
    value = {"type": "matrix", "basis": m.window.basis, "entries": [[str(e) for e in row] for row in m.entries]}
    emit(args, str(ring), value, {"escaped_below": m.escaped_below, "escaped_above": m.escaped_above})


def cmd_invariance(args):
    ring = _ring(args)
    f = nil_laurent.certify(_series(args, args.series or args.g, ring, "--series"))
    rep = symplectic.check_invariance(f, symplectic.PairingWindow(args.window), args.infinitesimal)
    meta = {
        "checked": rep.checked,
        "skipped": rep.skipped,
        "violations": [f"<x^{i}, x^{j}> -> {v}" for i, j, v in rep.violations],
        "infinitesimal_checked": rep.infinitesimal_checked,
    }
    emit(args, str(ring), rep.ok, meta)
    return EXIT_OK if rep.ok else EXIT_PROPERTY


def cmd_bracket(args):
    parse_ring(args.ring)
    if args.k >= 0 and args.l >= 0:
        c, idx = diffeo.lie_bracket(args.k, args.l)
    else:
        c, idx = nil_laurent.lie_bracket_extended(args.k, args.l)
    emit(args, args.ring, c.scalar_value(), {"index": idx})


def cmd_cover(args):
    ring = _ring(args)
    g = _series(args, args.series or args.g, ring, "--series")
    emit(args, str(ring), nil_laurent.cover_map(g, args.p).series, {"p": args.p})


def cmd_witt(args):
    ring = _ring(args)
    w = witt.WittVector(_series(args, args.series or args.g, ring, "--series"))
    op = args.op
    meta: dict = {}
    if op == "mul":
        result = witt.w_mul(w, witt.WittVector(_series(args, args.h, ring, "--h")))
    elif op == "inv":
        result = witt.w_inv(w, args.prec)
    elif op == "star":
        result = witt.involution(w)
    elif op == "norm":
        result = witt.norm(w)
    elif op == "frobenius":
        result, info = witt.frobenius_with_meta(w, _need_p(args))
        meta["lifted_to"] = info["lifted_to"]
    elif op == "schurq":
        emit(args, str(ring), witt.schur_q_test(w))
        return
    else:  # hlkernel
        emit(args, str(ring), witt.hl_kernel_test(w, _need_p(args), args.prec), {"p": args.p})
        return
    emit(args, str(ring), result.series, meta)


def _need_p(args) -> int:
    if args.p is None:
        raise UsageError(f"witt {args.op} needs --p")
    return args.p


def _fock_spec(args, derived: bool = True) -> fock.SectorSpec:
    theta = parse_rational(args.twist)
    mu = parse_rational(args.mu)
    return fock.derived_spec(theta, mu) if derived else fock.SectorSpec(theta, mu)


def cmd_fock(args):
    op = args.op
    if op == "sectorsum":
        if args.p is None:
            raise UsageError("fock sectorsum needs --p")
        rep = fock.sector_sum_weight(args.p)
        meta = {
            "closed_form": rep.closed_form,
            "match": rep.match,
            "per_sector": [f"{t}: {h}" for t, h in rep.per_sector],
        }
        emit(args, "Q", rep.oracle, meta)
        return
    if op == "weight":
        spec = _fock_spec(args, derived=False)
        meta = {"central_charge": spec.central_charge}
        if spec.twisted:
            meta["candidate"] = fock.candidate_weight(spec.theta)
        emit(args, "Q", fock.ground_state_weight(spec), meta)
        return
    spec = _fock_spec(args)
    if op == "check":
        c = parse_rational(args.c) if args.c is not None else None
        rep = fock.virasoro_commutator_check(spec, args.m, args.n, args.level, c)
        meta = {"states": rep.states, "c": rep.c_expected, "vacuum_value": rep.vacuum_value, "c_extracted": rep.c_extracted}
        emit(args, "Q", rep.residual, meta)
        return EXIT_OK if rep.ok else EXIT_PROPERTY
    state = parse_fock_state(args.state, spec)
    if op == "apply":
        result = fock.heisenberg_apply(spec, parse_rational(args.mode), state)
    else:  # virasoro
        result = fock.virasoro_apply(spec, args.n, state)
    emit(args, "Q", result, {"h0": spec.h0})


def cmd_universal(args):
    ring = diffeo.carrier_ring(args.n)
    emit(args, str(ring), diffeo.universal_composition(args.n, ring), {"n": args.n})


def cmd_gamma(args):
    value = symplectic.gamma_pairing(args.n, args.m, args.p)
    emit(args, "R", value, {"gamma_quotient": symplectic.gamma_quotient(args.n, args.m, args.p)})


def cmd_gammabasis(args):
    j, k = (args.sj, args.kj), (args.sk, args.kk)
    value = symplectic.normalized_basis_pairing(args.a, j, k, args.p)
    emit(args, "R", value, {"numeric": symplectic.normalized_basis_pairing_numeric(args.a, j, k, args.p)})


def cmd_suite(args):
    try:
        reports = suites.run_suite(args.name, args.seed, args.count)
    except KeyError:
        raise UsageError(f"unknown suite {args.name!r}; choose from {', '.join([*suites.SUITES, 'all'])}") from None
    ok = all(r.passed for r in reports)
    if args.json:
        doc = {
            "seed": args.seed,
            "passed": ok,
            "suites": [
                {
                    "name": r.name,
                    "properties": [
                        {
                            "name": p.name,
                            "passed": p.passed,
                            "cases": p.cases,
                            "failed": p.failed,
                            "counterexamples": p.counterexamples,
                            "notes": p.notes,
                        }
                        for p in r.results
                    ],
                }
                for r in reports
            ],
        }
        sys.stdout.write(json.dumps(doc, sort_keys=True) + "\n")
    else:
        for r in reports:
            for p in r.results:
                tag = _color("32", "PASS", sys.stdout) if p.passed else _color("31", "FAIL", sys.stdout)
                line = f"{tag} {r.name}: {p.name} ({p.cases} cases, {p.seconds:.2f}s)"
                if p.notes:
                    line += f" [{p.notes}]"
                print(line)
                if not p.passed:
                    print(f"     {p.failed} failed (seed {args.seed})")
                    for c in p.counterexamples:
                        print(f"     counterexample: {c}")
        print(("all properties passed" if ok else "some properties FAILED") + f" (seed {args.seed})")
    return EXIT_OK if ok else EXIT_PROPERTY


# --- parser ---


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--ring", default="Q", help='coefficient ring, e.g. "Q(zeta_3)[e^2]"')
    common.add_argument("--series", help="operand series")
    common.add_argument("--g", help="first operand")
    common.add_argument("--h", help="second operand")
    common.add_argument("--prec", type=int, default=16, help="default precision (numerator) for exact input")
    common.add_argument("--seed", type=int, default=suites.DEFAULT_SEED)
    common.add_argument("--json", action="store_true", help="print canonical JSON")

    parser = _Parser(prog="nillaurent", description="Exact nil-Laurent series, Witt vectors and Virasoro checks.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, fn, help_text):
        p = sub.add_parser(name, parents=[common], help=help_text)
        p.set_defaults(fn=fn)
        return p

    add("compose", cmd_compose, "g o h")
    add("invert", cmd_invert, "compositional inverse")
    add("mulinv", cmd_mulinv, "multiplicative inverse")
    add("pair", cmd_pair, "residue pairing <g, h>")
    add("residue", cmd_residue, "residue of --series, or res(g dh) for --g/--h")
    p = add("spmatrix", cmd_spmatrix, "matrix of h -> h o f^-1 on a window")
    p.add_argument("--window", type=int, default=4)
    p = add("invariance", cmd_invariance, "check <g o f, h o f> = <g, h> on a window")
    p.add_argument("--window", type=int, default=4)
    p.add_argument("--infinitesimal", type=int, default=None, help="also run the first-order check over this range")
    p = add("bracket", cmd_bracket, "[v_k, v_l] via commutator flows")
    p.add_argument("k", type=int)
    p.add_argument("l", type=int)
    p = add("cover", cmd_cover, "the p-fold cover map")
    p.add_argument("p", type=int)
    p = add("witt", cmd_witt, "Witt vector operations")
    p.add_argument("op", choices=["mul", "inv", "star", "norm", "frobenius", "schurq", "hlkernel"])
    p.add_argument("--p", type=int)
    p = add("fock", cmd_fock, "Fock space and Virasoro operations")
    p.add_argument("op", choices=["apply", "virasoro", "check", "weight", "sectorsum"])
    p.add_argument("--twist", default="0")
    p.add_argument("--mu", default="0")
    p.add_argument("--state", default="|0>")
    p.add_argument("--mode", default="-1", help="Heisenberg mode r for apply")
    p.add_argument("--n", type=int, default=0)
    p.add_argument("--m", type=int, default=0)
    p.add_argument("--level", type=int, default=8)
    p.add_argument("--c", default=None)
    p.add_argument("--p", type=int)
    p = add("universal", cmd_universal, "universal coefficient of x^(n+1) in g o h")
    p.add_argument("n", type=int)
    p = add("suite", cmd_suite, "run a property suite")
    p.add_argument("name")
    p.add_argument("--count", type=int, default=None, help="override the number of random cases")
    p = add("gamma", cmd_gamma, "<gamma_(n/p), gamma_(m/p)> (decimal)")
    for name in ("n", "m", "p"):
        p.add_argument(name, type=int)
    p = add("gammabasis", cmd_gammabasis, "normalized basis pairing (decimal)")
    for name in ("a", "p", "sj", "kj", "sk", "kk"):
        p.add_argument(name, type=int)
    return parser


def run(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        code = args.fn(args)
        return EXIT_OK if code is None else code
    except ParseError as exc:
        msg = f"parse error: {exc}"
        if exc.text:
            msg += f"\n  {exc.text}\n  {' ' * exc.position}^"
        print(_color("31", msg, sys.stderr), file=sys.stderr)
        return EXIT_USAGE
    except UsageError as exc:
        print(_color("31", f"usage error: {exc}", sys.stderr), file=sys.stderr)
        return EXIT_USAGE
    except NilLaurentError as exc:
        print(_color("31", f"{type(exc).__name__}: {exc}", sys.stderr), file=sys.stderr)
        return EXIT_DOMAIN


def main(argv: list[str] | None = None):
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
