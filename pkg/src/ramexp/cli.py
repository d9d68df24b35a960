"""Command-line interface: ``ramexp <subcommand> [flags]``.

Output is CSV by default (complex columns split into ``_re``/``_im``) or
JSON with ``--format json`` (complex values as ``[re, im]``). Exit codes:
0 success, 2 invalid arguments, 3 failed verification.

Functions are addressed as ``name[:key=val,...]``, e.g. ``mangoldt:D=1000``,
``sigma:s=0.5,D=200``, ``tds:coeffs=1;1``, ``block:c1=1,c2=-1,H=10`` or
``file:path=f.json``. ``D`` truncates a catalog function to its transform
on 1..D. Integer ranges accept ``a..b`` (inclusive) and comma lists.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import warnings
from typing import Sequence

import numpy as np

from . import core_arith, correlation, expansion, shift_expansion, sieve, symmetry, verify
from .core_arith import DEFAULT_LIMIT, shared_tables
from .correlation import fmt
from .errors import (
    DegenerateInputError,
    InsufficientDataError,
    InvalidArgumentError,
    NotFoundError,
    PreconditionError,
    ResourceLimitError,
    VerificationError,
)
from .expansion import TruncatedDivisorSum

EXIT_OK, EXIT_USAGE, EXIT_VERIFY = 0, 2, 3
MIN_TABLES = 1 << 10

# Library operation -> subcommand that reaches it.
COMMANDS = {
    "core_arith.build_tables": "csum",
    "core_arith.ramanujan_sum": "csum",
    "core_arith.ramanujan_sum_holder": "csum",
    "core_arith.primorial": "gsift",
    "core_arith.divisor_count": "csum",
    "expansion.eratosthenes_transform": "transform",
    "expansion.evaluate_truncated": "reconstruct",
    "expansion.finite_ramanujan_coefficients": "coeffs",
    "expansion.invert_coefficients": "invert",
    "expansion.reconstruct": "reconstruct",
    "expansion.classical_coefficient_sigma": "coeffs",
    "expansion.builtin_catalog": "transform",
    "expansion.lookup": "transform",
    "expansion.load_custom": "transform",
    "correlation.correlate_direct": "correlate",
    "correlation.correlation_table": "correlate",
    "correlation.correlate_via_divisors": "correlate",
    "correlation.singular_sum_coefficient_form": "singular",
    "correlation.singular_sum_eratosthenes_form": "singular",
    "correlation.heuristic_residual": "correlate",
    "correlation.twin_singular_series_partial": "singular",
    "correlation.truncated_vs_ideal_singular": "singular",
    "shift_expansion.carmichael_coefficient": "carmichael",
    "shift_expansion.carmichael_limit": "carmichael",
    "shift_expansion.explicit_coefficient": "shift-expand",
    "shift_expansion.shift_expansion": "shift-expand",
    "shift_expansion.reconstruct_correlation": "shift-expand",
    "shift_expansion.decay_class_fit": "shift-expand",
    "shift_expansion.orthogonality_check": "verify",
    "sieve.ap_sum": "ap-sum",
    "sieve.ap_main_term_identity": "ap-sum",
    "sieve.twisted_sum": "twisted-sum",
    "sieve.twisted_mobius_identity": "twisted-sum",
    "sieve.make_gsifted": "gsift",
    "sieve.coprime_sum": "coprime-corr",
    "sieve.coprime_correlation": "coprime-corr",
    "sieve.sifted_singular_collapse": "coprime-corr",
    "sieve.dyadic_csum_bound_check": "csum",
    "sieve.fre_correlation_formula": "correlate",
    "sieve.mean_value": "gsift",
    "symmetry.sgn_weight": "symmetry",
    "symmetry.symmetry_integral": "symmetry",
    "symmetry.symmetry_via_correlations": "symmetry",
    "symmetry.irregularity_experiment": "symmetry",
    "verify.verify_suite": "verify",
}


# ------------------------------------------------------------------ parsing

def parse_range(text: str) -> list[int]:
    """``a..b`` inclusive, comma lists, or a single integer."""
    out: list[int] = []
    for part in str(text).split(","):
        part = part.strip()
        if not part:
            continue
        try:
            if ".." in part:
                a, b = part.split("..", 1)
                a, b = int(a), int(b)
                if b < a:
                    raise InvalidArgumentError(f"empty range {part!r}")
                out.extend(range(a, b + 1))
            else:
                out.append(int(part))
        except ValueError:
            raise InvalidArgumentError(f"bad integer range {text!r}") from None
    if not out:
        raise InvalidArgumentError(f"empty range {text!r}")
    return out


def _value(text: str):
    for conv in (int, float, complex):
        try:
            return conv(text)
        except ValueError:
            pass
    return text


def parse_complex_list(text: str) -> list[complex]:
    try:
        return [complex(v) for v in text.split(";") if v.strip()]
    except ValueError:
        raise InvalidArgumentError(f"bad coefficient list {text!r}") from None


def parse_function_spec(spec: str) -> tuple[str, dict]:
    """``name[:key=val,...]`` -> (name, params)."""
    name, _, rest = spec.partition(":")
    params = {}
    for item in filter(None, rest.split(",")):
        key, eq, val = item.partition("=")
        if not eq:
            raise InvalidArgumentError(f"bad parameter {item!r} in {spec!r}")
        params[key.strip()] = val.strip()
    if not name:
        raise InvalidArgumentError(f"empty function name in {spec!r}")
    return name, params


def spec_truncation(spec: str | None) -> int:
    """The size a spec needs from the sieve tables."""
    if spec is None:
        return 1
    name, params = parse_function_spec(spec)
    if name == "tds":
        return len(parse_complex_list(params.get("coeffs", "")))
    return int(params.get("D", 1))


def resolve(spec: str, tables, D: int | None = None):
    """A TruncatedDivisorSum when the spec fixes a truncation, else the
    catalog ArithmeticFunction itself."""
    name, params = parse_function_spec(spec)
    if name == "tds":
        coeffs = parse_complex_list(params.get("coeffs", ""))
        if not coeffs:
            raise InvalidArgumentError("tds needs coeffs=a;b;...")
        return TruncatedDivisorSum(coeffs, "tds")
    trunc = params.pop("D", None)
    kw = {k: (v if k == "path" else _value(v)) for k, v in params.items()}
    f = expansion.lookup(name, tables, **kw)
    trunc = D if trunc is None else int(trunc)
    if trunc is None:
        return f
    return expansion.eratosthenes_transform(f, trunc, tables)


def require_tds(spec: str, tables, D: int | None = None) -> TruncatedDivisorSum:
    f = resolve(spec, tables, D)
    if not isinstance(f, TruncatedDivisorSum):
        raise InvalidArgumentError(f"{spec!r} needs a truncation: add D=...")
    return f


# ------------------------------------------------------------------ output

def _cell(v):
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return fmt(v)
    return str(v)


def _json_cell(v):
    if isinstance(v, (complex, np.complexfloating)):
        return [_json_cell(float(v.real)), _json_cell(float(v.imag))]
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return None if math.isnan(v) or math.isinf(v) else v
    return v


def emit(out, columns: Sequence[str], rows, fmt_name: str, complex_cols=()) -> None:
    """Write a table; columns listed in ``complex_cols`` become two CSV columns."""
    complex_cols = set(complex_cols)
    if fmt_name == "json":
        doc = [{c: _json_cell(complex(v) if c in complex_cols else v)
                for c, v in zip(columns, row)} for row in rows]
        out.write(json.dumps(doc, sort_keys=False) + "\n")
        return
    header = []
    for c in columns:
        header.extend([f"{c}_re", f"{c}_im"] if c in complex_cols else [c])
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        cells = []
        for c, v in zip(columns, row):
            if c in complex_cols:
                z = complex(v)
                cells.extend([fmt(z.real), fmt(z.imag)])
            else:
                cells.append(_cell(v))
        writer.writerow(cells)


def emit_json(out, doc) -> None:
    out.write(json.dumps(doc, sort_keys=True) + "\n")


def tables_for(args, need: int):
    need = max(int(need), MIN_TABLES)
    if need > args.tables_limit:
        raise InvalidArgumentError(
            f"request needs sieve tables up to {need}, above --tables-limit {args.tables_limit}")
    return shared_tables(need)


# ------------------------------------------------------------------ commands

def cmd_csum(args, out):
    if args.dyadic:
        AB = parse_range(args.dyadic)
        A, B = AB[0] - 1, AB[-1]
        t = tables_for(args, max([B] + parse_range(args.n)))
        rows = []
        for h in parse_range(args.n):
            total, bound = sieve.dyadic_csum_bound_check(A, B, h, t)
            rows.append((A, B, h, total, bound))
        emit(out, ["A", "B", "h", "sum", "bound"], rows, args.format)
        return EXIT_OK
    qs, ns = parse_range(args.q), parse_range(args.n)
    if min(qs) < 1:
        raise InvalidArgumentError("q must be >= 1")
    t = tables_for(args, max(qs))
    fn = core_arith.ramanujan_sum_holder if args.holder else core_arith.ramanujan_sum
    rows = [(q, n, fn(q, n, t)) for q in qs for n in ns]
    emit(out, ["q", "n", "value"], rows, args.format)
    return EXIT_OK


def cmd_transform(args, out):
    if args.catalog:
        t = tables_for(args, 1)
        rows = [(f.name, json.dumps({k: _json_cell(v) for k, v in f.params.items()},
                                    sort_keys=True))
                for f in expansion.builtin_catalog(t)]
        emit(out, ["name", "params"], rows, args.format)
        return EXIT_OK
    D = args.D or spec_truncation(args.f)
    t = tables_for(args, D)
    tds = require_tds(args.f, t, args.D)
    rows = [(d, c) for d, c in enumerate(tds.coefficients, start=1)]
    emit(out, ["d", "fprime"], rows, args.format, {"fprime"})
    return EXIT_OK


def cmd_coeffs(args, out):
    D = args.D or spec_truncation(args.f)
    t = tables_for(args, D)
    tds = require_tds(args.f, t, args.D)
    rc = expansion.finite_ramanujan_coefficients(tds)
    qs = np.arange(1, rc.range + 1)
    if args.compare == "classical":
        s = float(parse_function_spec(args.f)[1].get("s", 1))
        rows = []
        for q, c in zip(qs, rc.coefficients):
            cl = expansion.classical_coefficient_sigma(int(q), s)
            rows.append((int(q), c, cl, abs(c.real / cl - 1)))
        emit(out, ["q", "coeff", "classical", "ratio_err"], rows, args.format, {"coeff"})
    elif args.compare == "mu-phi":
        rows = [(int(q), c, int(t.mu[q]) / int(t.phi[q])) for q, c in zip(qs, rc.coefficients)]
        emit(out, ["q", "coeff", "mu_over_phi"], rows, args.format, {"coeff"})
    else:
        emit(out, ["q", "coeff"], list(zip(qs.tolist(), rc.coefficients)),
             args.format, {"coeff"})
    return EXIT_OK


def cmd_invert(args, out):
    if args.coeffs:
        rc = expansion.RamanujanCoefficients(parse_complex_list(args.coeffs))
        t = tables_for(args, rc.range)
    else:
        D = args.D or spec_truncation(args.f)
        t = tables_for(args, D)
        rc = expansion.finite_ramanujan_coefficients(require_tds(args.f, t, args.D))
    tds = expansion.invert_coefficients(rc, t)
    emit(out, ["d", "fprime"], list(enumerate(tds.coefficients, start=1)),
         args.format, {"fprime"})
    return EXIT_OK


def cmd_reconstruct(args, out):
    D = args.D or spec_truncation(args.f)
    t = tables_for(args, D)
    tds = require_tds(args.f, t, args.D)
    rc = expansion.finite_ramanujan_coefficients(tds)
    rows = [(n, expansion.reconstruct(rc, n, t), expansion.evaluate_truncated(tds, n))
            for n in parse_range(args.n)]
    emit(out, ["n", "value", "direct"], rows, args.format, {"value", "direct"})
    return EXIT_OK


def cmd_correlate(args, out):
    hs = parse_range(args.h)
    N = args.N
    if N < 1 or min(hs) < 0:
        raise InvalidArgumentError("need N >= 1 and h >= 0")
    need = max(N + max(hs), spec_truncation(args.f), spec_truncation(args.g))
    t = tables_for(args, need)
    if args.method == "fre":
        f = sieve.SieveFunction(require_tds(args.f, t))
        g = sieve.SieveFunction(require_tds(args.g, t))
        rows = []
        for h in hs:
            r = sieve.fre_correlation_formula(f, g, N, h, t)
            rows.append((N, f.range, g.range, h, r.value, r.singular_main, r.residual,
                         float(f.range * g.range)))
        out.write(sieve.experiment_rows(rows) if args.format == "csv" else "")
        if args.format == "json":
            emit(out, sieve.EXPERIMENT_HEADER.split(","),
                 [(a, b, c, d, complex(v).real, complex(m).real, complex(r).real, s)
                  for a, b, c, d, v, m, r, s in rows], "json")
        return EXIT_OK
    f, g = resolve(args.f, t), resolve(args.g, t)
    if args.method == "divisor":
        if not (isinstance(f, TruncatedDivisorSum) and isinstance(g, TruncatedDivisorSum)):
            raise InvalidArgumentError("the divisor method needs truncated functions (D=...)")
        vals = [correlation.correlate_via_divisors(f, g, N, h) for h in hs]
        table = correlation.CorrelationTable(N, tuple(hs), np.array(vals), "divisor_sum")
    else:
        table = correlation.correlation_table(f, g, N, hs, threads=args.threads)
    singular = []
    for h in hs:
        if args.heuristic:
            singular.append(correlation.heuristic_residual(f, g, N, h, t, args.truncation)
                            .singular)
            continue
        ft, gt = correlation.truncate_pair(f, g, N, h, t, args.truncation)
        singular.append(correlation.singular_sum_coefficient_form(
            expansion.finite_ramanujan_coefficients(ft),
            expansion.finite_ramanujan_coefficients(gt), h, t).value)
    table = correlation.CorrelationTable(N, table.shifts, table.values, table.method,
                                         np.array(singular, dtype=complex))
    rows = list(zip(hs, table.values, table.singular, table.residuals))
    emit(out, ["h", "value", "singular", "residual"], rows, args.format,
         {"value", "singular", "residual"})
    return EXIT_OK


def cmd_singular(args, out):
    hs = parse_range(args.h)
    if args.twin:
        t = tables_for(args, args.twin)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", correlation.OddShiftWarning)
            rows = [(h, args.twin, correlation.twin_singular_series_partial(h, args.twin, t))
                    for h in hs]
        emit(out, ["h", "Q", "value"], rows, args.format)
        return EXIT_OK
    if args.mangoldt:
        t = tables_for(args, max(args.mangoldt, args.Q_ideal))
        rows = []
        for h in hs:
            r = correlation.truncated_vs_ideal_singular(args.mangoldt, h, t, args.Q_ideal)
            rows.append((args.mangoldt, h, r.truncated, r.ideal_partial, r.difference))
        emit(out, ["N", "h", "truncated", "ideal_partial", "difference"], rows, args.format)
        return EXIT_OK
    if not (args.f and args.g):
        raise InvalidArgumentError("singular needs --f and --g, --twin Q or --mangoldt N")
    t = tables_for(args, max(spec_truncation(args.f), spec_truncation(args.g)))
    f, g = require_tds(args.f, t), require_tds(args.g, t)
    fc, gc = (expansion.finite_ramanujan_coefficients(x) for x in (f, g))
    rows = []
    for h in hs:
        if args.form == "eratosthenes":
            s = correlation.singular_sum_eratosthenes_form(f, g, h)
        else:
            s = correlation.singular_sum_coefficient_form(fc, gc, h, t)
        rows.append((h, s.value, s.range))
    emit(out, ["h", "value", "range"], rows, args.format, {"value"})
    return EXIT_OK


def _shift_inputs(args):
    ells = parse_range(args.ell) if getattr(args, "ell", None) else []
    need = max([args.N + 1, spec_truncation(args.f), spec_truncation(args.g)] + ells)
    return ells, need


def cmd_carmichael(args, out):
    ells, need = _shift_inputs(args)
    xmax = args.x or (math.lcm(args.period, max(ells)) if args.period else 64 << 14)
    t = tables_for(args, max(need, args.N + xmax))
    f, g = resolve(args.f, t), resolve(args.g, t)
    C = shift_expansion.ShiftCorrelation(f, g, args.N)
    rows = []
    for ell in ells:
        if args.x:
            v, x = shift_expansion.carmichael_coefficient(C, ell, args.x, t), args.x
        else:
            v, x = shift_expansion.carmichael_limit(C, ell, t, period=args.period)
        rows.append((ell, v, x))
    emit(out, ["ell", "value", "x"], rows, args.format, {"value"})
    return EXIT_OK


def cmd_shift_expand(args, out):
    _, need = _shift_inputs(args)
    hs = parse_range(args.h) if args.h else []
    xmax = math.lcm(args.period, spec_truncation(args.g)) * 2 if args.period else 64 << 14
    extra = xmax if args.method == "carmichael" else 0
    t = tables_for(args, max(need, args.N + max(hs + [0]) + 1, args.N + extra))
    f = resolve(args.f, t)
    g = require_tds(args.g, t)
    gc = expansion.finite_ramanujan_coefficients(g)
    se = shift_expansion.shift_expansion(f, gc, args.N, t, method=args.method, g=g,
                                         period=args.period)
    if args.diagnostics:
        res = shift_expansion.reconstruction_residuals(se, f, g, hs, t) if hs else np.zeros(0)
        out.write(se.diagnostics_json(float(np.max(np.abs(res))) if res.size else 0.0) + "\n")
        return EXIT_OK
    if args.h:
        rows = [(h, shift_expansion.reconstruct_correlation(se, h, t)) for h in hs]
        emit(out, ["h", "reconstructed"], rows, args.format, {"reconstructed"})
        return EXIT_OK
    if args.format == "json":
        emit(out, ["ell", "coeff", "method"],
             [(l, c, se.method) for l, c in enumerate(se.coefficients, start=1)],
             "json", {"coeff"})
    else:
        out.write(se.to_csv())
    return EXIT_OK


def cmd_ap_sum(args, out):
    need = max(args.N, args.t, spec_truncation(args.f))
    t = tables_for(args, need)
    f = sieve.SieveFunction(require_tds(args.f, t))
    r = sieve.ap_sum(f, args.N, args.a, args.t, t)
    lhs, rhs = sieve.ap_main_term_identity(f, args.t, args.a, t)
    emit(out, ["N", "t", "a", "direct", "main", "difference", "identity_lhs", "identity_rhs"],
         [(args.N, args.t, args.a, r.direct, r.main, r.difference, lhs, rhs)], args.format,
         {"direct", "main", "difference", "identity_lhs", "identity_rhs"})
    return EXIT_OK


def cmd_twisted_sum(args, out):
    need = max(args.N, args.ell, spec_truncation(args.f))
    t = tables_for(args, need)
    f = sieve.SieveFunction(require_tds(args.f, t))
    r = sieve.twisted_sum(f, args.N, args.ell, args.a, t)
    lhs, rhs = sieve.twisted_mobius_identity(f, args.ell, args.a, t)
    emit(out, ["N", "ell", "a", "direct", "main", "difference", "identity_lhs", "identity_rhs"],
         [(args.N, args.ell, args.a, r.direct, r.main, r.difference, lhs, rhs)], args.format,
         {"direct", "main", "difference", "identity_lhs", "identity_rhs"})
    return EXIT_OK


def _gsifted(args, t):
    src = resolve(args.f if args.cmd == "gsift" else args.g, t, args.Q)
    return sieve.make_gsifted(src, args.Q, args.G, t)


def cmd_gsift(args, out):
    t = tables_for(args, max(args.Q, args.G, spec_truncation(args.f)))
    g = _gsifted(args, t)
    P = core_arith.primorial(args.G, t)
    doc = {"G": args.G, "Q": args.Q, "range": g.range, "primorial": str(P),
           "support": g.support(), "growth": g.base.growth}
    if args.mean_x:
        doc["mean_value"] = _json_cell(sieve.mean_value(g, args.mean_x))
        doc["hat1"] = _json_cell(g.hat[1])
    if args.format == "json":
        emit_json(out, doc)
    else:
        rows = [(q, g.tds.prime(q), g.hat[q]) for q in g.support()]
        emit(out, ["q", "fprime", "coeff"], rows, "csv", {"fprime", "coeff"})
    return EXIT_OK


def cmd_coprime_corr(args, out):
    need = max(args.N + args.h, args.Q, args.G, args.q, spec_truncation(args.f))
    t = tables_for(args, need)
    f = sieve.SieveFunction(require_tds(args.f, t))
    if args.sum:
        r = sieve.coprime_sum(f, args.N, args.q, args.G, t)
        emit(out, ["N", "q", "G", "restricted", "unrestricted", "difference",
                   "mobius_expansion"],
             [(args.N, args.q, args.G, *r)], args.format,
             {"restricted", "unrestricted", "difference", "mobius_expansion"})
        return EXIT_OK
    g = _gsifted(args, t)
    r = sieve.coprime_correlation(f, g, args.N, args.h, args.q, t)
    collapsed, full = sieve.sifted_singular_collapse(f, g, args.h, t)
    emit(out, ["N", "h", "q", "G", "direct", "main", "residual", "collapsed", "singular"],
         [(args.N, args.h, args.q, args.G, r.direct, r.main, r.difference, collapsed, full)],
         args.format, {"direct", "main", "residual", "collapsed", "singular"})
    return EXIT_OK


def _H_rule(text: str):
    if text == "sqrt-half":
        return symmetry.default_H_rule
    if text.startswith("const:"):
        k = int(text.split(":", 1)[1])
        return lambda N: k
    raise InvalidArgumentError(f"unknown H rule {text!r}; use sqrt-half or const:K")


def cmd_symmetry(args, out):
    if args.weight:
        W = symmetry.sgn_weight(args.weight)
        rows = [(h, W(h)) for h in range(-2 * args.weight, 2 * args.weight + 1)]
        emit(out, ["h", "W"], rows, args.format)
        return EXIT_OK
    Ns = parse_range(args.N)
    if args.f:
        H = args.H or 1
        t = tables_for(args, 2 * max(Ns) + H + 1)
        f = resolve(args.f, t)
        rows = []
        for N in Ns:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                cmp = symmetry.symmetry_via_correlations(f, N, H)
            J = cmp.direct_value
            rows.append((N, H, J, J / (N * H * H), complex(cmp.value).real, cmp.gap))
        emit(out, symmetry.IRREGULARITY_HEADER.split(","), rows, args.format)
        return EXIT_OK
    rule = (lambda N: args.H) if args.H else _H_rule(args.H_rule)
    rows = symmetry.irregularity_experiment(complex(args.c1), complex(args.c2), Ns, rule,
                                            correlations=not args.no_correlations)
    if args.format == "csv":
        out.write(symmetry.irregularity_csv(rows))
    else:
        emit(out, symmetry.IRREGULARITY_HEADER.split(","), rows, "json")
    return EXIT_OK


def cmd_verify(args, out):
    results = verify.verify_suite(args.suite, seed=args.seed, cases=args.cases,
                                  qmax=args.qmax, threads=args.threads)
    if args.format == "json":
        emit_json(out, [{"suite": r.name, "passed": r.passed, "cases": r.cases,
                         "max_err": _json_cell(r.max_err),
                         "case": verify._plain(r.failure)} for r in results])
    else:
        out.write(verify.report(results))
    return EXIT_OK if all(r.passed for r in results) else EXIT_VERIFY


# ------------------------------------------------------------------ parser

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise InvalidArgumentError(message)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--tables-limit", type=int, default=DEFAULT_LIMIT,
                        help="largest sieve table a command may build")
    common.add_argument("--threads", type=int, default=1, help="worker threads, 0 = auto")
    common.add_argument("--seed", type=int, default=0)

    p = _Parser(prog="ramexp", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    def add(name, fn, help_):
        sp = sub.add_parser(name, parents=[common], help=help_)
        sp.set_defaults(func=fn)
        return sp

    sp = add("csum", cmd_csum, "Ramanujan sums c_q(n)")
    sp.add_argument("--q", default="1")
    sp.add_argument("--n", default="0")
    sp.add_argument("--holder", action="store_true", help="use the gcd/phi closed form")
    sp.add_argument("--dyadic", metavar="A+1..B",
                    help="sum_{A<q<=B} |c_q(h)| and 2 B d(h), h taken from --n")

    sp = add("transform", cmd_transform, "Eratosthenes transform f' on 1..D")
    sp.add_argument("--f", default="one")
    sp.add_argument("--D", type=int)
    sp.add_argument("--catalog", action="store_true", help="list the builtin catalog")

    sp = add("coeffs", cmd_coeffs, "finite Ramanujan coefficients")
    sp.add_argument("--f", required=True)
    sp.add_argument("--D", type=int)
    sp.add_argument("--compare", choices=("classical", "mu-phi"))

    sp = add("invert", cmd_invert, "coefficients back to the transform")
    sp.add_argument("--coeffs", help="semicolon list fhat(1);fhat(2);...")
    sp.add_argument("--f")
    sp.add_argument("--D", type=int)

    sp = add("reconstruct", cmd_reconstruct, "sum_q fhat(q) c_q(n) against f(n)")
    sp.add_argument("--f", required=True)
    sp.add_argument("--D", type=int)
    sp.add_argument("--n", default="1..10")

    sp = add("correlate", cmd_correlate, "C_{f,g}(N,h) over a shift range")
    sp.add_argument("--f", required=True)
    sp.add_argument("--g", required=True)
    sp.add_argument("--N", type=int, required=True)
    sp.add_argument("--h", default="0")
    sp.add_argument("--method", choices=("direct", "divisor", "fre"), default="direct")
    sp.add_argument("--truncation", choices=("common", "shifted"), default="common")
    sp.add_argument("--heuristic", action="store_true",
                    help="singular sum through the heuristic decomposition")

    sp = add("singular", cmd_singular, "singular sums and singular series")
    sp.add_argument("--f")
    sp.add_argument("--g")
    sp.add_argument("--h", default="2")
    sp.add_argument("--form", choices=("coefficient", "eratosthenes"), default="coefficient")
    sp.add_argument("--twin", type=int, metavar="Q", help="partial twin series up to Q")
    sp.add_argument("--mangoldt", type=int, metavar="N",
                    help="truncated Lambda_N singular sum against the partial series")
    sp.add_argument("--Q-ideal", dest="Q_ideal", type=int, default=10**5)

    sp = add("carmichael", cmd_carmichael, "Carmichael mean-value coefficients")
    sp.add_argument("--f", required=True)
    sp.add_argument("--g", required=True)
    sp.add_argument("--N", type=int, required=True)
    sp.add_argument("--ell", default="1..4")
    sp.add_argument("--x", type=int, help="fixed averaging length")
    sp.add_argument("--period", type=int, help="shift period; averages over lcm(period, l)")

    sp = add("shift-expand", cmd_shift_expand, "shift-Ramanujan expansion of a correlation")
    sp.add_argument("--f", required=True)
    sp.add_argument("--g", required=True)
    sp.add_argument("--N", type=int, required=True)
    sp.add_argument("--method", choices=("explicit", "carmichael"), default="explicit")
    sp.add_argument("--period", type=int)
    sp.add_argument("--h", help="shifts to reconstruct (or to measure residuals)")
    sp.add_argument("--diagnostics", action="store_true", help="emit the JSON diagnostics")

    sp = add("ap-sum", cmd_ap_sum, "sum over n = a (mod t)")
    sp.add_argument("--f", required=True)
    sp.add_argument("--N", type=int, required=True)
    sp.add_argument("--a", type=int, default=0)
    sp.add_argument("--t", type=int, required=True)

    sp = add("twisted-sum", cmd_twisted_sum, "sum f(n) c_l(n - a)")
    sp.add_argument("--f", required=True)
    sp.add_argument("--N", type=int, required=True)
    sp.add_argument("--ell", type=int, required=True)
    sp.add_argument("--a", type=int, default=0)

    sp = add("gsift", cmd_gsift, "G-sifted function from a transform source")
    sp.add_argument("--f", default="one")
    sp.add_argument("--Q", type=int, required=True)
    sp.add_argument("--G", type=int, required=True)
    sp.add_argument("--mean-x", dest="mean_x", type=int, help="also report the mean up to x")

    sp = add("coprime-corr", cmd_coprime_corr, "q-coprime sums and correlations")
    sp.add_argument("--f", required=True)
    sp.add_argument("--g", default="one", help="transform source for the sifted g")
    sp.add_argument("--Q", type=int, default=30)
    sp.add_argument("--G", type=int, required=True)
    sp.add_argument("--N", type=int, required=True)
    sp.add_argument("--h", type=int, default=1)
    sp.add_argument("--q", type=int, default=1)
    sp.add_argument("--sum", action="store_true", help="coprime sum of f only")

    sp = add("symmetry", cmd_symmetry, "symmetry integral of block functions")
    sp.add_argument("--N", default="1000,10000,100000")
    sp.add_argument("--H", type=int)
    sp.add_argument("--H-rule", dest="H_rule", default="sqrt-half")
    sp.add_argument("--c1", default="1")
    sp.add_argument("--c2", default="-1")
    sp.add_argument("--f", help="any function spec instead of the block function")
    sp.add_argument("--weight", type=int, metavar="H", help="print W_H(h)")
    sp.add_argument("--no-correlations", action="store_true")

    sp = add("verify", cmd_verify, "seeded identity suites")
    sp.add_argument("suite", choices=verify.SUITE_NAMES)
    sp.add_argument("--cases", type=int, default=verify.DEFAULT_CASES)
    sp.add_argument("--qmax", type=int, default=verify.DEFAULT_QMAX)
    return p


USAGE_ERRORS = (InvalidArgumentError, NotFoundError, PreconditionError, DegenerateInputError,
                ResourceLimitError, InsufficientDataError)


def run(argv: Sequence[str] | None = None, out=None, err=None) -> int:
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    try:
        args = build_parser().parse_args(argv)
    except InvalidArgumentError as e:
        print(f"error: {e}", file=err)
        return EXIT_USAGE
    except SystemExit as e:
        return EXIT_OK if e.code in (0, None) else EXIT_USAGE
    buf = io.StringIO()
    try:
        code = args.func(args, buf)
    except USAGE_ERRORS as e:
        print(f"error: {e}", file=err)
        return EXIT_USAGE
    except VerificationError as e:
        print(f"verification failed: {e}", file=err)
        if e.case is not None:
            print("case " + json.dumps(verify._plain(e.case), sort_keys=True), file=err)
        return EXIT_VERIFY
    out.write(buf.getvalue())
    return code


def main() -> int:
    return run()


if __name__ == "__main__":
    raise SystemExit(main())
