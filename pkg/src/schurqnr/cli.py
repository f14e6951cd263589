"""Command-line front end.

Every subcommand writes a flat list of records, either as CSV (records only)
or as one JSON document ``{"meta": ..., "records": [...]}``. Exit status is 0
when every check passed, 1 when a claim failed, 2 for usage or resource errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import re
import sys
from collections.abc import Sequence
from fractions import Fraction

from . import __version__, proofkit, schur
from .arith import is_prime, isqrt
from .residue import (
    DEFAULT_BUDGET_BITS,
    MemoryBudgetError,
    build_residue_table,
    char_run_stats,
    check_budget,
    scan_runs,
)

EXIT_OK, EXIT_FAILED, EXIT_USAGE = 0, 1, 2

# field order per schema; types drive parsing back from CSV
SCHEMAS: dict[str, tuple[tuple[str, type], ...]] = {
    "run": (("p", int), ("start", int), ("length", int), ("end", int)),
    "batch": (
        ("p", int),
        ("max_run", int),
        ("run_start", int),
        ("isqrt_p", int),
        ("exceeds", bool),
    ),
    "table": (
        ("p", int),
        ("expected_max_run", int),
        ("computed_max_run", int),
        ("expected_isqrt_p", int),
        ("computed_isqrt_p", int),
        ("match", bool),
    ),
    "lemma1": (("p", int), ("start", int), ("length", int), ("tag", str)),
    "criterion": (
        ("p", int),
        ("k", int),
        ("a", Fraction),
        ("span_holds", bool),
        ("diff_exceeds_p", bool),
        ("x_low", int),
        ("x_high", int),
        ("diff_value", int),
        ("x", int),
        ("c", int),
        ("y", int),
        ("m", int),
        ("n", int),
        ("R", int),
        ("straddle_x", int),
    ),
    "witness": (
        ("p", int),
        ("k", int),
        ("a", Fraction),
        ("refuted", bool),
        ("x", int),
        ("c", int),
        ("y", int),
        ("m", int),
        ("n", int),
        ("R", int),
        ("straddle_x", int),
        ("error", str),
    ),
    "threshold": (
        ("case_id", str),
        ("paper_threshold", int),
        ("verified_from", int),
        ("checked_to", int),
        ("holds_at_threshold", bool),
        ("failures_above", int),
        ("undecided", int),
        ("boundary_behavior", str),
    ),
    "bounds": (
        ("which", str),
        ("lo", int),
        ("hi", int),
        ("primes_checked", int),
        ("violations", int),
        ("violating_primes", str),
        ("empirical_only", bool),
    ),
}


# ---------------------------------------------------------------- encoding

def _encode(value) -> str | int | bool | None:
    if isinstance(value, Fraction):
        return f"{value.numerator}/{value.denominator}"
    return value


def _csv_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    return str(_encode(value))


def _decode(text, kind: type):
    if text is None or text == "":
        return None
    if kind is bool:
        if isinstance(text, bool):
            return text
        if text in ("true", "false"):
            return text == "true"
        raise ValueError(f"not a boolean: {text!r}")
    if kind is Fraction:
        return Fraction(text)
    if kind is int:
        if isinstance(text, bool):
            raise ValueError(f"not an integer: {text!r}")
        return int(text)
    return str(text)


def render(schema: str, records: list[dict], meta: dict, fmt: str) -> str:
    fields = [name for name, _ in SCHEMAS[schema]]
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(fields)
        for rec in records:
            writer.writerow([_csv_cell(rec.get(f)) for f in fields])
        return buf.getvalue()
    doc = {
        "meta": {"tool": "schurqnr", "version": __version__, "schema": schema, **meta},
        "records": [{f: _encode(rec.get(f)) for f in fields} for rec in records],
    }
    return json.dumps(doc, indent=2) + "\n"


def parse_output(text: str, schema: str | None = None) -> tuple[dict, list[dict]]:
    """Read CSV or JSON written by this tool back into typed records.

    CSV carries no meta block, so its schema must be given.
    """
    stripped = text.lstrip()
    if stripped.startswith("{"):
        doc = json.loads(text)
        meta = doc["meta"]
        kinds = dict(SCHEMAS[schema or meta["schema"]])
        records = [{k: _decode(v, kinds[k]) for k, v in rec.items()} for rec in doc["records"]]
        return meta, records
    if schema is None:
        raise ValueError("CSV input needs an explicit schema")
    kinds = dict(SCHEMAS[schema])
    rows = list(csv.reader(io.StringIO(text)))
    header = rows[0]
    if header != [name for name, _ in SCHEMAS[schema]]:
        raise ValueError(f"header {header} does not match schema {schema!r}")
    return {"schema": schema}, [
        {k: _decode(v, kinds[k]) for k, v in zip(header, row)} for row in rows[1:]
    ]


# ---------------------------------------------------------------- argument types

_INT = re.compile(r"^\s*(\d[\d_]*)(?:\s*\^\s*(\d+))?\s*$")


def parse_int(text: str) -> int:
    """Non-negative integer, also accepting B^E such as 10^7."""
    m = _INT.match(text)
    if not m:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    base = int(m.group(1))
    return base ** int(m.group(2)) if m.group(2) else base


def parse_positive(text: str) -> int:
    n = parse_int(text)
    if n < 1:
        raise argparse.ArgumentTypeError(f"must be positive, got {n}")
    return n


def parse_class(text: str) -> tuple[int, int]:
    """'R/M' as a residue class, or 'all' for every prime."""
    if text == "all":
        return 0, 1
    m = re.fullmatch(r"\s*(\d+)\s*/\s*(\d+)\s*", text)
    if not m:
        raise argparse.ArgumentTypeError(f"expected R/M or 'all', got {text!r}")
    r, mod = int(m.group(1)), int(m.group(2))
    if mod < 1 or r >= mod:
        raise argparse.ArgumentTypeError(f"residue must satisfy 0 <= R < M, got {r}/{mod}")
    return r, mod


def parse_dyadic(text: str) -> Fraction:
    """'N/D' with D a power of two."""
    m = re.fullmatch(r"\s*(\d+)\s*/\s*(\d+)\s*", text)
    if not m:
        raise argparse.ArgumentTypeError(f"expected N/D, got {text!r}")
    n, d = int(m.group(1)), int(m.group(2))
    if d < 1 or d & (d - 1):
        raise argparse.ArgumentTypeError(f"denominator must be a power of two, got {d}")
    return Fraction(n, d)


# ---------------------------------------------------------------- commands

class UsageError(Exception):
    pass


def _require_prime(p: int, flag: str = "--p") -> None:
    if p < 3 or not is_prime(p) or p % 2 == 0:
        raise UsageError(f"argument {flag}: {p} is not an odd prime")


def _require_proof_prime(p: int) -> None:
    _require_prime(p)
    if p % 24 != 13:
        raise UsageError(f"argument --p: {p} is not 13 mod 24")
    if p <= proofkit.PROOF_RANGE_START:
        raise UsageError(
            f"argument --p: {p} is below the supported proof range (p > {proofkit.PROOF_RANGE_START})"
        )


def _cmd_scan(args):
    _require_prime(args.p)
    check_budget(args.p, args.budget_bits)
    table = build_residue_table(args.p, args.budget_bits)
    report, _ = scan_runs(table)
    min_run = report.max_run if args.min_run is None else args.min_run
    _, runs = scan_runs(table, min_run)
    records = [{"p": args.p, "start": r.start, "length": r.length, "end": r.end} for r in runs]
    meta = {
        "arguments": {"p": args.p, "min_run": min_run},
        "max_run": report.max_run,
        "run_start": report.run_start,
        "isqrt_p": report.isqrt_p,
        "exceeds": report.exceeds,
        "longest_constant_run": char_run_stats(table).longest_constant_run,
    }
    failed = report.exceeds and args.p != schur.KNOWN_EXCEPTION
    print(
        f"p={args.p}: longest non-residue run {report.max_run} at {report.run_start}, "
        f"floor(sqrt p)={report.isqrt_p}, exceeds={report.exceeds}",
        file=sys.stderr,
    )
    return "run", records, meta, failed


def _cmd_verify(args):
    if args.lo > args.hi:
        raise UsageError(f"argument --from: {args.lo} exceeds --to {args.hi}")
    residue, modulus = args.cls
    progress = None
    if args.progress:
        def progress(done, total):
            print(f"\r{done}/{total} primes", end="", file=sys.stderr, flush=True)
    summary = schur.verify_range(
        args.lo, args.hi, residue, modulus, jobs=args.jobs, budget_bits=args.budget_bits,
        progress=progress,
    )
    if args.progress:
        print(file=sys.stderr)
    records = [
        {"p": r.p, "max_run": r.max_run, "run_start": r.run_start, "isqrt_p": r.isqrt_p,
         "exceeds": r.exceeds}
        for r in summary.records
    ]
    ratio = summary.max_ratio
    meta = {
        "arguments": {"from": args.lo, "to": args.hi, "class": f"{residue}/{modulus}"},
        "primes_checked": summary.primes_checked,
        "exceedances": [r.p for r in summary.exceedances],
        "max_ratio_sq": None if ratio is None else _encode(ratio),
        "hudson_consistent": summary.hudson_consistent,
    }
    print(
        f"checked {summary.primes_checked} primes in [{args.lo}, {args.hi}] class "
        f"{residue}/{modulus}; exceedances: {meta['exceedances']}; "
        f"max run^2/p = {meta['max_ratio_sq']}",
        file=sys.stderr,
    )
    failed = not summary.only_known_exception or not summary.hudson_consistent
    return "batch", records, meta, failed


def _cmd_table(args):
    if not args.paper:
        raise UsageError("argument --paper: required (the published sample is the only table)")
    check = schur.check_published_sample()
    records = []
    for row in check.rows:
        (p, run, root), (_, crun, croot) = row.expected, row.computed
        records.append({
            "p": p, "expected_max_run": run, "computed_max_run": crun,
            "expected_isqrt_p": root, "computed_isqrt_p": croot, "match": not row.diffs,
        })
    matched = len(check.rows) - len(check.mismatches)
    print(f"{matched}/{len(check.rows)} published tuples match", file=sys.stderr)
    for row in check.mismatches:
        print(f"mismatch at p={row.expected[0]}: {row.diffs}", file=sys.stderr)
    meta = {"arguments": {"paper": True}, "matched": matched, "total": len(check.rows)}
    return "table", records, meta, not check.ok


def _cmd_lemma1(args):
    try:
        report = proofkit.lemma1_report(args.p, args.threshold)
    except proofkit.PreconditionError as exc:
        raise UsageError(f"argument --p: {exc}") from exc
    records = [{"p": args.p, "start": r.start, "length": r.length, "tag": r.tag} for r in report.runs]
    meta = {
        "arguments": {"p": args.p, "threshold": args.threshold},
        "gap_witness_n": report.gap_witness_n,
        "least_odd_qnr_u": report.least_odd_qnr_u,
        "upper_half_residue": report.upper_half_residue,
        "facts": report.facts,
    }
    for name in report.failed_facts:
        print(f"p={args.p}: fact failed: {name}", file=sys.stderr)
    return "lemma1", records, meta, not report.ok


def _cmd_lemma2(args):
    _require_proof_prime(args.p)
    try:
        a = args.a if args.a is not None else proofkit.case_select(args.p, args.k)
        report = proofkit.lemma2_criterion(args.p, args.k, a)
    except proofkit.PreconditionError as exc:
        raise UsageError(str(exc)) from exc
    rec = {
        "p": report.p, "k": report.k, "a": report.a,
        "span_holds": report.span_holds is True, "diff_exceeds_p": report.diff_exceeds_p,
        "x_low": report.x_low, "x_high": report.x_high, "diff_value": report.diff_value,
    }
    failed = True
    if report.holds:
        try:
            w = proofkit.lemma2_witness(args.p, args.k, a, report)
        except proofkit.VerificationFailure as exc:
            print(str(exc), file=sys.stderr)
        else:
            rec.update(x=w.x, c=w.c, y=w.y, m=w.m, n=w.n, R=w.R, straddle_x=w.straddle_x)
            failed = bool(proofkit.check_witness(w))
    else:
        print(f"criterion not satisfied for p={args.p}, k={args.k}, a={a}", file=sys.stderr)
    meta = {"arguments": {"p": args.p, "k": args.k, "a": _encode(a)}}
    return "criterion", [rec], meta, failed


def _witness_row(p: int, o: proofkit.KOutcome) -> dict:
    rec = {"p": p, "k": o.k, "a": o.a, "refuted": o.refuted, "error": o.error}
    if o.witness:
        w = o.witness
        rec.update(x=w.x, c=w.c, y=w.y, m=w.m, n=w.n, R=w.R, straddle_x=w.straddle_x)
    return rec


def _cmd_sweep(args):
    _require_proof_prime(args.p)
    summary = proofkit.sweep_k(args.p, jobs=args.jobs)
    records = [_witness_row(args.p, o) for o in summary.outcomes]
    unsound = [w.k for w in summary.witnesses if proofkit.check_witness(w)]
    meta = {
        "arguments": {"p": args.p},
        "k_window": [summary.k_lo, summary.k_hi],
        "checked": summary.checked,
        "failures": [o.k for o in summary.failures],
        "unsound_witnesses": unsound,
        "boundary": [_encode_row(_witness_row(args.p, o)) for o in summary.boundary],
    }
    print(
        f"p={args.p}: k in [{summary.k_lo}, {summary.k_hi}], {summary.checked} checked, "
        f"{len(summary.failures)} not refuted",
        file=sys.stderr,
    )
    return "witness", records, meta, not summary.ok or bool(unsound)


def _encode_row(rec: dict) -> dict:
    return {k: _encode(v) for k, v in rec.items()}


def _cmd_thresholds(args):
    reports = proofkit.threshold_report(args.limit)
    records = [
        {
            "case_id": r.case_id, "paper_threshold": r.paper_threshold,
            "verified_from": r.verified_from, "checked_to": r.checked_to,
            "holds_at_threshold": r.holds_at_threshold,
            "failures_above": len(r.failures_above), "undecided": len(r.undecided),
            "boundary_behavior": r.boundary_behavior,
        }
        for r in reports
    ]
    for r in reports:
        print(f"{r.case_id}: {r.boundary_behavior}; checked to {r.checked_to}", file=sys.stderr)
    meta = {"arguments": {"limit": args.limit}}
    return "threshold", records, meta, not all(r.ok for r in reports)


def _cmd_bounds(args):
    which = {"brauer5mod8": "brauer5mod8", "brauer4n1": "brauer4n1", "norton": "norton"}[args.which]
    summary = proofkit.bound_check(which, args.lo, args.hi)
    rec = {
        "which": which, "lo": args.lo, "hi": args.hi, "primes_checked": summary.primes_checked,
        "violations": len(summary.violations),
        "violating_primes": " ".join(str(v.p) for v in summary.violations),
        "empirical_only": summary.empirical_only,
    }
    label = " (empirical only, not a proof)" if summary.empirical_only else ""
    print(
        f"{which}: {summary.primes_checked} primes, {len(summary.violations)} violations{label}",
        file=sys.stderr,
    )
    meta = {"arguments": {"which": which, "from": args.lo, "to": args.hi}}
    failed = bool(summary.violations) and not summary.empirical_only
    return "bounds", [rec], meta, failed


# ---------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="schurqnr",
        description="Verify that 13 is the only prime with more than sqrt(p) "
        "consecutive quadratic non-residues.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_output(p, default="json"):
        p.add_argument("--format", choices=("csv", "json"), default=default)
        p.add_argument("--out", metavar="PATH", help="write data here instead of stdout")

    def add_jobs(p):
        p.add_argument("--jobs", type=parse_positive, default=None,
                       help="worker count (default: available CPUs)")

    def add_budget(p):
        p.add_argument("--budget-bits", type=parse_positive, default=DEFAULT_BUDGET_BITS,
                       help="largest residue table allowed, in bits")

    s = sub.add_parser("scan", help="longest non-residue run of one prime")
    s.add_argument("--p", type=parse_int, required=True)
    s.add_argument("--min-run", type=parse_int, default=None,
                   help="list runs at least this long (default: the longest only)")
    add_budget(s)
    add_output(s)
    s.set_defaults(run=_cmd_scan)

    s = sub.add_parser("verify", help="scan a range of primes")
    s.add_argument("--from", dest="lo", type=parse_int, required=True)
    s.add_argument("--to", dest="hi", type=parse_int, required=True)
    s.add_argument("--class", dest="cls", type=parse_class, default=(0, 1),
                   help="residue class R/M, or 'all' (default)")
    s.add_argument("--progress", action="store_true", help="report progress on stderr")
    add_jobs(s)
    add_budget(s)
    add_output(s, default="csv")
    s.set_defaults(run=_cmd_verify)

    s = sub.add_parser("table", help="recompute the published sample of results")
    s.add_argument("--paper", action="store_true")
    add_output(s)
    s.set_defaults(run=_cmd_table)

    s = sub.add_parser("lemma1", help="localization facts and run classification")
    s.add_argument("--p", type=parse_int, required=True)
    s.add_argument("--threshold", type=parse_positive, required=True)
    add_output(s)
    s.set_defaults(run=_cmd_lemma1)

    s = sub.add_parser("lemma2", help="refutation criterion and witness for one run start")
    s.add_argument("--p", type=parse_int, required=True)
    s.add_argument("--k", type=parse_positive, required=True)
    s.add_argument("--a", type=parse_dyadic, default=None,
                   help="N/D with D a power of two (default: chosen from k)")
    add_output(s)
    s.set_defaults(run=_cmd_lemma2)

    s = sub.add_parser("sweep", help="refute every candidate run start of one prime")
    s.add_argument("--p", type=parse_int, required=True)
    add_jobs(s)
    add_output(s)
    s.set_defaults(run=_cmd_sweep)

    s = sub.add_parser("thresholds", help="exact check of the case inequalities")
    s.add_argument("--limit", type=parse_positive, default=proofkit.DEFAULT_THRESHOLD_LIMIT)
    add_output(s)
    s.set_defaults(run=_cmd_thresholds)

    s = sub.add_parser("bounds", help="empirical check of a cited bound")
    s.add_argument("--which", choices=("brauer5mod8", "brauer4n1", "norton"), required=True)
    s.add_argument("--from", dest="lo", type=parse_int, default=2)
    s.add_argument("--to", dest="hi", type=parse_int, required=True)
    add_output(s)
    s.set_defaults(run=_cmd_bounds)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        schema, records, meta, failed = args.run(args)
    except UsageError as exc:
        print(f"{parser.prog} {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except MemoryBudgetError as exc:
        print(f"{parser.prog} {args.command}: error: argument --budget-bits: {exc}", file=sys.stderr)
        return EXIT_USAGE
    meta = {"command": args.command, **meta, "passed": not failed}
    text = render(schema, records, meta, args.format)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_FAILED if failed else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
