"""Command-line front end.

Exit codes: 0 success, 1 check failure, 2 config error, 3 numeric non-convergence.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import __version__
from .errors import ConfigError
from .report import (load_config, read_report, render_csv, render_json, report_rows,
                     write_atomic)
from .verify import FAST_SUITE, STANDARD_SUITE, lemma_checks, oracle_selftest, scan

EXIT_OK, EXIT_CHECK, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2, 3
SELFTEST_TOL = 0.01


def _emit(text, out):
    if out:
        write_atomic(out, text)
    else:
        sys.stdout.write(text)


def cmd_scan(args):
    try:
        config = load_config(args.config)
    except (ConfigError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    report = scan(config, workers=args.workers)
    rows = report_rows(report)
    if config.format == "json":
        text = render_json(rows, report.sup_ratio, report.config_digest, report.tool_version)
    else:
        text = render_csv(rows)
    _emit(text, args.out or config.output_path)
    print(f"sup_ratio={report.sup_ratio:.12g} rows={len(rows)}", file=sys.stderr)
    failed = [r for r in report.rows if r.notes.startswith("error:")]
    if any("NoConvergence" in r.notes for r in failed):
        print("warning: some rows did not converge (partial report)", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


def cmd_check_lemmas(args):
    suite = FAST_SUITE if args.suite == "fast" else STANDARD_SUITE
    results = lemma_checks(suite, n=args.n)
    lines = [f"{'PASS' if r.passed else 'FAIL'}  {r.name}  {r.detail}".rstrip() for r in results]
    failures = sum(not r.passed for r in results)
    lines.append(f"{len(results) - failures} passed, {failures} failed")
    _emit("\n".join(lines) + "\n", args.out)
    return EXIT_CHECK if failures else EXIT_OK


def cmd_oracle_selftest(args):
    errors = oracle_selftest(args.n)
    worst = max(errors.values())
    doc = {"n": args.n, "max_relative_error": worst, "threshold": SELFTEST_TOL,
           "relative_errors": errors}
    _emit(json.dumps(doc, indent=2, sort_keys=True) + "\n", args.out)
    return EXIT_OK if worst <= SELFTEST_TOL else EXIT_CHECK


def cmd_report(args):
    try:
        doc = read_report(args.input)
    except (OSError, ValueError) as exc:
        print(f"cannot read report: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    rows = doc["rows"]
    if args.format == "json":
        text = render_json(rows, doc.get("sup_ratio"), doc.get("config_digest", ""),
                           doc.get("tool_version", ""))
    else:
        text = render_csv(rows)
    _emit(text, args.out)
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(prog="circdeg", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("scan", help="estimate constants over families x parameter grid")
    p.add_argument("--config", required=True)
    p.add_argument("--out", help="override output_path from the config")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("check-lemmas", help="numerical forms of the power-trick lemmas")
    p.add_argument("--suite", choices=("standard", "fast"), default="standard")
    p.add_argument("--n", type=int, default=1024)
    p.add_argument("--out")
    p.set_defaults(func=cmd_check_lemmas)

    p = sub.add_parser("oracle-selftest", help="quadrature vs closed forms")
    p.add_argument("--n", type=int, default=2048)
    p.add_argument("--out")
    p.set_defaults(func=cmd_oracle_selftest)

    p = sub.add_parser("report", help="reformat an existing report")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out")
    p.set_defaults(func=cmd_report)
    return parser


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_CHECK


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
