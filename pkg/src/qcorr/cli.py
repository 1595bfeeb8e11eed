"""``qcorr`` command line.

    qcorr <subcommand> --scenario FILE [--out FILE] [--format csv|json] [--seed N]
    qcorr selftest [--out FILE] [--format csv|json]

Exit status: 0 on success, 1 on a parse / validation / I/O error, 2 when a
checked property fails numerically (the report is still written).
"""

from __future__ import annotations

import argparse
import sys

from . import scenario as sc
from .errors import PropertyViolation, QcorrError, ScenarioParseError, ScenarioValidationError
from .report import ReportIOError, emit_report

EXIT_OK, EXIT_ERROR, EXIT_PROPERTY = 0, 1, 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qcorr", description="Entropic correlation toolkit for small quantum systems.")
    sub = parser.add_subparsers(dest="command", required=True)
    for kind in sc.KINDS:
        p = sub.add_parser(kind, help=f"run a '{kind}' scenario")
        p.add_argument("--scenario", required=True, help="scenario JSON file")
        p.add_argument("--out", default=None, help="report destination (default stdout)")
        p.add_argument("--format", choices=["csv", "json"], default=None, help="overrides the scenario's format")
        p.add_argument("--seed", type=int, default=None, help="overrides the scenario's seed")
    p = sub.add_parser("selftest", help="run the acceptance criteria")
    p.add_argument("--out", default=None)
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    return parser


def _err(message: str, quiet: bool) -> None:
    if not quiet:
        print(f"qcorr: {message}", file=sys.stderr)


def _selftest(args, quiet: bool) -> int:
    from .acceptance import run_criteria, selftest_report

    results = run_criteria()
    if not quiet:
        for r in results:
            print(r.line(), file=sys.stderr)
    rep = selftest_report(results)
    emit_report(rep, args.format, args.out)
    return EXIT_OK if rep.ok else EXIT_PROPERTY


def run_scenario(path, command: str | None = None, out=None, fmt: str | None = None, seed: int | None = None):
    """Load, validate and run one scenario file; returns ``(report, format)``."""
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    scenario = sc.parse_scenario(text)
    if command is not None and scenario.kind != command:
        raise ScenarioValidationError("kind", f"scenario is '{scenario.kind}' but subcommand is '{command}'")
    if seed is not None:
        if not 0 <= seed < 2**64:
            raise ScenarioValidationError("seed", "must be an unsigned 64-bit integer")
        scenario = scenario.model_copy(update={"seed": seed})
    rep = sc.run(scenario)
    fmt = fmt or scenario.format
    emit_report(rep, fmt, out)
    return rep, fmt


def main(argv=None, quiet: bool = False) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "selftest":
            return _selftest(args, quiet)
        rep, _ = run_scenario(args.scenario, args.command, args.out, args.format, args.seed)
    except ScenarioParseError as exc:
        _err(f"{args.scenario}: parse error: {exc}", quiet)
        return EXIT_ERROR
    except ScenarioValidationError as exc:
        _err(f"{args.scenario}: invalid field {exc}", quiet)
        return EXIT_ERROR
    except (OSError, ReportIOError) as exc:
        _err(str(exc), quiet)
        return EXIT_ERROR
    except PropertyViolation as exc:
        _err(f"property violated: {exc}", quiet)
        return EXIT_PROPERTY
    except QcorrError as exc:
        _err(str(exc), quiet)
        return EXIT_ERROR
    for check in rep.failed_checks():
        _err(f"property violated: {check.name} ({check.detail})", quiet)
    return EXIT_OK if rep.ok else EXIT_PROPERTY


if __name__ == "__main__":
    sys.exit(main())
