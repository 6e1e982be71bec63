#!/usr/bin/env python3
"""Command line interface for the loop-mirror / sphere simulator.

  run <config>   evaluate a JSON experiment config (single point or sweep)
  check          run the named self-checks (regressions and property sweeps)
  defaults       print the default experiment config

Exit codes: 0 success, 1 invalid config or parameters, 2 numerical guard or
truncation failure, 3 self-check failure.
"""
import argparse
import json
import logging
import os
import sys

from rich.console import Console
from rich.logging import RichHandler
from rich.table import Table

from experiment.config import default_config, parse_config
from experiment.reporting.result_writer import ResultWriter, format_value
from experiment.self_check import list_checks, parse_perturbations, run_checks
from experiment.sweep import run
from physics.errors import (ConfigError, NumericalGuardError, ParameterError, TruncationError)

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_NUMERICAL = 2
EXIT_CHECK_FAILED = 3

SUMMARY_COLUMNS = ("index", "eta", "p_T_unitary", "p_T_collapsed", "purity_closed_form",
                   "purity_oracle", "intermediate_purity")
SUMMARY_ROWS = 10

console = Console(stderr=True)
logger = logging.getLogger("folm")


def setup_logging(verbose: bool) -> None:
    level = logging.DEBUG if verbose or os.getenv("FOLM_VERBOSE") else logging.INFO
    logging.basicConfig(level=level, format="%(message)s", datefmt="[%X]",
                        handlers=[RichHandler(console=console, show_path=False)])


def _summary_table(columns, rows) -> Table:
    table = Table(title="Result summary")
    # index, swept paths, then the headline observables
    shown = [c for c in columns if c == "index" or "." in c]
    shown += [c for c in SUMMARY_COLUMNS[1:] if c in columns]
    for c in shown:
        table.add_column(c, justify="right")
    for row in rows[:SUMMARY_ROWS]:
        table.add_row(*[format_value(row.get(c))[:12] for c in shown])
    if len(rows) > SUMMARY_ROWS:
        table.caption = f"{len(rows) - SUMMARY_ROWS} more row(s) not shown"
    return table


def cmd_run(args) -> int:
    cfg = parse_config(args.config).with_overrides(
        oracle=True if args.oracle else None,
        fock_dim=args.fock_dim,
        seed=args.seed,
        output_path=args.output,
        output_format=args.format,
    )
    logger.debug(f"seed {cfg.seed} (not used by run)")
    result = run(cfg, workers=args.workers)
    writer = ResultWriter(result.columns, cfg.output.path, cfg.output.format)
    for row in result.rows:
        writer.add(row)
    text = writer.write()
    if cfg.output.path is None:
        sys.stdout.write(text)
    if not args.quiet:
        console.print(_summary_table(result.columns, result.rows))
    return EXIT_OK


def cmd_check(args) -> int:
    if args.list:
        table = Table(title="Self-checks")
        table.add_column("name")
        table.add_column("description")
        for chk in list_checks():
            table.add_row(chk.name, chk.description)
        console.print(table)
        return EXIT_OK
    perturb = parse_perturbations(args.perturb)
    results = run_checks(seed=args.seed, perturb=perturb, names=args.only)
    table = Table(title="Self-check results")
    for c in ("check", "status", "expected", "actual", "tolerance", "detail"):
        table.add_column(c)
    for r in results:
        status = "[green]PASS[/green]" if r.passed else "[red]FAIL[/red]"
        table.add_row(r.name, status, f"{r.expected:.6g}", f"{r.actual:.6g}", f"{r.tolerance:.3g}", r.detail)
    console.print(table)
    failed = [r for r in results if not r.passed]
    for r in failed:
        logger.error(f"{r.name}: expected {r.expected!r}, got {r.actual!r} (tolerance {r.tolerance!r})")
    if failed:
        return EXIT_CHECK_FAILED
    logger.info(f"all {len(results)} checks passed")
    return EXIT_OK


def cmd_defaults(args) -> int:
    print(json.dumps(default_config(args.configuration), indent=2))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description="Fiber loop mirror / ferrimagnetic sphere simulator")
    parser.add_argument("-v", "--verbose", action="store_true", help="Debug logging (also FOLM_VERBOSE=1)")
    sub = parser.add_subparsers(dest="command", help="Available commands")

    run_parser = sub.add_parser("run", help="Run an experiment config")
    run_parser.add_argument("config", help="Path to a JSON experiment config")
    run_parser.add_argument("--output", help="Result file (default: config output.path or stdout)")
    run_parser.add_argument("--format", choices=["csv", "json"], help="Result format")
    run_parser.add_argument("--oracle", action="store_true", help="Also compute the Fock-space purity oracle")
    run_parser.add_argument("--fock-dim", type=int, help="Fock truncation dimension for the oracle")
    run_parser.add_argument("--seed", type=int, help="Seed echoed into the config")
    run_parser.add_argument("--workers", type=int, help="Worker threads for sweeps (0 = serial; default FOLM_WORKERS)")
    run_parser.add_argument("--quiet", action="store_true", help="Do not print the summary table")

    check_parser = sub.add_parser("check", help="Run the self-checks")
    check_parser.add_argument("--seed", type=int, default=0, help="Seed for the random property checks")
    check_parser.add_argument("--perturb", action="append", metavar="NAME=VALUE",
                              help="Replace a constant before checking (repeatable)")
    check_parser.add_argument("--only", action="append", metavar="CHECK", help="Run only the named check(s)")
    check_parser.add_argument("--list", action="store_true", help="List the checks and exit")

    defaults_parser = sub.add_parser("defaults", help="Print the default config")
    defaults_parser.add_argument("--configuration", choices=["parallel", "perpendicular"],
                                 help="Configuration to put in the printed config")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if not args.command:
        parser.print_help()
        return EXIT_INVALID
    setup_logging(args.verbose)
    handlers = {"run": cmd_run, "check": cmd_check, "defaults": cmd_defaults}
    try:
        return handlers[args.command](args)
    except (ConfigError, ParameterError) as e:
        logger.error(f"invalid input: {e}")
        return EXIT_INVALID
    except (NumericalGuardError, TruncationError) as e:
        logger.error(f"numerical guard: {e}")
        return EXIT_NUMERICAL
    except KeyboardInterrupt:
        logger.warning("interrupted")
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
