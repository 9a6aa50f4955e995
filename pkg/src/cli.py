"""
Command-line entry point for the MOPS toolkit.

Verbs:
    compute    dump the MOPS of the configured weight with its D/C matrices
    verify     run the configured checks and write a report
    casestudy  run the ball/simplex case study and write LaTeX tables
"""

import argparse
import sys
from typing import List, Optional

from .config import RunConfig, load_config, parse_run_config, validate_config
from .constants import APP_VERSION, DEFAULT_CONFIG_PATH, REPORT_FORMATS
from .errors import ConfigError, ConfigInvalid, IoFailure, MopsError
from .observability import ErrorTracker, MetricsCollector, setup_structured_logger
from .observability.errors import ErrorRecord
from .services import CheckRunner, emit, emit_family


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mops", description="Exact bivariate MOPS and quadratic decomposition checks"
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {APP_VERSION}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", default=DEFAULT_CONFIG_PATH, help="Path to config file")
    common.add_argument(
        "--max-degree",
        type=int,
        help="Symmetric degree N; for casestudy the small degree of the tables (overrides config)",
    )
    common.add_argument("--out", help="Output file or directory (overrides config)")
    common.add_argument("--format", choices=REPORT_FORMATS, help="Report format (overrides config)")
    common.add_argument("--debug", action="store_true", help="Verbose console logging")

    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("compute", parents=[common], help="Dump MOPS and recurrence matrices")
    sub.add_parser("verify", parents=[common], help="Run the verification suite")
    sub.add_parser("casestudy", parents=[common], help="Ball/simplex case study with LaTeX tables")
    return parser


def _apply_overrides(config: dict, args: argparse.Namespace) -> dict:
    merged = dict(config)
    if args.command == "casestudy":
        merged["checks"] = ["xu_case_study"]
        if args.max_degree is not None:
            case_study = merged.get("case_study", {})
            # a non-object section is left for validate_config to report
            if isinstance(case_study, dict):
                merged["case_study"] = {**case_study, "degree": args.max_degree}
    elif args.max_degree is not None:
        merged["max_degree"] = args.max_degree
    output = dict(merged.get("output", {}))
    if args.out:
        output["path"] = args.out
    if args.format:
        output["format"] = args.format
    elif args.command == "casestudy":
        output["format"] = "latex"
    merged["output"] = output
    return merged


def _load(args: argparse.Namespace) -> RunConfig:
    """Load, override, validate. Exits with status 2 on configuration problems."""
    try:
        config = _apply_overrides(load_config(args.config), args)
    except ConfigError as exc:
        print(f"  Config error: {exc}", file=sys.stderr)
        sys.exit(2)

    config_errors = validate_config(config)
    if config_errors:
        for err in config_errors:
            print(f"  Config error: {err}", file=sys.stderr)
        sys.exit(2)

    try:
        return parse_run_config(config)
    except ConfigInvalid as exc:
        print(f"  Config error: {exc}", file=sys.stderr)
        sys.exit(2)


def _report_unexpected(record: ErrorRecord) -> None:
    check = record.context.get("check", "?")
    print(f"  Unexpected {record.error_type} in {check}: {record.message}", file=sys.stderr)


def main(argv: Optional[List[str]] = None) -> int:
    """Main entry point; returns the process exit code."""
    args = build_parser().parse_args(argv)
    run_config = _load(args)

    debug_mode = args.debug or run_config.debug
    logger = setup_structured_logger(
        "mops", "mops.log", debug=debug_mode, json_console=run_config.json_console
    )
    logger.info("mops %s %s (N=%d)", APP_VERSION, args.command, run_config.max_degree)

    # Initialise global observability singletons early
    MetricsCollector()
    ErrorTracker().on_error(_report_unexpected)

    runner = CheckRunner(run_config)
    try:
        if args.command == "compute":
            path = emit_family(runner.compute(), run_config.output_format, run_config.output_path)
            print(path)
            return 0
        report = runner.run()
        path = emit(report, run_config.output_format, run_config.output_path)
    except IoFailure as exc:
        logger.error("cannot write report: %s", exc)
        print(f"  Output error: {exc}", file=sys.stderr)
        return 3
    except MopsError as exc:
        # compute has no record sink; domain errors end the command
        logger.error("%s failed: %s", args.command, exc, extra={"error_type": type(exc).__name__})
        print(f"  Error: {exc}", file=sys.stderr)
        return 1

    for name, status in report.checks.items():
        print(f"{name:<24} {status}")
    print(f"report: {path}")
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
