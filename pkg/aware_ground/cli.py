"""Top-level CLI parser, shared flags, and subcommand dispatch."""

from __future__ import annotations

import argparse
import logging
import sys

from aware_ground import __version__
from aware_ground.config import resolve_config
from aware_ground.errors import EXIT_USAGE, AwareGroundError
from aware_ground.output import print_error
from aware_ground.simulation import DEFAULT_NOISE_SIGMA

# Each command module exports register(subparsers, parents) and run(args, config)
from aware_ground.commands import analyze, decide, replay, simulate

COMMAND_MODULES = [simulate, decide, replay, analyze]


class UsageError(Exception):
    pass


class Parser(argparse.ArgumentParser):
    """ArgumentParser that reports usage errors instead of exiting with status 2."""

    def error(self, message: str):
        raise UsageError(f"{self.prog}: {message}")


def shared_flags() -> argparse.ArgumentParser:
    common = Parser(add_help=False)
    common.add_argument("--layout", help="Ground layout file (default: standard ground)")
    common.add_argument("--seed", type=int, default=0, help="Random seed (default: 0)")
    common.add_argument(
        "--noise", type=float, default=DEFAULT_NOISE_SIGMA,
        help=f"Sensor noise sigma in metres (default: {DEFAULT_NOISE_SIGMA})",
    )
    common.add_argument("--out", default="-", help="Output path, '-' for standard output (default: -)")
    common.add_argument(
        "--rule-max-outside", type=int, default=2,
        help="Fielders allowed outside the ring while the rule is active (default: 2)",
    )
    common.add_argument("--rule-overs", default="1-15", help="Overs the ring rule applies to (default: 1-15)")
    common.add_argument("--json", action="store_true", help="Summaries as JSON")
    common.add_argument("-v", "--verbose", action="store_true", help="Debug logging on standard error")
    return common


def build_parser() -> argparse.ArgumentParser:
    parser = Parser(
        prog="aware-ground",
        description="Sensor-based cricket ground simulator and umpiring decision engine.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")

    parents = [shared_flags()]
    subparsers = parser.add_subparsers(dest="command", help="Available commands")
    for mod in COMMAND_MODULES:
        mod.register(subparsers, parents)

    return parser


_LOG_HANDLER: logging.Handler | None = None


def _configure_logging(verbose: bool) -> None:
    global _LOG_HANDLER
    root = logging.getLogger("aware_ground")
    if _LOG_HANDLER is not None:
        root.removeHandler(_LOG_HANDLER)
    _LOG_HANDLER = logging.StreamHandler(sys.stderr)
    _LOG_HANDLER.setFormatter(logging.Formatter("%(levelname)s %(name)s: %(message)s"))
    root.addHandler(_LOG_HANDLER)
    root.setLevel(logging.DEBUG if verbose else logging.WARNING)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print_error(str(exc))
        return EXIT_USAGE
    except SystemExit as exc:
        # --help and --version
        return int(exc.code or 0)

    if not args.command:
        parser.print_help(sys.stderr)
        return EXIT_USAGE

    _configure_logging(args.verbose)
    try:
        config = resolve_config(args)
    except ValueError as exc:
        print_error(str(exc), json_mode=args.json)
        return EXIT_USAGE
    except AwareGroundError as exc:
        print_error(str(exc), json_mode=args.json)
        return exc.exit_code

    try:
        # Each command module sets args.func = run
        return args.func(args, config)
    except AwareGroundError as exc:
        print_error(str(exc), json_mode=args.json)
        return exc.exit_code
