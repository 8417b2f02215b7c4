import argparse
import json
import logging
import sys
from typing import List, Optional

from pydantic import ValidationError

from orlicz_kit.commands import extend, frac, hardy, norm, rearrange, suite, target, young
from orlicz_kit.exceptions import OrliczKitError, ParameterError
from orlicz_kit.utils.helpers import jsonable, setup_logging

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2

COMMANDS = (young, target, norm, rearrange, hardy, frac, extend, suite)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="orlicz-kit",
        description="Numerical Orlicz calculus: Young functions, optimal targets, rearrangements, "
                    "fractional Orlicz-Sobolev modulars and verification suites.",
    )
    parser.add_argument("--config", default=None, help="flat JSON suite configuration")
    parser.add_argument("--output-dir", dest="output_dir", default=None, help="directory for reports")
    parser.add_argument("--seed", type=int, default=None, help="random seed (suite default 42)")
    parser.add_argument("--trials", type=int, default=None, help="trials per randomized suite")
    parser.add_argument("--log-level", dest="log_level", default="WARNING",
                        choices=["DEBUG", "INFO", "WARNING", "ERROR"])
    subparsers = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for command in COMMANDS:
        command.register(subparsers)
    return parser


def run_command(argv: Optional[List[str]] = None, stream=None) -> int:
    """Parse argv, run the command, print its JSON result; returns the exit code"""
    stream = stream or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as e:
        print(f"usage error: {e}", file=sys.stderr)
        return EXIT_USAGE

    setup_logging(getattr(logging, args.log_level))
    logger.info(f"Running {args.command} {getattr(args, 'action', '')}".rstrip())
    try:
        result = args.handler(args)
    except (ParameterError, ValidationError, argparse.ArgumentTypeError, FileNotFoundError, ValueError) as e:
        logger.error(f"Invalid input: {str(e)}")
        print(f"usage error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except OrliczKitError as e:
        logger.error(f"Error running {args.command}: {str(e)}")
        print(json.dumps({"error": type(e).__name__, "message": str(e)}), file=stream)
        return EXIT_CHECK_FAILED

    print(json.dumps(jsonable(result), indent=2, sort_keys=True), file=stream)
    return EXIT_OK if result.get("passed", True) else EXIT_CHECK_FAILED


def main():
    sys.exit(run_command())
