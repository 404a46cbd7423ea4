"""Batch front end: ``hh-cfrac <command> job.json``.

Exit codes: 0 all checks pass, 1 check failures, 2 input error,
3 numerical degeneration. Artifacts go to stdout (or ``--out``), diagnostics
to stderr as ``LEVEL code message`` lines.
"""

from __future__ import annotations

import argparse
import sys
from typing import List, Optional

from .arith import working_precision
from .config import settings
from .errors import HHError
from .jobs import load_job
from .log_utils import get_logger, setup_logging
from .registry import autodiscover_and_register

EXIT_OK = 0
EXIT_CHECKS_FAILED = 1


def _add_logging_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--log-level",
        default=settings.LOG_LEVEL,
        help="Logging level (DEBUG, INFO, WARNING, ERROR)",
    )
    parser.add_argument(
        "--log-format",
        default=settings.LOG_FORMAT,
        choices=["diagnostic", "json"],
        help="Diagnostics rendering on stderr",
    )


def configure_logging(argv: Optional[List[str]] = None) -> None:
    """Set up logging from the log options alone, before any command module is imported."""
    pre = argparse.ArgumentParser(add_help=False)
    _add_logging_options(pre)
    known, _ = pre.parse_known_args(argv)
    setup_logging(known.log_level, known.log_format)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hh-cfrac",
        description="Continued fractions of hyperelliptic Halphen elements.",
    )
    _add_logging_options(parser)
    parser.add_argument(
        "--precision",
        type=int,
        default=None,
        help="Working precision in bits; overrides the job's precision_bits",
    )
    sub = parser.add_subparsers(dest="command", metavar="command")
    sub.required = True
    autodiscover_and_register("hh_cfrac.commands", sub)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    configure_logging(argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    log = get_logger(__name__)

    try:
        job = load_job(args.job)
        bits = args.precision or job.precision_bits
        with working_precision(bits):
            log.debug("running job", code="Job", command=args.command, precision_bits=bits)
            return args.handler(job, args)
    except HHError as exc:
        log.error(exc.message, code=exc.code, **{k: str(v) for k, v in exc.context.items()})
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
