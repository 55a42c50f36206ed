import argparse

from cli import adjudicate, baseline, convert, iaa, mentions, review, score
from modules.errors import CorefToolsError, UsageError
from utils.env import JOBS, LOG_LEVEL, get_env, set_env
from utils.logger import configure_logging, log_error

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2

COMMANDS = (score, iaa, adjudicate, review, convert, mentions, baseline)
"""
Subcommand modules; each registers its parser and handler.
"""


class ArgumentParser(argparse.ArgumentParser):
    """Argument parser raising ``UsageError`` instead of exiting."""

    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def build_parser() -> ArgumentParser:
    parser = ArgumentParser(
        prog="coreftools",
        description="Scoring, agreement, adjudication, conversion and baseline tools "
        "for coreference annotations.",
    )
    parser.add_argument(
        "--log-level",
        default=None,
        help=f"Log level for diagnostics on standard error (default: ${LOG_LEVEL} or INFO)",
    )
    parser.add_argument(
        "--jobs",
        type=int,
        default=None,
        help=f"Parallel workers for adjudication and cross-validation (default: ${JOBS} or 1)",
    )
    subparsers = parser.add_subparsers(dest="command", metavar="command")
    subparsers.required = True
    for command in COMMANDS:
        command.register(subparsers)
    return parser


def run(argv) -> int:
    """Run one subcommand.

    :param argv: The arguments without the program name.
    :returns: 0 on success, 1 on a usage error, 2 on a data or parse error.
    """
    try:
        args = build_parser().parse_args(argv)
        configure_logging(args.log_level or get_env(LOG_LEVEL, "INFO"))
    except (UsageError, ValueError) as ex:
        configure_logging("INFO")
        log_error(ex, "usage")
        return EXIT_USAGE
    if args.jobs is not None:
        if args.jobs == 0:
            log_error(ValueError("--jobs must not be 0"), "usage")
            return EXIT_USAGE
        set_env(JOBS, str(args.jobs))
    try:
        args.handler(args)
    except (CorefToolsError, OSError, UnicodeDecodeError) as ex:
        log_error(ex, args.command)
        return EXIT_DATA
    except (UsageError, ValueError) as ex:
        log_error(ex, args.command)
        return EXIT_USAGE
    return EXIT_OK
