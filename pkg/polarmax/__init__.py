"""
CLI application factory. Creates the parser, loads config, sets up logging and registers subcommands.
"""
import argparse
import logging
import sys
from typing import List, Optional

from polarmax.config import Config
from polarmax.services.errors import ValidationError

__version__ = Config.VERSION

LOG_FORMAT = "[%(levelname)s] %(name)s: %(message)s"


class CliParser(argparse.ArgumentParser):
    """Argument errors become ValidationError so they share the exit-1 path."""

    def error(self, message):
        raise ValidationError(message)


class StderrHandler(logging.StreamHandler):
    """Writes to whatever sys.stderr is at emit time."""

    def emit(self, record):
        self.stream = sys.stderr
        super().emit(record)


def _configure_logging(level: str) -> None:
    log = logging.getLogger("polarmax")
    if not log.handlers:
        handler = StderrHandler(sys.stderr)
        handler.setFormatter(logging.Formatter(LOG_FORMAT))
        log.addHandler(handler)
    log.setLevel(getattr(logging, str(level).upper(), logging.WARNING))


def create_app(config_object=None) -> argparse.ArgumentParser:
    config = config_object or Config
    _configure_logging(getattr(config, "LOG_LEVEL", "WARNING"))

    parser = CliParser(prog="polarmax", description="Polarization (Chebyshev) max-min solvers for Riesz-type kernels.")
    parser.add_argument("--version", action="version", version=f"polarmax {getattr(config, 'VERSION', __version__)}")
    common = CliParser(add_help=False)
    common.add_argument("--config", help="JSON file whose keys override the flags")
    subparsers = parser.add_subparsers(dest="command", metavar="COMMAND")
    subparsers.required = True

    # Subcommands
    from polarmax.routes import asymptotics, chebyshev, cover, solve, thresholds, verify

    for module in (solve, cover, chebyshev, asymptotics, thresholds, verify):
        module.register(subparsers, [common])
    return parser


def run(argv: Optional[List[str]] = None, config_object=None) -> int:
    """Parse argv, dispatch, return the exit code (0 ok, 1 invalid input, 2 solver failure)."""
    from polarmax.middleware.experiment import EXIT_INVALID
    from polarmax.utils.response import api_error

    parser = create_app(config_object)
    try:
        args = parser.parse_args(argv)
    except ValidationError as e:
        return api_error(str(e), EXIT_INVALID)
    except SystemExit as e:
        # --help and --version
        return int(e.code or 0)
    return args.handler(args)
