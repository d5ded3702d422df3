"""
Argument parsing and command dispatch
"""

import argparse
import logging
import sys
from typing import Optional, Sequence, TextIO

from app import __version__
from app.cli.commands import bench, gen, recognize, reduce, solve, verify
from app.cli.common import CliContext, emit_json
from app.errors import BadFlags, MpcaError
from app.services.solver_manager import SolverManager

logger = logging.getLogger(__name__)

COMMANDS = (solve, gen, recognize, reduce, verify, bench)


class FlagParser(argparse.ArgumentParser):
    """Flag errors become BadFlags so they share the JSON error path and exit code"""

    def error(self, message):
        raise BadFlags(message)


def create_parser() -> argparse.ArgumentParser:
    parser = FlagParser(prog="mpca", description="Minimum-power channel allocation solvers")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    subparsers = parser.add_subparsers(dest="command", required=True, parser_class=FlagParser)
    for command in COMMANDS:
        command.register(subparsers)
    return parser


def run(argv: Optional[Sequence[str]] = None, out: Optional[TextIO] = None) -> int:
    """Run one command; returns the process exit code"""
    out = out or sys.stdout
    context = CliContext(SolverManager(), out)
    try:
        args = create_parser().parse_args(argv)
        return args.handler(args, context)
    except MpcaError as e:
        logger.error(f"❌ {e.__class__.__name__}: {e.message}")
        emit_json(out, e.to_dict())
        return e.exit_code
