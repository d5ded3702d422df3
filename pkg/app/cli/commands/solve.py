"""
solve: run one algorithm (or auto-dispatch) on an instance file
"""

import logging

from app.cli.common import CliContext, emit_json, load_instance, parse_int_list, write_bytes
from app.services.solver_manager import AUTO, SolverManager
from app.utils.instance_io import write_report

logger = logging.getLogger(__name__)


def register(subparsers) -> None:
    parser = subparsers.add_parser("solve", help="Solve an instance and print the report as JSON")
    parser.add_argument("--in", dest="input", required=True, help="Instance JSON file")
    parser.add_argument("--algo", default=AUTO, choices=SolverManager().algorithms, help="Algorithm (default: auto)")
    parser.add_argument("--blocks", help="Comma-separated block sizes for --algo consecutive")
    parser.add_argument("--out", help="Also write the report to this file")
    parser.set_defaults(handler=handle)


def handle(args, context: CliContext) -> int:
    instance = load_instance(args.input)
    blocks = parse_int_list(args.blocks, "--blocks")
    report = context.manager.solve(instance, args.algo, blocks=blocks)
    if args.out:
        write_bytes(args.out, write_report(report))
        logger.info(f"Report written to {args.out}")
    emit_json(context.out, report.to_dict())
    return 0
