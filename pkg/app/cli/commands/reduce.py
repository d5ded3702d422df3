"""
reduce: build the gadget instance of a 3-SAT formula, optionally deciding it
"""

import logging

from app.cli.common import CliContext, emit_json, read_bytes, write_bytes
from app.models.sat import ReductionMode
from app.services.reduction import build_reduction, decide_sat_detailed
from app.utils.dimacs import parse_dimacs
from app.utils.instance_io import write_instance

logger = logging.getLogger(__name__)


def register(subparsers) -> None:
    parser = subparsers.add_parser("reduce", help="3-SAT (DIMACS) to MPCA")
    parser.add_argument("--mode", default="a", choices=[m.value for m in ReductionMode],
                        help="a: plain gadget, b: padded gadget with consecutive blocks")
    parser.add_argument("--cnf", required=True, help="DIMACS CNF file")
    parser.add_argument("--out", help="Write the instance JSON here")
    parser.add_argument("--decide", action="store_true", help="Solve the gadget and print SAT/UNSAT")
    parser.set_defaults(handler=handle)


def handle(args, context: CliContext) -> int:
    cnf = parse_dimacs(read_bytes(args.cnf))
    mode = ReductionMode(args.mode)
    instance, _layout, _blocks = build_reduction(cnf, mode)
    if args.out:
        write_bytes(args.out, write_instance(instance))
        logger.info(f"Gadget instance M={instance.num_users} N={instance.num_channels} written to {args.out}")
    if args.decide:
        emit_json(context.out, decide_sat_detailed(cnf, mode).to_dict())
    elif not args.out:
        context.out.write(write_instance(instance).decode("utf-8"))
    return 0
