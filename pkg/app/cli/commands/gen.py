"""
gen: seeded random instance with a planted group structure
"""

import logging

from app.cli.common import CliContext, parse_int_list, write_bytes
from app.models.schemas import RateModel
from app.services.generator import DEFAULT_DIST, DEFAULT_RATE_DIST, generate_instance
from app.utils.instance_io import write_instance

logger = logging.getLogger(__name__)


def register(subparsers) -> None:
    parser = subparsers.add_parser("gen", help="Generate a K-MPCA instance")
    parser.add_argument("--users", type=int, required=True, help="Number of users M")
    parser.add_argument("--channels", type=int, required=True, help="Number of channels N")
    parser.add_argument("--k", type=int, default=1, help="Number of channel groups K (default: 1)")
    parser.add_argument("--seed", type=int, default=0, help="PRNG seed (default: 0)")
    parser.add_argument("--dist", default=DEFAULT_DIST, help=f"Gain distribution (default: {DEFAULT_DIST})")
    parser.add_argument("--group-sizes", help="Comma-separated group sizes (default: even split)")
    parser.add_argument("--rate-dist", default=DEFAULT_RATE_DIST,
                        help=f"Rate target distribution (default: {DEFAULT_RATE_DIST})")
    parser.add_argument("--rate-model", default=RateModel.LOG_SNR.value, choices=[m.value for m in RateModel])
    parser.add_argument("--out", help="Write the instance here instead of stdout")
    parser.set_defaults(handler=handle)


def handle(args, context: CliContext) -> int:
    instance = generate_instance(
        args.users,
        args.channels,
        k=args.k,
        seed=args.seed,
        dist=args.dist,
        group_sizes=parse_int_list(args.group_sizes, "--group-sizes"),
        rate_dist=args.rate_dist,
        rate_model=RateModel(args.rate_model),
    )
    data = write_instance(instance)
    if args.out:
        write_bytes(args.out, data)
        logger.info(f"Instance written to {args.out}")
    else:
        context.out.write(data.decode("utf-8"))
    return 0
