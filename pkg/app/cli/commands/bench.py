"""
bench: timing sweeps, CSV on stdout
"""

import asyncio

from app.cli.common import CliContext
from app.services.bench import format_csv, plan_cells, run_cells


def register(subparsers) -> None:
    parser = subparsers.add_parser("bench", help="Benchmark an algorithm over a size sweep")
    parser.add_argument("--algo", required=True, help="Algorithm name as for solve")
    parser.add_argument("--sweep", required=True, help="N=a..b (doubling), N=a..b:step, or M=...")
    parser.add_argument("--seed", type=int, default=0, help="First seed (default: 0)")
    parser.add_argument("--seeds", type=int, default=1, help="Seeds per sweep value (default: 1)")
    parser.add_argument("--users", type=int, default=8, help="M when sweeping N (default: 8)")
    parser.add_argument("--channels", type=int, default=64, help="N when sweeping M (default: 64)")
    parser.add_argument("--k", type=int, default=1, help="Channel groups per instance (default: 1)")
    parser.add_argument("--threads", type=int, help="Worker processes (default: MPCA_THREADS)")
    parser.set_defaults(handler=handle)


def handle(args, context: CliContext) -> int:
    cells = plan_cells(args.algo, args.sweep, seeds=args.seeds, seed=args.seed,
                       users=args.users, channels=args.channels, k=args.k)
    rows = asyncio.run(run_cells(cells, threads=args.threads))
    context.out.write(format_csv(rows))
    return 0
