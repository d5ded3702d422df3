"""
verify: differential suites against the exact oracles, one JSON line per case
"""

from app.cli.common import CliContext, emit_json
from app.errors import EXIT_UNSOLVABLE
from app.services.verification import SUITES, run_suite


def register(subparsers) -> None:
    parser = subparsers.add_parser("verify", help="Cross-check algorithms against oracles")
    parser.add_argument("--suite", required=True, choices=sorted(SUITES))
    parser.add_argument("--seeds", type=int, default=20, help="Random cases per suite (default: 20)")
    parser.set_defaults(handler=handle)


def handle(args, context: CliContext) -> int:
    report = run_suite(args.suite, args.seeds)
    for case in report.cases:
        emit_json(context.out, case.to_dict())
    # summary comes last
    emit_json(context.out, report.to_dict())
    return 0 if report.passed else EXIT_UNSOLVABLE
