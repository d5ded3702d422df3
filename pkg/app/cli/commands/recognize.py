"""
recognize: report the channel group structure of an instance
"""

from app.cli.common import CliContext, emit_json, load_instance
from app.errors import BadFlags
from app.services.recognition import fast_is_1mpca, recognize


def register(subparsers) -> None:
    parser = subparsers.add_parser("recognize", help="Find the K-MPCA group structure")
    parser.add_argument("--in", dest="input", required=True, help="Instance JSON file")
    parser.add_argument("--tol", "--tolerance", dest="tolerance", type=float, default=0.0,
                        help="Log2 quantization step for near-equal gains (default: exact)")
    parser.add_argument("--method", default="hash", choices=["hash", "graph"])
    parser.set_defaults(handler=handle)


def handle(args, context: CliContext) -> int:
    if args.tolerance < 0:
        raise BadFlags("--tolerance must be nonnegative")
    instance = load_instance(args.input)
    structure = recognize(instance, tolerance=args.tolerance, method=args.method)
    payload = structure.to_dict()
    payload["is_1mpca"] = fast_is_1mpca(instance)
    emit_json(context.out, payload)
    return 0
