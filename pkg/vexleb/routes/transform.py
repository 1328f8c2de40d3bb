from vexleb.core.dependencies import (
    build_family, get_operator_service, load_exponent, load_function, parse_box,
)
from vexleb.core.errors import UsageError
from vexleb.schemas.grid import GridFunction
from vexleb.services.operators import COMPANION_VARIANTS

OPERATORS = ("hardy1", "hardy_average", "hardy2", "double_average", "fractional_maximal", "strong_maximal", "companion")
INPUTS = ("input", "alpha", "beta", "p", "q")


def register(subparsers):
    parser = subparsers.add_parser("transform", help="Apply a named operator and write the resulting grid function")
    parser.add_argument("--op", required=True, choices=OPERATORS)
    parser.add_argument("--input", required=True, help="grid-function file (the weight v for 'companion')")
    parser.add_argument("--alpha", default="0", help="fractional order in x: a number or an order-field file")
    parser.add_argument("--beta", default="0", help="fractional order in y: a number or an order-field file")
    parser.add_argument("--family", choices=("all", "dyadic", "capped"), default="all")
    parser.add_argument("--k", type=int, help="side cap 2^k for --family capped")
    parser.add_argument("--base", help="restrict rectangles to x0,x1,y0,y1")
    parser.add_argument("--p", help="exponent for 'companion'")
    parser.add_argument("--q", help="exponent for 'companion'")
    parser.add_argument("--variant", choices=COMPANION_VARIANTS, default="m1")
    parser.set_defaults(handler=handle, inputs=INPUTS)


def handle(args) -> GridFunction:
    operators = get_operator_service(args)
    f = load_function(args.input, "input")
    if args.op == "hardy1":
        return operators.hardy1(f)
    if args.op == "hardy_average":
        return operators.hardy_average(f)
    if args.op == "hardy2":
        return operators.hardy2(f)
    if args.op == "double_average":
        return operators.double_average(f)

    alpha = load_exponent(args.alpha, "alpha", kind="order")
    beta = load_exponent(args.beta, "beta", kind="order")
    family = build_family(args.family, args.k, parse_box(args.base))
    if args.op == "fractional_maximal":
        return operators.fractional_maximal_1d(f, alpha, family)
    if args.op == "strong_maximal":
        return operators.strong_fractional_maximal(f, alpha, beta, family)
    if args.p is None or args.q is None:
        raise UsageError("'companion' needs --p and --q")
    return operators.companion_maximal(f, load_exponent(args.p, "p"), load_exponent(args.q, "q"), alpha, beta,
                                       args.variant, family)
