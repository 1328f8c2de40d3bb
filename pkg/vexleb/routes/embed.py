from vexleb.core.dependencies import get_dyadic_service, load_function
from vexleb.core.errors import DomainError, UsageError
from vexleb.schemas.dyadic import DyadicTree
from vexleb.schemas.grid import Grid1D, GridFunction
from vexleb.schemas.reports import EmbeddingReport
from vexleb.utils.gridio import read_tree

COEFFICIENTS = ("power", "corollary-a")
INPUTS = ("tree", "rho")


def register(subparsers):
    parser = subparsers.add_parser("embed", help="Brute-force dyadic Carleson embedding constant against C1")
    parser.add_argument("--tree", help="tree file with explicit coefficients")
    parser.add_argument("--depth", type=int, default=6)
    parser.add_argument("--lo", type=float, default=0.0)
    parser.add_argument("--length", type=float, default=1.0)
    parser.add_argument("--coefficients", choices=COEFFICIENTS, default="power",
                        help="generated coefficients when no --tree is given")
    parser.add_argument("--exponent", type=float, help="c_I = |I|^exponent for 'power' (default q/p)")
    parser.add_argument("--rho", help="weight file on the tree window (default 1)")
    parser.add_argument("--n", type=int, help="cells on the tree window when --rho is omitted (default 4 * 2^depth)")
    parser.add_argument("--p", type=float, default=2.0)
    parser.add_argument("--q", type=float, default=3.0)
    parser.add_argument("--trials", type=int, default=64)
    parser.set_defaults(handler=handle, inputs=INPUTS)


def handle(args) -> EmbeddingReport:
    dyadic = get_dyadic_service(args)
    if args.tree:
        tree = read_tree(args.tree)
    else:
        if args.depth < 0:
            raise UsageError("--depth must be non-negative")
        tree = DyadicTree.zeros(length=args.length, depth=args.depth, lo=args.lo)

    rho = load_function(args.rho, "rho", required=False)
    if rho is None:
        cells = args.n or 4 * 2 ** tree.depth
        rho = GridFunction.constant(Grid1D(lo=tree.lo, hi=tree.lo + tree.length, n=cells), 1.0)
    elif rho.dim != 1:
        raise DomainError("--rho must be 1-D")

    if not args.tree:
        if args.coefficients == "power":
            exponent = args.q / args.p if args.exponent is None else args.exponent
            tree = dyadic.power_coefficients(tree, exponent)
        else:
            tree = dyadic.corollary_a_coefficients(tree, rho, args.p, args.q)
    return dyadic.embedding_bruteforce(tree, rho, args.p, args.q, args.trials, args.seed)
