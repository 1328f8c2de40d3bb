from vexleb.core.dependencies import (
    build_family, get_experiment_service, load_exponent, load_function, parse_box, parse_grid,
)
from vexleb.core.errors import UsageError
from vexleb.schemas.reports import RatioReport
from vexleb.services.experiments import OPERATORS
from vexleb.services.generators import FAMILIES

INPUTS = ("v", "w", "p", "q", "alpha", "beta")


def register(subparsers):
    parser = subparsers.add_parser("estimate", help="Empirical operator-norm ratios over seeded test-function families")
    parser.add_argument("--op", required=True, choices=OPERATORS)
    parser.add_argument("--p", required=True, help="source exponent: a number or an exponent-field file")
    parser.add_argument("--q", required=True, help="target exponent: a number or an exponent-field file")
    parser.add_argument("--v", help="target multiplier (default 1)")
    parser.add_argument("--w", help="source multiplier (default 1)")
    parser.add_argument("--grid", help="lo,hi,n or lo,hi,n,lo,hi,n when no weight file fixes the grid")
    parser.add_argument("--families", default="random,indicators,power",
                        help=f"comma-separated subset of {','.join(FAMILIES)}")
    parser.add_argument("--trials", type=int, default=16)
    parser.add_argument("--alpha", default="0")
    parser.add_argument("--beta", default="0")
    parser.add_argument("--family", choices=("all", "dyadic", "capped"), default="all")
    parser.add_argument("--k", type=int)
    parser.add_argument("--base", help="base rectangle x0,x1,y0,y1 for maximal operators")
    parser.set_defaults(handler=handle, inputs=INPUTS)


def handle(args) -> RatioReport:
    experiments = get_experiment_service(args)
    v = load_function(args.v, "v", required=False)
    w = load_function(args.w, "w", required=False)
    p, q = load_exponent(args.p, "p"), load_exponent(args.q, "q")
    grid = parse_grid(args.grid)
    for carrier in (v, w, p, q):
        if grid is None and hasattr(carrier, "grid"):
            grid = carrier.grid
    if grid is None:
        raise UsageError("estimate needs --grid, a weight file or an exponent-field file")
    if args.trials < 0:
        raise UsageError("--trials must be non-negative")
    families = [name.strip() for name in args.families.split(",") if name.strip()]
    options = {
        "alpha": load_exponent(args.alpha, "alpha", kind="order"),
        "beta": load_exponent(args.beta, "beta", kind="order"),
        "family": build_family(args.family, args.k, parse_box(args.base)),
    }
    return experiments.estimate_operator_norm(
        args.op, p, q, v=v, w=w, families=families, trials=args.trials, seed=args.seed, grid=grid,
        necessity_weight=w if "necessity" in families else None, options=options,
    )
