from pydantic import BaseModel

from vexleb.core.dependencies import get_experiment_service
from vexleb.services.fixtures import HARDY_FIXTURES, THEOREM31_FIXTURES, comparison_functions, lookup

DRIVERS = ("thm31", "cor35", "sandwich", "dyadic-cmp")

DEFAULT_FIXTURES = {"thm31": "unit", "sandwich": "inverse_square", "dyadic-cmp": "straddling_square"}
DEFAULT_RESOLUTION = {"thm31": 64, "cor35": 64, "sandwich": 2048, "dyadic-cmp": 16}
DEFAULT_TRIALS = {"thm31": 8, "cor35": 50, "sandwich": 8, "dyadic-cmp": 0}


def register(subparsers):
    parser = subparsers.add_parser("verify", help="Run a named theorem driver")
    parser.add_argument("name", choices=DRIVERS)
    parser.add_argument("--fixture", help="named fixture (thm31: unit, split_q; sandwich: inverse_square, cubic_tail, "
                                          "weighted_source, fat_tail; dyadic-cmp: aligned_square, straddling_square, smooth)")
    parser.add_argument("--n", type=int, help="cells per axis")
    parser.add_argument("--trials", type=int)
    parser.add_argument("--k", type=int, default=-2, help="side cap 2^k for dyadic-cmp")
    parser.add_argument("--shift-samples", type=int, help="shifts per axis for dyadic-cmp (doubled for the stability check)")
    parser.add_argument("--alpha", type=float, default=0.0)
    parser.add_argument("--beta", type=float, default=0.0)
    parser.set_defaults(handler=handle, inputs=())


def handle(args) -> BaseModel:
    experiments = get_experiment_service(args)
    name = args.name
    n = args.n or DEFAULT_RESOLUTION[name]
    trials = DEFAULT_TRIALS[name] if args.trials is None else args.trials
    fixture = args.fixture or DEFAULT_FIXTURES.get(name)

    if name == "thm31":
        return experiments.verify_theorem_31(lookup(THEOREM31_FIXTURES, fixture, "fixture"), n, trials, args.seed)
    if name == "cor35":
        return experiments.verify_corollary_35(n, trials, args.seed)
    if name == "sandwich":
        return experiments.sandwich_fixture(lookup(HARDY_FIXTURES, fixture, "fixture"), n, trials, args.seed)
    f = lookup(comparison_functions(n), fixture, "fixture")
    return experiments.verify_dyadic_comparison(f, args.alpha, args.beta, args.k, args.shift_samples, args.seed)
