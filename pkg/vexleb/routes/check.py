from typing import Union

from vexleb.core.dependencies import (
    axis_weight, build_family, get_condition_service, get_dyadic_service, load_exponent, load_function,
    parse_box, parse_floats, parse_grid, require_scalar,
)
from vexleb.core.errors import DimensionError, UsageError
from vexleb.schemas.dyadic import DyadicTree
from vexleb.schemas.grid import ExponentField, GridFunction
from vexleb.schemas.reports import ConditionReport, PartitionSequence

CONDITIONS = ("A_M", "A_PS", "A_1", "B", "trace31", "A_R", "trace42", "B5", "trace_pbar", "trace45",
              "two_weight43", "class_P", "class_P_inf", "lemma31", "rd_dyadic", "partition")
INPUTS = ("v", "w", "w1", "w2", "p", "q", "alpha", "beta")


def register(subparsers):
    parser = subparsers.add_parser("check", help="Evaluate a named weight or exponent condition")
    parser.add_argument("name", choices=CONDITIONS)
    parser.add_argument("--v", help="weight v (V for A_1)")
    parser.add_argument("--w", help="weight w (W for A_1, rho for lemma31 and rd_dyadic)")
    parser.add_argument("--w1", help="x-axis factor of a product weight")
    parser.add_argument("--w2", help="y-axis factor of a product weight")
    parser.add_argument("--p", help="exponent: a number or an exponent-field file")
    parser.add_argument("--q", help="exponent: a number or an exponent-field file")
    parser.add_argument("--alpha", default="0", help="fractional order in x")
    parser.add_argument("--beta", default="0", help="fractional order in y")
    parser.add_argument("--grid", help="lo,hi,n,lo,hi,n for A_R with a constant --p")
    parser.add_argument("--box", help="truncation box x0,x1 or x0,x1,y0,y1")
    parser.add_argument("--base", help="base rectangle R0 = x0,x1,y0,y1 for the rectangle family")
    parser.add_argument("--family", choices=("all", "dyadic", "capped"), default="all")
    parser.add_argument("--k", type=int, help="side cap 2^k for --family capped")
    parser.add_argument("--anchor", help="x,y where a variable p is read for trace31")
    parser.add_argument("--bounded", action="store_true", help="report B on a bounded box (tail stops at the box corner)")
    parser.add_argument("--deltas", default="0.1,0.25,0.5,0.75,0.9", help="delta candidates for class_P")
    parser.add_argument("--c-max", type=float, default=1.0, help="admissible constant for class_P_inf")
    parser.add_argument("--depth", type=int, help="dyadic depth for rd_dyadic")
    parser.add_argument("--kmin", type=int, default=0)
    parser.add_argument("--kmax", type=int, help="last level for partition")
    parser.set_defaults(handler=handle, inputs=INPUTS)


def _exponent_field(args) -> ExponentField:
    p = load_exponent(args.p, "p")
    if isinstance(p, ExponentField):
        return p
    grid = parse_grid(args.grid)
    if grid is None:
        raise UsageError(f"'{args.name}' with a constant --p needs --grid")
    return ExponentField.constant(grid, p)


def handle(args) -> Union[ConditionReport, PartitionSequence]:
    conditions = get_condition_service(args)
    name = args.name
    box = parse_box(args.box)

    if name in ("class_P", "class_P_inf"):
        p = _exponent_field(args)
        if name == "class_P":
            return conditions.class_p_membership(p, parse_floats(args.deltas, "--deltas"))
        return conditions.class_p_inf_membership(p, args.c_max)

    if name == "A_R":
        p = _exponent_field(args)
        q = load_exponent(args.q, "q", required=False)
        if q is not None and not isinstance(q, ExponentField):
            q = ExponentField.constant(p.grid, q)
        alpha = require_scalar(load_exponent(args.alpha, "alpha", kind="order"), "alpha")
        return conditions.rectangle_condition_ar(p, q, alpha, build_family(args.family, args.k, parse_box(args.base)))

    if name in ("lemma31", "rd_dyadic", "partition"):
        w = load_function(args.w, "w")
        if w.dim != 1:
            raise DimensionError(f"'{name}' takes a 1-D --w")
        if name == "rd_dyadic":
            if args.depth is None:
                raise UsageError("rd_dyadic needs --depth")
            tree = DyadicTree.zeros(length=w.grid.length, depth=args.depth, lo=w.grid.lo)
            return get_dyadic_service(args).rd_dyadic_check(w, tree)
        p = require_scalar(load_exponent(args.p, "p"), "p")
        if name == "lemma31":
            return conditions.lemma31_sufficiency(w, p, box)
        if args.kmax is None:
            raise UsageError("partition needs --kmax")
        return conditions.partition_sequence(w, p, args.kmax, args.kmin)

    v = load_function(args.v, "v")
    p = load_exponent(args.p, "p")
    q = load_exponent(args.q, "q")
    if name in ("A_M", "A_PS", "A_1"):
        w = load_function(args.w, "w", required=False)
        if w is None:
            w = GridFunction.constant(v.grid, 1.0)
        p, q = require_scalar(p, "p"), require_scalar(q, "q")
        if name == "A_M":
            return conditions.muckenhoupt_am(v, w, p, q, box)
        if name == "A_PS":
            return conditions.persson_stepanov_aps(v, w, p, q, box)
        return conditions.muckenhoupt_a1(v, w, p, q, box)

    if v.dim != 2:
        raise DimensionError(f"'{name}' takes a 2-D --v")
    grid = v.grid
    if name == "B":
        w1, w2 = axis_weight(args.w1, grid.x, "w1"), axis_weight(args.w2, grid.y, "w2")
        return conditions.condition_b(v, w1, w2, p, q, box, bounded=args.bounded)
    if name == "trace31":
        anchor = tuple(parse_floats(args.anchor, "--anchor")) if args.anchor else None
        return conditions.trace_condition_31(v, p, q, box, anchor)

    alpha = load_exponent(args.alpha, "alpha", kind="order")
    beta = load_exponent(args.beta, "beta", kind="order")
    family = build_family(args.family, args.k, parse_box(args.base))
    if name == "trace42":
        return conditions.trace_condition_42(v, require_scalar(p, "p"), q, alpha, beta, family)
    if name == "B5":
        return conditions.theorem_d_b5(v, require_scalar(p, "p"), require_scalar(q, "q"),
                                       require_scalar(alpha, "alpha"), require_scalar(beta, "beta"), family)
    if name in ("trace_pbar", "trace45"):
        if not isinstance(p, ExponentField):
            p = ExponentField.constant(grid, p)
        return conditions.trace_condition_variable(v, p, q, alpha, beta, family,
                                                   rule="pbar" if name == "trace_pbar" else "local")
    w1, w2 = axis_weight(args.w1, grid.x, "w1"), axis_weight(args.w2, grid.y, "w2")
    return conditions.two_weight_condition_43(v, w1, w2, p, q, alpha, beta, family)
