from vexleb.core.dependencies import get_norm_service, load_exponent, load_function, parse_box
from vexleb.core.errors import DomainError
from vexleb.schemas.reports import NormResult

INPUTS = ("input", "weight", "p")


def register(subparsers):
    parser = subparsers.add_parser("norm", help="Luxemburg (or weighted) norm of a grid-function file")
    parser.add_argument("--input", required=True, help="grid-function file")
    parser.add_argument("--p", required=True, help="exponent: a number or an exponent-field file")
    parser.add_argument("--weight", help="optional weight file; the norm of f * w is returned")
    parser.add_argument("--region", help="x0,x1 or x0,x1,y0,y1 (default: whole grid)")
    parser.set_defaults(handler=handle, inputs=INPUTS)


def handle(args) -> NormResult:
    norms = get_norm_service(args)
    f = load_function(args.input, "input")
    p = load_exponent(args.p, "p")
    region = parse_box(args.region)
    if region is not None and f.dim == 2 and len(args.region.split(",")) != 4:
        raise DomainError("A 2-D input needs a four-number --region")
    w = load_function(args.weight, "weight", required=False)
    if w is not None:
        return norms.weighted_norm(f, w, p, region)
    return norms.luxemburg_norm(f, p, region)
