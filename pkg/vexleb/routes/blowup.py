from vexleb.core.dependencies import get_experiment_service, parse_floats
from vexleb.schemas.reports import BlowupSeries
from vexleb.services.experiments import BLOWUP_GEOMETRY, BLOWUP_TAUS


def register(subparsers):
    parser = subparsers.add_parser("blowup", help="A_tau series for a two-valued step exponent")
    parser.add_argument("--p1", type=float, required=True, help="exponent on the lower strip")
    parser.add_argument("--p2", type=float, required=True, help="exponent on the upper strip")
    parser.add_argument("--alpha", type=float, default=0.0)
    parser.add_argument("--n", type=int, default=4096, help="cells per axis")
    parser.add_argument("--taus", help="comma-separated tau values (default 2^-2 .. 2^-9)")
    parser.add_argument("--x0", type=float, default=1.0)
    parser.add_argument("--height", type=float, help="y side of the domain (default 2^-12)")
    parser.add_argument("--tolerance", type=float, default=0.03, help="allowed slope deviation")
    parser.set_defaults(handler=handle, inputs=())


def handle(args) -> BlowupSeries:
    taus = parse_floats(args.taus, "--taus") if args.taus else BLOWUP_TAUS
    geometry = {"x0": args.x0}
    if args.height is not None:
        x_lo, x_hi, y_lo, _ = BLOWUP_GEOMETRY["domain"]
        geometry["domain"] = [x_lo, x_hi, y_lo, y_lo + args.height]
    return get_experiment_service(args).blowup_series(args.p1, args.p2, args.alpha, geometry=geometry,
                                                      taus=taus, n=args.n, tolerance=args.tolerance)
