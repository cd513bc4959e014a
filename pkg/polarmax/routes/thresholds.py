"""thresholds: r_bar, R^-1 and R for the concentric-circle problem on S^1."""
from polarmax.middleware.experiment import experiment
from polarmax.routes import emit, emit_csv, write_sweep
from polarmax.services import solver_service
from polarmax.services.errors import ValidationError
from polarmax.utils.validators import parse_range

FIELDS = ("s", "n_range", "out", "config")


def register(subparsers, parents) -> None:
    p = subparsers.add_parser("thresholds", parents=parents, help="table of r_bar_{N,s}, R_{N,s}^-1, R_{N,s}")
    p.add_argument("--s", type=float, default=1.0)
    p.add_argument("--n-range", dest="n_range", default="3:100", help="lo:hi inclusive")
    p.add_argument("--out", help="CSV path: N, r_bar, R_inv, R")
    p.set_defaults(handler=thresholds)


@experiment("thresholds", FIELDS)
def thresholds(args) -> int:
    s = float(args.s)
    if s <= 0:
        raise ValidationError("s must be positive")
    Ns = parse_range(args.n_range)
    if Ns[0] < 2:
        raise ValidationError("n-range must start at N >= 2")
    rows, N0 = solver_service.threshold_table(s, Ns)
    if args.out:
        path = write_sweep(args, args.out, ["N", "r_bar", "R_inv", "R"], rows)
        return emit_csv(args, path, "thresholds tabulated", {"N0": N0})
    return emit(args, {"rows": rows, "N0": N0}, "thresholds tabulated")
