"""solve: maximize the min-potential over N-point configurations."""
import numpy as np

from polarmax.middleware.experiment import experiment
from polarmax.models.domain import SPHERE
from polarmax.routes import SOLVER_FIELDS, add_mode_flag, add_solver_flags, emit, solve_options, write_sweep
from polarmax.services import polarization_service, solver_service
from polarmax.services.domain_service import parse_domain
from polarmax.services.errors import ValidationError
from polarmax.services.kernel_service import parse_kernel
from polarmax.utils.validators import positive_int, required_keys

FIELDS = ("kernel", "set", "n", "mode", "plate", *SOLVER_FIELDS, "out", "profile_out", "config")


def register(subparsers, parents) -> None:
    p = subparsers.add_parser("solve", parents=parents, help="maximize min over A of the N-point potential")
    p.add_argument("--kernel", default="riesz:2", help="riesz:s | log | innerpower:k | ring:R:s | geodesic-riesz:s")
    p.add_argument("--set", dest="set", default="circle", help="A: circle[:r] | sphere:p | ball:p | cube:p | interval:a:b | cloud:file.csv")
    p.add_argument("--n", type=int)
    add_mode_flag(p)
    p.add_argument("--plate", help="B for two-plate mode (same syntax as --set)")
    add_solver_flags(p)
    p.add_argument("--out", help="JSON artifact path")
    p.add_argument("--profile-out", dest="profile_out", help="CSV of (y, potential) for the best configuration")
    p.set_defaults(handler=solve)


@experiment("solve", FIELDS)
def solve(args) -> int:
    err = required_keys(vars(args), ["n"])
    if err:
        raise ValidationError(err)
    N = positive_int(args.n, "n")
    kernel = parse_kernel(args.kernel)
    A = parse_domain(args.set)
    plate = parse_domain(args.plate) if args.plate else None
    opts = solve_options(args, plate)
    config, report = solver_service.maximize_polarization(kernel, A, N, opts)
    result = {"configuration": config.to_list(), **report.to_dict(), "options": opts.to_dict()}
    if A.is_circle:
        canon = solver_service.canonicalize_circle(config, A.center_array)
        result["canonical"] = canon.to_list()
        result["radii"] = [float(v) for v in np.linalg.norm(config.points - A.center_array, axis=1)]
        result["angular_gaps"] = [float(v) for v in solver_service.angular_gaps(config, A.center_array)]
    if A.shape == SPHERE:
        result["stay_away"] = solver_service.stay_away_check(config, A)
    result["min_separation"] = solver_service.min_separation(config)
    if args.profile_out:
        Y, F = polarization_service.potential_profile(kernel, A, config, report.resolution)
        rows = [[*y, f] for y, f in zip(Y.tolist(), F.tolist())]
        header = [f"y{i}" for i in range(A.p)] + ["potential"]
        write_sweep(args, args.profile_out, header, rows)
    return emit(args, result, "solved", {"value": report.value})
