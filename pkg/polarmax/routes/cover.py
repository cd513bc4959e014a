"""cover: best N-point covering radius, with closed forms on S^1."""
from polarmax.middleware.experiment import experiment
from polarmax.models.options import CONSTRAINED, UNCONSTRAINED
from polarmax.routes import SOLVER_FIELDS, add_mode_flag, add_solver_flags, emit, solve_options
from polarmax.services import covering_service
from polarmax.services.domain_service import parse_domain
from polarmax.services.errors import ValidationError
from polarmax.utils.validators import positive_int, required_keys

FIELDS = ("set", "n", "mode", "cross_check", *SOLVER_FIELDS, "out", "config")


def register(subparsers, parents) -> None:
    p = subparsers.add_parser("cover", parents=parents, help="minimize the N-point covering radius of A")
    p.add_argument("--set", dest="set", default="circle")
    p.add_argument("--n", type=int)
    add_mode_flag(p, (UNCONSTRAINED, CONSTRAINED))
    p.add_argument("--cross-check", dest="cross_check", action="store_true",
                   help="also solve Riesz s=64 polarization and report its covering radius")
    add_solver_flags(p, restarts=4)
    p.add_argument("--out")
    p.set_defaults(handler=cover)


@experiment("cover", FIELDS)
def cover(args) -> int:
    err = required_keys(vars(args), ["n"])
    if err:
        raise ValidationError(err)
    N = positive_int(args.n, "n")
    A = parse_domain(args.set)
    opts = solve_options(args)
    report = covering_service.minimize_covering(A, N, opts)
    result = report.to_dict()
    if A.is_circle and A.radius == 1.0 and not any(A.center):
        closed = (covering_service.circle_unconstrained_cover(N) if opts.mode == UNCONSTRAINED
                  else covering_service.circle_constrained_cover(N))
        result["closed_form_eta"] = closed.eta
    if args.cross_check:
        result["cross_check"] = covering_service.covering_via_polarization(A, N, opts).to_dict()
    return emit(args, result, "covered", {"eta": report.eta})
