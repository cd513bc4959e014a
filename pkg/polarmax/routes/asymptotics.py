"""asymptotics: ratio runs P*/tau_{s,d}(N) over a list of N."""
from polarmax.middleware.experiment import experiment
from polarmax.models.kernel import KernelSpec
from polarmax.models.options import CONSTRAINED, UNCONSTRAINED
from polarmax.routes import (
    SOLVER_FIELDS,
    add_mode_flag,
    add_solver_flags,
    emit,
    emit_csv,
    solve_options,
    write_sweep,
)
from polarmax.services import asymptotics_service
from polarmax.services.domain_service import intrinsic_dimension, parse_domain
from polarmax.services.errors import SolverFailure
from polarmax.utils.validators import parse_int_list

FIELDS = ("set", "s", "d", "ns", "mode", *SOLVER_FIELDS, "out", "config")


def register(subparsers, parents) -> None:
    p = subparsers.add_parser("asymptotics", parents=parents, help="ratio run P*(A, N) / tau_{s,d}(N)")
    p.add_argument("--set", dest="set", default="circle")
    p.add_argument("--s", type=float, default=2.0)
    p.add_argument("--d", type=float, help="defaults to the dimension of A")
    p.add_argument("--ns", default="16,32,64,128", help="comma-separated, strictly increasing")
    add_mode_flag(p, (UNCONSTRAINED, CONSTRAINED))
    add_solver_flags(p, restarts=4)
    p.add_argument("--out", help="CSV path: N, value, tau, ratio")
    p.set_defaults(handler=asymptotics)


@experiment("asymptotics", FIELDS)
def asymptotics(args) -> int:
    A = parse_domain(args.set)
    d = float(args.d) if args.d is not None else float(intrinsic_dimension(A))
    Ns = parse_int_list(args.ns, "ns")
    run = asymptotics_service.h_star_ratio_run(KernelSpec.riesz(float(args.s)), A, d, Ns, solve_options(args))
    if args.out:
        # partial rows are still written when a later N failed
        path = write_sweep(args, args.out, ["N", "value", "tau", "ratio"], run.rows())
    if run.error:
        raise SolverFailure(run.error)
    if args.out:
        summary = {"fit": {"slope": run.slope, "intercept": run.intercept}, "reference": run.reference}
        return emit_csv(args, path, "ratio run finished", summary)
    return emit(args, run.to_dict(), "ratio run finished")
