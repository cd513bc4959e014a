"""chebyshev: continuous two-plate constant T_K(A, B) by a sampled matrix game."""
from polarmax.middleware.experiment import experiment
from polarmax.routes import emit, write_sweep
from polarmax.services import continuous_service
from polarmax.services.domain_service import parse_domain
from polarmax.services.kernel_service import parse_kernel
from polarmax.utils.validators import positive_int

FIELDS = ("kernel", "setA", "setB", "res", "resA", "resB", "iterations", "seed", "out", "measure_out", "config")


def register(subparsers, parents) -> None:
    p = subparsers.add_parser("chebyshev", parents=parents, help="continuous Chebyshev constant T_K(A, B)")
    p.add_argument("--kernel", default="riesz:1")
    p.add_argument("--setA", dest="setA", default="circle")
    p.add_argument("--setB", dest="setB", help="defaults to A")
    p.add_argument("--res", type=int, default=400, help="sample size for both plates")
    p.add_argument("--resA", dest="resA", type=int)
    p.add_argument("--resB", dest="resB", type=int)
    p.add_argument("--iterations", type=int, default=20000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.add_argument("--measure-out", dest="measure_out", help="CSV of the measure (support, weight)")
    p.set_defaults(handler=chebyshev)


@experiment("chebyshev", FIELDS)
def chebyshev(args) -> int:
    kernel = parse_kernel(args.kernel)
    A = parse_domain(args.setA)
    B = parse_domain(args.setB) if args.setB else A
    resA = positive_int(args.resA or args.res, "resA")
    resB = positive_int(args.resB or args.res, "resB")
    res = continuous_service.chebyshev_constant(kernel, A, B, resA, resB, positive_int(args.iterations, "iterations"),
                                                seed=int(args.seed))
    if args.measure_out:
        m = res.measure
        rows = [[*x, w] for x, w in zip(m.support.tolist(), m.weights.tolist())]
        write_sweep(args, args.measure_out, [f"x{i}" for i in range(B.p)] + ["weight"], rows)
    message = "converged" if res.converged else "iteration budget exhausted above gap tolerance"
    return emit(args, res.to_dict(), message, {"value": res.value, "duality_gap": res.duality_gap})
