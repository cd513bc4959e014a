"""verify: constructive checks (replacement points, non-concentration census, perturbation gain)."""
import json

import numpy as np

from polarmax.middleware.experiment import experiment
from polarmax.models.domain import Domain
from polarmax.models.kernel import KernelSpec
from polarmax.models.results import Configuration
from polarmax.routes import emit, emit_csv, write_sweep
from polarmax.services import procedures_service
from polarmax.services.domain_service import load_cloud, parse_domain, sample_set
from polarmax.services.errors import ValidationError
from polarmax.utils.validators import parse_float_list, positive_int, required_keys

REPLACEMENT_FIELDS = ("cloud", "set", "resolution", "x", "config")
CENSUS_FIELDS = ("from_file", "set", "eps", "config")
PERTURBATION_FIELDS = ("p", "s", "c2", "at", "resolution", "out", "config")

DEFAULT_C2 = "0.01,0.02,0.05,0.1,0.2,0.3,0.4,0.5"


def register(subparsers, parents) -> None:
    p = subparsers.add_parser("verify", help="constructive checks")
    checks = p.add_subparsers(dest="check", metavar="CHECK")
    checks.required = True

    r = checks.add_parser("replacement", parents=parents, help="pi/6 replacement points for an external x")
    r.add_argument("--cloud", help="CSV point cloud A")
    r.add_argument("--set", dest="set", help="sample a set instead of a cloud")
    r.add_argument("--resolution", type=int, default=512)
    r.add_argument("--x", help="comma-separated coordinates of x")
    r.set_defaults(handler=replacement)

    c = checks.add_parser("census", parents=parents, help="count solver points farther than eps from A")
    c.add_argument("--from", dest="from_file", help="JSON artifact written by solve --out")
    c.add_argument("--set", dest="set", help="defaults to the set recorded in the artifact")
    c.add_argument("--eps", type=float, default=0.2)
    c.set_defaults(handler=census)

    g = checks.add_parser("perturbation", parents=parents, help="gain from splitting p+1 coincident points into a simplex")
    g.add_argument("--p", type=int, default=2)
    g.add_argument("--s", type=float, default=2.0)
    g.add_argument("--c2", default=DEFAULT_C2, help="comma-separated scale factors")
    g.add_argument("--at", type=float, default=0.5, help="cluster position along the first axis")
    g.add_argument("--resolution", type=int, default=2048)
    g.add_argument("--out", help="CSV path: c2, gain")
    g.set_defaults(handler=perturbation)


def _sample(args) -> np.ndarray:
    if args.cloud:
        return load_cloud(args.cloud).cloud_array
    if args.set:
        return sample_set(parse_domain(args.set), positive_int(args.resolution, "resolution"))
    raise ValidationError("Missing required fields: --cloud or --set")


@experiment("verify replacement", REPLACEMENT_FIELDS)
def replacement(args) -> int:
    err = required_keys(vars(args), ["x"])
    if err:
        raise ValidationError(err)
    res = procedures_service.replacement_points(_sample(args), parse_float_list(args.x, "x"))
    message = "dominance holds" if res.dominance_violations == 0 else "dominance violated"
    return emit(args, res.to_dict(), message)


def _load_artifact(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as e:
        raise ValidationError(f"cannot read {path}: {e.strerror or e}")
    except json.JSONDecodeError as e:
        raise ValidationError(f"{path} is not valid JSON: {e.msg}")
    if not isinstance(doc, dict) or "configuration" not in doc.get("result", {}):
        raise ValidationError(f"{path} is not a solve artifact")
    return doc


@experiment("verify census", CENSUS_FIELDS)
def census(args) -> int:
    err = required_keys(vars(args), ["from_file"])
    if err:
        raise ValidationError(err)
    doc = _load_artifact(args.from_file)
    A = parse_domain(args.set or doc.get("config", {}).get("set", "circle"))
    config = Configuration(np.asarray(doc["result"]["configuration"], dtype=float))
    count = procedures_service.non_concentration_census(config, A, float(args.eps))
    return emit(args, {"count": count, "N": config.N, "eps": float(args.eps), "set": A.label()}, "census taken")


@experiment("verify perturbation", PERTURBATION_FIELDS)
def perturbation(args) -> int:
    p = positive_int(args.p, "p")
    s = float(args.s)
    A = Domain.sphere(p)
    at = np.zeros(p)
    at[0] = float(args.at)
    cluster = np.tile(at, (p + 1, 1))
    scan = procedures_service.perturbation_gain_scan(cluster, None, KernelSpec.riesz(s), A,
                                                     parse_float_list(args.c2, "c2"),
                                                     positive_int(args.resolution, "resolution"))
    summary = {"positive_interval": scan.positive_interval}
    if args.out:
        path = write_sweep(args, args.out, ["c2", "gain"], scan.rows())
        return emit_csv(args, path, "gain scan finished", summary)
    return emit(args, {"c2": scan.c2_values, "gains": scan.gains, **summary}, "gain scan finished")
