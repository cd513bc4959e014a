"""Subcommand registration shared helpers."""
from typing import Any, Optional

from polarmax.config import Config
from polarmax.models.options import MODES, UNCONSTRAINED, SolveOptions
from polarmax.utils.response import api_success, artifact, write_csv, write_json
from polarmax.utils.validators import positive_int

SOLVER_FIELDS = ("restarts", "iterations", "resolution", "seed")


def add_solver_flags(parser, restarts: int = 8) -> None:
    parser.add_argument("--restarts", type=int, default=restarts)
    parser.add_argument("--iterations", type=int, default=40, help="ascent steps per annealing stage")
    parser.add_argument("--resolution", type=int, default=Config.DEFAULT_RESOLUTION, help="inner sample size")
    parser.add_argument("--seed", type=int, default=Config.DEFAULT_SEED)


def add_mode_flag(parser, choices=MODES) -> None:
    parser.add_argument("--mode", choices=choices, default=UNCONSTRAINED)


def solve_options(args, plate=None) -> SolveOptions:
    return SolveOptions(
        restarts=positive_int(args.restarts, "restarts"),
        iterations=positive_int(args.iterations, "iterations"),
        resolution=positive_int(args.resolution, "resolution"),
        seed=int(args.seed),
        mode=getattr(args, "mode", UNCONSTRAINED) or UNCONSTRAINED,
        plate=plate,
    )


def emit(args, result: Any, message: str, summary: Optional[dict] = None) -> int:
    """Write the JSON artifact when --out is set and print the envelope."""
    exp = args.experiment
    document = artifact(exp.to_dict(), exp.config_hash, result)
    out = getattr(args, "out", None)
    if out:
        path = write_json(out, document)
        return api_success({"out": path, "config_hash": exp.config_hash, **(summary or {})}, message=message)
    return api_success(document, message=message)


def emit_csv(args, path: str, message: str, summary: Optional[dict] = None) -> int:
    """Envelope for sweeps whose data went to a CSV file."""
    return api_success({"out": path, "config_hash": args.experiment.config_hash, **(summary or {})}, message=message)


def write_sweep(args, path: str, header, rows) -> str:
    """CSV with the version, the config hash and the resolved config in its comment header."""
    exp = args.experiment
    return write_csv(path, header, rows, exp.config_hash, exp.to_dict())
