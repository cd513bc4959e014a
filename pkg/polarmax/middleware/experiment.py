"""
Experiment wrapper for subcommand handlers.
- merges --config JSON over the flags (unknown keys rejected)
- resolves and hashes the config (args.experiment)
- maps failures to exit codes: validation -> 1, solver failure -> 2
"""
import hashlib
import json
import logging
import traceback
from functools import wraps
from typing import Iterable

from polarmax.config import Config
from polarmax.models.options import ExperimentConfig
from polarmax.services.errors import SolverFailure, ValidationError
from polarmax.utils.response import api_error, to_jsonable

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_SOLVER = 2


def _load_config(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as e:
        raise ValidationError(f"cannot read config {path}: {e.strerror or e}")
    except json.JSONDecodeError as e:
        raise ValidationError(f"config {path} is not valid JSON: {e.msg} (line {e.lineno})")
    if not isinstance(data, dict):
        raise ValidationError(f"config {path} must be a JSON object")
    return data


def merge_config(args, fields: Iterable[str]) -> None:
    """Overlay --config values onto args; keys may use dashes or underscores."""
    path = getattr(args, "config", None)
    if not path:
        return
    allowed = set(fields)
    data = _load_config(path)
    unknown = sorted(k for k in data if k.replace("-", "_") not in allowed)
    if unknown:
        raise ValidationError(f"unknown config fields: {', '.join(unknown)}")
    for key, value in data.items():
        setattr(args, key.replace("-", "_"), value)


def config_hash(resolved: ExperimentConfig) -> str:
    blob = json.dumps(to_jsonable(resolved.to_dict()), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()


def experiment(subcommand: str, fields: Iterable[str]):
    """Decorator: handler(args) -> exit code, with args.experiment set to the resolved config."""
    fields = tuple(fields)

    def decorate(handler):
        @wraps(handler)
        def wrapped(args) -> int:
            try:
                merge_config(args, fields)
                values = {k: getattr(args, k, None) for k in fields if k != "config" and not k.endswith("out")}
                resolved = ExperimentConfig(subcommand=subcommand, values=values)
                resolved.config_hash = config_hash(resolved)
                args.experiment = resolved
                return handler(args)
            except SolverFailure as e:
                logger.error("%s: solver failure: %s", subcommand, e)
                return api_error(f"solver failure: {e}", EXIT_SOLVER)
            except (ValidationError, ValueError, OSError) as e:
                if Config.DEBUG:
                    logger.error(traceback.format_exc())
                return api_error(str(e), EXIT_INVALID)

        return wrapped

    return decorate
