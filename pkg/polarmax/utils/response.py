"""
Consistent output helpers.
Envelope on stdout: { "success": true|false, "message": "...", "data": ... }
Files: JSON for single runs, CSV for sweeps; both carry version and config hash.
"""
import csv
import json
import sys
from pathlib import Path
from typing import Any, Iterable, Optional, Sequence

import numpy as np

from polarmax.config import Config


def to_jsonable(obj: Any) -> Any:
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if np.isfinite(v) else str(v)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    if hasattr(obj, "to_dict"):
        return to_jsonable(obj.to_dict())
    return obj


def dumps(body: Any) -> str:
    return json.dumps(to_jsonable(body), sort_keys=True, indent=2)


def api_success(data: Any = None, message: str = "", status: int = 0) -> int:
    """Print a success envelope; return the exit code."""
    body = {"success": True, "message": message or "Success"}
    if data is not None:
        body["data"] = data
    print(dumps(body), flush=True)
    return status


def api_error(message: str, status: int = 1, data: Optional[Any] = None) -> int:
    """One-line diagnostic on stderr; return the exit code."""
    line = " ".join(str(message or "Error").split())
    print(f"polarmax: error: {line}", file=sys.stderr, flush=True)
    if data is not None:
        print(dumps({"success": False, "message": line, "data": data}), flush=True)
    return status


def artifact(config: dict, config_hash: str, result: Any) -> dict:
    """Output document: tool version, config hash, the resolved config echo, the result."""
    return {"tool": "polarmax", "version": Config.VERSION, "config_hash": config_hash, "config": config, "result": result}


def _target(path: str) -> Path:
    """Relative output paths land under POLARMAX_OUTPUT_DIR."""
    p = Path(Config.OUTPUT_DIR or ".") / path
    p.parent.mkdir(parents=True, exist_ok=True)
    return p


def write_json(path: str, document: dict) -> str:
    p = _target(path)
    p.write_text(dumps(document) + "\n", encoding="utf-8")
    return str(p)


def write_csv(path: str, header: Sequence[str], rows: Iterable[Sequence[Any]], config_hash: str,
              config: Optional[dict] = None) -> str:
    """Comment lines first: version and hash, then the resolved config as one compact JSON object."""
    p = _target(path)
    with p.open("w", newline="", encoding="utf-8") as fh:
        fh.write(f"# polarmax {Config.VERSION} config_hash={config_hash}\n")
        if config is not None:
            fh.write(f"# config {json.dumps(to_jsonable(config), sort_keys=True, separators=(',', ':'))}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(list(header))
        for row in rows:
            w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in row])
    return str(p)
