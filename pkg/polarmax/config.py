"""
Runtime configuration loaded from environment variables.
"""
import os
from pathlib import Path
from dotenv import load_dotenv

# Load .env from the repo root so it works regardless of cwd
_repo_root = Path(__file__).resolve().parent.parent
load_dotenv(_repo_root / ".env")


def _str(key: str, default: str = "") -> str:
    return os.environ.get(key, default).strip()


def _bool(key: str, default: bool = False) -> bool:
    return os.environ.get(key, str(default)).lower() in ("true", "1", "yes")


def _int(key: str, default: int = 0) -> int:
    try:
        return int(os.environ.get(key, default))
    except (TypeError, ValueError):
        return default


class Config:
    """CLI and solver configuration."""

    VERSION = "1.0.0"
    DEBUG = _bool("POLARMAX_DEBUG", False)
    LOG_LEVEL = _str("POLARMAX_LOG_LEVEL", "WARNING").upper() or "WARNING"

    # Parallelism cap for restarts and N-sweeps
    THREADS = _int("POLARMAX_THREADS", os.cpu_count() or 1)

    # Solver defaults (flags override)
    DEFAULT_RESOLUTION = _int("POLARMAX_RESOLUTION", 512)
    DEFAULT_SEED = _int("POLARMAX_SEED", 0)
    OUTPUT_DIR = _str("POLARMAX_OUTPUT_DIR", ".")

    @classmethod
    def threads(cls) -> int:
        # re-read so tests and callers can change the env after import
        return max(1, _int("POLARMAX_THREADS", cls.THREADS))
