"""
Thread-pool helper for restarts and N-sweeps.
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, List, Optional, TypeVar

from polarmax.config import Config

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


def worker_count(threads: Optional[int] = None, jobs: int = 1) -> int:
    """Threads to use: explicit value, else POLARMAX_THREADS; never more than jobs."""
    n = threads if threads is not None else Config.threads()
    return max(1, min(int(n), max(1, jobs)))


def parallel_map(fn: Callable[[T], R], items: Iterable[T], threads: Optional[int] = None) -> List[R]:
    """Map fn over items, results in input order. One thread runs inline.

    Each call gets its own executor, so nested calls (sweep -> restarts) cannot starve.
    """
    work = list(items)
    n = worker_count(threads, len(work))
    if n == 1:
        return [fn(item) for item in work]
    logger.debug("parallel_map: %d jobs on %d threads", len(work), n)
    with ThreadPoolExecutor(max_workers=n) as ex:
        return list(ex.map(fn, work))
