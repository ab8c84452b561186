"""Order-preserving parallel map controlled by the THREADS environment variable."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, List, Optional, TypeVar

from .logging_utils import get_logger

__all__ = ["worker_count", "parallel_map"]

_LOGGER = get_logger("Parallel")

T = TypeVar("T")
R = TypeVar("R")


def worker_count(default: int = 1) -> int:
    """Return the worker count from ``THREADS``, falling back to *default*."""

    raw = os.environ.get("THREADS")
    if raw is None or not raw.strip():
        return default
    try:
        value = int(raw)
    except ValueError:
        _LOGGER.warning("Ignoring non-integer THREADS=%r", raw)
        return default
    return max(1, value)


def parallel_map(func: Callable[[T], R], items: Iterable[T], *, workers: Optional[int] = None) -> List[R]:
    """Apply *func* to *items*; results come back in input order."""

    materialised = list(items)
    count = worker_count() if workers is None else max(1, int(workers))
    if count == 1 or len(materialised) < 2:
        return [func(item) for item in materialised]
    with ThreadPoolExecutor(max_workers=count) as pool:
        return list(pool.map(func, materialised))
