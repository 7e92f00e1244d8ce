"""Order-preserving thread map for independent numeric tasks."""

from __future__ import annotations

import logging
import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, List, Optional, TypeVar, Union

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


def resolve_threads(threads: Union[int, str, None]) -> int:
    """``"auto"``/None -> CPU count, otherwise a positive int."""
    if threads in (None, "auto"):
        return os.cpu_count() or 1
    count = int(threads)
    if count < 1:
        raise ValueError(f"thread count must be positive, got {threads}")
    return count


def ordered_map(fn: Callable[[T], R], items: Iterable[T], threads: Optional[int] = 1) -> List[R]:
    """Apply ``fn`` to every item; results keep the input order."""
    items = list(items)
    workers = min(resolve_threads(threads), max(1, len(items)))
    if workers == 1:
        return [fn(item) for item in items]
    logger.debug("mapping %d task(s) over %d thread(s)", len(items), workers)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
