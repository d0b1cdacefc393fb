"""Deterministic chunked min-reduction over a thread pool."""

import logging
from collections.abc import Callable
from concurrent.futures import ThreadPoolExecutor
from typing import TypeVar

from conelab.utils.config import get_settings

logger = logging.getLogger(__name__)

T = TypeVar("T")

DEFAULT_CHUNK = 4096


def chunk_sizes(total: int, chunk_size: int = DEFAULT_CHUNK) -> list[int]:
    if total < 0 or chunk_size <= 0:
        raise ValueError(f"bad chunking: total={total}, chunk_size={chunk_size}")
    full, rest = divmod(total, chunk_size)
    return [chunk_size] * full + ([rest] if rest else [])


def min_reduce(
    work: Callable[[int, int], tuple[float, T]],
    total: int,
    chunk_size: int = DEFAULT_CHUNK,
    threads: int | None = None,
) -> tuple[float, T | None]:
    """Run ``work(chunk_index, count)`` over all chunks and keep the smallest key.

    Ties go to the lowest chunk index, so the result does not depend on the
    number of workers.
    """
    sizes = chunk_sizes(total, chunk_size)
    if not sizes:
        return float("inf"), None
    workers = min(threads or get_settings().threads, len(sizes))
    logger.debug(f"min_reduce: {total} items in {len(sizes)} chunks on {workers} threads")
    if workers == 1:
        results = [work(i, size) for i, size in enumerate(sizes)]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(work, range(len(sizes)), sizes))
    best = min(range(len(results)), key=lambda i: (results[i][0], i))
    return results[best]
