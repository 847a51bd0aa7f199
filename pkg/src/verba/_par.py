"""Deterministic block-parallel helpers.

Work is split into blocks in canonical order; results are always consumed in
block order so the worker count changes wall time only.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, Sequence, TypeVar

T = TypeVar("T")
R = TypeVar("R")


def blocks(total: int, size: int) -> list[tuple[int, int]]:
    return [(lo, min(lo + size, total)) for lo in range(0, total, size)]


def map_blocks(func: Callable[[T], R], items: Sequence[T], workers: int = 1) -> list[R]:
    if workers <= 1 or len(items) <= 1:
        return [func(it) for it in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, items))


def first_hit(func: Callable[[T], R | None], items: Iterable[T], workers: int = 1) -> R | None:
    """Result of the earliest block (in order) returning non-None.

    Blocks are processed in waves of ``workers``; a hit in a wave stops the scan
    after the wave, and the earliest block of that wave wins.
    """
    items = list(items)
    step = max(1, workers)
    with ThreadPoolExecutor(max_workers=step) as pool:
        for lo in range(0, len(items), step):
            wave = items[lo:lo + step]
            results = list(pool.map(func, wave)) if step > 1 else [func(wave[0])]
            for r in results:
                if r is not None:
                    return r
    return None
