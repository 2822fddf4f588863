"""Deterministic block-parallel sweep helpers.

Sweeps partition their index range into fixed-size blocks.  Each block
is computed independently (numpy releases the GIL, so a thread pool
gives real concurrency) and results are merged in block order.  Because
the per-block computation and the merge order never depend on how many
workers ran them, a sweep returns bit-identical results for any worker
count — the property the reproducibility gate checks.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from typing import Callable, List, Sequence, Tuple

BLOCK_SIZE = 1 << 20


def block_ranges(lo: int, hi: int, block: int = BLOCK_SIZE) -> List[Tuple[int, int]]:
    """Half-open [a, b) blocks covering [lo, hi)."""
    if hi <= lo:
        return []
    return [(a, min(a + block, hi)) for a in range(lo, hi, block)]


def map_blocks(fn: Callable[[int, int], object],
               ranges: Sequence[Tuple[int, int]],
               workers: int = 1) -> list:
    """Apply fn(a, b) to every block; results in block order."""
    if workers <= 1 or len(ranges) <= 1:
        return [fn(a, b) for a, b in ranges]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda ab: fn(*ab), ranges))


def prefix_offsets(partials: Sequence[float]) -> Tuple[List[float], float]:
    """Running-sum offsets before each block, plus the grand total.

    Accumulation order is the block order, so the offsets are the same
    no matter which workers produced the partials.
    """
    offsets: List[float] = []
    running = 0.0
    for p in partials:
        offsets.append(running)
        running += p
    return offsets, running
