"""Exhaustive base-P enumeration of distribution maps.

Counter ``k`` encodes a map: digit ``j`` of ``k`` in base ``P`` (least
significant digit = box 0) is the rank of box ``j``. Complementing every
digit (d -> P-1-d) relabels ranks without changing the load multiset, so with
symmetry enabled only the first ``P**N // 2 + 1`` counters are visited.

The sweep is split into contiguous counter chunks, each reduced on its own
thread to (best max load, smallest counter), then merged lexicographically,
so the answer does not depend on the thread count.
"""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from numba import njit

from .balancers import DistributionMap

__all__ = [
    "BruteForceResult",
    "MAX_COUNTER",
    "combination_limit",
    "decode_counter",
    "sweep",
    "brute_force_solve",
]

MAX_COUNTER = 2**62
_NO_LOAD = np.iinfo(np.int64).max


@dataclass(frozen=True)
class BruteForceResult:
    best_map: DistributionMap
    best_max_load: int
    combinations_checked: int
    best_counter: int
    wall_time: float = 0.0


@njit(nogil=True, cache=True)
def _sweep_chunk(weights, ranks, start, stop, nonempty):
    n = weights.shape[0]
    digits = np.zeros(n, np.int64)
    loads = np.zeros(ranks, np.int64)
    counts = np.zeros(ranks, np.int64)
    k = start
    for j in range(n):
        d = k % ranks
        k //= ranks
        digits[j] = d
        loads[d] += weights[j]
        counts[d] += 1

    best = np.iinfo(np.int64).max
    best_k = -1
    for k in range(start, stop):
        peak = loads[0]
        for r in range(1, ranks):
            if loads[r] > peak:
                peak = loads[r]
        if peak < best:
            ok = True
            if nonempty:
                for r in range(ranks):
                    if counts[r] == 0:
                        ok = False
                        break
            if ok:
                best = peak
                best_k = k
        # base-P increment, moving only the boxes whose digit changes
        j = 0
        while j < n:
            d = digits[j]
            w = weights[j]
            loads[d] -= w
            counts[d] -= 1
            if d + 1 < ranks:
                digits[j] = d + 1
                loads[d + 1] += w
                counts[d + 1] += 1
                break
            digits[j] = 0
            loads[0] += w
            counts[0] += 1
            j += 1
    return best, best_k


def _total_assignments(n: int, ranks: int) -> int:
    total = ranks**n
    if total > MAX_COUNTER:
        raise OverflowError(
            f"{ranks}**{n} assignments overflow the 2**62 counter; shrink the instance"
        )
    return total


def combination_limit(n: int, ranks: int, use_symmetry: bool = True) -> int:
    """Number of counters visited: ``P**N // 2 + 1`` with symmetry, else ``P**N``."""
    total = _total_assignments(n, ranks)
    if not use_symmetry:
        return total
    return min(total, total // 2 + 1)


def decode_counter(k: int, n: int, ranks: int) -> list[int]:
    digits = []
    for _ in range(n):
        k, d = divmod(k, ranks)
        digits.append(d)
    return digits


def _as_array(weights) -> np.ndarray:
    arr = np.ascontiguousarray(np.asarray(weights, dtype=np.int64))
    if arr.ndim != 1 or arr.size == 0:
        raise ValueError("weights must be a nonempty 1-D sequence")
    return arr


def sweep(
    weights: Sequence[int],
    ranks: int,
    start: int,
    stop: int,
    threads: int = 1,
    nonempty: bool = False,
) -> tuple[int, int]:
    """Scan counters ``[start, stop)`` and return (best max load, its counter).

    The counter is -1 if no visited map qualified (only possible with
    ``nonempty``).
    """
    arr = _as_array(weights)
    if threads < 1:
        raise ValueError(f"threads must be >= 1, got {threads}")
    if ranks < 1:
        raise ValueError(f"ranks must be >= 1, got {ranks}")
    span = stop - start
    if span <= 0:
        return int(_NO_LOAD), -1
    workers = min(threads, span)
    bounds = [start + span * i // workers for i in range(workers + 1)]
    chunks = list(zip(bounds[:-1], bounds[1:]))
    if workers == 1:
        results = [_sweep_chunk(arr, ranks, start, stop, nonempty)]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = [
                pool.submit(_sweep_chunk, arr, ranks, lo, hi, nonempty) for lo, hi in chunks
            ]
            results = [f.result() for f in futures]
    found = [(int(b), int(k)) for b, k in results if k >= 0]
    if not found:
        return int(_NO_LOAD), -1
    return min(found)


def brute_force_solve(
    weights: Sequence[int],
    ranks: int,
    threads: int = 1,
    use_symmetry: bool = True,
    nonempty: bool = False,
) -> BruteForceResult:
    """Globally optimal map minimizing the maximum rank load.

    Empty ranks are allowed unless ``nonempty`` is set. Ties resolve to the
    smallest counter value.
    """
    arr = _as_array(weights)
    n = arr.size
    limit = combination_limit(n, ranks, use_symmetry)
    _sweep_chunk(arr[:1], 1, 0, 1, nonempty)  # keep JIT dispatch out of wall_time
    t0 = time.perf_counter()
    best, best_k = sweep(arr, ranks, 0, limit, threads=threads, nonempty=nonempty)
    elapsed = time.perf_counter() - t0
    if best_k < 0:
        raise ValueError(f"no map of {n} boxes onto {ranks} ranks leaves every rank nonempty")
    dmap = DistributionMap(tuple(decode_counter(best_k, n, ranks)), ranks)
    return BruteForceResult(
        best_map=dmap,
        best_max_load=best,
        combinations_checked=limit,
        best_counter=best_k,
        wall_time=elapsed,
    )
