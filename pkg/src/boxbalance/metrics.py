"""Rank loads and the balance efficiency (average load over max load)."""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Callable, Sequence

__all__ = [
    "LoadProfile",
    "EfficiencyReport",
    "compute_loads",
    "efficiency",
    "timed_report",
]


@dataclass(frozen=True)
class LoadProfile:
    loads: tuple[int, ...]
    max_load: int
    total_weight: int

    @property
    def rank_count(self) -> int:
        return len(self.loads)


@dataclass(frozen=True)
class EfficiencyReport:
    algorithm: str
    efficiency: float
    load_profile: LoadProfile
    wall_time: float


def compute_loads(assignment: Sequence[int], weights: Sequence[int], ranks: int) -> LoadProfile:
    """Sum box weights per owning rank.

    ``assignment`` may be a ``DistributionMap`` or any sequence of rank indices.
    """
    assignment = getattr(assignment, "assignment", assignment)
    if ranks < 1:
        raise ValueError(f"rank count must be >= 1, got {ranks}")
    if len(assignment) != len(weights):
        raise ValueError(
            f"distribution map has {len(assignment)} entries for {len(weights)} weights"
        )
    loads = [0] * ranks
    for j, (r, w) in enumerate(zip(assignment, weights)):
        r = int(r)
        if not 0 <= r < ranks:
            raise ValueError(f"box {j} assigned to rank {r}, outside [0, {ranks})")
        loads[r] += int(w)
    return LoadProfile(loads=tuple(loads), max_load=max(loads), total_weight=sum(loads))


def efficiency(profile: LoadProfile, ranks: int | None = None) -> float:
    ranks = profile.rank_count if ranks is None else ranks
    if profile.max_load <= 0:
        raise ValueError("efficiency undefined for a zero max load")
    return (profile.total_weight / ranks) / profile.max_load


def timed_report(
    algorithm: str,
    partition: Callable[[], Sequence[int]],
    weights: Sequence[int],
    ranks: int,
) -> EfficiencyReport:
    """Run ``partition`` once under a monotonic clock and score its map.

    Only the call itself is timed; load summation happens afterwards.
    """
    start = time.perf_counter()
    dmap = partition()
    elapsed = time.perf_counter() - start
    profile = compute_loads(dmap, weights, ranks)
    return EfficiencyReport(
        algorithm=algorithm,
        efficiency=efficiency(profile, ranks),
        load_profile=profile,
        wall_time=elapsed,
    )
