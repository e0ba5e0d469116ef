"""Approximate box-to-rank partitioners.

Four families share one problem type:

* knapsack: heaviest box to the lightest rank, then pairwise refinement
  between the heaviest and lightest ranks;
* sfc: walk boxes in space-filling-curve order and cut where the cumulative
  weight fraction would pass the cumulative rank fraction;
* painters: optimal contiguous cut of the curve order, found by binary
  search on the largest allowed segment sum;
* combined: one of the two curve splits across nodes, then knapsack across
  the ranks inside each node.

Every partitioner gives each rank at least one box and works in exact
integer arithmetic.
"""

from __future__ import annotations

import heapq
from bisect import bisect_right
from dataclasses import dataclass
from itertools import accumulate
from typing import Callable, Sequence

import numpy as np

__all__ = [
    "PartitionProblem",
    "DistributionMap",
    "Topology",
    "ALGORITHMS",
    "SFC_VARIANTS",
    "knapsack_partition",
    "knapsack_refine",
    "sfc_percentage_partition",
    "is_partition_possible",
    "painters_search",
    "painters_partition",
    "combined_partition",
    "run_algorithm",
]

SFC_VARIANTS = ("percentage", "painters")


def _as_int_tuple(values) -> tuple[int, ...]:
    if isinstance(values, np.ndarray):
        return tuple(values.tolist())
    return tuple(int(v) for v in values)


@dataclass(frozen=True)
class PartitionProblem:
    weights: tuple[int, ...]
    rank_count: int
    sfc_order: tuple[int, ...] | None = None

    def __init__(self, weights, rank_count: int, sfc_order=None):
        weights = _as_int_tuple(weights)
        if not weights:
            raise ValueError("a partition problem needs at least one box")
        if rank_count < 1:
            raise ValueError(f"rank_count must be >= 1, got {rank_count}")
        if min(weights) < 1:
            raise ValueError("box weights must be positive integers")
        if sfc_order is not None:
            sfc_order = _as_int_tuple(sfc_order)
            if sorted(sfc_order) != list(range(len(weights))):
                raise ValueError("sfc_order must be a permutation of the box indices")
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "rank_count", int(rank_count))
        object.__setattr__(self, "sfc_order", sfc_order)

    @property
    def box_count(self) -> int:
        return len(self.weights)

    def ordered_weights(self) -> list[int]:
        if self.sfc_order is None:
            raise ValueError("this algorithm needs an sfc_order")
        w = self.weights
        return [w[j] for j in self.sfc_order]


@dataclass(frozen=True)
class DistributionMap:
    """Owning rank of every box: ``assignment[j]`` is the rank of box ``j``."""

    assignment: tuple[int, ...]
    rank_count: int

    def __post_init__(self):
        for j, r in enumerate(self.assignment):
            if not 0 <= r < self.rank_count:
                raise ValueError(f"box {j} mapped to rank {r}, outside [0, {self.rank_count})")

    def __len__(self) -> int:
        return len(self.assignment)

    def __getitem__(self, j):
        return self.assignment[j]

    def __iter__(self):
        return iter(self.assignment)

    def boxes_per_rank(self) -> list[int]:
        counts = [0] * self.rank_count
        for r in self.assignment:
            counts[r] += 1
        return counts


@dataclass(frozen=True)
class Topology:
    node_count: int
    ranks_per_node: int

    def __post_init__(self):
        if self.node_count < 1 or self.ranks_per_node < 1:
            raise ValueError(f"invalid topology {self.node_count}x{self.ranks_per_node}")

    @property
    def total_ranks(self) -> int:
        return self.node_count * self.ranks_per_node


def _require_enough_boxes(n: int, p: int) -> None:
    if n < p:
        raise ValueError(f"{n} boxes cannot populate {p} ranks")


# --- knapsack ---------------------------------------------------------------


def _knapsack(weights: Sequence[int], ranks: int, refine: bool = True) -> list[int]:
    n = len(weights)
    _require_enough_boxes(n, ranks)
    order = sorted(range(n), key=lambda j: (-weights[j], j))
    heap = [(0, r) for r in range(ranks)]
    assignment = [0] * n
    for j in order:
        load, r = heap[0]
        assignment[j] = r
        heapq.heapreplace(heap, (load + weights[j], r))
    if refine and ranks > 1:
        knapsack_refine(weights, ranks, assignment)
    return assignment


def knapsack_refine(weights: Sequence[int], ranks: int, assignment: list[int]) -> list[int]:
    """Move single boxes from the heaviest to the lightest rank while that helps.

    Works in place on ``assignment`` and returns it. A move is taken only if
    max(heaviest, lightest) afterwards is strictly below the old maximum.
    """
    # Each accepted move strictly lowers the sum of squared loads, so this ends.
    loads = np.zeros(ranks, dtype=np.int64)
    members: list[list[int]] = [[] for _ in range(ranks)]
    for j, r in enumerate(assignment):
        loads[r] += weights[j]
        members[r].append(j)
    while True:
        heavy = int(np.argmax(loads))
        light = int(np.argmin(loads))
        if heavy == light:
            return assignment
        lh, ll = int(loads[heavy]), int(loads[light])
        best_box, best_peak = -1, lh
        for j in members[heavy]:
            w = weights[j]
            peak = max(lh - w, ll + w)
            if peak < best_peak or (peak == best_peak and best_box >= 0 and j < best_box):
                best_box, best_peak = j, peak
        if best_box < 0:
            return assignment
        w = weights[best_box]
        members[heavy].remove(best_box)
        members[light].append(best_box)
        loads[heavy] -= w
        loads[light] += w
        assignment[best_box] = light


def knapsack_partition(problem: PartitionProblem, refine: bool = True) -> DistributionMap:
    """Greedy largest-first assignment into the lightest rank, then refinement.

    Refinement repeatedly moves the single box off the heaviest rank that most
    lowers max(heaviest, lightest) after landing on the lightest rank, and stops
    once no box lowers it. Ties go to the smallest rank or box index.
    """
    assignment = _knapsack(problem.weights, problem.rank_count, refine=refine)
    return DistributionMap(tuple(assignment), problem.rank_count)


# --- percentage-tracking SFC ------------------------------------------------


def _percentage_runs(ordered: Sequence[int], parts: int) -> list[int]:
    n = len(ordered)
    _require_enough_boxes(n, parts)
    total = sum(ordered)
    runs = [0] * n
    part, cum, filled = 0, 0, 0
    for pos, w in enumerate(ordered):
        if part < parts - 1 and filled > 0:
            if n - pos == parts - 1 - part or (cum + w) * parts > total * (part + 1):
                part += 1
                filled = 0
        runs[pos] = part
        cum += w
        filled += 1
    return runs


def _scatter(order: Sequence[int], runs: Sequence[int], ranks: int) -> DistributionMap:
    assignment = [0] * len(order)
    for pos, j in enumerate(order):
        assignment[j] = runs[pos]
    return DistributionMap(tuple(assignment), ranks)


def sfc_percentage_partition(problem: PartitionProblem) -> DistributionMap:
    """Contiguous split of the curve order using the cumulative-percentage rule.

    A box joins rank ``i`` while ``(assigned + w) * P <= total * (i + 1)``;
    otherwise it opens rank ``i + 1``. The last rank takes the remainder.
    """
    ordered = problem.ordered_weights()
    runs = _percentage_runs(ordered, problem.rank_count)
    return _scatter(problem.sfc_order, runs, problem.rank_count)


# --- painter's partition ----------------------------------------------------


def _parts_needed(prefix: Sequence[int], target: int, limit: int) -> int:
    # Greedy maximal runs with sum <= target; stops counting past ``limit``.
    n = len(prefix) - 1
    start, parts = 0, 0
    while start < n:
        parts += 1
        if parts > limit:
            return parts
        start = bisect_right(prefix, prefix[start] + target, lo=start + 1) - 1
    return parts


def _prefix(ordered: Sequence[int]) -> list[int]:
    return [0, *accumulate(ordered)]


def is_partition_possible(ordered_weights: Sequence[int], ranks: int, target: int) -> bool:
    """True if the ordered list splits into at most ``ranks`` runs of sum <= target."""
    if not ordered_weights:
        return True
    if target < max(ordered_weights):
        raise ValueError(f"target {target} is below the largest weight {max(ordered_weights)}")
    return _parts_needed(_prefix(ordered_weights), target, ranks) <= ranks


def _search(prefix: Sequence[int], low: int, ranks: int) -> int:
    high = prefix[-1]
    res = high
    lo, hi = low, high
    while lo < hi:
        mid = lo + (hi - lo) // 2
        if _parts_needed(prefix, mid, ranks) <= ranks:
            res = mid
            hi = mid - 1
        else:
            lo = mid + 1
    # the loop can exit with lo untested after hi = mid - 1
    if lo < res and _parts_needed(prefix, lo, ranks) <= ranks:
        res = lo
    return res


def painters_search(ordered_weights: Sequence[int], ranks: int) -> int:
    """Smallest achievable maximum run sum when cutting the list into ``ranks`` runs."""
    if not ordered_weights:
        raise ValueError("painters_search needs at least one weight")
    if min(ordered_weights) < 1:
        raise ValueError("weights must be >= 1")
    if ranks < 1:
        raise ValueError(f"ranks must be >= 1, got {ranks}")
    return _search(_prefix(ordered_weights), max(ordered_weights), ranks)


def _painters_runs(ordered: Sequence[int], parts: int) -> list[int]:
    n = len(ordered)
    _require_enough_boxes(n, parts)
    prefix = _prefix(ordered)
    res = _search(prefix, max(ordered), parts)
    runs = [0] * n
    start = 0
    for part in range(parts - 1):
        end = bisect_right(prefix, prefix[start] + res, lo=start + 1) - 1
        end = min(end, n - (parts - 1 - part))
        for pos in range(start, end):
            runs[pos] = part
        start = end
    for pos in range(start, n):
        runs[pos] = parts - 1
    return runs


def painters_partition(problem: PartitionProblem) -> DistributionMap:
    ordered = problem.ordered_weights()
    runs = _painters_runs(ordered, problem.rank_count)
    return _scatter(problem.sfc_order, runs, problem.rank_count)


# --- combined SFC + knapsack ------------------------------------------------


def combined_partition(
    problem: PartitionProblem,
    topology: Topology,
    sfc_variant: str = "percentage",
) -> DistributionMap:
    """Split the curve across nodes, then knapsack each node across its ranks.

    Global rank numbering is node-major: ``node * ranks_per_node + local``.
    """
    if problem.rank_count != topology.total_ranks:
        raise ValueError(
            f"problem has {problem.rank_count} ranks but topology provides {topology.total_ranks}"
        )
    if sfc_variant not in SFC_VARIANTS:
        raise ValueError(f"unknown sfc_variant {sfc_variant!r}; expected one of {SFC_VARIANTS}")
    _require_enough_boxes(problem.box_count, problem.rank_count)

    order = problem.sfc_order
    ordered = problem.ordered_weights()
    split = _percentage_runs if sfc_variant == "percentage" else _painters_runs
    runs = split(ordered, topology.node_count)

    groups: list[list[int]] = [[] for _ in range(topology.node_count)]
    for pos, node in enumerate(runs):
        groups[node].append(order[pos])

    rpn = topology.ranks_per_node
    weights = problem.weights
    assignment = [0] * problem.box_count
    for node, boxes in enumerate(groups):
        if len(boxes) < rpn:
            raise ValueError(
                f"node {node} received {len(boxes)} boxes, fewer than its {rpn} ranks"
            )
        # original index order, so a single node reproduces plain knapsack exactly
        boxes.sort()
        local = _knapsack([weights[j] for j in boxes], rpn)
        base = node * rpn
        for j, r in zip(boxes, local):
            assignment[j] = base + r
    return DistributionMap(tuple(assignment), problem.rank_count)


ALGORITHMS: dict[str, Callable[[PartitionProblem, Topology], DistributionMap]] = {
    "knapsack": lambda p, t: knapsack_partition(p),
    "sfc": lambda p, t: sfc_percentage_partition(p),
    "painters": lambda p, t: painters_partition(p),
    "combined-sfc": lambda p, t: combined_partition(p, t, "percentage"),
    "combined-painters": lambda p, t: combined_partition(p, t, "painters"),
}


def run_algorithm(name: str, problem: PartitionProblem, topology: Topology | None = None) -> DistributionMap:
    try:
        algo = ALGORITHMS[name]
    except KeyError:
        raise ValueError(f"unknown algorithm {name!r}; choose from {sorted(ALGORITHMS)}") from None
    if topology is None:
        topology = Topology(1, problem.rank_count)
    return algo(problem, topology)
