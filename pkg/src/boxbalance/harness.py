"""Statistical comparison of the partitioners over synthetic box decompositions.

For every topology point one BoxArray and its Morton order are built. Each
trial draws one weight vector and hands the identical vector to every
algorithm. Trial seeds come from a fixed mix of the base seed and the trial
coordinates, so trials can run in any order or in parallel and still
produce the same weights.
"""

from __future__ import annotations

import csv
import hashlib
import json
import logging
import os
import statistics
import time
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from . import __version__
from .balancers import ALGORITHMS, PartitionProblem, Topology
from .geometry import make_box_array, sfc_order
from .metrics import timed_report
from .weights import DEFAULT_MEAN, GENERATOR_ID, PRESETS, WeightDistribution, generate_weights

__all__ = [
    "ExperimentConfig",
    "TrialRecord",
    "SummaryRecord",
    "InfeasibleTopologyWarning",
    "TRIAL_COLUMNS",
    "SUMMARY_COLUMNS",
    "DEFAULT_ALGORITHMS",
    "trial_seed",
    "paper_preset",
    "expected_record_count",
    "run_experiment",
    "summarize",
    "write_results",
    "read_trials",
    "read_summary",
]

log = logging.getLogger(__name__)

DEFAULT_ALGORITHMS = ("knapsack", "sfc", "painters", "combined-sfc", "combined-painters")
SFC_FAMILY = {"sfc", "painters", "combined-sfc", "combined-painters"}

TRIAL_COLUMNS = (
    "algorithm",
    "node_count",
    "ranks_per_node",
    "boxes_per_rank",
    "std_dev",
    "trial",
    "seed",
    "total_weight",
    "max_load",
    "efficiency",
    "partition_time_s",
    "ordering_time_s",
)
SUMMARY_COLUMNS = (
    "algorithm",
    "node_count",
    "ranks_per_node",
    "boxes_per_rank",
    "std_dev",
    "trials",
    "mean_efficiency",
    "std_efficiency",
    "mean_partition_time_s",
    "std_partition_time_s",
)


class InfeasibleTopologyWarning(UserWarning):
    """A topology point or an algorithm run was skipped."""


@dataclass
class ExperimentConfig:
    node_counts: list[int]
    ranks_per_node: int = 4
    boxes_per_rank: list[int] = field(default_factory=lambda: [4, 8, 16])
    std_devs: list[float] = field(default_factory=lambda: [PRESETS["small"]])
    mean: float = DEFAULT_MEAN
    trials: int = 250
    base_seed: int = 0
    algorithms: list[str] = field(default_factory=lambda: list(DEFAULT_ALGORITHMS))
    domain_extent: tuple[int, int, int] = (256, 256, 256)
    output_path: str | None = None
    serial: bool = False
    workers: int | None = None

    def __post_init__(self):
        self.node_counts = [int(n) for n in self.node_counts]
        self.boxes_per_rank = [int(b) for b in self.boxes_per_rank]
        self.std_devs = [float(s) for s in self.std_devs]
        self.algorithms = list(self.algorithms)
        self.domain_extent = tuple(int(e) for e in self.domain_extent)
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.ranks_per_node < 1:
            raise ValueError("ranks_per_node must be >= 1")
        for name, values in (
            ("node_counts", self.node_counts),
            ("boxes_per_rank", self.boxes_per_rank),
            ("std_devs", self.std_devs),
            ("algorithms", self.algorithms),
        ):
            if not values:
                raise ValueError(f"{name} must be nonempty")
        if min(self.node_counts) < 1 or min(self.boxes_per_rank) < 1:
            raise ValueError("node counts and boxes per rank must be positive")
        unknown = [a for a in self.algorithms if a not in ALGORITHMS]
        if unknown:
            raise ValueError(f"unknown algorithms {unknown}; choose from {sorted(ALGORITHMS)}")
        if not 0 <= self.base_seed < 2**64:
            raise ValueError("base_seed must fit in 64 unsigned bits")


@dataclass
class TrialRecord:
    algorithm: str
    node_count: int
    ranks_per_node: int
    boxes_per_rank: int
    std_dev: float
    trial: int
    seed: int
    total_weight: int
    max_load: int
    efficiency: float
    partition_time_s: float
    ordering_time_s: float
    # not serialized; lets tests confirm every algorithm saw the same weights
    weights_digest: str = field(default="", compare=False, repr=False)


@dataclass
class SummaryRecord:
    algorithm: str
    node_count: int
    ranks_per_node: int
    boxes_per_rank: int
    std_dev: float
    trials: int
    mean_efficiency: float
    std_efficiency: float
    mean_partition_time_s: float
    std_partition_time_s: float


def trial_seed(base_seed: int, node_count: int, boxes_per_rank: int, std_index: int, trial: int) -> int:
    """64-bit trial seed: numpy SeedSequence over the five coordinates."""
    seq = np.random.SeedSequence([base_seed, node_count, boxes_per_rank, std_index, trial])
    return int(seq.generate_state(1, dtype=np.uint64)[0])


def paper_preset(output_path: str | None = None, base_seed: int = 0) -> ExperimentConfig:
    return ExperimentConfig(
        node_counts=[2**i for i in range(10)],
        ranks_per_node=4,
        boxes_per_rank=[4, 8, 16],
        std_devs=[PRESETS["small"], PRESETS["medium"], PRESETS["large"]],
        trials=250,
        base_seed=base_seed,
        algorithms=list(DEFAULT_ALGORITHMS),
        output_path=output_path,
    )


def expected_record_count(config: ExperimentConfig) -> int:
    return (
        len(config.node_counts)
        * len(config.boxes_per_rank)
        * len(config.std_devs)
        * config.trials
        * len(config.algorithms)
    )


def _digest(weights: np.ndarray) -> str:
    return hashlib.blake2b(weights.tobytes(), digest_size=8).hexdigest()


@dataclass(frozen=True)
class _Batch:
    node_count: int
    boxes_per_rank: int
    std_index: int
    order: tuple[int, ...]
    ordering_time: float


def _run_batch(config: ExperimentConfig, batch: _Batch) -> tuple[list[TrialRecord], list[str]]:
    rpn = config.ranks_per_node
    topology = Topology(batch.node_count, rpn)
    ranks = topology.total_ranks
    n_boxes = ranks * batch.boxes_per_rank
    std_dev = config.std_devs[batch.std_index]
    records, problems = [], []
    for trial in range(config.trials):
        seed = trial_seed(config.base_seed, batch.node_count, batch.boxes_per_rank, batch.std_index, trial)
        weights = generate_weights(WeightDistribution(config.mean, std_dev, seed), n_boxes)
        digest = _digest(weights)
        problem = PartitionProblem(weights, ranks, batch.order)
        for name in config.algorithms:
            algo = ALGORITHMS[name]
            try:
                report = timed_report(name, lambda: algo(problem, topology), problem.weights, ranks)
            except ValueError as exc:
                problems.append(
                    f"{name} skipped at nodes={batch.node_count} bpr={batch.boxes_per_rank} "
                    f"std_dev={std_dev} trial={trial}: {exc}"
                )
                continue
            records.append(
                TrialRecord(
                    algorithm=name,
                    node_count=batch.node_count,
                    ranks_per_node=rpn,
                    boxes_per_rank=batch.boxes_per_rank,
                    std_dev=std_dev,
                    trial=trial,
                    seed=seed,
                    total_weight=report.load_profile.total_weight,
                    max_load=report.load_profile.max_load,
                    efficiency=report.efficiency,
                    partition_time_s=report.wall_time,
                    ordering_time_s=batch.ordering_time if name in SFC_FAMILY else 0.0,
                    weights_digest=digest,
                )
            )
    return records, problems


def _record_sort_key(config: ExperimentConfig):
    rank = {name: i for i, name in enumerate(config.algorithms)}

    def key(r: TrialRecord):
        return (rank[r.algorithm], r.node_count, r.boxes_per_rank, r.std_dev, r.trial)

    return key


def run_experiment(config: ExperimentConfig) -> list[TrialRecord]:
    """Run every (topology, distribution, trial, algorithm) combination.

    Topologies that cannot be decomposed, and algorithm runs that reject their
    input, are skipped with an :class:`InfeasibleTopologyWarning`.
    """
    batches: list[_Batch] = []
    skipped: list[str] = []
    for node_count in config.node_counts:
        ranks = node_count * config.ranks_per_node
        for bpr in config.boxes_per_rank:
            try:
                boxes = make_box_array(config.domain_extent, ranks * bpr)
            except ValueError as exc:
                skipped.append(f"topology nodes={node_count} bpr={bpr} skipped: {exc}")
                continue
            t0 = time.perf_counter()
            order = tuple(sfc_order(boxes))
            ordering_time = time.perf_counter() - t0
            for s in range(len(config.std_devs)):
                batches.append(_Batch(node_count, bpr, s, order, ordering_time))

    workers = 1 if config.serial else (config.workers or os.cpu_count() or 1)
    records: list[TrialRecord] = []
    if workers <= 1 or len(batches) <= 1:
        for batch in batches:
            recs, problems = _run_batch(config, batch)
            records.extend(recs)
            skipped.extend(problems)
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_run_batch, config, b) for b in batches]
            for fut in futures:
                recs, problems = fut.result()
                records.extend(recs)
                skipped.extend(problems)

    for message in skipped:
        log.warning(message)
        warnings.warn(message, InfeasibleTopologyWarning, stacklevel=2)
    records.sort(key=_record_sort_key(config))
    return records


def summarize(records: Iterable[TrialRecord]) -> list[SummaryRecord]:
    """Mean and sample standard deviation of efficiency and time per group."""
    groups: dict[tuple, list[TrialRecord]] = {}
    for r in records:
        key = (r.algorithm, r.node_count, r.ranks_per_node, r.boxes_per_rank, r.std_dev)
        groups.setdefault(key, []).append(r)
    if not groups:
        raise ValueError("cannot summarize an empty record list")

    def mean_std(values: Sequence[float]) -> tuple[float, float]:
        # statistics.mean is exact, so the mean never leaves [min, max]
        mean = float(statistics.mean(values))
        std = float(statistics.stdev(values)) if len(values) > 1 else 0.0
        return mean, std

    out = []
    for key, recs in groups.items():
        eff_mean, eff_std = mean_std([r.efficiency for r in recs])
        t_mean, t_std = mean_std([r.partition_time_s for r in recs])
        out.append(SummaryRecord(*key, len(recs), eff_mean, eff_std, t_mean, t_std))
    return out


def _row(record, columns: Sequence[str]) -> list[str]:
    row = []
    for col in columns:
        value = getattr(record, col)
        row.append(repr(value) if isinstance(value, float) else str(value))
    return row


def _write_csv(path: Path, columns: Sequence[str], rows: Iterable) -> None:
    try:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(columns)
            for rec in rows:
                writer.writerow(_row(rec, columns))
    except OSError as exc:
        raise OSError(f"failed writing {path}: {exc}") from exc


def write_results(
    records: Sequence[TrialRecord],
    summaries: Sequence[SummaryRecord],
    output_path: str | os.PathLike,
    config: ExperimentConfig | None = None,
) -> Path:
    out = Path(output_path)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create output directory {out}: {exc}") from exc
    _write_csv(out / "trials.csv", TRIAL_COLUMNS, records)
    _write_csv(out / "summary.csv", SUMMARY_COLUMNS, summaries)
    meta = {"version": __version__, "generator": GENERATOR_ID}
    if config is not None:
        meta["config"] = asdict(config)
    try:
        (out / "config.json").write_text(json.dumps(meta, indent=2) + "\n")
    except OSError as exc:
        raise OSError(f"failed writing {out / 'config.json'}: {exc}") from exc
    return out


def _read_csv(path, cls):
    types = {f.name: f.type for f in fields(cls)}
    casts = {"int": int, "float": float, "str": str}
    rows = []
    with open(path, newline="") as fh:
        for raw in csv.DictReader(fh):
            rows.append(cls(**{k: casts[types[k]](v) for k, v in raw.items()}))
    return rows


def read_trials(path: str | os.PathLike) -> list[TrialRecord]:
    return _read_csv(path, TrialRecord)


def read_summary(path: str | os.PathLike) -> list[SummaryRecord]:
    return _read_csv(path, SummaryRecord)
