"""``bench`` command line: run sweeps, the full preset, or the brute-force oracle."""

from __future__ import annotations

import argparse
import logging
import sys

from .balancers import ALGORITHMS
from .harness import ExperimentConfig, paper_preset, run_experiment, summarize, write_results
from .metrics import compute_loads, efficiency
from .oracle import brute_force_solve
from .weights import WeightDistribution, generate_weights, resolve_std_dev


def _int_list(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _std_list(text: str) -> list[float]:
    try:
        return [resolve_std_dev(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"expected small|medium|large or a number (comma-separated), got {text!r}"
        )


def _algo_list(text: str) -> list[str]:
    names = [v.strip() for v in text.split(",") if v.strip()]
    bad = [n for n in names if n not in ALGORITHMS]
    if bad:
        raise argparse.ArgumentTypeError(f"unknown algorithms {bad}; choose from {sorted(ALGORITHMS)}")
    return names


def _seed(text: str) -> int:
    value = int(text, 0)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return value


def _extent(text: str) -> tuple[int, int, int]:
    parts = _int_list(text)
    if len(parts) != 3:
        raise argparse.ArgumentTypeError("domain needs three comma-separated sizes")
    return tuple(parts)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bench", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a configured sweep")
    run.add_argument("--nodes", type=_int_list, required=True)
    run.add_argument("--ranks-per-node", type=int, default=4)
    run.add_argument("--boxes-per-rank", type=_int_list, default=[4, 8, 16])
    run.add_argument("--std-dev", type=_std_list, default=[250.0])
    run.add_argument("--mean", type=float, default=100000.0)
    run.add_argument("--trials", type=int, default=250)
    run.add_argument("--seed", type=_seed, default=0)
    run.add_argument("--algorithms", type=_algo_list, default=list(ALGORITHMS))
    run.add_argument("--domain", type=_extent, default=(256, 256, 256))
    run.add_argument("--out", required=True)
    run.add_argument("--workers", type=int, default=None)
    run.add_argument("--serial", action="store_true", help="time every run sequentially")

    preset = sub.add_parser("paper-preset", help="full 1..512-node sweep, 250 trials")
    preset.add_argument("--out", required=True)
    preset.add_argument("--seed", type=_seed, default=0)
    preset.add_argument("--workers", type=int, default=None)
    preset.add_argument("--serial", action="store_true")

    oracle = sub.add_parser("oracle", help="exhaustive search on one random instance")
    oracle.add_argument("--boxes", type=int, required=True)
    oracle.add_argument("--ranks", type=int, required=True)
    oracle.add_argument("--threads", type=int, default=1)
    oracle.add_argument("--no-symmetry", action="store_true")
    oracle.add_argument("--std-dev", type=resolve_std_dev, default=25231.0)
    oracle.add_argument("--seed", type=_seed, default=0)
    return parser


def _run_config(config: ExperimentConfig) -> int:
    records = run_experiment(config)
    summaries = summarize(records) if records else []
    out = write_results(records, summaries, config.output_path, config)
    print(f"wrote {len(records)} trial records to {out}")
    return 0


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)

    if args.command == "run":
        config = ExperimentConfig(
            node_counts=args.nodes,
            ranks_per_node=args.ranks_per_node,
            boxes_per_rank=args.boxes_per_rank,
            std_devs=args.std_dev,
            mean=args.mean,
            trials=args.trials,
            base_seed=args.seed,
            algorithms=args.algorithms,
            domain_extent=args.domain,
            output_path=args.out,
            serial=args.serial,
            workers=args.workers,
        )
        return _run_config(config)

    if args.command == "paper-preset":
        config = paper_preset(args.out, args.seed)
        config.serial = args.serial
        config.workers = args.workers
        return _run_config(config)

    weights = generate_weights(WeightDistribution(std_dev=args.std_dev, seed=args.seed), args.boxes)
    result = brute_force_solve(
        weights, args.ranks, threads=args.threads, use_symmetry=not args.no_symmetry
    )
    eff = efficiency(compute_loads(result.best_map, weights, args.ranks), args.ranks)
    print(f"best_max_load {result.best_max_load}")
    print(f"efficiency {eff:.6f}")
    print(f"combinations_checked {result.combinations_checked}")
    print(f"wall_time_s {result.wall_time:.6f}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
