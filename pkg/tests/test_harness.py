import csv
import json
import math
from collections import defaultdict

import pytest

from boxbalance.cli import main
from boxbalance.harness import (
    SUMMARY_COLUMNS,
    TRIAL_COLUMNS,
    ExperimentConfig,
    InfeasibleTopologyWarning,
    TrialRecord,
    expected_record_count,
    paper_preset,
    read_summary,
    read_trials,
    run_experiment,
    summarize,
    trial_seed,
    write_results,
)


def small_config(**kw):
    base = dict(
        node_counts=[1, 2],
        ranks_per_node=4,
        boxes_per_rank=[4],
        std_devs=[4523.0],
        trials=3,
        base_seed=7,
        serial=True,
    )
    base.update(kw)
    return ExperimentConfig(**base)


def record(eff=1.0, **kw):
    base = dict(
        algorithm="sfc", node_count=1, ranks_per_node=4, boxes_per_rank=4, std_dev=250.0,
        trial=0, seed=1, total_weight=10, max_load=3, efficiency=eff,
        partition_time_s=0.001, ordering_time_s=0.0,
    )
    base.update(kw)
    return TrialRecord(**base)


def test_cardinality():
    cfg = small_config(node_counts=[1], trials=2, algorithms=["knapsack", "painters"])
    records = run_experiment(cfg)
    assert len(records) == 4 == expected_record_count(cfg)
    assert {r.algorithm for r in records} == {"knapsack", "painters"}


def test_zero_std_dev_gives_perfect_balance():
    cfg = small_config(std_devs=[0.0], boxes_per_rank=[4, 8])
    records = run_experiment(cfg)
    assert len(records) == expected_record_count(cfg)
    assert all(r.efficiency == 1.0 for r in records)


def test_paper_preset_size():
    cfg = paper_preset()
    assert cfg.node_counts == [1, 2, 4, 8, 16, 32, 64, 128, 256, 512]
    assert cfg.ranks_per_node == 4 and cfg.trials == 250
    assert cfg.std_devs == [250.0, 4523.0, 25231.0]
    assert expected_record_count(cfg) == 10 * 3 * 3 * 250 * 5 == 112500


def test_seeds_deterministic_and_distinct():
    a = trial_seed(7, 1, 4, 0, 0)
    assert a == trial_seed(7, 1, 4, 0, 0)
    others = {trial_seed(7, 1, 4, 0, 1), trial_seed(7, 2, 4, 0, 0), trial_seed(8, 1, 4, 0, 0),
              trial_seed(7, 1, 8, 0, 0), trial_seed(7, 1, 4, 1, 0)}
    assert a not in others and len(others) == 5
    assert 0 <= a < 2**64


def test_reproducible_efficiencies_and_parallel_equivalence():
    first = run_experiment(small_config())
    second = run_experiment(small_config())
    parallel = run_experiment(small_config(serial=False, workers=2))
    strip = lambda recs: [(r.algorithm, r.node_count, r.trial, r.seed, r.efficiency, r.max_load) for r in recs]
    assert strip(first) == strip(second) == strip(parallel)


def test_every_algorithm_sees_identical_weights():
    records = run_experiment(small_config())
    groups = defaultdict(set)
    for r in records:
        groups[(r.node_count, r.boxes_per_rank, r.std_dev, r.trial)].add((r.weights_digest, r.total_weight, r.seed))
    assert groups and all(len(v) == 1 for v in groups.values())


def test_output_sorted_by_algorithm_then_topology():
    cfg = small_config()
    records = run_experiment(cfg)
    keys = [(cfg.algorithms.index(r.algorithm), r.node_count, r.boxes_per_rank, r.trial) for r in records]
    assert keys == sorted(keys)


def test_ordering_time_only_for_curve_algorithms():
    for r in run_experiment(small_config()):
        if r.algorithm == "knapsack":
            assert r.ordering_time_s == 0.0
        else:
            assert r.ordering_time_s > 0.0


def test_infeasible_topology_skipped_with_warning():
    cfg = small_config(domain_extent=(4, 4, 4), node_counts=[1, 64], trials=1)
    with pytest.warns(InfeasibleTopologyWarning):
        records = run_experiment(cfg)
    assert {r.node_count for r in records} == {1}


def test_summary_two_point_stats():
    (s,) = summarize([record(0.8, trial=0), record(1.0, trial=1)])
    assert s.trials == 2
    assert s.mean_efficiency == pytest.approx(0.9)
    assert s.std_efficiency == pytest.approx(math.sqrt(0.02), rel=1e-12)


def test_summary_single_record():
    (s,) = summarize([record(0.7)])
    assert s.std_efficiency == 0.0 and s.std_partition_time_s == 0.0


def test_summary_constant_group():
    (s,) = summarize([record(1.0, trial=t) for t in range(250)])
    assert (s.trials, s.mean_efficiency, s.std_efficiency) == (250, 1.0, 0.0)


def test_summary_mean_within_group_range():
    records = run_experiment(small_config(std_devs=[25231.0], trials=6))
    for s in summarize(records):
        effs = [r.efficiency for r in records if (r.algorithm, r.node_count) == (s.algorithm, s.node_count)]
        assert min(effs) <= s.mean_efficiency <= max(effs)
        assert s.trials == 6


def test_summary_rejects_empty():
    with pytest.raises(ValueError):
        summarize([])


def test_empty_results_are_header_only(tmp_path):
    write_results([], [], tmp_path)
    for name, cols in (("trials.csv", TRIAL_COLUMNS), ("summary.csv", SUMMARY_COLUMNS)):
        lines = (tmp_path / name).read_text().splitlines()
        assert lines == [",".join(cols)]


def test_one_record_two_lines(tmp_path):
    write_results([record()], [], tmp_path)
    assert len((tmp_path / "trials.csv").read_text().splitlines()) == 2


def test_round_trip(tmp_path):
    cfg = small_config()
    records = run_experiment(cfg)
    summaries = summarize(records)
    write_results(records, summaries, tmp_path, cfg)
    assert read_trials(tmp_path / "trials.csv") == records
    assert read_summary(tmp_path / "summary.csv") == summaries
    meta = json.loads((tmp_path / "config.json").read_text())
    assert meta["config"]["base_seed"] == 7
    assert meta["version"] == "0.1.0"
    assert "PCG64" in meta["generator"]


def test_exact_column_schema(tmp_path):
    write_results([record()], summarize([record()]), tmp_path)
    with open(tmp_path / "trials.csv") as fh:
        assert next(csv.reader(fh)) == [
            "algorithm", "node_count", "ranks_per_node", "boxes_per_rank", "std_dev", "trial",
            "seed", "total_weight", "max_load", "efficiency", "partition_time_s", "ordering_time_s",
        ]
    with open(tmp_path / "summary.csv") as fh:
        assert next(csv.reader(fh)) == [
            "algorithm", "node_count", "ranks_per_node", "boxes_per_rank", "std_dev", "trials",
            "mean_efficiency", "std_efficiency", "mean_partition_time_s", "std_partition_time_s",
        ]


def test_write_error_names_path(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    with pytest.raises(OSError, match="file"):
        write_results([], [], blocker / "sub")


@pytest.mark.parametrize(
    "kw",
    [{"trials": 0}, {"node_counts": []}, {"algorithms": ["hilbert"]}, {"boxes_per_rank": [0]}],
)
def test_config_validation(kw):
    with pytest.raises(ValueError):
        small_config(**kw)


# --- CLI --------------------------------------------------------------------


def test_cli_run(tmp_path, capsys):
    out = tmp_path / "res"
    rc = main([
        "run", "--nodes", "1,2", "--ranks-per-node", "4", "--boxes-per-rank", "4",
        "--std-dev", "small,large", "--trials", "2", "--seed", "3",
        "--algorithms", "knapsack,sfc", "--out", str(out), "--serial",
    ])
    assert rc == 0
    records = read_trials(out / "trials.csv")
    assert len(records) == 2 * 1 * 2 * 2 * 2
    assert {r.std_dev for r in records} == {250.0, 25231.0}
    assert "wrote 16 trial records" in capsys.readouterr().out


def test_cli_oracle(capsys):
    assert main(["oracle", "--boxes", "6", "--ranks", "2", "--threads", "2", "--seed", "1"]) == 0
    text = capsys.readouterr().out
    fields = dict(line.split() for line in text.strip().splitlines())
    assert int(fields["combinations_checked"]) == 2**6 // 2 + 1
    assert 0 < float(fields["efficiency"]) <= 1
    assert main(["oracle", "--boxes", "6", "--ranks", "2", "--no-symmetry"]) == 0
    assert "combinations_checked 64" in capsys.readouterr().out


def test_cli_rejects_bad_algorithm():
    with pytest.raises(SystemExit):
        main(["run", "--nodes", "1", "--algorithms", "bogus", "--out", "x"])
