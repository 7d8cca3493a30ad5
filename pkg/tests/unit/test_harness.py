"""
Unit tests for trial runs, records and aggregation
"""

import csv
import json
import math

import pytest

from bestk_bandit.algorithms.telemetry import RoundTelemetry
from bestk_bandit.config import AlgorithmConfig
from bestk_bandit.core import BestKValidationError, HarnessIOError, ParameterError
from bestk_bandit.harness import (
    TrialConfig,
    TrialResult,
    TrialStreamWriter,
    aggregate,
    read_trial_stream,
    run_single_trial,
    run_sweep,
    run_trials,
    summary_row,
    trial_seed,
    wilson_interval,
    write_csv,
)
from bestk_bandit.harness.runner import cell_label, grid_points

pytestmark = pytest.mark.unit


def make_trial(index, correct=True, samples=100, rounds=None, capped=False):
    return TrialResult(
        trial=index,
        permutation_seed=index,
        stream_id=index,
        algorithm="bilateral",
        answer=[0],
        correct=correct,
        total_samples=samples,
        capped=capped,
        rounds=rounds or [],
    )


class TestWilson:
    """Test the Wilson score interval"""

    def test_no_trials(self):
        """Test the uninformative interval"""
        assert wilson_interval(0, 0) == (0.0, 1.0)

    def test_zero_successes(self):
        """Test the upper bound z^2 / (n + z^2) at p = 0"""
        low, high = wilson_interval(0, 100)
        z2 = 1.959963984540054 ** 2
        assert low == 0.0
        assert high == pytest.approx(z2 / (100 + z2))

    def test_all_successes(self):
        """Test the upper bound is exactly one when every trial succeeds"""
        low, high = wilson_interval(100, 100)
        z2 = 1.959963984540054 ** 2
        assert high == 1.0
        assert low == pytest.approx(100 / (100 + z2))

    def test_contains_estimate(self):
        """Test that the interval brackets the point estimate"""
        low, high = wilson_interval(7, 50)
        assert low < 7 / 50 < high

    def test_symmetric(self):
        """Test that swapping successes and failures mirrors the interval"""
        low, high = wilson_interval(3, 40)
        mirror_low, mirror_high = wilson_interval(37, 40)
        assert low == pytest.approx(1 - mirror_high)
        assert high == pytest.approx(1 - mirror_low)


class TestAggregate:
    """Test reduction of trial streams"""

    def test_error_and_sample_stats(self):
        """Test error counts and sample percentiles"""
        results = [make_trial(i, correct=i != 2, samples=10 * (i + 1)) for i in range(5)]
        stats = aggregate(results, "cell", n=4, k=2, delta=0.1)
        assert stats.trials == 5
        assert stats.errors == 1
        assert stats.error_rate == pytest.approx(0.2)
        assert stats.samples_mean == pytest.approx(30.0)
        assert stats.samples_median == pytest.approx(30.0)
        assert stats.error_low < 0.2 < stats.error_high

    def test_round_statistics(self):
        """Test per-round good rates, bounds and pass rates"""
        good = RoundTelemetry(
            r=1, k_large=1, k_small=1, delta_r=0.005, samples_this_round=40,
            contracts={"pac": True, "elim_large": True}, good=True, obs2_ok=True, obs3_ok=True,
        )
        bad = RoundTelemetry(
            r=1, k_large=1, k_small=1, delta_r=0.005, samples_this_round=60,
            contracts={"pac": False, "elim_large": True}, good=False, obs3_ok=True,
        )
        stats = aggregate([make_trial(0, rounds=[good]), make_trial(1, rounds=[bad])], "cell", 2, 1, 0.1)
        assert stats.rounds_histogram == {1: 2}
        assert stats.samples_per_round == {1: 50.0}
        assert stats.round_good_rate == {1: 0.5}
        assert stats.round_good_bound == {1: pytest.approx(0.975)}
        assert stats.contract_pass_rate == {"elim_large": 1.0, "pac": 0.5}
        assert stats.obs2_pass_rate == 1.0
        assert stats.obs3_pass_rate == 1.0
        assert stats.telemetry_ok_rate == 1.0

    def test_baseline_has_no_telemetry_rates(self):
        """Test that unchecked runs leave pass rates empty"""
        plain = RoundTelemetry(r=1, k_large=1, k_small=1, delta_r=0.01)
        stats = aggregate([make_trial(0, rounds=[plain])], "cell", 2, 1, 0.1)
        assert stats.obs2_pass_rate is None
        assert stats.telemetry_ok_rate is None
        assert stats.round_good_rate == {}

    def test_csv_row_columns(self):
        """Test the flat CSV view"""
        row = aggregate([make_trial(0)], "cell", 2, 1, 0.1).csv_row()
        assert row["label"] == "cell"
        assert {f"pass_{name}" for name in ("pac", "est_large", "est_small", "elim_large", "elim_small")} <= set(row)
        assert row["pass_pac"] is None

    def test_capped_rate(self):
        """Test the fraction of capped trials"""
        results = [make_trial(0, capped=True, correct=False), make_trial(1)]
        assert aggregate(results, "cell", 2, 1, 0.1).capped_rate == 0.5


class TestTrialConfig:
    """Test run configuration validation"""

    @pytest.mark.parametrize(
        "field,value", [("delta", 0.0), ("delta", 1.5), ("trials", 0), ("jobs", 0), ("master_seed", -1)]
    )
    def test_invalid_values(self, two_arm, field, value):
        """Test that out-of-range values name their field"""
        with pytest.raises(ParameterError) as exc_info:
            TrialConfig.build(instance=two_arm, **{field: value})
        assert exc_info.value.field == field

    def test_header_omits_parallelism(self, two_arm, algo_config):
        """Test that the header is independent of jobs"""
        one = TrialConfig.build(instance=two_arm, jobs=1, algorithm_config=algo_config).header()
        two = TrialConfig.build(instance=two_arm, jobs=2, algorithm_config=algo_config).header()
        assert one == two
        assert one.config["algorithm"]["cap_mult"] == algo_config.cap_mult
        assert one.config["algorithm"]["complexity_scale"] == algo_config.complexity_scale


class TestTrials:
    """Test seeded trials"""

    def test_trial_seed(self):
        """Test that trial seeds are deterministic and distinct"""
        assert trial_seed(5, 0) == trial_seed(5, 0)
        assert trial_seed(5, 0) != trial_seed(5, 1)
        assert trial_seed(5, 0) != trial_seed(6, 0)
        assert 0 <= trial_seed(5, 0) < 2**64

    def test_single_trial(self, four_arm, algo_config):
        """Test that answers are reported in unpermuted ids"""
        config = TrialConfig.build(instance=four_arm, master_seed=3, algorithm_config=algo_config)
        result = run_single_trial(config, 0)
        assert result.answer == [0, 1]
        assert result.correct
        assert result.stream_id == 0
        assert result.permutation_seed == trial_seed(3, 0)

    def test_single_trial_reproducible(self, four_arm, algo_config):
        """Test that a trial depends only on (master_seed, index)"""
        config = TrialConfig.build(instance=four_arm, master_seed=3, algorithm_config=algo_config)
        assert run_single_trial(config, 4) == run_single_trial(config, 4)

    def test_baseline_trial(self, two_arm, algo_config):
        """Test a trial of the uniform baseline"""
        config = TrialConfig.build(instance=two_arm, algorithm="uniform", algorithm_config=algo_config)
        result = run_single_trial(config, 0)
        assert result.algorithm == "uniform"
        assert result.correct

    def test_capped_trial_is_an_error(self, four_arm):
        """Test that a capped run never counts as correct"""
        config = TrialConfig.build(
            instance=four_arm, algorithm="uniform", algorithm_config=AlgorithmConfig(baseline_max_phases=0)
        )
        result = run_single_trial(config, 0)
        assert result.capped
        assert not result.correct

    def test_unknown_algorithm(self, two_arm, algo_config):
        """Test that unknown algorithms fail at run time with the algo field"""
        config = TrialConfig.build(instance=two_arm, algorithm="nope", algorithm_config=algo_config)
        with pytest.raises(ParameterError) as exc_info:
            run_single_trial(config, 0)
        assert exc_info.value.field == "algo"


class TestStreams:
    """Test NDJSON trial streams and CSV output"""

    def test_stream_round_trip(self, tmp_path, four_arm, algo_config):
        """Test that a written stream reads back to the same records"""
        config = TrialConfig.build(instance=four_arm, trials=3, master_seed=1, algorithm_config=algo_config)
        path = tmp_path / "runs" / "trials.ndjson"
        with TrialStreamWriter(path, config.header()) as writer:
            stats, results = run_trials(config, writer)

        header, trials = read_trial_stream(path)
        assert header == config.header()
        assert trials == results
        assert aggregate(trials, header.label, 4, 2, header.delta) == stats

    def test_stream_has_no_timestamps(self, tmp_path, two_arm, algo_config):
        """Test that the header line is fully determined by the config"""
        config = TrialConfig.build(instance=two_arm, trials=1, algorithm_config=algo_config)
        path = tmp_path / "t.ndjson"
        with TrialStreamWriter(path, config.header()):
            pass
        first = json.loads(path.read_text().splitlines()[0])
        assert first["type"] == "header"
        assert set(first) == {"type", "label", "algorithm", "delta", "trials", "master_seed", "instance", "config"}

    def test_truncated_last_line_is_skipped(self, tmp_path, two_arm, algo_config):
        """Test reading an interrupted stream"""
        config = TrialConfig.build(instance=two_arm, trials=1, algorithm_config=algo_config)
        path = tmp_path / "t.ndjson"
        with TrialStreamWriter(path, config.header()) as writer:
            run_trials(config, writer)
        with open(path, "a", encoding="utf-8") as f:
            f.write('{"type": "trial", "tri')
        _, trials = read_trial_stream(path)
        assert len(trials) == 1

    def test_corrupt_line(self, tmp_path):
        """Test that a bad line in the middle is a validation error"""
        path = tmp_path / "t.ndjson"
        path.write_text("not json\n{}\n")
        with pytest.raises(BestKValidationError) as exc_info:
            read_trial_stream(path)
        assert exc_info.value.field == "in"

    def test_missing_header(self, tmp_path):
        """Test that a stream needs a header"""
        path = tmp_path / "t.ndjson"
        path.write_text(make_trial(0).model_dump_json() + "\n")
        with pytest.raises(BestKValidationError):
            read_trial_stream(path)

    def test_missing_file(self, tmp_path):
        """Test that unreadable streams raise an I/O error"""
        with pytest.raises(HarnessIOError):
            read_trial_stream(tmp_path / "missing.ndjson")

    def test_write_csv(self, tmp_path):
        """Test union headers and empty cells for None"""
        path = tmp_path / "out.csv"
        write_csv(path, [{"a": 1, "b": None}, {"a": 2, "c": "x"}])
        with open(path, newline="", encoding="utf-8") as f:
            rows = list(csv.DictReader(f))
        assert list(rows[0]) == ["a", "b", "c"]
        assert rows[0]["b"] == ""
        assert rows[1]["c"] == "x"

    def test_summary_row(self, two_arm, algo_config):
        """Test that summary rows carry the seed and config"""
        config = TrialConfig.build(instance=two_arm, trials=1, master_seed=9, algorithm_config=algo_config)
        stats, _ = run_trials(config)
        row = summary_row(stats, config.header())
        assert row["master_seed"] == 9
        assert json.loads(row["config"])["algorithm"]["delta_prime_variant"] == "proof"


class TestSweep:
    """Test grids and sweeps"""

    def test_grid_points(self):
        """Test the Cartesian product in key order"""
        points = grid_points({"n": ["2", "4"], "eps": ["0.25"]})
        assert points == [{"n": "2", "eps": "0.25"}, {"n": "4", "eps": "0.25"}]

    def test_cell_label(self):
        """Test readable cell labels"""
        assert cell_label("appendix_a", {"n": "2", "eps": "0.25"}) == "appendix_a(n=2,eps=0.25)"

    def test_sweep_rows(self, tmp_path, algo_config):
        """Test one row per cell with hardness ratios"""
        rows = run_sweep(
            "uniform_gaps",
            {"n": "2", "k": "1"},
            {"gap": ["0.5", "0.25"]},
            algorithms=["bilateral"],
            deltas=[0.1],
            trials=2,
            master_seed=4,
            algorithm_config=algo_config,
            raw_dir=tmp_path,
        )
        assert [row["param_gap"] for row in rows] == ["0.5", "0.25"]
        assert rows[0]["H"] == pytest.approx(8.0)
        assert rows[0]["ratio_H"] == pytest.approx(rows[0]["samples_median"] / 8.0)
        assert all(not math.isnan(row["ratio_upper"]) for row in rows)
        assert len(list(tmp_path.glob("*.ndjson"))) == 2
