"""
Monte Carlo tests: delta-correctness and simulator telemetry of Bilateral-Elimination
"""

from pathlib import Path

import pytest

from bestk_bandit.config import AlgorithmConfig, AppConfig
from bestk_bandit.core import analyze, decompose_groups
from bestk_bandit.harness import TrialConfig, appendix_a, run_trials, symmetric_best1
from bestk_bandit.harness.families import random_family

pytestmark = [pytest.mark.integration, pytest.mark.slow]

DELTA = 0.1
TRIALS = 500
MAX_WILSON_UPPER = 0.14
CALIBRATED_CONFIG = Path(__file__).parent.parent.parent / "config" / "calibrated.json"
# One constant for the whole corpus: eight times the default complexity scale.
ENVELOPE_C = 8 * AlgorithmConfig().complexity_scale


def corpus():
    instances = {
        "appendix_a(8,1/16)": appendix_a(8, 0.0625),
        "symmetric_best1(10,0.5,0.1)": symmetric_best1(10, 0.5, 0.1),
    }
    for seed in range(20):
        instances[f"random(12,seed={seed})"] = random_family(12, 1 + seed % 11, seed, resolution=256)
    return instances


CORPUS = corpus()


def clean(result):
    """No contract failed and no elimination dropped a protected arm."""
    if result.contract_failures:
        return False
    return all(
        elim.protected_ok is not False
        for rt in result.rounds
        for elim in (rt.elim_large, rt.elim_small)
        if elim is not None
    )


@pytest.fixture(scope="module")
def corpus_runs():
    """Every corpus instance run TRIALS times at DELTA"""
    runs = {}
    for index, (label, instance) in enumerate(CORPUS.items()):
        config = TrialConfig.build(
            instance=instance,
            label=label,
            delta=DELTA,
            trials=TRIALS,
            master_seed=1000 + index,
            algorithm_config=AlgorithmConfig(),
        )
        runs[label] = run_trials(config)
    return runs


@pytest.fixture(scope="module")
def calibrated_runs():
    """Every corpus instance run TRIALS times with the calibrated profile"""
    profile = AppConfig.load_config(str(CALIBRATED_CONFIG)).algorithm
    runs = {}
    for index, (label, instance) in enumerate(CORPUS.items()):
        config = TrialConfig.build(
            instance=instance,
            label=label,
            delta=DELTA,
            trials=TRIALS,
            master_seed=2000 + index,
            algorithm_config=profile,
        )
        runs[label] = run_trials(config)
    return runs


class TestDeltaCorrectness:
    """Test error rates against the target confidence"""

    @pytest.mark.parametrize("label", list(CORPUS))
    def test_error_rate(self, corpus_runs, label):
        """Test that the Wilson upper bound of the error rate stays below 0.14"""
        stats, _ = corpus_runs[label]
        assert stats.trials == TRIALS
        assert stats.error_high <= MAX_WILSON_UPPER
        assert stats.capped_rate == 0.0

    @pytest.mark.parametrize("label", list(CORPUS))
    def test_error_rate_calibrated(self, calibrated_runs, label):
        """Test the same error bound with the calibrated budget constants"""
        stats, _ = calibrated_runs[label]
        assert stats.trials == TRIALS
        assert stats.error_high <= MAX_WILSON_UPPER
        assert stats.capped_rate == 0.0

    @pytest.mark.parametrize("label", list(CORPUS))
    def test_samples_within_envelope(self, corpus_runs, label):
        """Test total samples <= ENVELOPE_C * upper bound on every clean trial"""
        _, results = corpus_runs[label]
        bound = ENVELOPE_C * analyze(CORPUS[label], DELTA).upper_bound
        for result in results:
            if clean(result):
                assert result.total_samples <= bound, f"trial {result.trial}: {result.total_samples} > {bound}"

    def test_two_arm_terminates_early(self, two_arm):
        """Test that clean runs on a gap of 1/2 finish by round 2"""
        config = TrialConfig.build(instance=two_arm, trials=200, master_seed=5, algorithm_config=AlgorithmConfig())
        stats, results = run_trials(config)
        assert stats.error_rate <= 0.1
        for result in results:
            if clean(result):
                assert len(result.rounds) <= 2


class TestTelemetry:
    """Test round-level telemetry over the corpus runs"""

    @pytest.mark.parametrize("label", list(CORPUS))
    def test_observations_hold_without_contract_failures(self, corpus_runs, label):
        """Test threshold and remaining-arm bounds in every round of clean trials"""
        _, results = corpus_runs[label]
        decomp = decompose_groups(CORPUS[label])
        for result in results:
            if not clean(result):
                continue
            assert result.telemetry_ok
            for rt in result.rounds:
                if rt.interrupted:
                    continue
                assert rt.good is True
                assert rt.obs2_ok is True
                assert rt.valid is True
                assert rt.k_large <= 2 * decomp.size_large_at_least(rt.r)
                assert rt.k_small <= 2 * decomp.size_small_at_least(rt.r)

    @pytest.mark.parametrize("label", ["appendix_a(8,1/16)", "symmetric_best1(10,0.5,0.1)"])
    def test_round_good_rate(self, corpus_runs, label):
        """Test that all five contracts hold at least as often as 1 - 5 delta_r, up to sampling error"""
        stats, _ = corpus_runs[label]
        for r, rate in stats.round_good_rate.items():
            assert rate >= stats.round_good_bound[r] - 0.05

    def test_correct_answers_follow_valid_rounds(self, corpus_runs):
        """Test that clean trials always return the true answer"""
        for _, results in corpus_runs.values():
            for result in results:
                if clean(result) and not result.capped:
                    assert result.correct
