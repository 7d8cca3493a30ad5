"""
Unit tests for arms, sampling streams and the sample ledger
"""

import numpy as np
import pytest
from pydantic import ValidationError
from scipy.stats import kstest, norm

from bestk_bandit.core import (
    ArmSpec,
    BudgetExhausted,
    Distribution,
    ParameterError,
    RngStream,
    SampleLedger,
    pull_n,
    sample,
)

pytestmark = pytest.mark.unit


class TestArmSpec:
    """Test the arm model"""

    def test_defaults_to_gaussian(self):
        """Test that arms are Gaussian unless stated"""
        arm = ArmSpec(id=0, mean=0.25)
        assert arm.dist is Distribution.GAUSSIAN

    @pytest.mark.parametrize("mean", [-0.01, 0.51, 1.0])
    def test_mean_out_of_range(self, mean):
        """Test that means outside [0, 1/2] are rejected"""
        with pytest.raises(ValidationError):
            ArmSpec.gaussian(0, mean)

    def test_boundary_means_accepted(self):
        """Test that 0 and 1/2 are valid means"""
        assert ArmSpec.bernoulli(0, 0.0).mean == 0.0
        assert ArmSpec.bernoulli(1, 0.5).mean == 0.5

    def test_frozen(self):
        """Test that arms are immutable"""
        arm = ArmSpec.gaussian(0, 0.1)
        with pytest.raises(ValidationError):
            arm.mean = 0.2


class TestRngStream:
    """Test seeded sampling streams"""

    @pytest.mark.parametrize("seed,stream", [(-1, 0), (2**64, 0), (0, -1)])
    def test_rejects_non_64bit(self, seed, stream):
        """Test that seeds must be 64-bit unsigned"""
        with pytest.raises(ParameterError):
            RngStream(seed, stream)

    def test_same_seed_same_draws(self):
        """Test reproducibility for equal (seed, stream_id)"""
        arm = ArmSpec.gaussian(3, 0.2)
        a = pull_n(arm, 7, RngStream(42, 1), SampleLedger())
        b = pull_n(arm, 7, RngStream(42, 1), SampleLedger())
        assert a == b

    def test_streams_differ(self):
        """Test that different stream ids give different draws"""
        arm = ArmSpec.gaussian(0, 0.2)
        a = pull_n(arm, 5, RngStream(42, 1), SampleLedger())
        b = pull_n(arm, 5, RngStream(42, 2), SampleLedger())
        assert a != b

    def test_arm_draws_independent_of_interleaving(self):
        """Test that an arm's draws do not depend on other arms' pulls"""
        a0, a1 = ArmSpec.gaussian(0, 0.1), ArmSpec.gaussian(1, 0.4)
        first, second = RngStream(9), RngStream(9)

        x0 = pull_n(a0, 3, first, SampleLedger())
        x1 = pull_n(a1, 3, first, SampleLedger())
        y1 = pull_n(a1, 3, second, SampleLedger())
        y0 = pull_n(a0, 3, second, SampleLedger())

        assert (x0, x1) == (y0, y1)


class TestPulls:
    """Test pull_n, sample and ledger accounting"""

    def test_pull_n_requires_positive_count(self, rng, ledger):
        """Test that n < 1 is rejected"""
        with pytest.raises(ParameterError):
            pull_n(ArmSpec.gaussian(0, 0.1), 0, rng, ledger)

    def test_ledger_counts(self, rng, ledger):
        """Test pull counts and totals"""
        arm = ArmSpec.gaussian(2, 0.3)
        pull_n(arm, 10, rng, ledger)
        sample(arm, rng, ledger)
        assert ledger.pulls[2] == 11
        assert ledger.total == 11

    def test_negated_pull(self):
        """Test that negation flips the returned mean but not the ledger sum"""
        arm = ArmSpec.gaussian(0, 0.3)
        plain_ledger, neg_ledger = SampleLedger(), SampleLedger()
        plain = pull_n(arm, 50, RngStream(5), plain_ledger)
        neg = pull_n(arm, 50, RngStream(5), neg_ledger, negated=True)
        assert neg == -plain
        assert plain_ledger.sums[0] == neg_ledger.sums[0]
        assert neg_ledger.empirical_mean(0) == pytest.approx(plain)

    def test_bernoulli_sums_are_counts(self, rng, ledger):
        """Test that Bernoulli batches return a count over n"""
        arm = ArmSpec.bernoulli(0, 0.4)
        mean = pull_n(arm, 1000, rng, ledger)
        assert 0.0 <= mean <= 1.0
        assert ledger.sums[0] == int(ledger.sums[0])

    def test_bernoulli_zero_mean(self, rng, ledger):
        """Test that a Bernoulli(0) arm never pays out"""
        assert pull_n(ArmSpec.bernoulli(0, 0.0), 500, rng, ledger) == 0.0

    def test_large_batches_are_cheap_and_concentrated(self, rng, ledger):
        """Test that huge batches concentrate around the true mean"""
        mean = pull_n(ArmSpec.gaussian(0, 0.25), 10**9, rng, ledger)
        assert mean == pytest.approx(0.25, abs=1e-3)
        assert ledger.total == 10**9

    def test_empirical_mean_of_unpulled_arm(self, ledger):
        """Test that unpulled arms have no empirical mean"""
        with pytest.raises(ParameterError):
            ledger.empirical_mean(4)


class TestBudget:
    """Test hard ledger budgets"""

    def test_exceeding_budget_raises_before_drawing(self, rng):
        """Test that an over-budget request draws nothing"""
        ledger = SampleLedger(budget=10)
        pull_n(ArmSpec.gaussian(0, 0.1), 6, rng, ledger)
        with pytest.raises(BudgetExhausted) as exc_info:
            pull_n(ArmSpec.gaussian(1, 0.1), 5, rng, ledger)
        assert ledger.total == 6
        assert ledger.pulls.get(1, 0) == 0
        assert exc_info.value.details["requested"] == 5

    def test_budget_can_be_used_exactly(self, rng):
        """Test that the budget itself is reachable"""
        ledger = SampleLedger(budget=10)
        pull_n(ArmSpec.gaussian(0, 0.1), 10, rng, ledger)
        assert ledger.total == 10


class TestTags:
    """Test per-tag accounting"""

    def test_tagged_counts(self, rng, ledger):
        """Test that pulls are attributed to the active tag"""
        arm = ArmSpec.gaussian(0, 0.1)
        with ledger.tagged("pac"):
            pull_n(arm, 4, rng, ledger)
            with ledger.tagged("elim_large"):
                pull_n(arm, 2, rng, ledger)
            pull_n(arm, 1, rng, ledger)
        pull_n(arm, 3, rng, ledger)

        assert ledger.by_tag == {"pac": 5, "elim_large": 2, "untagged": 3}
        assert ledger.tag == "untagged"


class TestDistribution:
    """Kolmogorov-Smirnov checks of Gaussian draws"""

    SIGNIFICANCE = 1e-3

    def test_single_draws_are_unit_normal(self):
        """Test 10^5 single rewards against N(mu, 1)"""
        arm = ArmSpec.gaussian(0, 0.3)
        rng = RngStream(seed=17)
        ledger = SampleLedger()
        draws = np.array([sample(arm, rng, ledger) for _ in range(100_000)])
        result = kstest(draws, norm(loc=0.3, scale=1.0).cdf)
        assert result.pvalue > self.SIGNIFICANCE

    def test_batch_sums_match_n_draws(self):
        """Test batch sums of pull_n against N(n mu, n)"""
        arm = ArmSpec.gaussian(2, 0.125)
        n = 50
        rng = RngStream(seed=23, stream_id=4)
        ledger = SampleLedger()
        sums = np.array([n * pull_n(arm, n, rng, ledger) for _ in range(20_000)])
        assert ledger.sums[2] == pytest.approx(sums.sum())
        result = kstest(sums, norm(loc=n * 0.125, scale=np.sqrt(n)).cdf)
        assert result.pvalue > self.SIGNIFICANCE
