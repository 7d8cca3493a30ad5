"""Bilateral-Elimination: round-based Best-k-Arm that accepts and rejects from both ends."""

import math
from typing import Dict, FrozenSet, List, Optional, Tuple

from ..config import AlgorithmConfig, LoggerMixin, get_config, log_function_call
from ..core.arms import ArmSpec, RngStream, SampleLedger
from ..core.complexity import analyze
from ..core.exceptions import BudgetExhausted, ParameterError
from ..core.instance import Instance, decompose_groups, epsilon, top_k_set
from .subroutines import elim_large, elim_small, est_mean_large, est_mean_small, pac_best_k
from .telemetry import (
    EliminationTelemetry,
    RoundTelemetry,
    RunResult,
    answer_consistent,
    check_elim_fraction,
    check_elim_protected,
    check_est_mean,
    check_pac,
    check_remaining,
    check_thresholds,
    kth_largest,
)


def round_delta(delta: float, r: int) -> float:
    """delta_r = delta / (20 r^2)."""
    return delta / (20.0 * r * r)


def elimination_delta(
    delta: float, delta_r: float, k_large: int, k_small: int, variant: str = "proof"
) -> float:
    """Confidence handed to both Elim calls of a round.

    ``proof`` divides delta_r by max(1, min(k_large, k_small)); ``pseudocode``
    divides the overall delta instead.
    """
    base = delta_r if variant == "proof" else delta
    return base / max(1, min(k_large, k_small))


def sample_cap(instance: Instance, delta: float, config: AlgorithmConfig) -> int:
    """Hard pull budget: cap_mult * complexity_scale * upper bound at delta."""
    report = analyze(instance, delta)
    return math.ceil(config.cap_mult * config.complexity_scale * report.upper_bound)


def round_cap(instance: Instance, config: AlgorithmConfig) -> int:
    report = analyze(instance)
    if report.gap_k is None:
        return 0
    return math.ceil(math.log2(1.0 / report.gap_k)) + config.round_cap_slack


class BilateralElimination(LoggerMixin):
    """Runner for Bilateral-Elimination.

    With ``simulator`` set, every round also records whether the subroutine
    contracts held against the true means and checks the threshold and
    remaining-arm bounds that follow from them.
    """

    name = "bilateral"

    def __init__(self, config: Optional[AlgorithmConfig] = None, simulator: bool = True):
        self.config = config or get_config().algorithm
        self.simulator = simulator

    def run(
        self,
        instance: Instance,
        delta: float,
        rng: RngStream,
        ledger: Optional[SampleLedger] = None,
    ) -> RunResult:
        if not 0.0 < delta < 1.0:
            raise ParameterError(f"delta must lie in (0, 1), got {delta}", details={"field": "delta"})

        ledger = ledger or SampleLedger()
        all_ids = frozenset(arm.id for arm in instance.arms)
        if instance.k == instance.n:
            return RunResult(algorithm=self.name, answer=sorted(all_ids))

        if ledger.budget is None:
            ledger.budget = ledger.total + sample_cap(instance, delta, self.config)
        max_rounds = round_cap(instance, self.config)
        run_start = ledger.total

        self.logger.debug(
            "Starting Bilateral-Elimination",
            **log_function_call(
                "bilateral_elimination", n=instance.n, k=instance.k, delta=delta,
                budget=ledger.budget, max_rounds=max_rounds,
            ),
        )

        truth = top_k_set(instance) if self.simulator else frozenset()
        decomp = decompose_groups(instance) if self.simulator else None
        means = {arm.id: arm.mean for arm in instance.arms}

        remaining: FrozenSet[int] = all_ids
        accepted: FrozenSet[int] = frozenset()
        history_good = True
        rounds: List[RoundTelemetry] = []
        answer: Optional[FrozenSet[int]] = None
        capped = False
        r = 0

        while answer is None:
            r += 1
            k_large = instance.k - len(accepted)
            k_small = len(remaining) - k_large
            if k_large == 0:
                answer = accepted
                break
            if k_small == 0:
                answer = accepted | remaining
                break
            if r > max_rounds:
                capped = True
                break

            rt = RoundTelemetry(r=r, k_large=k_large, k_small=k_small, delta_r=round_delta(delta, r))
            if self.simulator:
                rt.valid = history_good and answer_consistent(truth, accepted, remaining)
                if rt.valid:
                    rt.obs3_ok = check_remaining(
                        k_large,
                        k_small,
                        decomp.size_large_at_least(r),
                        decomp.size_small_at_least(r),
                    )
                    if not rt.obs3_ok:
                        self.logger.warning("Remaining-arm bound violated", round=r, k_large=k_large, k_small=k_small)

            round_start = ledger.total
            try:
                survivors, removed = self._round(instance, remaining, rt, delta, means, rng, ledger)
            except BudgetExhausted as e:
                rt.samples_this_round = ledger.total - round_start
                rt.interrupted = True
                rounds.append(rt)
                capped = True
                self.logger.warning("Sample cap reached", round=r, **e.details)
                break

            rt.samples_this_round = ledger.total - round_start
            rt.accepted = len(removed)
            rt.rejected = len(remaining) - len(survivors) - len(removed)
            rounds.append(rt)
            if self.simulator:
                history_good = history_good and bool(rt.good)

            accepted = accepted | removed
            remaining = survivors

        if capped:
            answer = self._best_guess(instance, accepted, remaining, ledger)
            self.logger.warning("Run capped; returning best guess", rounds=len(rounds), samples=ledger.total - run_start)

        return RunResult(
            algorithm=self.name,
            answer=sorted(answer),
            rounds=rounds,
            total_samples=ledger.total - run_start,
            capped=capped,
            samples_by_tag=dict(ledger.by_tag),
        )

    def _round(
        self,
        instance: Instance,
        remaining: FrozenSet[int],
        rt: RoundTelemetry,
        delta: float,
        means: Dict[int, float],
        rng: RngStream,
        ledger: SampleLedger,
    ) -> Tuple[FrozenSet[int], FrozenSet[int]]:
        """Run one round; returns the next remaining set and the newly accepted arms."""
        sub = self.config.subroutines
        eps_r = epsilon(rt.r)
        acc = eps_r / 8.0
        arms = _arms(instance, remaining)

        with ledger.tagged("pac"):
            part = pac_best_k(arms, rt.k_large, acc, rt.delta_r, rng, ledger, sub)
        s_large = _arms(instance, part.s_large)
        s_small = _arms(instance, part.s_small)

        with ledger.tagged("est_mean_large"):
            theta_large = est_mean_large(s_small, acc, rt.delta_r, rng, ledger, sub)
        with ledger.tagged("est_mean_small"):
            theta_small = est_mean_small(s_large, acc, rt.delta_r, rng, ledger, sub)
        rt.theta_large, rt.theta_small = theta_large, theta_small

        rt.delta_prime_r = elimination_delta(
            delta, rt.delta_r, rt.k_large, rt.k_small, self.config.delta_prime_variant
        )
        upper = (theta_large + eps_r / 8.0, theta_large + eps_r / 4.0)
        lower = (theta_small - eps_r / 4.0, theta_small - eps_r / 8.0)

        with ledger.tagged("elim_large"):
            el = elim_large(s_large, upper[0], upper[1], rt.delta_prime_r, rng, ledger, sub)
        with ledger.tagged("elim_small"):
            es = elim_small(s_small, lower[0], lower[1], rt.delta_prime_r, rng, ledger, sub)

        rt.elim_large = EliminationTelemetry(rounds=el.rounds, survivors_per_round=el.survivors_per_round)
        rt.elim_small = EliminationTelemetry(rounds=es.rounds, survivors_per_round=es.survivors_per_round)

        if self.simulator:
            rt.elim_large.fraction_ok = check_elim_fraction(means, el.survivors, *upper, remove_high=True)
            rt.elim_large.protected_ok = check_elim_protected(
                means, part.s_large, el.survivors, *upper, remove_high=True
            )
            rt.elim_small.fraction_ok = check_elim_fraction(means, es.survivors, *lower, remove_high=False)
            rt.elim_small.protected_ok = check_elim_protected(
                means, part.s_small, es.survivors, *lower, remove_high=False
            )
            rt.contracts = {
                "pac": check_pac(means, part.s_large, part.s_small, acc),
                "est_large": check_est_mean(means, part.s_small, theta_large, acc, largest=True),
                "est_small": check_est_mean(means, part.s_large, theta_small, acc, largest=False),
                "elim_large": rt.elim_large.fraction_ok,
                "elim_small": rt.elim_small.fraction_ok,
            }
            rt.good = all(rt.contracts.values())
            if rt.good:
                rt.obs2_ok = check_thresholds(
                    theta_large,
                    theta_small,
                    mu_large=kth_largest(means, remaining, rt.k_large),
                    mu_small=kth_largest(means, remaining, rt.k_large + 1),
                    eps=eps_r,
                )
                if not rt.obs2_ok:
                    self.logger.warning("Threshold bound violated", round=rt.r)
            else:
                failed = [name for name, ok in rt.contracts.items() if not ok]
                self.logger.warning("Subroutine contract failed", round=rt.r, failed=failed)

        return el.survivors | es.survivors, el.removed

    @staticmethod
    def _best_guess(
        instance: Instance,
        accepted: FrozenSet[int],
        remaining: FrozenSet[int],
        ledger: SampleLedger,
    ) -> FrozenSet[int]:
        """Accepted arms plus the empirically best remaining ones; unpulled arms rank last."""
        need = instance.k - len(accepted)
        if need <= 0:
            return frozenset(sorted(accepted)[: instance.k])

        def key(arm_id: int) -> Tuple[float, int]:
            if ledger.pulls.get(arm_id, 0) == 0:
                return (math.inf, arm_id)
            return (-ledger.empirical_mean(arm_id), arm_id)

        return accepted | frozenset(sorted(remaining, key=key)[:need])


def _arms(instance: Instance, ids: FrozenSet[int]) -> List[ArmSpec]:
    return [instance.arms[i] for i in sorted(ids)]


def bilateral_elimination(
    instance: Instance,
    delta: float,
    config: Optional[AlgorithmConfig] = None,
    rng: Optional[RngStream] = None,
    ledger: Optional[SampleLedger] = None,
    simulator: bool = True,
) -> RunResult:
    """Run Bilateral-Elimination once; see :class:`BilateralElimination`."""
    return BilateralElimination(config, simulator=simulator).run(
        instance, delta, rng or RngStream(0), ledger
    )


__all__ = [
    "BilateralElimination",
    "bilateral_elimination",
    "elimination_delta",
    "round_cap",
    "round_delta",
    "sample_cap",
]
