"""Uniform-sampling baseline with confidence-interval accept/reject."""

import math
from typing import Dict, FrozenSet, List, Optional

from ..config import AlgorithmConfig, LoggerMixin, get_config
from ..core.arms import RngStream, SampleLedger, pull_n
from ..core.exceptions import BudgetExhausted, ParameterError
from ..core.instance import Instance
from .telemetry import RoundTelemetry, RunResult


def confidence_radius(pulls: int, n: int, phase: int, delta: float) -> float:
    """sqrt(2 ln(4 n t^2 / delta) / N): holds for all arms and phases w.p. 1 - delta."""
    return math.sqrt(2.0 * math.log(4.0 * n * phase * phase / delta) / pulls)


class UniformBaseline(LoggerMixin):
    """Pull every undecided arm in lockstep, doubling the per-arm count each phase.

    After phase t each active arm has 2^t pulls. Sorted by empirical mean, an
    arm among the top k' (k' = arms still to accept) is accepted once its lower
    bound clears the upper bound of rank k'+1; an arm below is rejected once its
    upper bound falls under the lower bound of rank k'.
    """

    name = "uniform"

    def __init__(self, config: Optional[AlgorithmConfig] = None):
        self.config = config or get_config().algorithm

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
        run_start = ledger.total
        n = instance.n
        active: List[int] = list(range(n))
        accepted: List[int] = []
        sums: Dict[int, float] = {a: 0.0 for a in active}
        rounds: List[RoundTelemetry] = []
        capped = False
        pulls = 0
        phase = 0

        while True:
            need = instance.k - len(accepted)
            if need == 0:
                break
            if need == len(active):
                accepted.extend(active)
                active = []
                break
            if phase >= self.config.baseline_max_phases:
                capped = True
                break

            phase += 1
            target = 2 ** phase
            rt = RoundTelemetry(
                r=phase,
                k_large=need,
                k_small=len(active) - need,
                delta_r=delta / (4.0 * n * phase * phase),
            )
            round_start = ledger.total
            try:
                with ledger.tagged("uniform"):
                    for a in active:
                        sums[a] += pull_n(instance.arms[a], target - pulls, rng, ledger) * (target - pulls)
            except BudgetExhausted as e:
                rt.samples_this_round = ledger.total - round_start
                rt.interrupted = True
                rounds.append(rt)
                capped = True
                self.logger.warning("Sample cap reached", phase=phase, **e.details)
                break
            pulls = target

            radius = confidence_radius(pulls, n, phase, delta)
            ranked = sorted(active, key=lambda a: (-sums[a], a))
            emp = [sums[a] / pulls for a in ranked]
            boundary_high = emp[need - 1] - radius
            boundary_low = emp[need] + radius

            newly_accepted = [a for a, m in zip(ranked[:need], emp[:need]) if m - radius > boundary_low]
            newly_rejected = [a for a, m in zip(ranked[need:], emp[need:]) if m + radius < boundary_high]
            accepted.extend(newly_accepted)
            decided = set(newly_accepted) | set(newly_rejected)
            active = [a for a in active if a not in decided]

            rt.samples_this_round = ledger.total - round_start
            rt.accepted = len(newly_accepted)
            rt.rejected = len(newly_rejected)
            rounds.append(rt)

        answer: FrozenSet[int] = frozenset(accepted)
        if capped:
            need = instance.k - len(accepted)
            best = sorted(active, key=lambda a: (-sums[a], a))[:need]
            answer = answer | frozenset(best)
            self.logger.warning("Baseline capped; returning best guess", phases=phase)

        return RunResult(
            algorithm=self.name,
            answer=sorted(answer),
            rounds=rounds,
            total_samples=ledger.total - run_start,
            capped=capped,
            samples_by_tag=dict(ledger.by_tag),
        )


def uniform_baseline(
    instance: Instance,
    delta: float,
    config: Optional[AlgorithmConfig] = None,
    rng: Optional[RngStream] = None,
    ledger: Optional[SampleLedger] = None,
) -> RunResult:
    """Run the uniform baseline once; see :class:`UniformBaseline`."""
    return UniformBaseline(config).run(instance, delta, rng or RngStream(0), ledger)
