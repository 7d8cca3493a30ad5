"""Aggregation of trial results: error rates, sample statistics, telemetry pass rates."""

import math
from collections import Counter, defaultdict
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, Field
from scipy.stats import norm

from ..algorithms.telemetry import CONTRACT_NAMES
from .records import TrialResult

Z_95 = float(norm.ppf(0.975))


def wilson_interval(successes: int, total: int, z: float = Z_95) -> Tuple[float, float]:
    """Wilson score interval for a binomial proportion."""
    if total <= 0:
        return (0.0, 1.0)
    p = successes / total
    z2 = z * z
    denom = 1.0 + z2 / total
    center = (p + z2 / (2.0 * total)) / denom
    margin = z * math.sqrt(p * (1.0 - p) / total + z2 / (4.0 * total * total)) / denom
    low = 0.0 if successes == 0 else max(0.0, center - margin)
    high = 1.0 if successes == total else min(1.0, center + margin)
    return (low, high)


def _rate(hits: int, total: int) -> Optional[float]:
    return hits / total if total else None


class AggregateStats(BaseModel):
    """One (instance, algorithm, delta) cell of a run or sweep."""

    label: str
    algorithm: str
    n: int
    k: int
    delta: float
    trials: int
    errors: int
    error_rate: float
    error_low: float
    error_high: float
    samples_mean: float
    samples_median: float
    samples_p95: float
    capped_rate: float
    rounds_histogram: Dict[int, int] = Field(default_factory=dict, description="Trials by number of rounds")
    samples_per_round: Dict[int, float] = Field(default_factory=dict, description="Mean pulls spent in round r")
    round_good_rate: Dict[int, float] = Field(default_factory=dict, description="Frequency of all five contracts holding")
    round_good_bound: Dict[int, float] = Field(default_factory=dict, description="1 - 5 delta_r")
    contract_pass_rate: Dict[str, float] = Field(default_factory=dict)
    obs2_pass_rate: Optional[float] = None
    obs3_pass_rate: Optional[float] = None
    telemetry_ok_rate: Optional[float] = None

    def csv_row(self) -> Dict[str, object]:
        """Flat view for the aggregate CSV."""
        row = {
            name: getattr(self, name)
            for name in (
                "label", "algorithm", "n", "k", "delta", "trials", "errors",
                "error_rate", "error_low", "error_high", "samples_mean",
                "samples_median", "samples_p95", "capped_rate",
                "obs2_pass_rate", "obs3_pass_rate", "telemetry_ok_rate",
            )
        }
        for name in CONTRACT_NAMES:
            row[f"pass_{name}"] = self.contract_pass_rate.get(name)
        return row


def aggregate(
    results: Sequence[TrialResult], label: str, n: int, k: int, delta: float
) -> AggregateStats:
    """Reduce an ordered stream of trial results to an :class:`AggregateStats`."""
    trials = len(results)
    errors = sum(1 for t in results if not t.correct)
    low, high = wilson_interval(errors, trials)
    samples = np.array([t.total_samples for t in results], dtype=float)
    if trials:
        mean, median, p95 = (
            float(samples.mean()),
            float(np.median(samples)),
            float(np.percentile(samples, 95)),
        )
    else:
        mean = median = p95 = 0.0

    histogram = Counter(len(t.rounds) for t in results)
    round_samples: Dict[int, List[int]] = defaultdict(list)
    good_counts: Dict[int, List[bool]] = defaultdict(list)
    bounds: Dict[int, float] = {}
    contract_hits: Dict[str, List[bool]] = defaultdict(list)
    obs2: List[bool] = []
    obs3: List[bool] = []

    for t in results:
        for rt in t.rounds:
            round_samples[rt.r].append(rt.samples_this_round)
            if rt.good is not None:
                good_counts[rt.r].append(rt.good)
                bounds[rt.r] = 1.0 - 5.0 * rt.delta_r
            for name, ok in rt.contracts.items():
                contract_hits[name].append(ok)
            if rt.obs2_ok is not None:
                obs2.append(rt.obs2_ok)
            if rt.obs3_ok is not None:
                obs3.append(rt.obs3_ok)

    checked = [t.telemetry_ok for t in results if t.rounds and t.rounds[0].contracts]
    return AggregateStats(
        label=label,
        algorithm=results[0].algorithm if results else "",
        n=n,
        k=k,
        delta=delta,
        trials=trials,
        errors=errors,
        error_rate=errors / trials if trials else 0.0,
        error_low=low,
        error_high=high,
        samples_mean=mean,
        samples_median=median,
        samples_p95=p95,
        capped_rate=sum(1 for t in results if t.capped) / trials if trials else 0.0,
        rounds_histogram=dict(sorted(histogram.items())),
        samples_per_round={r: float(np.mean(v)) for r, v in sorted(round_samples.items())},
        round_good_rate={r: sum(v) / len(v) for r, v in sorted(good_counts.items())},
        round_good_bound=dict(sorted(bounds.items())),
        contract_pass_rate={name: sum(v) / len(v) for name, v in sorted(contract_hits.items())},
        obs2_pass_rate=_rate(sum(obs2), len(obs2)),
        obs3_pass_rate=_rate(sum(obs3), len(obs3)),
        telemetry_ok_rate=_rate(sum(checked), len(checked)),
    )
