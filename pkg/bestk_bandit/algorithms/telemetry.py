"""Run results, per-round telemetry and simulator-mode contract checks.

The checks compare subroutine outputs with the true means of the simulated
instance. Comparisons allow an absolute slack of ``CONTRACT_TOL``.
"""

from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional

from pydantic import BaseModel, Field

CONTRACT_TOL = 1e-12

CONTRACT_NAMES = ("pac", "est_large", "est_small", "elim_large", "elim_small")


class EliminationTelemetry(BaseModel):
    """What one Elim call did and whether its guarantees held."""

    rounds: int
    survivors_per_round: List[int]
    fraction_ok: Optional[bool] = Field(default=None, description="At most |T|/10 arms beyond the far threshold")
    protected_ok: Optional[bool] = Field(default=None, description="Every arm behind the near threshold survived")


class RoundTelemetry(BaseModel):
    """State and outcomes of one round.

    Fields that only make sense for a completed Bilateral-Elimination round
    are ``None`` for baseline phases and for a round interrupted by the cap.
    """

    r: int
    k_large: int
    k_small: int
    delta_r: float
    delta_prime_r: Optional[float] = None
    theta_large: Optional[float] = None
    theta_small: Optional[float] = None
    samples_this_round: int = 0
    accepted: int = Field(default=0, description="Arms added to the answer this round")
    rejected: int = Field(default=0, description="Arms discarded this round")
    contracts: Dict[str, bool] = Field(default_factory=dict)
    good: Optional[bool] = None
    valid: Optional[bool] = None
    obs2_ok: Optional[bool] = Field(default=None, description="Threshold bounds, checked when good")
    obs3_ok: Optional[bool] = Field(default=None, description="Remaining-arm bounds, checked when valid")
    elim_large: Optional[EliminationTelemetry] = None
    elim_small: Optional[EliminationTelemetry] = None
    interrupted: bool = False


class RunResult(BaseModel):
    """Outcome of one algorithm run on one instance."""

    algorithm: str
    answer: List[int] = Field(description="Returned arm ids in ascending order")
    rounds: List[RoundTelemetry] = Field(default_factory=list)
    total_samples: int = 0
    capped: bool = False
    samples_by_tag: Dict[str, int] = Field(default_factory=dict)

    @property
    def contract_failures(self) -> int:
        return sum(
            1 for rt in self.rounds for ok in rt.contracts.values() if not ok
        )

    @property
    def telemetry_ok(self) -> bool:
        """No threshold or remaining-arm bound failed in any round."""
        return all(rt.obs2_ok is not False and rt.obs3_ok is not False for rt in self.rounds)


def kth_largest(means: Mapping[int, float], ids: Iterable[int], k: int) -> float:
    """Mean of the k-th largest arm among ``ids`` (1-based)."""
    ordered = sorted((means[i] for i in ids), reverse=True)
    return ordered[k - 1]


def check_pac(
    means: Mapping[int, float],
    s_large: FrozenSet[int],
    s_small: FrozenSet[int],
    eps: float,
) -> bool:
    """Accepted arms reach mu_[k] - eps and rejected arms stay below mu_[k+1] + eps."""
    k = len(s_large)
    ids = s_large | s_small
    if k == 0 or k == len(ids):
        return True
    mu_k = kth_largest(means, ids, k)
    mu_k1 = kth_largest(means, ids, k + 1)
    return all(means[a] >= mu_k - eps - CONTRACT_TOL for a in s_large) and all(
        means[a] <= mu_k1 + eps + CONTRACT_TOL for a in s_small
    )


def check_est_mean(
    means: Mapping[int, float], ids: Iterable[int], value: float, eps: float, largest: bool
) -> bool:
    values = [means[a] for a in ids]
    target = max(values) if largest else min(values)
    return abs(value - target) <= eps + CONTRACT_TOL


def check_elim_fraction(
    means: Mapping[int, float],
    survivors: FrozenSet[int],
    theta_small: float,
    theta_large: float,
    remove_high: bool,
) -> bool:
    """At most |T|/10 survivors lie beyond the threshold the call removes."""
    if remove_high:
        beyond = sum(1 for a in survivors if means[a] >= theta_large)
    else:
        beyond = sum(1 for a in survivors if means[a] <= theta_small)
    return 10 * beyond <= len(survivors)


def check_elim_protected(
    means: Mapping[int, float],
    arms: Iterable[int],
    survivors: FrozenSet[int],
    theta_small: float,
    theta_large: float,
    remove_high: bool,
) -> bool:
    """Arms on the protected side of the near threshold were all kept."""
    if remove_high:
        protected = [a for a in arms if means[a] <= theta_small]
    else:
        protected = [a for a in arms if means[a] >= theta_large]
    return all(a in survivors for a in protected)


def check_thresholds(
    theta_large: float, theta_small: float, mu_large: float, mu_small: float, eps: float
) -> bool:
    """theta_large is within [-eps/8, +eps/4] of mu_small, theta_small within [-eps/4, +eps/8] of mu_large."""
    return (
        mu_small - eps / 8 - CONTRACT_TOL <= theta_large <= mu_small + eps / 4 + CONTRACT_TOL
        and mu_large - eps / 4 - CONTRACT_TOL <= theta_small <= mu_large + eps / 8 + CONTRACT_TOL
    )


def check_remaining(
    k_large: int, k_small: int, size_large_at_least: int, size_small_at_least: int
) -> bool:
    return k_large <= 2 * size_large_at_least and k_small <= 2 * size_small_at_least


def answer_consistent(
    truth: FrozenSet[int], accepted: FrozenSet[int], remaining: FrozenSet[int]
) -> bool:
    """Accepted arms are all correct and every missing correct arm is still in play."""
    return accepted <= truth and (truth - accepted) <= remaining
