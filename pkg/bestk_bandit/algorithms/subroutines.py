"""Budgeted sampling subroutines: PAC-Best-k, EstMean and Elim.

PAC-Best-k is realised by uniform sampling followed by an empirical top-k
(or bottom-(|S|-k) on negated rewards when k > |S|/2). Elim-Small and
EstMean-Small share their implementation with the large variants through
reward negation. Empirical ties are broken towards the lower arm id.
"""

import math
from typing import Dict, FrozenSet, List, Optional, Sequence

from pydantic import BaseModel, Field

from ..config import SubroutineConfig
from ..core.arms import ArmSpec, RngStream, SampleLedger, pull_n
from ..core.exceptions import ParameterError


class PartitionResult(BaseModel):
    """Output of PAC-Best-k: |s_large| = k and s_large, s_small partition the input."""

    s_large: FrozenSet[int]
    s_small: FrozenSet[int]
    samples_used: int
    per_arm_pulls: int = Field(default=0, description="Pulls spent on every input arm")


class EliminationResult(BaseModel):
    """Output of Elim-Large / Elim-Small with its round log."""

    survivors: FrozenSet[int]
    removed: FrozenSet[int]
    rounds: int
    survivors_per_round: List[int] = Field(description="|survivors| at the start of each round")
    pulls_per_round: List[int] = Field(description="Pulls per surviving arm in each round")
    samples_used: int


def _check_delta(delta: float) -> None:
    if not 0.0 < delta < 1.0:
        raise ParameterError(f"delta must lie in (0, 1), got {delta}", details={"field": "delta"})


def _check_eps(eps: float) -> None:
    if not 0.0 < eps <= 0.5:
        raise ParameterError(f"eps must lie in (0, 1/2], got {eps}", details={"field": "eps"})


def pac_budget(size: int, k: int, eps: float, delta: float, config: SubroutineConfig) -> int:
    """Per-arm pulls of PAC-Best-k: ceil(c eps^-2 (ln(2/delta) + ln min(k, |S|-k) + 1))."""
    m = min(k, size - k)
    if m <= 0:
        return 0
    return math.ceil(
        config.pac_budget_const * eps ** -2 * (math.log(2.0 / delta) + math.log(m) + 1.0)
    )


def est_mean_budget(eps: float, delta: float, config: SubroutineConfig) -> int:
    """Re-sampling pulls of EstMean: ceil(c (eps/2)^-2 ln(4/delta))."""
    return math.ceil(config.em_budget_const * (eps / 2.0) ** -2 * math.log(4.0 / delta))


def elim_round_budget(
    theta_small: float, theta_large: float, delta: float, t: int, config: SubroutineConfig
) -> int:
    """Per-arm pulls of elimination round t at confidence delta/(4t^2)."""
    delta_t = delta / (4.0 * t * t)
    return math.ceil(
        config.elim_round_const * (theta_large - theta_small) ** -2 * math.log(2.0 / delta_t)
    )


def _by_id(arms: Sequence[ArmSpec]) -> List[ArmSpec]:
    return sorted(arms, key=lambda arm: arm.id)


def pac_best_k(
    arms: Sequence[ArmSpec],
    k: int,
    eps: float,
    delta: float,
    rng: RngStream,
    ledger: SampleLedger,
    config: Optional[SubroutineConfig] = None,
) -> PartitionResult:
    """Partition ``arms`` into an approximate top-k and the rest."""
    config = config or SubroutineConfig()
    size = len(arms)
    if not 1 <= k <= size:
        raise ParameterError(f"k must satisfy 1 <= k <= |S| = {size}, got {k}", details={"field": "k"})
    _check_eps(eps)
    _check_delta(delta)

    ids = frozenset(arm.id for arm in arms)
    if k == size:
        return PartitionResult(s_large=ids, s_small=frozenset(), samples_used=0)

    per_arm = pac_budget(size, k, eps, delta, config)
    negate = k > size / 2
    start = ledger.total
    estimates: Dict[int, float] = {}
    for arm in _by_id(arms):
        estimates[arm.id] = pull_n(arm, per_arm, rng, ledger, negated=negate)

    ranked = sorted(estimates, key=lambda arm_id: (-estimates[arm_id], arm_id))
    if negate:
        # Bottom |S|-k of the original rewards are the top of the negated ones.
        s_small = frozenset(ranked[: size - k])
        s_large = ids - s_small
    else:
        s_large = frozenset(ranked[:k])
        s_small = ids - s_large

    return PartitionResult(
        s_large=s_large,
        s_small=s_small,
        samples_used=ledger.total - start,
        per_arm_pulls=per_arm,
    )


def _est_mean(
    arms: Sequence[ArmSpec],
    eps: float,
    delta: float,
    rng: RngStream,
    ledger: SampleLedger,
    config: SubroutineConfig,
    largest: bool,
) -> float:
    if not arms:
        raise ParameterError("EstMean needs a nonempty arm set", details={"field": "S"})
    _check_eps(eps)
    _check_delta(delta)

    if len(arms) == 1:
        chosen = arms[0]
    else:
        # k = |S|-1 selects the single smallest arm through the negation path.
        k = 1 if largest else len(arms) - 1
        part = pac_best_k(arms, k, eps / 2.0, delta / 2.0, rng, ledger, config)
        (chosen_id,) = part.s_large if largest else part.s_small
        chosen = next(arm for arm in arms if arm.id == chosen_id)

    return pull_n(chosen, est_mean_budget(eps, delta, config), rng, ledger)


def est_mean_large(
    arms: Sequence[ArmSpec],
    eps: float,
    delta: float,
    rng: RngStream,
    ledger: SampleLedger,
    config: Optional[SubroutineConfig] = None,
) -> float:
    """Estimate max mean of ``arms`` to within eps with probability 1 - delta."""
    return _est_mean(arms, eps, delta, rng, ledger, config or SubroutineConfig(), largest=True)


def est_mean_small(
    arms: Sequence[ArmSpec],
    eps: float,
    delta: float,
    rng: RngStream,
    ledger: SampleLedger,
    config: Optional[SubroutineConfig] = None,
) -> float:
    """Estimate min mean of ``arms`` to within eps with probability 1 - delta."""
    return _est_mean(arms, eps, delta, rng, ledger, config or SubroutineConfig(), largest=False)


def _eliminate(
    arms: Sequence[ArmSpec],
    theta_small: float,
    theta_large: float,
    delta: float,
    rng: RngStream,
    ledger: SampleLedger,
    config: SubroutineConfig,
    remove_high: bool,
) -> EliminationResult:
    if not theta_small < theta_large:
        raise ParameterError(
            f"Inverted thresholds: theta_small={theta_small} >= theta_large={theta_large}",
            details={"field": "theta_small"},
        )
    _check_delta(delta)

    # Work on signed rewards so both variants remove "high" arms.
    sign = 1.0 if remove_high else -1.0
    cut = sign * (theta_small + theta_large) / 2.0
    survivors = _by_id(arms)
    start = ledger.total
    sizes: List[int] = []
    pulls: List[int] = []
    t = 0

    while survivors:
        t += 1
        m_t = elim_round_budget(theta_small, theta_large, delta, t, config)
        sizes.append(len(survivors))
        pulls.append(m_t)
        keep = [
            arm
            for arm in survivors
            if pull_n(arm, m_t, rng, ledger, negated=not remove_high) < cut
        ]
        removed = len(survivors) - len(keep)
        stop = removed < config.elim_stop_fraction * len(survivors)
        survivors = keep
        if stop:
            break

    kept = frozenset(arm.id for arm in survivors)
    return EliminationResult(
        survivors=kept,
        removed=frozenset(arm.id for arm in arms) - kept,
        rounds=t,
        survivors_per_round=sizes,
        pulls_per_round=pulls,
        samples_used=ledger.total - start,
    )


def elim_large(
    arms: Sequence[ArmSpec],
    theta_small: float,
    theta_large: float,
    delta: float,
    rng: RngStream,
    ledger: SampleLedger,
    config: Optional[SubroutineConfig] = None,
) -> EliminationResult:
    """Remove arms whose empirical mean reaches the threshold midpoint."""
    return _eliminate(
        arms, theta_small, theta_large, delta, rng, ledger, config or SubroutineConfig(), True
    )


def elim_small(
    arms: Sequence[ArmSpec],
    theta_small: float,
    theta_large: float,
    delta: float,
    rng: RngStream,
    ledger: SampleLedger,
    config: Optional[SubroutineConfig] = None,
) -> EliminationResult:
    """Remove arms whose empirical mean falls to the threshold midpoint."""
    return _eliminate(
        arms, theta_small, theta_large, delta, rng, ledger, config or SubroutineConfig(), False
    )
