"""Reward distributions, seeded sampling streams and pull accounting."""

from collections import defaultdict
from enum import Enum
from typing import Dict, Optional

import numpy as np
from numpy.random import Generator, Philox, SeedSequence
from pydantic import BaseModel, ConfigDict, Field, field_validator

from .exceptions import BudgetExhausted, ParameterError

MEAN_LOW = 0.0
MEAN_HIGH = 0.5
UINT64_MASK = (1 << 64) - 1


class Distribution(str, Enum):
    """Reward law of an arm."""

    GAUSSIAN = "gaussian"
    BERNOULLI = "bernoulli"


class ArmSpec(BaseModel):
    """One arm: its reward law and true mean (the simulator's ground truth)."""

    model_config = ConfigDict(frozen=True, use_enum_values=False)

    id: int = Field(ge=0, description="Position of the arm in its instance")
    dist: Distribution = Field(default=Distribution.GAUSSIAN, description="Reward law")
    mean: float = Field(description="True mean reward")

    @field_validator("mean")
    @classmethod
    def validate_mean(cls, v: float) -> float:
        if not MEAN_LOW <= v <= MEAN_HIGH:
            raise ValueError(f"Arm mean must lie in [0, 1/2], got {v}")
        return float(v)

    @classmethod
    def gaussian(cls, arm_id: int, mean: float) -> "ArmSpec":
        return cls(id=arm_id, dist=Distribution.GAUSSIAN, mean=mean)

    @classmethod
    def bernoulli(cls, arm_id: int, mean: float) -> "ArmSpec":
        return cls(id=arm_id, dist=Distribution.BERNOULLI, mean=mean)


class RngStream:
    """Counter-based (Philox) random stream keyed by ``(seed, stream_id)``.

    Each arm gets its own sub-stream derived from
    ``SeedSequence(seed, spawn_key=(stream_id, arm_id))``, so the draws of an
    arm do not depend on how pulls of other arms are interleaved.
    """

    def __init__(self, seed: int, stream_id: int = 0):
        if not 0 <= seed <= UINT64_MASK or not 0 <= stream_id <= UINT64_MASK:
            raise ParameterError(
                "seed and stream_id must be 64-bit unsigned integers",
                details={"field": "seed", "seed": seed, "stream_id": stream_id},
            )
        self.seed = seed
        self.stream_id = stream_id
        self._generators: Dict[int, Generator] = {}

    def generator(self, arm_id: int) -> Generator:
        gen = self._generators.get(arm_id)
        if gen is None:
            ss = SeedSequence(self.seed, spawn_key=(self.stream_id, arm_id))
            gen = Generator(Philox(ss))
            self._generators[arm_id] = gen
        return gen

    def auxiliary(self, purpose: int) -> Generator:
        """Generator for draws that belong to no arm (e.g. permutations)."""
        ss = SeedSequence(self.seed, spawn_key=(self.stream_id, UINT64_MASK, purpose))
        return Generator(Philox(ss))

    def __repr__(self) -> str:
        return f"RngStream(seed={self.seed}, stream_id={self.stream_id})"


class SampleLedger:
    """Per-arm pull counts and reward sums of one trial.

    ``budget`` is an optional hard cap on ``total``; a request that would
    cross it raises :class:`BudgetExhausted` before anything is drawn.
    Sums always hold rewards in the arm's own sign, even for negated draws.
    """

    def __init__(self, budget: Optional[int] = None):
        self.pulls: Dict[int, int] = defaultdict(int)
        self.sums: Dict[int, float] = defaultdict(float)
        self.by_tag: Dict[str, int] = defaultdict(int)
        self.total = 0
        self.budget = budget
        self.tag = "untagged"

    def reserve(self, n: int) -> None:
        if self.budget is not None and self.total + n > self.budget:
            raise BudgetExhausted(self.budget, n, self.total)

    def record(self, arm_id: int, n: int, reward_sum: float) -> None:
        self.pulls[arm_id] += n
        self.sums[arm_id] += reward_sum
        self.by_tag[self.tag] += n
        self.total += n

    def empirical_mean(self, arm_id: int) -> float:
        count = self.pulls.get(arm_id, 0)
        if count == 0:
            raise ParameterError(
                f"Arm {arm_id} has not been pulled", details={"field": "arm_id"}
            )
        return self.sums[arm_id] / count

    def tagged(self, tag: str) -> "_LedgerTag":
        """Context manager attributing pulls to ``tag`` for per-subroutine accounting."""
        return _LedgerTag(self, tag)


class _LedgerTag:
    def __init__(self, ledger: SampleLedger, tag: str):
        self.ledger = ledger
        self.tag = tag
        self.previous = ledger.tag

    def __enter__(self) -> SampleLedger:
        self.previous = self.ledger.tag
        self.ledger.tag = self.tag
        return self.ledger

    def __exit__(self, *exc: object) -> None:
        self.ledger.tag = self.previous


def _draw_sum(arm: ArmSpec, n: int, gen: Generator) -> float:
    # Sufficient statistic of n i.i.d. draws: exact in law, O(1) in n.
    if arm.dist is Distribution.GAUSSIAN:
        return float(gen.normal(loc=n * arm.mean, scale=np.sqrt(n)))
    return float(gen.binomial(n, arm.mean))


def sample(arm: ArmSpec, rng: RngStream, ledger: SampleLedger) -> float:
    """Draw one reward from ``arm`` and record it in ``ledger``."""
    ledger.reserve(1)
    value = _draw_sum(arm, 1, rng.generator(arm.id))
    ledger.record(arm.id, 1, value)
    return value


def pull_n(
    arm: ArmSpec,
    n: int,
    rng: RngStream,
    ledger: SampleLedger,
    negated: bool = False,
) -> float:
    """Pull ``arm`` ``n`` times and return the empirical mean of the batch.

    With ``negated`` the returned mean is that of the negated rewards, which
    is how the negation constructions of PAC-Best-k and Elim read an arm.
    """
    if n < 1:
        raise ParameterError(f"pull_n requires n >= 1, got {n}", details={"field": "n"})
    ledger.reserve(n)
    total = _draw_sum(arm, n, rng.generator(arm.id))
    ledger.record(arm.id, n, total)
    mean = total / n
    return -mean if negated else mean
