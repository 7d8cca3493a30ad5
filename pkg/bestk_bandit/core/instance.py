"""Best-k-Arm instances, gaps and arm-group decomposition."""

import json
import math
from pathlib import Path
from typing import Any, Dict, FrozenSet, List, Optional, Tuple, Union

import numpy as np
from numpy.random import Generator, Philox, SeedSequence
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from .arms import ArmSpec
from .exceptions import HarnessIOError, InstanceValidationError, ParameterError

# Relative tolerance used to snap gaps onto a power of two at level edges.
LEVEL_REL_TOL = 1e-12


class Instance(BaseModel):
    """An ordered list of arms plus the target ``k``.

    ``permutation`` records provenance: arm ``i`` of this instance is arm
    ``permutation[i]`` of the instance it was permuted from.
    """

    model_config = ConfigDict(frozen=True)

    k: int = Field(description="Number of arms to identify")
    arms: Tuple[ArmSpec, ...] = Field(description="Arms, ids equal to positions")
    permutation_seed: Optional[int] = Field(default=None, description="Seed of the last permutation")
    permutation: Optional[Tuple[int, ...]] = Field(default=None, description="Original id of each arm")

    @model_validator(mode="before")
    @classmethod
    def assign_ids(cls, data: Any) -> Any:
        # Instance files list arms without ids; ids are positions.
        if isinstance(data, dict) and "arms" in data:
            arms = []
            for i, arm in enumerate(data["arms"]):
                if isinstance(arm, dict) and "id" not in arm:
                    arm = {**arm, "id": i}
                arms.append(arm)
            data = {**data, "arms": arms}
        return data

    @model_validator(mode="after")
    def validate_instance(self) -> "Instance":
        n = len(self.arms)
        if n == 0:
            raise ValueError("An instance needs at least one arm")
        if any(arm.id != i for i, arm in enumerate(self.arms)):
            raise ValueError("Arm ids must equal their positions 0..n-1")
        if not 1 <= self.k <= n:
            raise ValueError(f"k must satisfy 1 <= k <= {n}, got {self.k}")
        if self.permutation is not None and sorted(self.permutation) != list(range(n)):
            raise ValueError("permutation must be a permutation of 0..n-1")
        if self.k < n:
            ordered = sorted((arm.mean for arm in self.arms), reverse=True)
            if not ordered[self.k - 1] > ordered[self.k]:
                raise ValueError(
                    f"Tie at the k/k+1 boundary: mu_[k] = mu_[k+1] = {ordered[self.k]}"
                )
        return self

    @classmethod
    def build(
        cls,
        means: List[float],
        k: int,
        dist: str = "gaussian",
        permutation_seed: Optional[int] = None,
    ) -> "Instance":
        """Construct and validate an instance from plain means."""
        return cls.parse(
            {
                "k": k,
                "arms": [{"dist": dist, "mean": m} for m in means],
                "permutation_seed": permutation_seed,
            }
        )

    @classmethod
    def parse(cls, data: Dict[str, Any]) -> "Instance":
        try:
            return cls.model_validate(data)
        except ValidationError as e:
            first = e.errors()[0]
            field = ".".join(str(p) for p in first.get("loc", ())) or "instance"
            raise InstanceValidationError(
                f"Invalid instance ({field}): {first.get('msg')}",
                details={"field": field, "errors": e.errors(include_url=False)},
            ) from e

    @property
    def n(self) -> int:
        return len(self.arms)

    @property
    def means(self) -> np.ndarray:
        return np.array([arm.mean for arm in self.arms], dtype=float)

    def sorted_means(self) -> List[float]:
        return sorted((arm.mean for arm in self.arms), reverse=True)

    def original_id(self, arm_id: int) -> int:
        """Map an arm id back through the recorded permutation."""
        return self.permutation[arm_id] if self.permutation is not None else arm_id

    def to_file_dict(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {
            "k": self.k,
            "arms": [{"dist": arm.dist.value, "mean": arm.mean} for arm in self.arms],
            "permutation_seed": self.permutation_seed,
        }
        if self.permutation is not None:
            data["permutation"] = list(self.permutation)
        return data


class ArmGroupDecomposition(BaseModel):
    """Arms grouped by gap level: level r holds gaps in (2^-(r+1), 2^-r]."""

    model_config = ConfigDict(frozen=True)

    n: int
    k: int
    groups_large: Dict[int, List[int]]
    groups_small: Dict[int, List[int]]
    gaps: Dict[int, float]
    levels: Dict[int, int]
    max_level: int

    def size_large(self, r: int) -> int:
        return len(self.groups_large.get(r, ()))

    def size_small(self, r: int) -> int:
        return len(self.groups_small.get(r, ()))

    def size_large_at_least(self, r: int) -> int:
        """|G^large_{>=r}|."""
        return sum(len(ids) for level, ids in self.groups_large.items() if level >= r)

    def size_small_at_least(self, r: int) -> int:
        """|G^small_{>=r}|."""
        return sum(len(ids) for level, ids in self.groups_small.items() if level >= r)


def epsilon(r: int) -> float:
    """eps_r = 2^-r."""
    return math.ldexp(1.0, -r)


def gap_level(gap_value: float) -> int:
    """Level r with gap in (eps_{r+1}, eps_r], exact for dyadic gaps."""
    if not 0 < gap_value <= 0.5 * (1 + LEVEL_REL_TOL):
        raise ParameterError(
            f"Gap must lie in (0, 1/2], got {gap_value}", details={"field": "gap"}
        )
    mantissa, exponent = math.frexp(gap_value)
    # gap = mantissa * 2^exponent with mantissa in [0.5, 1)
    if mantissa - 0.5 <= 0.5 * LEVEL_REL_TOL:
        return max(1, 1 - exponent)
    return max(1, -exponent)


def _boundary_means(instance: Instance) -> Tuple[float, float]:
    if instance.k >= instance.n:
        raise InstanceValidationError(
            "Gaps are undefined when k equals the number of arms",
            details={"field": "k", "k": instance.k, "n": instance.n},
        )
    ordered = instance.sorted_means()
    mu_k, mu_k1 = ordered[instance.k - 1], ordered[instance.k]
    if not mu_k > mu_k1:
        raise InstanceValidationError(
            "Instance has a tie at the k/k+1 boundary", details={"field": "arms"}
        )
    return mu_k, mu_k1


def gap(instance: Instance, arm_id: int) -> float:
    """Minimum shift of the arm's mean that changes the top-k set."""
    if not 0 <= arm_id < instance.n:
        raise ParameterError(f"Unknown arm id {arm_id}", details={"field": "arm_id"})
    mu_k, mu_k1 = _boundary_means(instance)
    mean = instance.arms[arm_id].mean
    if mean >= mu_k:
        return mean - mu_k1
    return mu_k - mean


def decompose_groups(instance: Instance) -> ArmGroupDecomposition:
    """Partition arms into G^large_r / G^small_r by gap level."""
    mu_k, _ = _boundary_means(instance)
    groups_large: Dict[int, List[int]] = {}
    groups_small: Dict[int, List[int]] = {}
    gaps: Dict[int, float] = {}
    levels: Dict[int, int] = {}

    for arm in instance.arms:
        g = gap(instance, arm.id)
        r = gap_level(g)
        gaps[arm.id] = g
        levels[arm.id] = r
        target = groups_large if arm.mean >= mu_k else groups_small
        target.setdefault(r, []).append(arm.id)

    return ArmGroupDecomposition(
        n=instance.n,
        k=instance.k,
        groups_large=groups_large,
        groups_small=groups_small,
        gaps=gaps,
        levels=levels,
        max_level=max(levels.values()),
    )


def permute(instance: Instance, seed: int) -> Instance:
    """Uniformly reorder the arms (Fisher-Yates under a seeded Philox stream).

    Arm ids are relabelled to the new positions; provenance composes with
    any earlier permutation.
    """
    gen = Generator(Philox(SeedSequence(seed)))
    order = gen.permutation(instance.n).tolist()
    arms = tuple(
        instance.arms[src].model_copy(update={"id": dst}) for dst, src in enumerate(order)
    )
    provenance = tuple(instance.original_id(src) for src in order)
    return Instance(
        k=instance.k, arms=arms, permutation_seed=seed, permutation=provenance
    )


def top_k_set(instance: Instance) -> FrozenSet[int]:
    """Ids of the k arms with largest true means; interior ties go to the lower id."""
    if instance.k < instance.n:
        _boundary_means(instance)
    ranked = sorted(instance.arms, key=lambda arm: (-arm.mean, arm.id))
    return frozenset(arm.id for arm in ranked[: instance.k])


def load_instance(path: Union[str, Path]) -> Instance:
    """Read an instance JSON file."""
    try:
        with open(path, "r", encoding="utf-8") as f:
            data = json.load(f)
    except OSError as e:
        raise HarnessIOError(
            f"Cannot read instance file {path}: {e}", details={"field": "instance", "path": str(path)}
        ) from e
    except json.JSONDecodeError as e:
        raise InstanceValidationError(
            f"Instance file {path} is not valid JSON: {e}", details={"field": "instance"}
        ) from e
    if not isinstance(data, dict):
        raise InstanceValidationError(
            "Instance file must hold a JSON object", details={"field": "instance"}
        )
    return Instance.parse(data)


def save_instance(instance: Instance, path: Union[str, Path]) -> None:
    """Write an instance JSON file."""
    try:
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8") as f:
            json.dump(instance.to_file_dict(), f, indent=2)
            f.write("\n")
    except OSError as e:
        raise HarnessIOError(
            f"Cannot write instance file {path}: {e}", details={"field": "out", "path": str(path)}
        ) from e
