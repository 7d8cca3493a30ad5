"""Closed-form hardness analytics of Best-k-Arm instances.

Every term is computed from an :class:`ArmGroupDecomposition`. Conventions:

* ``ln ln (1/gap)`` is clamped below at 1, so H_tilde >= H;
* ``ln 1 = 0`` and empty groups contribute nothing to any sum or max;
* ``ln ln n`` in the ratio reports is clamped below at 1.
"""

import math
from typing import Callable, Dict, List, Optional

from pydantic import BaseModel, Field
from scipy.special import rel_entr

from .exceptions import DomainError, ParameterError
from .instance import ArmGroupDecomposition, Instance, decompose_groups, epsilon


def _ln_size(size: int) -> float:
    return math.log(size) if size > 1 else 0.0


def lnln_factor(gap_value: float) -> float:
    """max(1, ln ln (1/gap))."""
    inner = math.log(1.0 / gap_value)
    if inner <= 1.0:
        return 1.0
    return max(1.0, math.log(inner))


def h_term(decomp: ArmGroupDecomposition) -> float:
    """H = sum over arms of gap^-2."""
    return math.fsum(g ** -2 for g in decomp.gaps.values())


def h_tilde(decomp: ArmGroupDecomposition) -> float:
    """H_tilde = sum over arms of gap^-2 * max(1, ln ln gap^-1)."""
    return math.fsum(g ** -2 * lnln_factor(g) for g in decomp.gaps.values())


def _h_lb(
    decomp: ArmGroupDecomposition,
    outer: Callable[[int], int],
    inner_at_least: Callable[[int], int],
) -> float:
    total: List[float] = []
    for i in range(1, decomp.max_level + 1):
        size = outer(i)
        if size == 0:
            continue
        best = max(epsilon(j) ** -2 * _ln_size(inner_at_least(j)) for j in range(1, i + 1))
        total.append(size * best)
    return math.fsum(total)


def h_large_lb(decomp: ArmGroupDecomposition) -> float:
    """H^large = sum_i |G^large_i| * max_{j<=i} eps_j^-2 ln |G^small_{>=j}|."""
    return _h_lb(decomp, decomp.size_large, decomp.size_small_at_least)


def h_small_lb(decomp: ArmGroupDecomposition) -> float:
    """H^small = sum_i |G^small_i| * max_{j<=i} eps_j^-2 ln |G^large_{>=j}|."""
    return _h_lb(decomp, decomp.size_small, decomp.size_large_at_least)


def _double_sum(
    decomp: ArmGroupDecomposition,
    outer: Callable[[int], int],
    f: Callable[[int], float],
) -> float:
    total: List[float] = []
    for i in range(1, decomp.max_level + 1):
        size = outer(i)
        if size == 0:
            continue
        total.append(size * math.fsum(f(j) for j in range(1, i + 1)))
    return math.fsum(total)


def _single_sum(
    decomp: ArmGroupDecomposition,
    outer_at_least: Callable[[int], int],
    f: Callable[[int], float],
) -> float:
    return math.fsum(
        f(j) * outer_at_least(j) for j in range(1, decomp.max_level + 1)
    )


def _cumulative_f(at_least: Callable[[int], int]) -> Callable[[int], float]:
    return lambda j: epsilon(j) ** -2 * _ln_size(at_least(j))


def _per_level_f(size: Callable[[int], int]) -> Callable[[int], float]:
    return lambda j: epsilon(j) ** -2 * _ln_size(size(j))


def h_tilde_large(decomp: ArmGroupDecomposition, variant: str = "cumulative") -> float:
    """H_tilde^large = sum_i |G^large_i| sum_{j<=i} eps_j^-2 ln|G^small_(.)|.

    ``variant`` selects ``ln|G^small_{>=j}|`` (cumulative, the default) or
    ``ln|G^small_j|`` (per_level).
    """
    return _double_sum(decomp, decomp.size_large, _variant_f(decomp, variant, small=True))


def h_tilde_small(decomp: ArmGroupDecomposition, variant: str = "cumulative") -> float:
    """Mirror of :func:`h_tilde_large` with the roles of the groups swapped."""
    return _double_sum(decomp, decomp.size_small, _variant_f(decomp, variant, small=False))


def h_tilde_large_single_sum(decomp: ArmGroupDecomposition, variant: str = "cumulative") -> float:
    """sum_j eps_j^-2 |G^large_{>=j}| ln|G^small_(.)|, the interchanged form."""
    return _single_sum(decomp, decomp.size_large_at_least, _variant_f(decomp, variant, small=True))


def h_tilde_small_single_sum(decomp: ArmGroupDecomposition, variant: str = "cumulative") -> float:
    return _single_sum(decomp, decomp.size_small_at_least, _variant_f(decomp, variant, small=False))


def _variant_f(decomp: ArmGroupDecomposition, variant: str, small: bool) -> Callable[[int], float]:
    if variant == "cumulative":
        return _cumulative_f(decomp.size_small_at_least if small else decomp.size_large_at_least)
    if variant == "per_level":
        return _per_level_f(decomp.size_small if small else decomp.size_large)
    raise ParameterError(
        f"Unknown variant {variant!r}; expected cumulative or per_level",
        details={"field": "variant"},
    )


def interchange_sums(
    decomp: ArmGroupDecomposition, f: Callable[[int], float], large: bool = True
) -> tuple[float, float]:
    """Both sides of sum_i |G_i| sum_{j<=i} f(j) = sum_j f(j) |G_{>=j}|."""
    if large:
        return (
            _double_sum(decomp, decomp.size_large, f),
            _single_sum(decomp, decomp.size_large_at_least, f),
        )
    return (
        _double_sum(decomp, decomp.size_small, f),
        _single_sum(decomp, decomp.size_small_at_least, f),
    )


def kl_gauss_unit(mu1: float, mu2: float) -> float:
    """KL divergence between N(mu1, 1) and N(mu2, 1)."""
    return (mu1 - mu2) ** 2 / 2


def bin_rel_entropy(x: float, y: float) -> float:
    """d(x, y) = x ln(x/y) + (1-x) ln((1-x)/(1-y)).

    Boundary values follow by continuity; d(x, 0) and d(x, 1) for x strictly
    inside (0, 1) saturate at ``math.inf``.
    """
    for name, value in (("x", x), ("y", y)):
        if not 0.0 <= value <= 1.0 or math.isnan(value):
            raise DomainError(
                f"bin_rel_entropy needs {name} in [0, 1], got {value}",
                details={"field": name, "value": value},
            )
    return float(rel_entr(x, y) + rel_entr(1.0 - x, 1.0 - y))


class LevelContribution(BaseModel):
    """Per-level contributions to every group-based term."""

    level: int
    eps: float
    size_large: int
    size_small: int
    size_large_at_least: int
    size_small_at_least: int
    h: float = Field(description="Contribution of arms at this level to H")
    h_tilde: float = Field(description="Contribution of arms at this level to H_tilde")
    h_tilde_large_cumulative: float = Field(description="eps^-2 |G^large_{>=r}| ln|G^small_{>=r}|")
    h_tilde_small_cumulative: float = Field(description="eps^-2 |G^small_{>=r}| ln|G^large_{>=r}|")


class ComplexityReport(BaseModel):
    """Every hardness term of an instance, plus the comparison ratios."""

    n: int
    k: int
    delta: float
    gap_k: Optional[float]
    max_level: int
    H: float
    H_tilde: float
    H_large_lb: float
    H_small_lb: float
    H_tilde_large: float
    H_tilde_small: float
    H_tilde_large_per_level: float
    H_tilde_small_per_level: float
    H_ln_k: float
    upper_bound: float = Field(description="H ln(1/delta) + H_tilde + H_tilde^large + H_tilde^small")
    prior_art_bound: float = Field(description="H ln(1/delta) + H ln k + H_tilde")
    ratio_lnln_n: Optional[float]
    ratio_ln_k: Optional[float]
    per_level_breakdown: List[LevelContribution]
    conventions: Dict[str, str] = Field(
        default_factory=lambda: {
            "lnln": "max(1, ln ln 1/gap)",
            "ln_group_size": "ln 1 = 0; empty groups contribute 0",
            "lnln_n": "max(1, ln ln n)",
            "H_tilde_large": "cumulative ln|G^small_{>=j}| (per-level variant reported separately)",
        }
    )


def upper_bound_term(report: ComplexityReport, delta: float) -> float:
    """H ln(1/delta) + H_tilde + H_tilde^large + H_tilde^small at another delta."""
    return (
        report.H * math.log(1.0 / delta)
        + report.H_tilde
        + report.H_tilde_large
        + report.H_tilde_small
    )


def _ratio(num: float, den: float) -> Optional[float]:
    if den <= 0.0:
        return None
    return num / den


def analyze(instance: Instance, delta: float = 0.1) -> ComplexityReport:
    """Compute the full :class:`ComplexityReport` of an instance."""
    if not 0.0 < delta < 1.0:
        raise ParameterError(f"delta must lie in (0, 1), got {delta}", details={"field": "delta"})

    n, k = instance.n, instance.k
    if k == n:
        # Nothing to distinguish: every term is zero.
        return ComplexityReport(
            n=n, k=k, delta=delta, gap_k=None, max_level=0,
            H=0.0, H_tilde=0.0, H_large_lb=0.0, H_small_lb=0.0,
            H_tilde_large=0.0, H_tilde_small=0.0,
            H_tilde_large_per_level=0.0, H_tilde_small_per_level=0.0,
            H_ln_k=0.0, upper_bound=0.0, prior_art_bound=0.0,
            ratio_lnln_n=None, ratio_ln_k=None, per_level_breakdown=[],
        )

    decomp = decompose_groups(instance)
    ordered = instance.sorted_means()
    H = h_term(decomp)
    H_t = h_tilde(decomp)
    H_l, H_s = h_large_lb(decomp), h_small_lb(decomp)
    Ht_l, Ht_s = h_tilde_large(decomp), h_tilde_small(decomp)
    ln_k = math.log(k)
    lnln_n = max(1.0, math.log(math.log(n))) if n > 1 else 1.0

    breakdown = []
    for r in range(1, decomp.max_level + 1):
        at_level = [a for a, lvl in decomp.levels.items() if lvl == r]
        eps_r = epsilon(r)
        large_ge, small_ge = decomp.size_large_at_least(r), decomp.size_small_at_least(r)
        breakdown.append(
            LevelContribution(
                level=r,
                eps=eps_r,
                size_large=decomp.size_large(r),
                size_small=decomp.size_small(r),
                size_large_at_least=large_ge,
                size_small_at_least=small_ge,
                h=math.fsum(decomp.gaps[a] ** -2 for a in at_level),
                h_tilde=math.fsum(decomp.gaps[a] ** -2 * lnln_factor(decomp.gaps[a]) for a in at_level),
                h_tilde_large_cumulative=eps_r ** -2 * large_ge * _ln_size(small_ge),
                h_tilde_small_cumulative=eps_r ** -2 * small_ge * _ln_size(large_ge),
            )
        )

    ln_inv_delta = math.log(1.0 / delta)
    return ComplexityReport(
        n=n,
        k=k,
        delta=delta,
        gap_k=ordered[k - 1] - ordered[k],
        max_level=decomp.max_level,
        H=H,
        H_tilde=H_t,
        H_large_lb=H_l,
        H_small_lb=H_s,
        H_tilde_large=Ht_l,
        H_tilde_small=Ht_s,
        H_tilde_large_per_level=h_tilde_large(decomp, "per_level"),
        H_tilde_small_per_level=h_tilde_small(decomp, "per_level"),
        H_ln_k=H * ln_k,
        upper_bound=H * ln_inv_delta + H_t + Ht_l + Ht_s,
        prior_art_bound=H * ln_inv_delta + H * ln_k + H_t,
        ratio_lnln_n=_ratio(Ht_l + Ht_s, (H_l + H_s) * lnln_n),
        ratio_ln_k=_ratio(Ht_l + Ht_s, H * ln_k),
        per_level_breakdown=breakdown,
    )
