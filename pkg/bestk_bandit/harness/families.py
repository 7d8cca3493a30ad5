"""Instance family generators and CLI parameter parsing."""

import re
from typing import Any, Callable, Dict, List, Mapping, Optional

import numpy as np
from numpy.random import Generator, Philox, SeedSequence
from pydantic import ValidationError, validate_call

from ..core.arms import MEAN_HIGH
from ..core.exceptions import ParameterError
from ..core.instance import Instance

MAX_RESAMPLES = 1000


def _require(condition: bool, message: str, field: str) -> None:
    if not condition:
        raise ParameterError(message, details={"field": field})


@validate_call
def appendix_a(n: int, eps: float, dist: str = "gaussian") -> Instance:
    """n arms at 0, n arms at 1/2, one arm at 1/4 + eps and one at 1/4 - eps; k = n + 1."""
    _require(n >= 1, f"n must be at least 1, got {n}", "n")
    _require(0 < eps <= 0.25, f"eps must lie in (0, 1/4], got {eps}", "eps")
    means = [0.0] * n + [MEAN_HIGH] * n + [0.25 + eps, 0.25 - eps]
    return Instance.build(means, k=n + 1, dist=dist)


@validate_call
def symmetric_best1(n: int, mu: float, Delta: float, dist: str = "gaussian") -> Instance:
    """One arm at mu and n arms at mu - Delta; k = 1."""
    _require(n >= 1, f"n must be at least 1, got {n}", "n")
    _require(Delta > 0, f"Delta must be positive, got {Delta}", "Delta")
    _require(
        Delta <= mu <= MEAN_HIGH,
        f"Means must stay in [0, 1/2]: mu={mu}, mu - Delta={mu - Delta}",
        "mu",
    )
    return Instance.build([mu] + [mu - Delta] * n, k=1, dist=dist)


@validate_call
def uniform_gaps(n: int, k: int, gap: float, dist: str = "gaussian") -> Instance:
    """k arms at 1/2 and n - k arms at 1/2 - gap."""
    _require(1 <= k <= n, f"k must satisfy 1 <= k <= n, got k={k}, n={n}", "k")
    _require(0 < gap <= MEAN_HIGH, f"gap must lie in (0, 1/2], got {gap}", "gap")
    return Instance.build([MEAN_HIGH] * k + [MEAN_HIGH - gap] * (n - k), k=k, dist=dist)


@validate_call
def random_family(
    n: int, k: int, seed: int, resolution: Optional[int] = None, dist: str = "gaussian"
) -> Instance:
    """Means drawn uniformly from [0, 1/2], redrawn until mu_[k] > mu_[k+1].

    With ``resolution`` the means lie on the grid {0, 1/resolution, ...}.
    """
    _require(1 <= k <= n, f"k must satisfy 1 <= k <= n, got k={k}, n={n}", "k")
    _require(seed >= 0, f"seed must be non-negative, got {seed}", "seed")
    if resolution is not None:
        _require(resolution >= 2, f"resolution must be at least 2, got {resolution}", "resolution")

    gen = Generator(Philox(SeedSequence(seed)))
    for _ in range(MAX_RESAMPLES):
        if resolution is None:
            means = gen.uniform(0.0, MEAN_HIGH, size=n)
        else:
            means = gen.integers(0, resolution // 2, size=n, endpoint=True) / resolution
        ordered = np.sort(means)[::-1]
        if k == n or ordered[k - 1] > ordered[k]:
            return Instance.build(means.tolist(), k=k, dist=dist)
    raise ParameterError(
        f"No instance without a boundary tie after {MAX_RESAMPLES} draws",
        details={"field": "seed"},
    )


FAMILIES: Dict[str, Callable[..., Instance]] = {
    "appendix_a": appendix_a,
    "symmetric_best1": symmetric_best1,
    "uniform_gaps": uniform_gaps,
    "random": random_family,
}


def generate_family(name: str, params: Mapping[str, Any]) -> Instance:
    """Build an instance of family ``name``; string parameters are coerced."""
    try:
        factory = FAMILIES[name]
    except KeyError:
        raise ParameterError(
            f"Unknown family {name!r}; expected one of {sorted(FAMILIES)}",
            details={"field": "family"},
        ) from None
    try:
        return factory(**params)
    except ValidationError as e:
        first = e.errors()[0]
        field = ".".join(str(p) for p in first.get("loc", ())) or "params"
        raise ParameterError(
            f"Invalid parameter {field} for family {name}: {first.get('msg')}",
            details={"field": field},
        ) from e


_POWER = re.compile(r"^\s*(-?\d+(?:\.\d+)?)\s*\^\s*(-?\d+)\s*$")


def parse_value(text: str) -> str:
    """Normalise one parameter value; ``2^-4`` becomes ``0.0625``."""
    match = _POWER.match(text)
    if match:
        return repr(float(match.group(1)) ** int(match.group(2)))
    return text.strip()


def parse_params(text: Optional[str]) -> Dict[str, str]:
    """Parse ``n=4,eps=0.0625`` into a mapping."""
    params: Dict[str, str] = {}
    if not text:
        return params
    for item in text.split(","):
        if not item.strip():
            continue
        key, sep, value = item.partition("=")
        if not sep or not key.strip() or not value.strip():
            raise ParameterError(f"Malformed parameter {item!r}; expected key=value", details={"field": "params"})
        params[key.strip()] = parse_value(value)
    return params


def parse_grid(text: Optional[str]) -> Dict[str, List[str]]:
    """Parse ``n=8;eps=2^-4,2^-5`` into value lists per key."""
    grid: Dict[str, List[str]] = {}
    if not text:
        return grid
    for item in text.split(";"):
        if not item.strip():
            continue
        key, sep, values = item.partition("=")
        parsed = [parse_value(v) for v in values.split(",") if v.strip()]
        if not sep or not key.strip() or not parsed:
            raise ParameterError(f"Malformed grid entry {item!r}; expected key=v1,v2", details={"field": "grid"})
        grid[key.strip()] = parsed
    return grid
