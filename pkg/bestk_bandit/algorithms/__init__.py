"""Best-k-Arm algorithms, their subroutines and run telemetry."""

from typing import Callable, Dict, Optional

from ..config import AlgorithmConfig
from ..core.exceptions import ParameterError

from .subroutines import (
    PartitionResult,
    EliminationResult,
    pac_best_k,
    est_mean_large,
    est_mean_small,
    elim_large,
    elim_small
)

from .telemetry import (
    RoundTelemetry,
    RunResult,
    EliminationTelemetry
)

from .bilateral import (
    BilateralElimination,
    bilateral_elimination,
    sample_cap
)

from .baseline import (
    UniformBaseline,
    uniform_baseline
)

ALGORITHMS: Dict[str, Callable[..., object]] = {
    BilateralElimination.name: BilateralElimination,
    UniformBaseline.name: UniformBaseline,
}


def get_algorithm(name: str, config: Optional[AlgorithmConfig] = None):
    """Instantiate the runner registered under ``name``."""
    try:
        factory = ALGORITHMS[name]
    except KeyError:
        raise ParameterError(
            f"Unknown algorithm {name!r}; expected one of {sorted(ALGORITHMS)}",
            details={"field": "algo"},
        ) from None
    return factory(config)


__all__ = [
    # Subroutines
    "PartitionResult",
    "EliminationResult",
    "pac_best_k",
    "est_mean_large",
    "est_mean_small",
    "elim_large",
    "elim_small",

    # Telemetry
    "RoundTelemetry",
    "RunResult",
    "EliminationTelemetry",

    # Runners
    "BilateralElimination",
    "bilateral_elimination",
    "sample_cap",
    "UniformBaseline",
    "uniform_baseline",
    "ALGORITHMS",
    "get_algorithm"
]
