"""bestk-bandit - Best-k-Arm identification simulator with Bilateral-Elimination."""

__version__ = "1.0.0"
__author__ = "Mohammed Imran"
__email__ = "Postme.imran@gmail.com"

from .config import get_config, configure_logging
from .core import Instance, analyze
from .algorithms import bilateral_elimination, uniform_baseline, get_algorithm
from .harness import generate_family, run_trials, TrialConfig

__all__ = [
    "get_config",
    "configure_logging",
    "Instance",
    "analyze",
    "bilateral_elimination",
    "uniform_baseline",
    "get_algorithm",
    "generate_family",
    "run_trials",
    "TrialConfig"
]
