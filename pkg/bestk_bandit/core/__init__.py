"""Core module: arm model, instances and hardness analytics."""

from .exceptions import (
    BestKError,
    BestKValidationError,
    InstanceValidationError,
    ParameterError,
    DomainError,
    ConfigurationError,
    HarnessIOError,
    BudgetExhausted,
    exit_code_for,
    EXIT_OK,
    EXIT_FAILURE,
    EXIT_USAGE,
    EXIT_VALIDATION,
    EXIT_IO
)

from .arms import (
    ArmSpec,
    Distribution,
    RngStream,
    SampleLedger,
    sample,
    pull_n
)

from .instance import (
    Instance,
    ArmGroupDecomposition,
    epsilon,
    gap,
    gap_level,
    decompose_groups,
    permute,
    top_k_set,
    load_instance,
    save_instance
)

from .complexity import (
    ComplexityReport,
    analyze,
    h_term,
    h_tilde,
    h_large_lb,
    h_small_lb,
    h_tilde_large,
    h_tilde_small,
    kl_gauss_unit,
    bin_rel_entropy
)

__all__ = [
    # Exceptions
    "BestKError",
    "BestKValidationError",
    "InstanceValidationError",
    "ParameterError",
    "DomainError",
    "ConfigurationError",
    "HarnessIOError",
    "BudgetExhausted",
    "exit_code_for",
    "EXIT_OK",
    "EXIT_FAILURE",
    "EXIT_USAGE",
    "EXIT_VALIDATION",
    "EXIT_IO",

    # Arm model
    "ArmSpec",
    "Distribution",
    "RngStream",
    "SampleLedger",
    "sample",
    "pull_n",

    # Instances
    "Instance",
    "ArmGroupDecomposition",
    "epsilon",
    "gap",
    "gap_level",
    "decompose_groups",
    "permute",
    "top_k_set",
    "load_instance",
    "save_instance",

    # Analytics
    "ComplexityReport",
    "analyze",
    "h_term",
    "h_tilde",
    "h_large_lb",
    "h_small_lb",
    "h_tilde_large",
    "h_tilde_small",
    "kl_gauss_unit",
    "bin_rel_entropy"
]
