"""Monte Carlo harness: instance families, trial runs, sweeps and aggregation."""

from .families import (
    FAMILIES,
    generate_family,
    parse_params,
    parse_grid,
    appendix_a,
    symmetric_best1,
    uniform_gaps,
    random_family
)

from .records import (
    TrialResult,
    StreamHeader,
    TrialStreamWriter,
    read_trial_stream,
    write_csv,
    write_json
)

from .stats import (
    AggregateStats,
    aggregate,
    wilson_interval
)

from .runner import (
    TrialConfig,
    run_single_trial,
    run_trials,
    run_sweep,
    trial_seed,
    summary_row
)

__all__ = [
    # Families
    "FAMILIES",
    "generate_family",
    "parse_params",
    "parse_grid",
    "appendix_a",
    "symmetric_best1",
    "uniform_gaps",
    "random_family",

    # Records
    "TrialResult",
    "StreamHeader",
    "TrialStreamWriter",
    "read_trial_stream",
    "write_csv",
    "write_json",

    # Statistics
    "AggregateStats",
    "aggregate",
    "wilson_interval",

    # Runs
    "TrialConfig",
    "run_single_trial",
    "run_trials",
    "run_sweep",
    "trial_seed",
    "summary_row"
]
