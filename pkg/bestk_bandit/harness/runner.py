"""Seeded Monte Carlo runs and parameter sweeps."""

import itertools
import json
from multiprocessing import get_context
from pathlib import Path
from typing import Any, Dict, Iterator, List, Mapping, Optional, Sequence, Tuple

import numpy as np
from numpy.random import SeedSequence
from pydantic import BaseModel, Field, ValidationError, field_validator

from ..algorithms import get_algorithm
from ..config import AlgorithmConfig, configure_logging, get_config, get_logger, log_trial
from ..core.arms import UINT64_MASK, RngStream, SampleLedger
from ..core.complexity import analyze
from ..core.exceptions import ParameterError
from ..core.instance import Instance, permute, top_k_set
from .families import generate_family
from .records import StreamHeader, TrialResult, TrialStreamWriter
from .stats import AggregateStats, aggregate

logger = get_logger(__name__)


class TrialConfig(BaseModel):
    """Everything that determines a run; trial streams are reproducible from it."""

    instance: Instance
    label: str = "instance"
    algorithm: str = "bilateral"
    delta: float = 0.1
    trials: int = 100
    master_seed: int = 0
    jobs: int = 1
    algorithm_config: AlgorithmConfig = Field(default_factory=lambda: get_config().algorithm)

    @field_validator("delta")
    @classmethod
    def validate_delta(cls, v: float) -> float:
        if not 0.0 < v < 1.0:
            raise ValueError("delta must lie in (0, 1)")
        return v

    @field_validator("trials", "jobs")
    @classmethod
    def validate_count(cls, v: int) -> int:
        if v < 1:
            raise ValueError("Must be at least 1")
        return v

    @field_validator("master_seed")
    @classmethod
    def validate_seed(cls, v: int) -> int:
        if not 0 <= v <= UINT64_MASK:
            raise ValueError("master_seed must be a 64-bit unsigned integer")
        return v

    @classmethod
    def build(cls, **values: Any) -> "TrialConfig":
        """Validate, reporting failures as :class:`ParameterError` naming the field."""
        try:
            return cls(**values)
        except ValidationError as e:
            first = e.errors()[0]
            field = ".".join(str(p) for p in first.get("loc", ())) or "config"
            raise ParameterError(
                f"Invalid value for {field}: {first.get('msg')}", details={"field": field}
            ) from e

    def header(self) -> StreamHeader:
        return StreamHeader(
            label=self.label,
            algorithm=self.algorithm,
            delta=self.delta,
            trials=self.trials,
            master_seed=self.master_seed,
            instance=self.instance.to_file_dict(),
            config={"algorithm": self.algorithm_config.model_dump()},
        )


def trial_seed(master_seed: int, trial_index: int) -> int:
    """Permutation seed of trial ``trial_index``."""
    state = SeedSequence(master_seed, spawn_key=(trial_index,)).generate_state(1, dtype=np.uint64)
    return int(state[0])


def run_single_trial(config: TrialConfig, trial_index: int) -> TrialResult:
    """Run trial ``trial_index`` on a fresh permutation of the instance."""
    base = config.instance
    if base.permutation is not None:
        base = Instance(k=base.k, arms=base.arms)
    seed = trial_seed(config.master_seed, trial_index)
    permuted = permute(base, seed)
    runner = get_algorithm(config.algorithm, config.algorithm_config)
    result = runner.run(permuted, config.delta, RngStream(config.master_seed, trial_index), SampleLedger())

    answer = sorted(permuted.original_id(a) for a in result.answer)
    correct = not result.capped and frozenset(answer) == top_k_set(base)
    logger.debug(
        "Trial finished",
        **log_trial(trial_index, seed, correct=correct, samples=result.total_samples, capped=result.capped),
    )
    return TrialResult(
        trial=trial_index,
        permutation_seed=seed,
        stream_id=trial_index,
        algorithm=result.algorithm,
        answer=answer,
        correct=correct,
        total_samples=result.total_samples,
        capped=result.capped,
        telemetry_ok=result.telemetry_ok,
        contract_failures=result.contract_failures,
        samples_by_tag=result.samples_by_tag,
        rounds=result.rounds,
    )


_worker_config: Optional[TrialConfig] = None


def _init_worker(config: TrialConfig, log_level: str, log_format: str) -> None:
    global _worker_config
    _worker_config = config
    configure_logging(log_level, log_format)


def _run_indexed(trial_index: int) -> TrialResult:
    return run_single_trial(_worker_config, trial_index)


def iter_trials(config: TrialConfig) -> Iterator[TrialResult]:
    """Yield trial results in trial-index order, whatever the parallelism."""
    indices = range(config.trials)
    if config.jobs == 1 or config.trials == 1:
        for i in indices:
            yield run_single_trial(config, i)
        return

    log_cfg = get_config().logging
    ctx = get_context("spawn")
    with ctx.Pool(
        processes=config.jobs,
        initializer=_init_worker,
        initargs=(config, log_cfg.log_level, log_cfg.log_format),
    ) as pool:
        yield from pool.imap(_run_indexed, indices, chunksize=1)


def run_trials(
    config: TrialConfig, writer: Optional[TrialStreamWriter] = None
) -> Tuple[AggregateStats, List[TrialResult]]:
    """Run every trial of ``config``, streaming records to ``writer`` as they complete."""
    logger.info(
        "Running trials",
        label=config.label,
        algorithm=config.algorithm,
        delta=config.delta,
        trials=config.trials,
        jobs=config.jobs,
        master_seed=config.master_seed,
    )
    results: List[TrialResult] = []
    for result in iter_trials(config):
        if writer is not None:
            writer.write(result)
        results.append(result)

    stats = aggregate(results, config.label, config.instance.n, config.instance.k, config.delta)
    logger.info(
        "Trials complete",
        label=config.label,
        error_rate=stats.error_rate,
        samples_median=stats.samples_median,
        capped_rate=stats.capped_rate,
    )
    return stats, results


def summary_row(stats: AggregateStats, header: StreamHeader) -> Dict[str, Any]:
    """Aggregate CSV row of a run, with the seed and resolved config it came from."""
    row = stats.csv_row()
    row["master_seed"] = header.master_seed
    row["config"] = json.dumps(header.config, sort_keys=True, separators=(",", ":"))
    return row


def _ratio(num: float, den: float) -> Optional[float]:
    return num / den if den > 0 else None


def grid_points(grid: Mapping[str, Sequence[Any]]) -> List[Dict[str, Any]]:
    """Cartesian product of a parameter grid, in key order."""
    keys = list(grid)
    return [dict(zip(keys, values)) for values in itertools.product(*(grid[k] for k in keys))]


def cell_label(family: str, params: Mapping[str, Any]) -> str:
    return f"{family}(" + ",".join(f"{k}={v}" for k, v in params.items()) + ")"


def run_sweep(
    family: str,
    base_params: Mapping[str, Any],
    grid: Mapping[str, Sequence[Any]],
    algorithms: Sequence[str],
    deltas: Sequence[float],
    trials: int,
    master_seed: int = 0,
    jobs: int = 1,
    algorithm_config: Optional[AlgorithmConfig] = None,
    raw_dir: Optional[Path] = None,
) -> List[Dict[str, Any]]:
    """Run every (grid point, algorithm, delta) cell and return one aggregate row per cell.

    Rows carry the cell's hardness terms and the ratios of median samples to
    them. With ``raw_dir`` each cell's trial stream is kept as NDJSON.
    """
    algorithm_config = algorithm_config or get_config().algorithm
    rows: List[Dict[str, Any]] = []
    for point in grid_points(grid) or [{}]:
        params = {**base_params, **point}
        instance = generate_family(family, params)
        label = cell_label(family, params)
        for algorithm, delta in itertools.product(algorithms, deltas):
            config = TrialConfig.build(
                instance=instance,
                label=label,
                algorithm=algorithm,
                delta=delta,
                trials=trials,
                master_seed=master_seed,
                jobs=jobs,
                algorithm_config=algorithm_config,
            )
            header = config.header()
            if raw_dir is not None:
                path = Path(raw_dir) / f"{label}_{algorithm}_{delta}.ndjson"
                with TrialStreamWriter(path, header) as writer:
                    stats, _ = run_trials(config, writer)
            else:
                stats, _ = run_trials(config)

            report = analyze(instance, delta)
            row: Dict[str, Any] = {"family": family}
            row.update({f"param_{k}": v for k, v in params.items()})
            row.update(summary_row(stats, header))
            row.update(
                {
                    "H": report.H,
                    "upper_bound": report.upper_bound,
                    "prior_art_bound": report.prior_art_bound,
                    "ratio_upper": _ratio(stats.samples_median, report.upper_bound),
                    "ratio_prior": _ratio(stats.samples_median, report.prior_art_bound),
                    "ratio_H": _ratio(stats.samples_median, report.H),
                }
            )
            rows.append(row)
    return rows
