"""Command-line interface for the Best-k-Arm simulator."""

from pathlib import Path
from typing import List, Optional, Union

import typer
from rich.console import Console
from rich.table import Table

from . import __version__
from .algorithms import ALGORITHMS
from .config import (
    configure_logging,
    derive_complexity_scale,
    get_config,
    get_logger,
    log_error,
    reload_config,
)
from .core import BestKError, ParameterError, analyze, exit_code_for, load_instance, permute, save_instance
from .harness import (
    TrialConfig,
    TrialStreamWriter,
    aggregate,
    generate_family,
    parse_grid,
    parse_params,
    read_trial_stream,
    run_sweep,
    run_trials,
    summary_row,
    write_csv,
    write_json,
)

app = typer.Typer(
    name="bestk-bandit",
    help="Best-k-Arm simulator - Bilateral-Elimination, hardness analytics and Monte Carlo harness",
    no_args_is_help=True,
)
console = Console()
err_console = Console(stderr=True)
logger = get_logger(__name__)


def _fail(error: Exception) -> None:
    """Report ``error`` on stderr and exit with its stable code."""
    logger.error("Command failed", **log_error(error))
    field = getattr(error, "field", None)
    prefix = f"[{field}] " if field else ""
    err_console.print(f"Error: {prefix}{error}", style="bold red", markup=False)
    raise typer.Exit(code=exit_code_for(error))


def _check_algorithms(value: Union[str, List[str]]) -> Union[str, List[str]]:
    names = [value] if isinstance(value, str) else list(value)
    unknown = [name for name in names if name not in ALGORITHMS]
    if unknown:
        raise typer.BadParameter(f"unknown algorithm {unknown[0]!r}; expected one of {sorted(ALGORITHMS)}")
    return value


def _check_format(value: str) -> str:
    if value not in ("csv", "json"):
        raise typer.BadParameter(f"unknown format {value!r}; expected csv or json")
    return value


def _is_stdout(path: Optional[Path]) -> bool:
    return path is None or str(path) == "-"


@app.callback()
def main_callback(
    config_file: Optional[str] = typer.Option(
        None,
        "--config",
        "-c",
        help="Algorithm configuration (JSON) or dotenv file"
    ),
    log_level: Optional[str] = typer.Option(
        None,
        "--log-level",
        help="Log level (DEBUG/INFO/WARNING/ERROR)"
    ),
    log_format: Optional[str] = typer.Option(
        None,
        "--log-format",
        help="Log format (json/console)"
    ),
):
    """Load configuration and set up logging for every command."""
    try:
        if config_file:
            reload_config(config_file)
        configure_logging(log_level, log_format)
    except BestKError as e:
        _fail(e)


@app.command()
def gen(
    family: str = typer.Option(..., "--family", "-f", help="appendix_a, symmetric_best1, uniform_gaps or random"),
    params: Optional[str] = typer.Option(None, "--params", "-p", help="Family parameters, e.g. n=4,eps=0.0625"),
    permutation_seed: Optional[int] = typer.Option(
        None, "--permute-seed", help="Shuffle the arms with this seed before writing"
    ),
    out: Optional[Path] = typer.Option(None, "--out", "-o", help="Instance file (default stdout)"),
):
    """Generate an instance of a built-in family."""
    try:
        instance = generate_family(family, parse_params(params))
        if permutation_seed is not None:
            instance = permute(instance, permutation_seed)
        if _is_stdout(out):
            write_json(None, instance.to_file_dict())
        else:
            save_instance(instance, out)
            err_console.print(f"Wrote {instance.n} arms (k={instance.k}) to {out}", style="green")
    except BestKError as e:
        _fail(e)


def _report_table(report) -> Table:
    table = Table(title=f"Hardness terms (n={report.n}, k={report.k}, delta={report.delta})")
    table.add_column("Term", style="cyan")
    table.add_column("Value", style="green", justify="right")

    rows = [
        ("gap_k", report.gap_k),
        ("max level", report.max_level),
        ("H", report.H),
        ("H_tilde", report.H_tilde),
        ("H^large", report.H_large_lb),
        ("H^small", report.H_small_lb),
        ("H_tilde^large (cumulative)", report.H_tilde_large),
        ("H_tilde^small (cumulative)", report.H_tilde_small),
        ("H_tilde^large (per level)", report.H_tilde_large_per_level),
        ("H_tilde^small (per level)", report.H_tilde_small_per_level),
        ("H ln k", report.H_ln_k),
        ("upper bound", report.upper_bound),
        ("prior-art bound", report.prior_art_bound),
        ("ratio vs lnln n", report.ratio_lnln_n),
        ("ratio vs ln k", report.ratio_ln_k),
    ]
    for name, value in rows:
        if value is None:
            text = "n/a"
        elif isinstance(value, float):
            text = f"{value:.6g}"
        else:
            text = str(value)
        table.add_row(name, text)
    return table


@app.command("analyze")
def analyze_cmd(
    instance_file: Path = typer.Option(..., "--instance", "-i", help="Instance file"),
    delta: float = typer.Option(0.1, "--delta", "-d", help="Confidence used in the bound terms"),
    out: Optional[Path] = typer.Option(None, "--out", "-o", help="Report file (default stdout)"),
):
    """Compute every hardness term of an instance."""
    try:
        instance = load_instance(instance_file)
        report = analyze(instance, delta)
        write_json(out, report.model_dump(mode="json"))
        table_console = err_console if _is_stdout(out) else console
        table_console.print(_report_table(report))
    except BestKError as e:
        _fail(e)


def _load_source(instance_file: Optional[Path], family: Optional[str], params: Optional[str]):
    if (instance_file is None) == (family is None):
        raise ParameterError("Give exactly one of --instance or --family", details={"field": "instance"})
    if instance_file is not None:
        return load_instance(instance_file), instance_file.stem
    parsed = parse_params(params)
    label = f"{family}(" + ",".join(f"{k}={v}" for k, v in parsed.items()) + ")"
    return generate_family(family, parsed), label


def _summary_table(rows: List[dict], title: str) -> Table:
    columns = ("label", "algorithm", "delta", "trials", "error_rate", "error_high", "samples_median", "capped_rate")
    table = Table(title=title)
    for column in columns:
        table.add_column(column, style="cyan" if column == "label" else "green")
    for row in rows:
        table.add_row(*(f"{row[c]:.4g}" if isinstance(row[c], float) else str(row[c]) for c in columns))
    return table


@app.command()
def run(
    instance_file: Optional[Path] = typer.Option(None, "--instance", "-i", help="Instance file"),
    family: Optional[str] = typer.Option(None, "--family", "-f", help="Generate the instance instead"),
    params: Optional[str] = typer.Option(None, "--params", "-p", help="Family parameters"),
    algo: str = typer.Option(
        "bilateral", "--algo", "-a", callback=_check_algorithms, help="bilateral or uniform"
    ),
    delta: float = typer.Option(0.1, "--delta", "-d", help="Target error probability"),
    trials: Optional[int] = typer.Option(None, "--trials", "-n", min=1, help="Number of trials"),
    seed: Optional[int] = typer.Option(None, "--seed", "-s", help="Master seed"),
    jobs: Optional[int] = typer.Option(None, "--jobs", "-j", min=1, help="Worker processes"),
    out: Optional[Path] = typer.Option(None, "--out", "-o", help="Trial stream, NDJSON (default stdout)"),
    csv_out: Optional[Path] = typer.Option(None, "--csv", help="Aggregate CSV (default next to --out)"),
):
    """Run seeded trials of one algorithm on one instance."""
    settings = get_config()
    try:
        instance, label = _load_source(instance_file, family, params)
        config = TrialConfig.build(
            instance=instance,
            label=label,
            algorithm=algo,
            delta=delta,
            trials=trials if trials is not None else settings.harness.trials,
            master_seed=seed if seed is not None else settings.harness.master_seed,
            jobs=jobs if jobs is not None else settings.harness.jobs,
            algorithm_config=settings.algorithm,
        )
        header = config.header()
        with TrialStreamWriter(out, header) as writer:
            stats, _ = run_trials(config, writer)

        row = summary_row(stats, header)
        if csv_out is None and not _is_stdout(out):
            csv_out = out.with_suffix(".csv")
        if csv_out is not None:
            write_csv(csv_out, [row])
        err_console.print(_summary_table([row], "Run summary"))
    except BestKError as e:
        _fail(e)


@app.command()
def sweep(
    family: str = typer.Option(..., "--family", "-f", help="Instance family"),
    params: Optional[str] = typer.Option(None, "--params", "-p", help="Fixed family parameters"),
    grid: str = typer.Option(..., "--grid", "-g", help="Swept parameters, e.g. n=8;eps=2^-4,2^-5"),
    algo: List[str] = typer.Option(
        ["bilateral"], "--algo", "-a", callback=_check_algorithms, help="Algorithms (repeatable)"
    ),
    delta: List[float] = typer.Option([0.1], "--delta", "-d", help="Deltas (repeatable)"),
    trials: Optional[int] = typer.Option(None, "--trials", "-n", min=1, help="Trials per cell"),
    seed: Optional[int] = typer.Option(None, "--seed", "-s", help="Master seed"),
    jobs: Optional[int] = typer.Option(None, "--jobs", "-j", min=1, help="Worker processes"),
    out: Optional[Path] = typer.Option(None, "--out", "-o", help="Aggregate CSV (default stdout)"),
    raw_dir: Optional[Path] = typer.Option(None, "--raw-dir", help="Keep each cell's trial stream here"),
):
    """Run a cartesian parameter grid; one aggregate row per cell."""
    settings = get_config()
    try:
        rows = run_sweep(
            family,
            parse_params(params),
            parse_grid(grid),
            algorithms=algo,
            deltas=delta,
            trials=trials if trials is not None else settings.harness.trials,
            master_seed=seed if seed is not None else settings.harness.master_seed,
            jobs=jobs if jobs is not None else settings.harness.jobs,
            algorithm_config=settings.algorithm,
            raw_dir=raw_dir,
        )
        write_csv(out, rows)
        err_console.print(_summary_table(rows, "Sweep summary"))
    except BestKError as e:
        _fail(e)


@app.command()
def report(
    inputs: List[Path] = typer.Option(..., "--in", "-i", help="Trial stream(s) written by run or sweep"),
    fmt: str = typer.Option("csv", "--format", callback=_check_format, help="csv or json"),
    out: Optional[Path] = typer.Option(None, "--out", "-o", help="Output file (default stdout)"),
):
    """Recompute aggregates from raw trial streams."""
    try:
        rows = []
        for path in inputs:
            header, trials = read_trial_stream(path)
            instance = header.instance
            stats = aggregate(trials, header.label, len(instance["arms"]), instance["k"], header.delta)
            rows.append(summary_row(stats, header))
        if fmt == "csv":
            write_csv(out, rows)
        else:
            write_json(out, rows)
    except BestKError as e:
        _fail(e)


@app.command()
def config_info(
    config_file: Optional[str] = typer.Option(
        None,
        "--config",
        "-c",
        help="Configuration file path"
    )
):
    """Display the resolved configuration."""
    try:
        if config_file:
            reload_config(config_file)
    except BestKError as e:
        _fail(e)

    config = get_config()
    algo = config.algorithm

    table = Table(title="Algorithm Configuration")
    table.add_column("Setting", style="cyan")
    table.add_column("Value", style="green")
    for name, value in algo.subroutines.model_dump().items():
        table.add_row(name, str(value))
    table.add_row("delta_prime_variant", algo.delta_prime_variant)
    table.add_row("cap_mult", str(algo.cap_mult))
    table.add_row("complexity_scale", str(algo.complexity_scale))
    table.add_row("complexity_scale (derived)", f"{derive_complexity_scale(algo.subroutines):g}")
    table.add_row("round_cap_slack", str(algo.round_cap_slack))
    table.add_row("baseline_max_phases", str(algo.baseline_max_phases))
    console.print(table)

    table = Table(title="Harness Configuration")
    table.add_column("Setting", style="cyan")
    table.add_column("Value", style="green")
    table.add_row("Master seed", str(config.harness.master_seed))
    table.add_row("Jobs", str(config.harness.jobs))
    table.add_row("Trials", str(config.harness.trials))
    table.add_row("Log Level", config.logging.log_level)
    table.add_row("Log Format", config.logging.log_format)
    console.print(table)


@app.command()
def version():
    """Show version information."""
    console.print(f"bestk-bandit v{__version__}", style="bold green")


def main():
    """Main entry point for the CLI."""
    app()


if __name__ == "__main__":
    main()
