"""Configuration management for the Best-k-Arm simulator."""

import json
import os
from pathlib import Path
from typing import Any, Dict, Optional

from pydantic import Field, ValidationError, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

from ..core.exceptions import ConfigurationError


class SubroutineConfig(BaseSettings):
    """Budget constants of the sampling subroutines.

    The analysis only fixes these up to O(.) factors, so every constant is
    exposed here for calibration.
    """

    model_config = SettingsConfigDict(env_prefix="BESTK_SUB_", case_sensitive=False)

    pac_budget_const: float = Field(
        default=2.0, description="Per-arm budget multiplier of PAC-Best-k"
    )
    em_budget_const: float = Field(
        default=2.0, description="Budget multiplier of the EstMean re-sampling stage"
    )
    elim_round_const: float = Field(
        default=8.0, description="Per-round budget multiplier of the elimination procedure"
    )
    elim_stop_fraction: float = Field(
        default=1 / 20,
        description="Elimination stops once a round removes less than this fraction",
    )

    @field_validator("pac_budget_const", "em_budget_const", "elim_round_const")
    @classmethod
    def validate_positive(cls, v: float) -> float:
        if not v > 0:
            raise ValueError("Budget constants must be positive")
        return v

    @field_validator("elim_stop_fraction")
    @classmethod
    def validate_stop_fraction(cls, v: float) -> float:
        if not 0 < v < 0.1:
            raise ValueError("elim_stop_fraction must lie in (0, 1/10)")
        return v


def derive_complexity_scale(sub: SubroutineConfig) -> float:
    """Scale suggested by the subroutine constants, for calibrating ``complexity_scale``.

    Accuracies of eps_r/8 contribute 64. Per arm and round, PAC-Best-k
    runs at eps_r/8 and again inside EstMean at eps_r/16 (4x), the two
    EstMean re-sampling stages run at eps_r/16 and elimination usually
    needs two passes.
    """
    return 64.0 * (
        5.0 * sub.pac_budget_const
        + 8.0 * sub.em_budget_const
        + 2.0 * sub.elim_round_const
    )


class AlgorithmConfig(BaseSettings):
    """Bilateral-Elimination and baseline configuration."""

    model_config = SettingsConfigDict(env_prefix="BESTK_ALGO_", case_sensitive=False)

    subroutines: SubroutineConfig = Field(default_factory=SubroutineConfig)
    delta_prime_variant: str = Field(
        default="proof",
        description="Confidence of the elimination step (proof: delta_r/min, pseudocode: delta/min)",
    )
    cap_mult: float = Field(
        default=64.0, description="Hard sample cap as a multiple of the scaled upper bound"
    )
    complexity_scale: float = Field(
        default=2688.0,
        description=(
            "Pulls per unit of the constant-free upper bound; the sample cap is "
            "cap_mult * complexity_scale * upper_bound"
        ),
    )
    round_cap_slack: int = Field(
        default=16, description="Extra rounds allowed beyond ceil(log2(1/gap_k))"
    )
    baseline_max_phases: int = Field(
        default=48, description="Doubling phases of the uniform baseline before it gives up"
    )

    @field_validator("delta_prime_variant")
    @classmethod
    def validate_variant(cls, v: str) -> str:
        if v not in ["proof", "pseudocode"]:
            raise ValueError("delta_prime_variant must be proof or pseudocode")
        return v

    @field_validator("cap_mult", "complexity_scale")
    @classmethod
    def validate_cap_factors(cls, v: float) -> float:
        if not v > 0:
            raise ValueError("Cap factors must be positive")
        return v

    @field_validator("round_cap_slack", "baseline_max_phases")
    @classmethod
    def validate_non_negative(cls, v: int) -> int:
        if v < 0:
            raise ValueError("Round limits must be non-negative")
        return v


class HarnessConfig(BaseSettings):
    """Monte Carlo harness defaults."""

    model_config = SettingsConfigDict(env_prefix="BESTK_HARNESS_", case_sensitive=False)

    master_seed: int = Field(default=0, description="Master seed of every trial stream")
    jobs: int = Field(default=1, description="Worker processes for trials")
    trials: int = Field(default=100, description="Default number of trials")

    @field_validator("master_seed")
    @classmethod
    def validate_seed(cls, v: int) -> int:
        if not 0 <= v < 2**64:
            raise ValueError("master_seed must be a 64-bit unsigned integer")
        return v

    @field_validator("jobs", "trials")
    @classmethod
    def validate_count(cls, v: int) -> int:
        if v < 1:
            raise ValueError("Must be at least 1")
        return v


class LoggingConfig(BaseSettings):
    """Logging configuration."""

    model_config = SettingsConfigDict(env_prefix="BESTK_LOG_", case_sensitive=False)

    log_level: str = Field(default="WARNING", description="Logging level")
    log_format: str = Field(default="console", description="Log format (json/console)")

    @field_validator("log_level")
    @classmethod
    def validate_log_level(cls, v: str) -> str:
        valid_levels = ["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"]
        if v.upper() not in valid_levels:
            raise ValueError(f"Log level must be one of {valid_levels}")
        return v.upper()

    @field_validator("log_format")
    @classmethod
    def validate_log_format(cls, v: str) -> str:
        if v.lower() not in ["json", "console"]:
            raise ValueError("Log format must be json or console")
        return v.lower()


class AppConfig(BaseSettings):
    """Main application configuration."""

    model_config = SettingsConfigDict(
        env_file=".env", env_file_encoding="utf-8", case_sensitive=False
    )

    algorithm: AlgorithmConfig = Field(default_factory=AlgorithmConfig)
    harness: HarnessConfig = Field(default_factory=HarnessConfig)
    logging: LoggingConfig = Field(default_factory=LoggingConfig)

    debug: bool = Field(default=False, description="Enable debug mode")

    @classmethod
    def load_config(cls, config_file: Optional[str] = None) -> "AppConfig":
        """Load configuration from a JSON algorithm file or a dotenv file."""
        if not config_file:
            return cls()
        if not os.path.exists(config_file):
            raise ConfigurationError(
                f"Configuration file not found: {config_file}",
                details={"field": "config", "path": config_file},
            )
        if Path(config_file).suffix.lower() != ".json":
            return cls(_env_file=config_file)

        try:
            with open(config_file, "r", encoding="utf-8") as f:
                data = json.load(f)
        except (OSError, json.JSONDecodeError) as e:
            raise ConfigurationError(
                f"Cannot read configuration file {config_file}: {e}",
                details={"field": "config", "path": config_file},
            ) from e
        return cls.from_mapping(data)

    @classmethod
    def from_mapping(cls, data: Dict[str, Any]) -> "AppConfig":
        """Build a configuration from the algorithm-config JSON layout.

        Subroutine constants may sit at the top level or under ``subroutines``;
        ``harness`` and ``logging`` sections are optional.
        """
        data = dict(data)
        harness = data.pop("harness", {})
        logging_section = data.pop("logging", {})
        debug = data.pop("debug", False)
        algorithm = dict(data.pop("algorithm", {}))
        algorithm.update(data)

        sub_fields = set(SubroutineConfig.model_fields)
        subroutines = dict(algorithm.pop("subroutines", {}))
        for name in list(algorithm):
            if name in sub_fields:
                subroutines[name] = algorithm.pop(name)

        unknown = set(algorithm) - set(AlgorithmConfig.model_fields)
        if unknown:
            raise ConfigurationError(
                f"Unknown configuration keys: {sorted(unknown)}",
                details={"field": sorted(unknown)[0]},
            )

        try:
            return cls(
                algorithm=AlgorithmConfig(
                    subroutines=SubroutineConfig(**subroutines), **algorithm
                ),
                harness=HarnessConfig(**harness),
                logging=LoggingConfig(**logging_section),
                debug=debug,
            )
        except ValidationError as e:
            first = e.errors()[0]
            field = ".".join(str(p) for p in first.get("loc", ())) or "config"
            raise ConfigurationError(
                f"Invalid configuration value for {field}: {first.get('msg')}",
                details={"field": field, "errors": e.errors(include_url=False)},
            ) from e

    def resolved(self) -> Dict[str, Any]:
        """JSON-ready view of the resolved configuration, embedded in output files."""
        return {
            "algorithm": self.algorithm.model_dump(),
            "harness": self.harness.model_dump(),
        }


# Global configuration instance
config = AppConfig.load_config()


def get_config() -> AppConfig:
    """Get the global configuration instance."""
    return config


def reload_config(config_file: Optional[str] = None) -> AppConfig:
    """Reload configuration from file and environment variables."""
    global config
    config = AppConfig.load_config(config_file)
    return config
