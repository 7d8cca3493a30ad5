"""Configuration module for the Best-k-Arm simulator."""

from .settings import (
    AppConfig,
    AlgorithmConfig,
    SubroutineConfig,
    HarnessConfig,
    LoggingConfig,
    derive_complexity_scale,
    get_config,
    reload_config,
    config
)

from .logging import (
    configure_logging,
    get_logger,
    LoggerMixin,
    log_function_call,
    log_trial,
    log_error
)

__all__ = [
    # Settings
    "AppConfig",
    "AlgorithmConfig",
    "SubroutineConfig",
    "HarnessConfig",
    "LoggingConfig",
    "derive_complexity_scale",
    "get_config",
    "reload_config",
    "config",

    # Logging
    "configure_logging",
    "get_logger",
    "LoggerMixin",
    "log_function_call",
    "log_trial",
    "log_error"
]
