"""Logging configuration for the Best-k-Arm simulator."""

import logging
import sys
from typing import Any, Dict, List, Optional

import structlog

from ..core.exceptions import ConfigurationError
from .settings import get_config

_COMMON_PROCESSORS: List[Any] = [
    structlog.stdlib.filter_by_level,
    structlog.stdlib.add_logger_name,
    structlog.stdlib.add_log_level,
    structlog.stdlib.PositionalArgumentsFormatter(),
]


def _render_chain(fmt: str) -> List[Any]:
    if fmt == "json":
        return [
            structlog.processors.TimeStamper(fmt="iso"),
            structlog.processors.StackInfoRenderer(),
            structlog.processors.format_exc_info,
            structlog.processors.JSONRenderer(sort_keys=True),
        ]
    return [
        structlog.processors.TimeStamper(fmt="%H:%M:%S"),
        structlog.dev.ConsoleRenderer(colors=sys.stderr.isatty()),
    ]


def configure_logging(level: Optional[str] = None, fmt: Optional[str] = None) -> None:
    """Configure structlog and the stdlib root logger.

    Arguments override the ``logging`` section of the global configuration.
    Output goes to stderr; stdout is reserved for reports and trial streams.
    """
    settings = get_config().logging
    level = (level or settings.log_level).upper()
    fmt = (fmt or settings.log_format).lower()

    numeric = logging.getLevelName(level)
    if not isinstance(numeric, int):
        raise ConfigurationError(f"Unknown log level {level!r}", details={"field": "log_level"})
    if fmt not in ("json", "console"):
        raise ConfigurationError(f"Unknown log format {fmt!r}", details={"field": "log_format"})

    logging.basicConfig(
        format="%(message)s",
        stream=sys.stderr,
        level=numeric,
        force=True,
    )
    structlog.configure(
        processors=_COMMON_PROCESSORS + _render_chain(fmt),
        context_class=dict,
        logger_factory=structlog.stdlib.LoggerFactory(),
        wrapper_class=structlog.stdlib.BoundLogger,
        cache_logger_on_first_use=True,
    )


def get_logger(name: str) -> structlog.stdlib.BoundLogger:
    return structlog.get_logger(name)


class LoggerMixin:
    """Gives a class a ``logger`` named after it."""

    @property
    def logger(self) -> structlog.stdlib.BoundLogger:
        return get_logger(type(self).__name__)


def log_function_call(func_name: str, **kwargs: Any) -> Dict[str, Any]:
    """Context for a call; keyword arguments starting with ``_`` are left out."""
    params = {key: value for key, value in kwargs.items() if not key.startswith("_")}
    return {"function": func_name, "parameters": params}


def log_trial(trial_index: int, seed: int, **kwargs: Any) -> Dict[str, Any]:
    """Context for one Monte Carlo trial."""
    return {"trial": trial_index, "seed": seed, **kwargs}


def log_error(error: Exception, context: Optional[Dict[str, Any]] = None) -> Dict[str, Any]:
    """Context for a failure, including the ``details`` of project errors."""
    error_context: Dict[str, Any] = {
        "error": True,
        "error_type": type(error).__name__,
        "error_message": str(error),
    }
    details = getattr(error, "details", None)
    if details:
        error_context["details"] = details
    error_context.update(context or {})
    return error_context
