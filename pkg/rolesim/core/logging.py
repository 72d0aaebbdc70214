"""
Structured logging shared by the library and the command line.

Diagnostics always go to stderr so that stdout stays machine-parseable.
"""

from __future__ import annotations

import functools
import json
import logging
import sys
import time
from datetime import datetime, timezone
from typing import Any, Callable, Dict, TypeVar

from rolesim.core.config import get_settings

F = TypeVar("F", bound=Callable[..., Any])


class StructuredLogger:
    """
    Logger whose keyword arguments become structured fields.

    Usage:
        logger = get_logger(__name__)
        logger.info("resolved beta", beta=0.31, source="auto")
    """

    def __init__(self, name: str):
        self.logger = logging.getLogger(name)
        self._setup_logger()

    def _setup_logger(self) -> None:
        settings = get_settings()
        level = logging.DEBUG if settings.debug else getattr(
            logging, settings.log_level.upper(), logging.INFO
        )
        self.logger.setLevel(level)

        # avoid duplicate handlers when a module is re-imported
        if self.logger.handlers:
            return

        handler = logging.StreamHandler(sys.stderr)
        handler.setLevel(level)
        if settings.log_format == "json":
            handler.setFormatter(JSONFormatter())
        else:
            handler.setFormatter(
                KeyValueFormatter(
                    fmt="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
                    datefmt="%Y-%m-%d %H:%M:%S",
                )
            )
        self.logger.addHandler(handler)
        self.logger.propagate = False

    def _log(self, level: int, message: str, fields: Dict[str, Any], exc_info: bool = False) -> None:
        self.logger.log(level, message, extra={"extra_fields": fields}, exc_info=exc_info)

    def debug(self, message: str, **kwargs: Any) -> None:
        self._log(logging.DEBUG, message, kwargs)

    def info(self, message: str, **kwargs: Any) -> None:
        self._log(logging.INFO, message, kwargs)

    def warning(self, message: str, **kwargs: Any) -> None:
        self._log(logging.WARNING, message, kwargs)

    def error(self, message: str, **kwargs: Any) -> None:
        self._log(logging.ERROR, message, kwargs)

    def critical(self, message: str, **kwargs: Any) -> None:
        self._log(logging.CRITICAL, message, kwargs)

    def exception(self, message: str, **kwargs: Any) -> None:
        self._log(logging.ERROR, message, kwargs, exc_info=True)


class KeyValueFormatter(logging.Formatter):
    """Human-readable format with ``key=value`` pairs appended."""

    def format(self, record: logging.LogRecord) -> str:
        line = super().format(record)
        fields = getattr(record, "extra_fields", None)
        if fields:
            pairs = " ".join(f"{key}={value}" for key, value in fields.items())
            line = f"{line} | {pairs}"
        return line


class JSONFormatter(logging.Formatter):
    """One JSON object per line."""

    def format(self, record: logging.LogRecord) -> str:
        log_dict: Dict[str, Any] = {
            "timestamp": datetime.now(timezone.utc).isoformat(),
            "level": record.levelname,
            "logger": record.name,
            "message": record.getMessage(),
            "module": record.module,
            "function": record.funcName,
            "line": record.lineno,
        }

        if record.exc_info:
            log_dict["exception"] = self.formatException(record.exc_info)

        fields = getattr(record, "extra_fields", None)
        if fields:
            log_dict.update(fields)

        return json.dumps(log_dict, default=str)


_loggers: Dict[str, StructuredLogger] = {}


def get_logger(name: str) -> StructuredLogger:
    """Return the cached structured logger for ``name``."""
    if name not in _loggers:
        _loggers[name] = StructuredLogger(name)
    return _loggers[name]


def log_execution_time(func: F) -> F:
    """
    Log how long a function took and whether it raised.

    Usage:
        @log_execution_time
        def rank_sweep(...):
            ...
    """

    @functools.wraps(func)
    def wrapper(*args: Any, **kwargs: Any) -> Any:
        start_time = time.perf_counter()
        func_logger = get_logger(func.__module__)

        try:
            result = func(*args, **kwargs)
        except Exception as e:
            func_logger.error(
                f"Function {func.__name__} failed",
                function=func.__name__,
                execution_time_ms=round((time.perf_counter() - start_time) * 1000, 2),
                status="error",
                error=str(e),
                error_type=type(e).__name__,
            )
            raise

        func_logger.info(
            f"Function {func.__name__} completed",
            function=func.__name__,
            execution_time_ms=round((time.perf_counter() - start_time) * 1000, 2),
            status="success",
        )
        return result

    return wrapper  # type: ignore[return-value]
