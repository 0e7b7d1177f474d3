#!/usr/bin/env python3
"""
Observability
Structured logging with run-id propagation and solver timing.
"""

import inspect
import logging
import json
import sys
import time
import traceback
from typing import Optional, Dict, Any
from dataclasses import dataclass, field, asdict
from datetime import datetime, timezone
from functools import wraps
from contextvars import ContextVar
from enum import Enum

from .config import get_settings

# Identifies one CLI invocation across all log lines
run_id_var: ContextVar[Optional[str]] = ContextVar('run_id', default=None)


class LogLevel(Enum):
    """Log levels."""
    DEBUG = "DEBUG"
    INFO = "INFO"
    WARNING = "WARNING"
    ERROR = "ERROR"
    CRITICAL = "CRITICAL"


@dataclass
class StructuredLogEntry:
    """Structured log entry for JSON logging."""
    timestamp: str
    level: str
    message: str
    logger_name: str
    run_id: Optional[str] = None
    context: Dict[str, Any] = field(default_factory=dict)
    exception: Optional[Dict[str, Any]] = None

    def to_json(self) -> str:
        """Convert to JSON string."""
        return json.dumps(asdict(self), default=str)


def _utc_now() -> str:
    return datetime.now(timezone.utc).isoformat().replace("+00:00", "Z")


class StructuredLogger:
    """
    Structured logger with context management.

    Emits one JSON object per line (or plain text, see configure_logging)
    carrying the current run id and keyword context.
    """

    def __init__(self, name: str, level: Optional[LogLevel] = None):
        self.name = name
        self.logger = logging.getLogger(f"bohmq.{name}")
        if level is not None:
            self.logger.setLevel(getattr(logging, level.value))

    def _create_entry(
        self,
        level: str,
        message: str,
        context: Optional[Dict[str, Any]] = None,
        exc_info: Optional[BaseException] = None
    ) -> StructuredLogEntry:
        exception_data = None
        if exc_info:
            exception_data = {
                "type": type(exc_info).__name__,
                "message": str(exc_info),
                "traceback": ''.join(
                    traceback.format_exception(type(exc_info), exc_info, exc_info.__traceback__)
                )
            }

        return StructuredLogEntry(
            timestamp=_utc_now(),
            level=level,
            message=message,
            logger_name=self.name,
            run_id=run_id_var.get(),
            context=context or {},
            exception=exception_data
        )

    def _emit(self, level: int, entry: StructuredLogEntry):
        if self.logger.isEnabledFor(level):
            self.logger.log(level, entry.message, extra={"structured": entry})

    def debug(self, message: str, **context):
        """Log debug message."""
        self._emit(logging.DEBUG, self._create_entry("DEBUG", message, context))

    def info(self, message: str, **context):
        """Log info message."""
        self._emit(logging.INFO, self._create_entry("INFO", message, context))

    def warning(self, message: str, **context):
        """Log warning message."""
        self._emit(logging.WARNING, self._create_entry("WARNING", message, context))

    def error(self, message: str, exc_info: Optional[BaseException] = None, **context):
        """Log error message."""
        self._emit(logging.ERROR, self._create_entry("ERROR", message, context, exc_info))


class StructuredFormatter(logging.Formatter):
    """JSON formatter; records from plain stdlib loggers are wrapped on the fly."""

    def format(self, record: logging.LogRecord) -> str:
        entry = getattr(record, "structured", None)
        if entry is None:
            entry = StructuredLogEntry(
                timestamp=datetime.fromtimestamp(record.created, timezone.utc).isoformat(),
                level=record.levelname,
                message=record.getMessage(),
                logger_name=record.name,
                run_id=run_id_var.get()
            )
        return entry.to_json()


class TextFormatter(logging.Formatter):
    """Human-readable single-line formatter."""

    def format(self, record: logging.LogRecord) -> str:
        entry = getattr(record, "structured", None)
        context = ""
        if entry is not None and entry.context:
            context = " " + " ".join(f"{k}={v}" for k, v in entry.context.items())
        return f"{record.levelname:<7} {record.name}: {record.getMessage()}{context}"


def configure_logging(level: str = "INFO", log_format: str = "json", stream=None):
    """
    Install a single handler on the package root logger.

    Args:
        level: Minimum level name
        log_format: "json" or "text"
        stream: Output stream (stderr by default so CSV on stdout stays clean)
    """
    root = logging.getLogger("bohmq")
    root.setLevel(getattr(logging, level.upper(), logging.INFO))
    for handler in list(root.handlers):
        root.removeHandler(handler)
    handler = logging.StreamHandler(stream or sys.stderr)
    handler.setFormatter(StructuredFormatter() if log_format == "json" else TextFormatter())
    root.addHandler(handler)
    root.propagate = False


def measure_performance(operation: str, logger: Optional[StructuredLogger] = None):
    """
    Decorator to log duration and outcome of a solver call.

    Example:
        @measure_performance("solve_radial")
        def solve_radial(...):
            ...
    """
    def decorator(func):
        if inspect.iscoroutinefunction(func):
            raise TypeError("measure_performance supports synchronous callables only")

        @wraps(func)
        def wrapper(*args, **kwargs):
            if not get_settings().observability.timing_enabled:
                return func(*args, **kwargs)
            start_time = time.perf_counter()
            error = None
            success = True

            try:
                return func(*args, **kwargs)

            except Exception as e:
                success = False
                error = str(e)
                raise

            finally:
                duration = time.perf_counter() - start_time
                (logger or default_logger).debug(
                    f"Operation completed: {operation}",
                    duration=round(duration, 6),
                    success=success,
                    error=error
                )

        return wrapper

    return decorator


default_logger = StructuredLogger("core")
