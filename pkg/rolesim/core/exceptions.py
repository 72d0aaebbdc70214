"""
Exception hierarchy and the single place mapping errors to CLI exit codes.
"""

from __future__ import annotations

from pathlib import Path
from typing import Any, Dict, Optional

from pydantic import ValidationError

from rolesim.core.logging import get_logger

logger = get_logger(__name__)

EXIT_OK = 0
EXIT_IO = 1
EXIT_USAGE = 2
EXIT_NUMERICAL = 3


class RoleSimError(Exception):
    """Base error."""

    def __init__(
        self,
        message: str,
        exit_code: int = EXIT_USAGE,
        details: Optional[Dict[str, Any]] = None,
    ):
        self.message = message
        self.exit_code = exit_code
        self.details = details or {}
        super().__init__(self.message)


class DomainError(RoleSimError, ValueError):
    """A precondition or invariant was violated by the caller's input."""

    def __init__(self, message: str, **details: Any):
        super().__init__(message, exit_code=EXIT_USAGE, details=details)


class CapabilityError(RoleSimError):
    """The input is valid but too large for the requested dense method."""

    def __init__(self, operation: str, message: str, **details: Any):
        super().__init__(
            message=f"{operation}: {message}",
            exit_code=EXIT_USAGE,
            details={"operation": operation, **details},
        )


class GraphParseError(RoleSimError):
    """Malformed line in an edge-list, partition or matrix file."""

    def __init__(self, path: Path | str, line_number: int, message: str):
        super().__init__(
            message=f"{path}:{line_number}: {message}",
            exit_code=EXIT_IO,
            details={"path": str(path), "line": line_number},
        )


class GraphIOError(RoleSimError):
    """Reading or writing a file failed."""

    def __init__(self, path: Path | str, message: str):
        super().__init__(
            message=f"cannot access {path}: {message}",
            exit_code=EXIT_IO,
            details={"path": str(path)},
        )


class NumericalError(RoleSimError):
    """Singular systems, or non-convergence where a result would be meaningless."""

    def __init__(self, operation: str, message: str, **details: Any):
        super().__init__(
            message=f"{operation}: {message}",
            exit_code=EXIT_NUMERICAL,
            details={"operation": operation, **details},
        )


def handle_error(exc: BaseException) -> int:
    """Log ``exc`` and return the exit code the command line should use."""
    if isinstance(exc, RoleSimError):
        logger.error(
            exc.message,
            error_type=type(exc).__name__,
            exit_code=exc.exit_code,
            **exc.details,
        )
        return exc.exit_code

    if isinstance(exc, ValidationError):
        logger.error(
            "Invalid command configuration",
            errors="; ".join(
                f"{'.'.join(str(p) for p in err['loc'])}: {err['msg']}" for err in exc.errors()
            ),
        )
        return EXIT_USAGE

    if isinstance(exc, OSError):
        logger.error("IO failure", error=str(exc), error_type=type(exc).__name__)
        return EXIT_IO

    logger.exception("Unhandled exception", error=str(exc), error_type=type(exc).__name__)
    return EXIT_NUMERICAL
