"""Error hierarchy.

Every error raised by the library derives from `DrinfeldLabError` and also from
the closest builtin, so callers can catch either. The CLI maps a handful of
these onto process exit codes (see `drinfeldlab.main`).
"""

from __future__ import annotations

from typing import Any, Optional


class DrinfeldLabError(Exception):
    """Base class for library errors."""


class FieldMismatchError(DrinfeldLabError, TypeError):
    """Operands live in different fields or rings."""


class DivisionByZeroError(DrinfeldLabError, ZeroDivisionError):
    pass


class DomainError(DrinfeldLabError, ValueError):
    """A mathematical precondition failed (zero where nonzero is required, etc.)."""


class UnsupportedFieldError(DrinfeldLabError, NotImplementedError):
    """The operation needs factorization, which the coefficient field lacks."""


class PreconditionError(DrinfeldLabError, ValueError):
    def __init__(self, message: str, place: Any = None) -> None:
        super().__init__(message)
        self.place = place


class ResourceGuardError(DrinfeldLabError, RuntimeError):
    def __init__(self, message: str, bound: Any = None) -> None:
        super().__init__(message)
        self.bound = bound


class SchemaError(DrinfeldLabError, ValueError):
    def __init__(self, message: str, path: str = "") -> None:
        super().__init__(f"{path}: {message}" if path else message)
        self.path = path
        self.message = message


class InequalityViolation(DrinfeldLabError, AssertionError):
    """A checked inequality failed; `instance` is a replayable JSON-ready blob."""

    def __init__(self, message: str, instance: Optional[dict] = None) -> None:
        super().__init__(message)
        self.instance = instance or {}
