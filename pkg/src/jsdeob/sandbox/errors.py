from __future__ import annotations

from typing import Any


class SandboxError(Exception):
    """Base class: deobfuscation through the sandbox is unavailable."""


class BudgetExceeded(SandboxError):
    pass


class WallTimeout(BudgetExceeded):
    """The wall-clock part of the budget ran out."""


class UnsupportedFeature(SandboxError):
    pass


class RuntimeThrow(SandboxError):
    """An uncaught JavaScript exception (or a call on a non-function)."""

    def __init__(self, message: str, value: Any = None):
        super().__init__(message)
        self.value = value


class PurityViolation(SandboxError):
    """A prelude call answered differently when repeated."""


class JSThrow(Exception):
    """A JavaScript exception in flight; catchable by ``try``/``catch``."""

    def __init__(self, value: Any):
        super().__init__(value)
        self.value = value
