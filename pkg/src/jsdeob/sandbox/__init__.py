"""Budgeted, host-isolated interpreter for prelude code."""

from .context import RunResult, SandboxContext, call, eval_pure, load, run_program, table_snapshot, value_key
from .errors import BudgetExceeded, PurityViolation, RuntimeThrow, SandboxError, UnsupportedFeature, WallTimeout
from .interpreter import Budget, Interpreter
from .values import NULL, UNDEFINED, JSArray, JSObject, same_value

__all__ = [
    "NULL",
    "UNDEFINED",
    "Budget",
    "BudgetExceeded",
    "Interpreter",
    "JSArray",
    "JSObject",
    "PurityViolation",
    "RunResult",
    "RuntimeThrow",
    "SandboxContext",
    "SandboxError",
    "UnsupportedFeature",
    "WallTimeout",
    "call",
    "eval_pure",
    "load",
    "run_program",
    "same_value",
    "table_snapshot",
    "value_key",
]
