"""Public sandbox API: load prelude code, answer memoized calls, fold constants."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Iterable

from ..frontend.nodes import Node
from .errors import BudgetExceeded, JSThrow, PurityViolation, RuntimeThrow, SandboxError
from .interpreter import Budget, Interpreter
from .values import (
    UNDEFINED,
    Closure,
    JSArray,
    display,
    is_primitive,
    same_value,
)


def value_key(v: Any) -> tuple[str, Any]:
    """Hashable, type-aware key for a primitive (distinguishes -0 and NaN)."""
    if isinstance(v, bool):
        return ("bool", v)
    if isinstance(v, float):
        if math.isnan(v):
            return ("num", "NaN")
        return ("num", v.hex())
    if isinstance(v, str):
        return ("str", v)
    if v is UNDEFINED:
        return ("undefined", None)
    if is_primitive(v):
        return ("null", None)
    return ("ref", id(v))


@dataclass
class SandboxContext:
    interp: Interpreter
    memo: dict[tuple[str, tuple], Any] = field(default_factory=dict)
    calls_executed: int = 0

    @property
    def steps(self) -> int:
        return self.interp.steps

    def global_value(self, name: str) -> Any:
        return self.interp.globals.vars.get(name, UNDEFINED)


def _guarded(interp: Interpreter, thunk):
    try:
        return thunk()
    except JSThrow as exc:
        raise RuntimeThrow(f"uncaught exception: {display(exc.value)}", exc.value) from None
    except RecursionError:
        raise BudgetExceeded("host recursion limit reached") from None


def load(statements: Iterable[Node], budget: Budget | None = None, console: bool = False) -> SandboxContext:
    """Execute top-level statements (typically the three prelude statements).

    Raises:
        BudgetExceeded, UnsupportedFeature, RuntimeThrow.
    """
    interp = Interpreter(budget, console=console)
    interp.start_clock()
    stmts = list(statements)
    _guarded(interp, lambda: interp.run_statements(stmts))
    return SandboxContext(interp)


def call(ctx: SandboxContext, name: str, args: list[Any], check_purity: bool = False) -> Any:
    """Call global function ``name`` with literal arguments; results are memoized.

    With ``check_purity`` a memo miss runs the call twice and raises
    :class:`PurityViolation` if the answers differ.
    """
    # Host ints are JavaScript numbers.
    args = [float(a) if isinstance(a, int) and not isinstance(a, bool) else a for a in args]
    key = (name, tuple(value_key(a) for a in args))
    if key in ctx.memo:
        return ctx.memo[key]
    interp = ctx.interp
    interp.start_clock()

    def once() -> Any:
        fn = interp.globals.vars.get(name)
        if not isinstance(fn, Closure):
            raise RuntimeThrow(f"{name} is not a function")
        ctx.calls_executed += 1
        return _guarded(interp, lambda: interp.call_function(fn, list(args)))

    result = once()
    if check_purity:
        again = once()
        if not same_value(result, again):
            raise PurityViolation(f"{name}{tuple(args)!r} is not idempotent")
    ctx.memo[key] = result
    return result


def eval_pure(expr: Node, budget: Budget | None = None) -> Any:
    """Evaluate a closed expression under JavaScript semantics."""
    interp = Interpreter(budget or Budget(max_steps=1_000_000, wall_timeout_secs=10.0))
    interp.start_clock()
    return _guarded(interp, lambda: interp.eval(expr, interp.globals))


@dataclass
class RunResult:
    trace: list[str]
    error: str | None = None


def run_program(
    statements: Iterable[Node],
    budget: Budget | None = None,
    preload: Iterable[Node] | None = None,
) -> RunResult:
    """Run statements with a recording ``console.log``; capture the trace.

    ``preload`` statements execute first in the same global environment, so
    code whose prelude was stripped can still reach the prelude functions.
    An uncaught exception ends the run and is recorded after the trace.
    """
    interp = Interpreter(budget, console=True)
    interp.start_clock()
    try:
        if preload is not None:
            pre = list(preload)
            _guarded(interp, lambda: interp.run_statements(pre))
        stmts = list(statements)
        _guarded(interp, lambda: interp.run_statements(stmts))
    except RuntimeThrow as exc:
        return RunResult(interp.trace, f"throw: {display(exc.value)}")
    except SandboxError as exc:
        return RunResult(interp.trace, f"{type(exc).__name__}: {exc}")
    return RunResult(interp.trace)


def table_snapshot(ctx: SandboxContext, array_function: str) -> list[Any] | None:
    """Return the string table held by the string-array function, if readable."""
    try:
        value = call(SandboxContext(ctx.interp), array_function, [])
    except SandboxError:
        return None
    if isinstance(value, JSArray):
        return list(value.items)
    return None

