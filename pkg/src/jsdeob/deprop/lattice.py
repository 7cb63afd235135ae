"""Abstract values for the augmented constant propagation.

Order: ``Uninit`` below everything, ``Unknown`` above everything, and the
middle elements ``Const``, ``PreludeRef`` and ``Inlinable`` mutually
incomparable unless equal.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Union

from ..sandbox.context import value_key
from ..sandbox.values import is_primitive, to_string


class Uninit:
    __slots__ = ()

    def __repr__(self) -> str:
        return "Uninit"

    def __reduce__(self):
        return "UNINIT"


class Unknown:
    __slots__ = ()

    def __repr__(self) -> str:
        return "Unknown"

    def __reduce__(self):
        return "UNKNOWN"


UNINIT = Uninit()
UNKNOWN = Unknown()


class Const:
    """A known primitive.  Equality is SameValue (type-aware, NaN == NaN, +0 != -0)."""

    __slots__ = ("value", "_key")

    def __init__(self, value: Any):
        if not is_primitive(value):
            raise TypeError(f"Const holds primitives only, got {value!r}")
        self.value = value
        self._key = value_key(value)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Const) and self._key == other._key

    def __hash__(self) -> int:
        return hash(("Const", self._key))

    def __repr__(self) -> str:
        if isinstance(self.value, str):
            return f"Const({self.value!r})"
        return f"Const({to_string(self.value)})"


@dataclass(frozen=True)
class PreludeRef:
    name: str


@dataclass(frozen=True)
class Inlinable:
    """An inline expression closed over an environment of parameter values."""

    expr: Any  # InlineExpr
    env: tuple = ()  # ((param_id, AbstractValue), ...)


AbstractValue = Union[Uninit, Const, PreludeRef, Inlinable, Unknown]


def join(a: AbstractValue, b: AbstractValue) -> AbstractValue:
    if a is UNINIT:
        return b
    if b is UNINIT:
        return a
    if a == b:
        return a
    return UNKNOWN


def leq(a: AbstractValue, b: AbstractValue) -> bool:
    return a is UNINIT or b is UNKNOWN or a == b


# -- states: mappings from bindings to values; absent means Uninit -----------

State = dict


def join_states(a: State, b: State) -> State:
    out = dict(a)
    for k, v in b.items():
        cur = out.get(k)
        out[k] = v if cur is None else join(cur, v)
    return out


def states_leq(a: State, b: State) -> bool:
    return all(leq(v, b.get(k, UNINIT)) for k, v in a.items())
