"""Runtime values and JavaScript type coercions.

Primitive representation: ``UNDEFINED``/``NULL`` sentinels, ``bool``, ``float``
(every JS number, never ``int``) and ``str``.  Heap values are
:class:`JSArray`, :class:`JSObject`, :class:`Closure` and
:class:`NativeFunction`.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Any, Callable

from ..frontend.printer import number_to_string


class _Sentinel:
    __slots__ = ("name",)

    def __init__(self, name: str):
        self.name = name

    def __repr__(self) -> str:
        return self.name

    def __reduce__(self):
        return (_sentinel, (self.name,))


UNDEFINED = _Sentinel("undefined")
NULL = _Sentinel("null")


def _sentinel(name: str) -> _Sentinel:
    return UNDEFINED if name == "undefined" else NULL


@dataclass(eq=False)
class JSArray:
    items: list[Any] = field(default_factory=list)


@dataclass(eq=False)
class JSObject:
    props: dict[str, Any] = field(default_factory=dict)


@dataclass(eq=False)
class Closure:
    node: Any  # FunctionDecl / FunctionExpr
    env: Any  # defining Environment


@dataclass(eq=False)
class NativeFunction:
    name: str
    fn: Callable[..., Any]


def is_primitive(v: Any) -> bool:
    return v is UNDEFINED or v is NULL or isinstance(v, (bool, float, str))


def is_callable(v: Any) -> bool:
    return isinstance(v, (Closure, NativeFunction))


def type_of(v: Any) -> str:
    if v is UNDEFINED:
        return "undefined"
    if isinstance(v, bool):
        return "boolean"
    if isinstance(v, float):
        return "number"
    if isinstance(v, str):
        return "string"
    if is_callable(v):
        return "function"
    return "object"


def same_value(a: Any, b: Any) -> bool:
    """SameValue: like ``===`` but NaN equals NaN and +0 differs from -0."""
    if isinstance(a, float) and isinstance(b, float):
        if math.isnan(a) and math.isnan(b):
            return True
        return a == b and math.copysign(1.0, a) == math.copysign(1.0, b)
    return strict_equals(a, b)


# -- conversions -----------------------------------------------------------

_WS = " \t\n\v\f\r\u00a0\u1680\u2000\u2001\u2002\u2003\u2004\u2005\u2006\u2007\u2008\u2009\u200a\u2028\u2029\u202f\u205f\u3000\ufeff"
_DECIMAL_RE = re.compile(r"[+-]?(?:Infinity|(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)")
_HEX_RE = re.compile(r"0[xX][0-9a-fA-F]+")


def js_trim(s: str) -> str:
    return s.strip(_WS)


def to_boolean(v: Any) -> bool:
    if v is UNDEFINED or v is NULL:
        return False
    if isinstance(v, bool):
        return v
    if isinstance(v, float):
        return not (v == 0 or math.isnan(v))
    if isinstance(v, str):
        return v != ""
    return True


def string_to_number(s: str) -> float:
    s = js_trim(s)
    if s == "":
        return 0.0
    if _HEX_RE.fullmatch(s):
        return float(int(s[2:], 16))
    if _DECIMAL_RE.fullmatch(s):
        if s.lstrip("+-") == "Infinity":
            return -math.inf if s.startswith("-") else math.inf
        return float(s)
    return math.nan


def to_primitive(v: Any) -> Any:
    if is_primitive(v):
        return v
    if isinstance(v, JSArray):
        return array_join(v, ",")
    if isinstance(v, JSObject):
        return "[object Object]"
    return "function () { [native code] }" if isinstance(v, NativeFunction) else "function"


def to_number(v: Any) -> float:
    if isinstance(v, bool):
        return 1.0 if v else 0.0
    if isinstance(v, float):
        return v
    if isinstance(v, str):
        return string_to_number(v)
    if v is UNDEFINED:
        return math.nan
    if v is NULL:
        return 0.0
    return to_number(to_primitive(v))


def to_string(v: Any) -> str:
    if isinstance(v, str):
        return v
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return number_to_string(v)
    if v is UNDEFINED:
        return "undefined"
    if v is NULL:
        return "null"
    return to_string(to_primitive(v))


def to_property_key(v: Any) -> str:
    return to_string(v)


def to_int32(v: Any) -> int:
    n = to_number(v)
    if math.isnan(n) or math.isinf(n):
        return 0
    i = int(math.trunc(n)) & 0xFFFFFFFF
    return i - (1 << 32) if i >= (1 << 31) else i


def to_uint32(v: Any) -> int:
    n = to_number(v)
    if math.isnan(n) or math.isinf(n):
        return 0
    return int(math.trunc(n)) & 0xFFFFFFFF


def to_integer(v: Any) -> float:
    n = to_number(v)
    if math.isnan(n):
        return 0.0
    if math.isinf(n):
        return n
    return float(math.trunc(n))


def array_join(arr: JSArray, sep: str) -> str:
    return sep.join("" if x is UNDEFINED or x is NULL else to_string(x) for x in arr.items)


def array_index(key: str) -> int | None:
    """Canonical array index for a property key, or None."""
    if key.isdigit() and (key == "0" or key[0] != "0"):
        i = int(key)
        if i < 2**32 - 1:
            return i
    return None


# -- operators -------------------------------------------------------------

# Strings are held as code-point strings; JavaScript indexes UTF-16 code units.
_SURROGATE_PAIR = re.compile("[\ud800-\udbff][\udc00-\udfff]")


def to_units(s: str) -> str:
    """One character per UTF-16 code unit (astral characters become surrogate pairs)."""
    if all(ord(c) <= 0xFFFF for c in s):
        return s
    out = []
    for c in s:
        cp = ord(c)
        if cp > 0xFFFF:
            cp -= 0x10000
            out.append(chr(0xD800 + (cp >> 10)) + chr(0xDC00 + (cp & 0x3FF)))
        else:
            out.append(c)
    return "".join(out)


def from_units(s: str) -> str:
    """Inverse of :func:`to_units`: combine surrogate pairs; lone halves stay."""
    if s.isascii():
        return s
    return _SURROGATE_PAIR.sub(lambda m: m.group().encode("utf-16-le", "surrogatepass").decode("utf-16-le"), s)


def utf16_key(s: str) -> bytes:
    return s.encode("utf-16-be", "surrogatepass")


def strict_equals(a: Any, b: Any) -> bool:
    if isinstance(a, bool) or isinstance(b, bool):
        return isinstance(a, bool) and isinstance(b, bool) and a == b
    if isinstance(a, float) and isinstance(b, float):
        return a == b
    if isinstance(a, str) and isinstance(b, str):
        return a == b
    return a is b


def loose_equals(a: Any, b: Any) -> bool:
    if type_of(a) == type_of(b) and not (a is NULL) ^ (b is NULL):
        return strict_equals(a, b)
    if (a is NULL or a is UNDEFINED) and (b is NULL or b is UNDEFINED):
        return True
    if a is NULL or a is UNDEFINED or b is NULL or b is UNDEFINED:
        return False
    if isinstance(a, float) and isinstance(b, str):
        return a == string_to_number(b)
    if isinstance(a, str) and isinstance(b, float):
        return string_to_number(a) == b
    if isinstance(a, bool):
        return loose_equals(to_number(a), b)
    if isinstance(b, bool):
        return loose_equals(a, to_number(b))
    if isinstance(a, (float, str)) and not is_primitive(b):
        return loose_equals(a, to_primitive(b))
    if not is_primitive(a) and isinstance(b, (float, str)):
        return loose_equals(to_primitive(a), b)
    return False


def _compare(a: Any, b: Any) -> bool | None:
    """Abstract relational comparison ``a < b``; None means undefined (NaN)."""
    pa, pb = to_primitive(a), to_primitive(b)
    if isinstance(pa, str) and isinstance(pb, str):
        if pa.isascii() and pb.isascii():
            return pa < pb
        return utf16_key(pa) < utf16_key(pb)
    na, nb = to_number(pa), to_number(pb)
    if math.isnan(na) or math.isnan(nb):
        return None
    return na < nb


def js_divide(a: float, b: float) -> float:
    if b == 0:
        if a == 0 or math.isnan(a):
            return math.nan
        neg = (math.copysign(1.0, a) < 0) != (math.copysign(1.0, b) < 0)
        return -math.inf if neg else math.inf
    return a / b


def js_modulo(a: float, b: float) -> float:
    if math.isnan(a) or math.isnan(b) or math.isinf(a) or b == 0:
        return math.nan
    if math.isinf(b):
        return a
    if a == 0:
        return a
    return math.fmod(a, b)


def binary_op(op: str, a: Any, b: Any) -> Any:
    """Evaluate a non-logical binary operator on two runtime values."""
    if op == "+":
        pa, pb = to_primitive(a), to_primitive(b)
        if isinstance(pa, str) or isinstance(pb, str):
            return from_units(to_string(pa) + to_string(pb))
        return to_number(pa) + to_number(pb)
    if op == "-":
        return to_number(a) - to_number(b)
    if op == "*":
        return to_number(a) * to_number(b)
    if op == "/":
        return js_divide(to_number(a), to_number(b))
    if op == "%":
        return js_modulo(to_number(a), to_number(b))
    if op == "===":
        return strict_equals(a, b)
    if op == "!==":
        return not strict_equals(a, b)
    if op == "==":
        return loose_equals(a, b)
    if op == "!=":
        return not loose_equals(a, b)
    if op == "<":
        return _compare(a, b) is True
    if op == ">":
        return _compare(b, a) is True
    if op == "<=":
        r = _compare(b, a)
        return r is False
    if op == ">=":
        r = _compare(a, b)
        return r is False
    if op == "&":
        return float(_signed(to_int32(a) & to_int32(b)))
    if op == "|":
        return float(_signed(to_int32(a) | to_int32(b)))
    if op == "^":
        return float(_signed(to_int32(a) ^ to_int32(b)))
    if op == "<<":
        return float(_signed((to_int32(a) << (to_uint32(b) & 31)) & 0xFFFFFFFF))
    if op == ">>":
        return float(to_int32(a) >> (to_uint32(b) & 31))
    if op == ">>>":
        return float(to_uint32(a) >> (to_uint32(b) & 31))
    raise ValueError(f"unsupported binary operator {op}")


def _signed(i: int) -> int:
    i &= 0xFFFFFFFF
    return i - (1 << 32) if i >= (1 << 31) else i


def unary_op(op: str, v: Any) -> Any:
    if op == "!":
        return not to_boolean(v)
    if op == "-":
        return -to_number(v)
    if op == "+":
        return to_number(v)
    if op == "~":
        return float(_signed(~to_int32(v)))
    if op == "typeof":
        return type_of(v)
    if op == "void":
        return UNDEFINED
    raise ValueError(f"unsupported unary operator {op}")


def display(v: Any) -> str:
    """Deterministic rendering used by the recording ``console.log`` stub."""
    if isinstance(v, str):
        return v
    if isinstance(v, JSArray):
        return "[" + ", ".join(_display_nested(x) for x in v.items) + "]"
    if isinstance(v, JSObject):
        return "{" + ", ".join(f"{k}: {_display_nested(x)}" for k, x in v.props.items()) + "}"
    if is_callable(v):
        return "[Function]"
    return to_string(v)


def _display_nested(v: Any) -> str:
    if isinstance(v, str):
        return repr(v)
    return display(v)
