"""The closed builtin surface available inside the sandbox."""

from __future__ import annotations

import math
import re
from typing import Any, Callable

from .values import (
    UNDEFINED,
    JSArray,
    JSObject,
    NativeFunction,
    from_units,
    js_trim,
    to_units,
    to_int32,
    to_integer,
    to_number,
    to_string,
    to_uint32,
)

_FLOAT_PREFIX = re.compile(r"[+-]?(?:Infinity|(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)")
_DIGITS = "0123456789abcdefghijklmnopqrstuvwxyz"


def error_object(name: str, message: str) -> JSObject:
    return JSObject({"name": name, "message": message})


def parse_int(s: Any, radix: Any = UNDEFINED) -> float:
    text = js_trim(to_string(s))
    sign = 1.0
    if text[:1] in ("+", "-"):
        if text[0] == "-":
            sign = -1.0
        text = text[1:]
    r = to_int32(radix)
    strip_prefix = True
    if r != 0:
        if r < 2 or r > 36:
            return math.nan
        strip_prefix = r == 16
    else:
        r = 10
    if strip_prefix and text[:2] in ("0x", "0X"):
        text = text[2:]
        r = 16
    valid = _DIGITS[:r]
    end = 0
    while end < len(text) and text[end].lower() in valid:
        end += 1
    if end == 0:
        return math.nan
    return sign * float(int(text[:end], r))


def parse_float(s: Any) -> float:
    text = js_trim(to_string(s))
    m = _FLOAT_PREFIX.match(text)
    if not m:
        return math.nan
    lit = m.group(0)
    if lit.lstrip("+-") == "Infinity":
        return -math.inf if lit.startswith("-") else math.inf
    return float(lit)


def math_floor(x: Any) -> float:
    n = to_number(x)
    if math.isnan(n) or math.isinf(n) or n == 0:
        return n
    return float(math.floor(n))


def from_char_code(*codes: Any) -> str:
    return from_units("".join(chr(to_uint32(c) & 0xFFFF) for c in codes))


class URIError(Exception):
    pass


def decode_uri_component(s: Any) -> str:
    text = to_string(s)
    out: list[str] = []
    i = 0
    while i < len(text):
        if text[i] != "%":
            out.append(text[i])
            i += 1
            continue
        raw = bytearray()
        while i < len(text) and text[i] == "%":
            h = text[i + 1:i + 3]
            if len(h) != 2 or not all(c in "0123456789abcdefABCDEF" for c in h):
                raise URIError("URI malformed")
            raw.append(int(h, 16))
            i += 3
        try:
            out.append(raw.decode("utf-8"))
        except UnicodeDecodeError as exc:
            raise URIError("URI malformed") from exc
    return "".join(out)


# -- methods on primitive and array receivers ------------------------------

def _clamp_index(v: Any, length: int, default: int) -> int:
    if v is UNDEFINED:
        return default
    n = to_integer(v)
    if n < 0:
        return int(max(length + n, 0))
    return int(min(n, length))


def string_method(text: str, name: str) -> Callable[..., Any] | None:
    s = to_units(text)
    if name == "charAt":
        def char_at(pos: Any = UNDEFINED) -> str:
            i = to_integer(pos)
            return from_units(s[int(i)]) if 0 <= i < len(s) else ""
        return char_at
    if name == "charCodeAt":
        def char_code_at(pos: Any = UNDEFINED) -> float:
            i = to_integer(pos)
            return float(ord(s[int(i)])) if 0 <= i < len(s) else math.nan
        return char_code_at
    if name == "indexOf":
        def index_of(search: Any = UNDEFINED, start: Any = UNDEFINED) -> float:
            pos = int(min(max(to_integer(start), 0), len(s)))
            return float(s.find(to_units(to_string(search)), pos))
        return index_of
    if name == "slice":
        def slice_(start: Any = UNDEFINED, end: Any = UNDEFINED) -> str:
            a = _clamp_index(start, len(s), 0)
            b = _clamp_index(end, len(s), len(s))
            return from_units(s[a:b]) if a < b else ""
        return slice_
    if name == "split":
        def split(sep: Any = UNDEFINED, limit: Any = UNDEFINED) -> JSArray:
            lim = 2**32 - 1 if limit is UNDEFINED else to_uint32(limit)
            if lim == 0:
                return JSArray([])
            if sep is UNDEFINED:
                return JSArray([text])
            sep_s = to_units(to_string(sep))
            parts = list(s) if sep_s == "" else s.split(sep_s)
            return JSArray([from_units(p) for p in parts[:lim]])
        return split
    if name == "replace":
        def replace(pattern: Any = UNDEFINED, replacement: Any = UNDEFINED) -> str:
            pat = to_units(to_string(pattern))
            pos = s.find(pat)
            if pos < 0:
                return text
            rep = to_units(to_string(replacement))
            rep = (rep.replace("$$", "\0").replace("$&", pat)
                   .replace("$`", s[:pos]).replace("$'", s[pos + len(pat):]).replace("\0", "$"))
            return from_units(s[:pos] + rep + s[pos + len(pat):])
        return replace
    return None


ARRAY_METHODS = frozenset({"push", "shift", "join"})
STRING_METHODS = frozenset({"charAt", "charCodeAt", "indexOf", "slice", "split", "replace"})


def global_names() -> dict[str, Any]:
    """Fresh global bindings; contains no handle to the host."""

    def native(name: str, fn: Callable[..., Any]) -> NativeFunction:
        return NativeFunction(name, lambda interp, args: fn(*args))

    return {
        "undefined": UNDEFINED,
        "NaN": math.nan,
        "Infinity": math.inf,
        "parseInt": native("parseInt", lambda s=UNDEFINED, r=UNDEFINED, *_: parse_int(s, r)),
        "parseFloat": native("parseFloat", lambda s=UNDEFINED, *_: parse_float(s)),
        "isNaN": native("isNaN", lambda x=UNDEFINED, *_: math.isnan(to_number(x))),
        "decodeURIComponent": native("decodeURIComponent", lambda s=UNDEFINED, *_: decode_uri_component(s)),
        "String": JSObject({"fromCharCode": native("fromCharCode", from_char_code)}),
        "Math": JSObject({"floor": native("floor", lambda x=UNDEFINED, *_: math_floor(x))}),
    }

