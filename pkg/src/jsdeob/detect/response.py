"""Parsing free-form model replies into prelude roles."""

from __future__ import annotations

import ast
import json

from .roles import CALLS_WRAPPER_KEY, ROTATE_KEY, STRING_ARRAY_KEY, TEMPLATE_KEYS, PreludeRoles


class ParseFailure(ValueError):
    """A reply that cannot be used; ``reason`` is malformed, missing_key, duplicate or non_integer."""

    def __init__(self, reason: str, detail: str = ""):
        super().__init__(f"{reason}: {detail}" if detail else reason)
        self.reason = reason


def _first_object(text: str) -> str | None:
    """The first balanced ``{...}`` in ``text``, skipping braces inside quotes."""
    start = text.find("{")
    while start != -1:
        depth = 0
        quote = None
        i = start
        while i < len(text):
            c = text[i]
            if quote:
                if c == "\\":
                    i += 1
                elif c == quote:
                    quote = None
            elif c in "'\"":
                quote = c
            elif c == "{":
                depth += 1
            elif c == "}":
                depth -= 1
                if depth == 0:
                    return text[start:i + 1]
            i += 1
        start = text.find("{", start + 1)
    return None


def _load(obj_text: str) -> object:
    try:
        return json.loads(obj_text)
    except json.JSONDecodeError:
        pass
    # Replies often use single-quoted keys; a Python literal covers that form.
    try:
        return ast.literal_eval(obj_text)
    except (ValueError, SyntaxError, MemoryError, RecursionError) as exc:
        raise ParseFailure("malformed", str(exc)) from None


def _as_id(key: str, value: object) -> int:
    if isinstance(value, list) and len(value) == 1:
        value = value[0]  # tolerate a one-element list of parts
    if isinstance(value, bool) or not isinstance(value, (int, float, str)):
        raise ParseFailure("non_integer", f"{key}={value!r}")
    if isinstance(value, str):
        value = value.strip()
        if not value.isdigit():
            raise ParseFailure("non_integer", f"{key}={value!r}")
        return int(value)
    if isinstance(value, float):
        if not value.is_integer():
            raise ParseFailure("non_integer", f"{key}={value!r}")
        value = int(value)
    if value < 0:
        raise ParseFailure("non_integer", f"{key}={value!r}")
    return value


def parse_detection(response: str) -> PreludeRoles:
    """Extract the roles from the first JSON object in ``response``.

    Surrounding prose and code fences are ignored.
    """
    obj_text = _first_object(response)
    if obj_text is None:
        raise ParseFailure("malformed", "no JSON object in response")
    data = _load(obj_text)
    if not isinstance(data, dict):
        raise ParseFailure("malformed", "reply is not an object")
    for key in TEMPLATE_KEYS:
        if key not in data:
            raise ParseFailure("missing_key", key)
    ids = {key: _as_id(key, data[key]) for key in TEMPLATE_KEYS}
    if len(set(ids.values())) != 3:
        raise ParseFailure("duplicate", str(ids))
    return PreludeRoles(ids[STRING_ARRAY_KEY], ids[CALLS_WRAPPER_KEY], ids[ROTATE_KEY], source="llm")
