"""The three prelude roles and their canonical JSON forms."""

from __future__ import annotations

import json
from dataclasses import dataclass

# Keys of the reply expected from a language model, one per template.
STRING_ARRAY_KEY = "StringArrayTemplate"
CALLS_WRAPPER_KEY = "StringArrayCallsWrapperTemplate"
ROTATE_KEY = "StringArrayRotateFunctionTemplate"
TEMPLATE_KEYS = (STRING_ARRAY_KEY, ROTATE_KEY, CALLS_WRAPPER_KEY)

SOURCES = ("llm", "heuristic", "sidecar")


@dataclass(frozen=True)
class PreludeRoles:
    """Top-level statement indices of the string array, calls wrapper and rotate IIFE."""

    string_array: int
    calls_wrapper: int
    rotate: int
    source: str = "heuristic"

    def __post_init__(self) -> None:
        ids = self.ids
        if any(not isinstance(i, int) or isinstance(i, bool) or i < 0 for i in ids):
            raise ValueError(f"role ids must be non-negative integers: {ids}")
        if len(set(ids)) != 3:
            raise ValueError(f"role ids must be pairwise distinct: {ids}")
        if self.source not in SOURCES:
            raise ValueError(f"unknown detection source {self.source!r}")

    @property
    def ids(self) -> tuple[int, int, int]:
        """(string_array, calls_wrapper, rotate): the order the pass expects."""
        return (self.string_array, self.calls_wrapper, self.rotate)

    def same_ids(self, other: PreludeRoles) -> bool:
        return self.ids == other.ids

    def with_source(self, source: str) -> PreludeRoles:
        return PreludeRoles(self.string_array, self.calls_wrapper, self.rotate, source)

    def to_sidecar(self) -> dict[str, int]:
        return {"string_array": self.string_array, "calls_wrapper": self.calls_wrapper, "rotate": self.rotate}

    @classmethod
    def from_sidecar(cls, data: dict, source: str = "sidecar") -> PreludeRoles:
        if "roles" in data and isinstance(data["roles"], dict):
            data = data["roles"]  # a fixture truth file
        try:
            return cls(int(data["string_array"]), int(data["calls_wrapper"]), int(data["rotate"]), source)
        except (KeyError, TypeError) as exc:
            raise ValueError(f"bad sidecar roles: {exc}") from exc

    def to_reply(self) -> dict[str, int]:
        return {STRING_ARRAY_KEY: self.string_array, ROTATE_KEY: self.rotate, CALLS_WRAPPER_KEY: self.calls_wrapper}

    def render(self) -> str:
        """Canonical reply JSON (what :func:`parse_detection` accepts)."""
        return json.dumps(self.to_reply())
