"""Checks that a role triple respects the fixed dependencies between prelude statements.

The string array is the root: the calls wrapper and the rotate IIFE depend
on it, the rotate IIFE may also use the wrapper, and none of the three may
reach into the rest of the program.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..analysis.scopes import ScopeInfo, resolve_scopes
from ..frontend.nodes import Node
from .refs import TopLevelRefs, top_level_refs
from .roles import PreludeRoles

# Free names prelude code may use without being considered outside the trio.
ALLOWED_GLOBALS = frozenset({
    "parseInt", "parseFloat", "isNaN", "isFinite", "String", "Number", "Boolean", "Array",
    "Object", "Math", "decodeURIComponent", "encodeURIComponent", "escape", "unescape",
    "undefined", "NaN", "Infinity", "atob",
})


@dataclass(frozen=True)
class Violation:
    check: str  # shape, a, b, c, d
    message: str
    edge: tuple[int, int] | None = None  # (from statement, to statement)

    def __str__(self) -> str:
        return self.message


def _role_names(roles: PreludeRoles) -> dict[int, str]:
    return {roles.string_array: "string-array", roles.calls_wrapper: "calls-wrapper", roles.rotate: "rotate"}


def validate_dependencies(
    program: Node,
    roles: PreludeRoles,
    info: ScopeInfo | None = None,
    refs: TopLevelRefs | None = None,
) -> list[Violation]:
    """Return every violated dependency; an empty list means the triple is consistent."""
    n = len(program.children)
    out: list[Violation] = []
    for rid in roles.ids:
        if not 0 <= rid < n:
            out.append(Violation("shape", f"statement {rid} does not exist"))
    if out:
        return out
    info = info or resolve_scopes(program)
    refs = refs or top_level_refs(program, info)
    a, w, r = roles.ids
    label = _role_names(roles)
    stmts = program.children

    if not refs.declares[a]:
        out.append(Violation("shape", f"string-array statement {a} declares no name"))
    if not refs.declares[w]:
        out.append(Violation("shape", f"calls-wrapper statement {w} declares no name"))
    if stmts[r].kind != "ExprStmt":
        out.append(Violation("shape", f"rotate statement {r} is not an expression statement"))

    def uses(src: int, dst: int) -> bool:
        return bool(refs.uses[src] & refs.declares[dst])

    if refs.declares[a] and not uses(w, a):
        out.append(Violation("a", "calls-wrapper does not reference string-array", (w, a)))
    if refs.declares[a] and not uses(r, a):
        out.append(Violation("b", "rotate does not reference string-array", (r, a)))
    if uses(a, w):
        out.append(Violation("d", "string-array references calls-wrapper", (a, w)))
    if uses(a, r):
        out.append(Violation("d", "string-array references rotate", (a, r)))
    if uses(w, r):
        out.append(Violation("d", "calls-wrapper references rotate", (w, r)))

    trio = set(roles.ids)
    for src in roles.ids:
        for name in sorted(refs.uses[src]):
            dst = refs.owner.get(name)
            if dst is not None and dst not in trio:
                out.append(Violation("c", f"{label[src]} references {name!r} declared outside the prelude", (src, dst)))
        for name in sorted(refs.free[src] - ALLOWED_GLOBALS):
            out.append(Violation("c", f"{label[src]} references free global {name!r}"))
    return out
