"""Which top-level names a statement declares and references."""

from __future__ import annotations

from dataclasses import dataclass

from ..analysis.scopes import ScopeInfo
from ..frontend.nodes import Node, walk


@dataclass
class TopLevelRefs:
    """Per top-level statement: declared names, referenced top-level names, free globals."""

    declares: list[set[str]]
    uses: list[set[str]]
    free: list[set[str]]
    owner: dict[str, int]  # top-level name -> declaring statement index (first wins)


def declared_names(stmt: Node) -> set[str]:
    if stmt.kind == "FunctionDecl":
        return {stmt.name}
    if stmt.kind == "VarDecl":
        return {d.children[0].name for d in stmt.children}
    return set()


def top_level_refs(program: Node, info: ScopeInfo) -> TopLevelRefs:
    top = info.function_scopes[program]
    declares = [declared_names(s) for s in program.children]
    owner: dict[str, int] = {}
    for i, names in enumerate(declares):
        for name in sorted(names):
            owner.setdefault(name, i)
    uses: list[set[str]] = []
    free: list[set[str]] = []
    for i, stmt in enumerate(program.children):
        u: set[str] = set()
        f: set[str] = set()
        for n in walk(stmt):
            if n.kind != "Identifier" or n not in info.refs:
                continue
            b = info.refs[n]
            if b is None:
                f.add(n.name)
            elif top.bindings.get(b.name) is b and b.name not in declares[i]:
                u.add(b.name)
        uses.append(u)
        free.append(f)
    return TopLevelRefs(declares, uses, free, owner)
