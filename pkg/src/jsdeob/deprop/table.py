"""The global lookup table: single-assignment aliases, wrappers and object wrappers."""

from __future__ import annotations

from dataclasses import dataclass, field

from ..analysis.census import AssignmentCensus
from ..analysis.scopes import Binding, ScopeInfo
from ..frontend.nodes import Node
from .inline import IArrow, IObject, IRef, InlineExpr, function_to_arrow, refs_of, to_inline
from .lattice import Inlinable, PreludeRef

TableValue = PreludeRef | Inlinable


@dataclass
class GlobalTable:
    entries: dict[Binding, TableValue] = field(default_factory=dict)

    def get(self, b: Binding) -> TableValue | None:
        return self.entries.get(b)

    def __contains__(self, b: Binding) -> bool:
        return b in self.entries

    def __len__(self) -> int:
        return len(self.entries)

    def by_name(self, name: str) -> TableValue | None:
        """Convenience lookup for tests and logs (first binding with that name)."""
        for b, v in self.entries.items():
            if b.name == name:
                return v
        return None


def _only_member_reads(b: Binding, info: ScopeInfo, parents: dict[Node, Node]) -> bool:
    """Every reference to ``b`` (other than its declaration) is ``b[...]`` / ``b.x`` read."""
    for ref in info.references.get(b, ()):
        parent = parents.get(ref)
        if parent is None:
            return False
        if parent.kind == "VarDeclarator" and parent.children[0] is ref:
            continue
        if parent.kind != "Member" or parent.children[0] is not ref:
            return False
        grand = parents.get(parent)
        if grand is not None and grand.kind in ("Assign", "Update") and grand.children[0] is parent:
            return False
        if grand is not None and grand.kind == "Unary" and grand.op == "delete":
            return False
    return True


def parent_map(program: Node) -> dict[Node, Node]:
    out: dict[Node, Node] = {}
    stack = [program]
    while stack:
        n = stack.pop()
        for c in n.kids():
            out[c] = n
            stack.append(c)
    return out


def build_global_table(
    program: Node,
    info: ScopeInfo,
    counts: AssignmentCensus,
    wrapper_names: list[str],
    parents: dict[Node, Node] | None = None,
) -> GlobalTable:
    """Map the calls wrapper to a PreludeRef and single-assignment indirections to inline forms.

    ``wrapper_names`` are the function names declared by the calls-wrapper
    statement.
    """
    parents = parents if parents is not None else parent_map(program)
    top = info.function_scopes[program]
    raw: dict[Binding, TableValue | InlineExpr] = {}
    for name in wrapper_names:
        b = top.bindings.get(name)
        if b is not None:
            raw[b] = PreludeRef(name)

    for b in info.bindings:
        if b in raw or b.kind in ("param", "catch", "self"):
            continue
        rhs = counts.single_rhs(b)
        if rhs is None:
            continue
        if rhs.kind == "Identifier":
            expr = to_inline(rhs, info)
            if not isinstance(expr, IRef):
                continue
        elif rhs.kind in ("FunctionDecl", "FunctionExpr"):
            expr = function_to_arrow(rhs, info)
            if expr is None:
                continue
        elif rhs.kind == "ObjectLit":
            if not _only_member_reads(b, info, parents):
                continue
            expr = to_inline(rhs, info)
            if not isinstance(expr, IObject):
                continue
        else:
            continue
        raw[b] = expr

    # Resolve alias chains to their target; drop entries that reach outside
    # the table or form cycles.
    def resolve(b: Binding, seen: set[Binding]) -> TableValue | InlineExpr | None:
        v = raw.get(b)
        if isinstance(v, IRef):
            if v.binding in seen:
                return None
            return resolve(v.binding, seen | {b})
        return v

    resolved: dict[Binding, TableValue | InlineExpr] = {}
    for b in raw:
        v = resolve(b, set())
        if v is not None:
            resolved[b] = v

    changed = True
    while changed:
        changed = False
        for b, v in list(resolved.items()):
            if isinstance(v, (IArrow, IObject)) and not refs_of(v) <= resolved.keys():
                del resolved[b]
                changed = True

    table = GlobalTable()
    for b, v in resolved.items():
        table.entries[b] = v if isinstance(v, (PreludeRef, Inlinable)) else Inlinable(v)
    return table
