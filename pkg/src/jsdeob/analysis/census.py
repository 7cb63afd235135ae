"""Whole-program write counts per binding."""

from __future__ import annotations

from dataclasses import dataclass, field

from ..frontend.nodes import Node
from .scopes import FUNCTION_KINDS, Binding, ScopeInfo


@dataclass
class Write:
    site: Node  # VarDeclarator, Assign, Update or FunctionDecl
    function: Node  # function (or Program) containing the write
    rhs: Node | None  # plain right-hand side; None for compound writes


@dataclass
class AssignmentCensus:
    writes: dict[Binding, list[Write]] = field(default_factory=dict)

    def count(self, b: Binding) -> int:
        return len(self.writes.get(b, ()))

    def single_rhs(self, b: Binding) -> Node | None:
        """The sole plain right-hand side of ``b``, when it is written exactly once."""
        ws = self.writes.get(b, ())
        if len(ws) == 1:
            return ws[0].rhs
        return None

    def written_outside(self, b: Binding) -> bool:
        """True if some write to ``b`` happens in a function other than its own."""
        return any(w.function is not b.function for w in self.writes.get(b, ()))


def census(program: Node, info: ScopeInfo) -> AssignmentCensus:
    """Count VarDecl initializers, assignments, updates and function declarations."""
    out = AssignmentCensus()

    def record(ident: Node, site: Node, fn: Node, rhs: Node | None) -> None:
        b = info.refs.get(ident)
        if b is not None:
            out.writes.setdefault(b, []).append(Write(site, fn, rhs))

    stack: list[tuple[Node, Node]] = [(program, program)]
    while stack:
        node, fn = stack.pop()
        k = node.kind
        if k == "FunctionDecl":
            b = info.function_scopes[fn].lookup(node.name) if fn in info.function_scopes else None
            if b is not None:
                out.writes.setdefault(b, []).append(Write(node, fn, node))
        if k in FUNCTION_KINDS:
            if node is not fn:
                stack.extend((c, node) for c in node.kids())
                continue
        elif k == "VarDeclarator" and len(node.children) > 1:
            record(node.children[0], node, fn, node.children[1])
        elif k == "Assign" and node.children[0].kind == "Identifier":
            record(node.children[0], node, fn, node.children[1] if node.op == "=" else None)
        elif k == "Update" and node.children[0].kind == "Identifier":
            record(node.children[0], node, fn, None)
        stack.extend((c, fn) for c in node.kids())
    return out
