"""Syntax tree model for the supported ES5 subset.

Every node is a :class:`Node` with a ``kind`` string and an ordered ``children``
list.  Child layout per kind:

==============  =====================================================
Program         statements
FunctionDecl    params (Identifier) ..., Block   (``name`` holds the name)
FunctionExpr    params (Identifier) ..., Block   (``name`` may be None)
VarDecl         VarDeclarator ...
VarDeclarator   Identifier [, init]
ExprStmt        expression
Return          [argument]
Throw           argument
If              test, consequent [, alternate]
While           test, body
DoWhile         body, test
For             init|None, test|None, update|None, body
Block           statements
TryCatch        block, param|None, handler|None [, finalizer]
Break/Continue  (none)
Empty           (none)
Identifier      (none)                          ``name``
StringLit       (none)                          ``value``/``raw``
NumberLit       (none)                          ``value``/``raw``
BoolLit         (none)                          ``value``
NullLit         (none)
This            (none)
ArrayLit        elements
ObjectLit       Property ...
Property        key (Identifier|StringLit|NumberLit), value
Unary           argument                        ``op``
Update          argument                        ``op``, ``prefix``
Binary/Logical  left, right                     ``op``
Conditional     test, consequent, alternate
Assign          target, value                   ``op``
Sequence        expressions
Call/New        callee, arguments ...
Member          object, property                ``computed``
==============  =====================================================

Nodes compare by identity so they can key dictionaries; use :func:`same_tree`
for structural comparison.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Any, Callable, Iterator


@dataclass(frozen=True)
class SourceSpan:
    byte_start: int
    byte_end: int
    line: int
    column: int

    def to_json(self) -> dict[str, int]:
        return {
            "byte_start": self.byte_start,
            "byte_end": self.byte_end,
            "line": self.line,
            "column": self.column,
        }

    @classmethod
    def from_json(cls, data: dict[str, int]) -> SourceSpan:
        return cls(data["byte_start"], data["byte_end"], data["line"], data["column"])

    def contains(self, other: SourceSpan) -> bool:
        return self.byte_start <= other.byte_start and other.byte_end <= self.byte_end


STATEMENT_KINDS = frozenset({
    "FunctionDecl", "VarDecl", "ExprStmt", "Return", "Throw", "If", "While",
    "DoWhile", "For", "Block", "TryCatch", "Break", "Continue", "Empty",
})

LITERAL_KINDS = frozenset({"StringLit", "NumberLit", "BoolLit", "NullLit"})


@dataclass(eq=False)
class Node:
    kind: str
    children: list[Any] = field(default_factory=list)
    span: SourceSpan | None = None
    name: str | None = None
    value: Any = None
    raw: str | None = None
    op: str | None = None
    computed: bool = False
    prefix: bool = False

    def __repr__(self) -> str:
        extra = ""
        for attr in ("name", "op", "value"):
            val = getattr(self, attr)
            if val is not None:
                extra += f" {attr}={val!r}"
        return f"<{self.kind}{extra} children={len(self.children)}>"

    # Named accessors for the layouts documented above.
    @property
    def params(self) -> list[Node]:
        return self.children[:-1]

    @property
    def body(self) -> Node:
        if self.kind in ("FunctionDecl", "FunctionExpr"):
            return self.children[-1]
        if self.kind in ("While", "For"):
            return self.children[-1]
        if self.kind == "DoWhile":
            return self.children[0]
        raise AttributeError(f"{self.kind} has no body")

    def kids(self) -> Iterator[Node]:
        """Yield the non-empty children."""
        for child in self.children:
            if child is not None:
                yield child


def walk(node: Node) -> Iterator[Node]:
    """Pre-order traversal of ``node`` and all of its descendants."""
    stack = [node]
    while stack:
        current = stack.pop()
        yield current
        stack.extend(reversed([c for c in current.children if c is not None]))


def walk_no_functions(node: Node) -> Iterator[Node]:
    """Pre-order traversal that does not descend into nested function bodies."""
    stack = [node]
    while stack:
        current = stack.pop()
        yield current
        if current is not node and current.kind in ("FunctionDecl", "FunctionExpr"):
            continue
        stack.extend(reversed([c for c in current.children if c is not None]))


def _same_number(a: float, b: float) -> bool:
    if math.isnan(a) and math.isnan(b):
        return True
    return a == b and math.copysign(1.0, a) == math.copysign(1.0, b)


def same_tree(a: Node | None, b: Node | None) -> bool:
    """Structural equality ignoring spans and literal lexemes."""
    if a is None or b is None:
        return a is b
    if a.kind != b.kind or a.name != b.name or a.op != b.op:
        return False
    if a.computed != b.computed or a.prefix != b.prefix:
        return False
    if a.kind == "NumberLit":
        if not _same_number(a.value, b.value):
            return False
    elif a.value != b.value or type(a.value) is not type(b.value):
        return False
    if len(a.children) != len(b.children):
        return False
    return all(same_tree(x, y) for x, y in zip(a.children, b.children))


def copy_tree(node: Node) -> Node:
    return replace(node, children=[copy_tree(c) if c is not None else None for c in node.children])


def rebuild(node: Node, fn: Callable[[Node], Node | None]) -> Node:
    """Return a copy of ``node`` where ``fn`` may substitute any subtree.

    ``fn`` is called top-down; a non-None result replaces that subtree and is
    not visited further.  Untouched nodes keep their spans.
    """
    sub = fn(node)
    if sub is not None:
        return sub
    children = [rebuild(c, fn) if c is not None else None for c in node.children]
    return replace(node, children=children)


# Small constructors used by the transforms and the fixture generator.

def ident(name: str) -> Node:
    return Node("Identifier", name=name)


def string_lit(value: str) -> Node:
    return Node("StringLit", value=value)


def number_lit(value: float, raw: str | None = None) -> Node:
    return Node("NumberLit", value=float(value), raw=raw)


def literal_for(value: Any) -> Node | None:
    """Build a literal node for a primitive value, or None if not printable as one.

    Negative numbers become ``Unary('-', NumberLit)``; NaN, infinities and
    negative zero have no literal spelling and yield None.
    """
    if isinstance(value, bool):
        return Node("BoolLit", value=value)
    if isinstance(value, str):
        return string_lit(value)
    if isinstance(value, float):
        if math.isnan(value) or math.isinf(value):
            return None
        if value == 0 and math.copysign(1.0, value) < 0:
            return None
        if value < 0:
            return Node("Unary", [number_lit(-value)], op="-")
        return number_lit(value)
    return None
