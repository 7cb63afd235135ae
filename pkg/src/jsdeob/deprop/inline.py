"""Inline expressions: the side-effect-free grammar the pass can substitute.

::

    e ::= string | number | unary_op e | e bin_op e | identifier
        | e[e] | { (string: e), ... } | e(e, ...) | (identifier, ...) => e

Identifiers are either parameters of an enclosing arrow (:class:`IParam`,
keyed by binding id so substitution cannot capture) or references to
bindings resolved through the global table (:class:`IRef`).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

from ..analysis.scopes import Binding, ScopeInfo
from ..frontend.nodes import Node, ident, number_lit, string_lit
from ..sandbox.values import to_string


@dataclass(frozen=True)
class IConst:
    value: object  # str or float

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, IConst) or type(self.value) is not type(other.value):
            return False
        if isinstance(self.value, float):
            return self.value.hex() == other.value.hex() or (self.value != self.value and other.value != other.value)
        return self.value == other.value

    def __hash__(self) -> int:
        return hash((type(self.value).__name__, self.value if not isinstance(self.value, float) else self.value.hex()))


@dataclass(frozen=True)
class IParam:
    binding_id: int
    name: str


@dataclass(frozen=True, eq=False)
class IRef:
    binding: Binding

    def __eq__(self, other: object) -> bool:
        return isinstance(other, IRef) and other.binding is self.binding

    def __hash__(self) -> int:
        return id(self.binding)


@dataclass(frozen=True)
class IUnary:
    op: str
    arg: InlineExpr


@dataclass(frozen=True)
class IBinary:
    op: str
    left: InlineExpr
    right: InlineExpr


@dataclass(frozen=True)
class IMember:
    obj: InlineExpr
    key: InlineExpr


@dataclass(frozen=True)
class IObject:
    props: tuple  # ((key string, InlineExpr), ...)

    def get(self, key: str) -> InlineExpr | None:
        found = None
        for k, v in self.props:
            if k == key:
                found = v  # later duplicates win, as in JS
        return found


@dataclass(frozen=True)
class ICall:
    callee: InlineExpr
    args: tuple


@dataclass(frozen=True)
class IArrow:
    params: tuple  # (IParam, ...)
    body: InlineExpr


InlineExpr = Union[IConst, IParam, IRef, IUnary, IBinary, IMember, IObject, ICall, IArrow]

_INLINE_UNARY = frozenset({"-", "+", "!", "~", "typeof"})
_INLINE_BINARY = frozenset({
    "+", "-", "*", "/", "%", "<<", ">>", ">>>", "&", "|", "^",
    "==", "!=", "===", "!==", "<", ">", "<=", ">=",
})


def function_to_arrow(fn: Node, info: ScopeInfo, params: dict[Binding, IParam] | None = None) -> IArrow | None:
    """``function (p...) { return E; }`` becomes ``(p...) => E``; anything else is None."""
    body = fn.body.children
    if len(body) != 1 or body[0].kind != "Return" or not body[0].children:
        return None
    if fn.kind == "FunctionExpr" and fn.name:
        return None  # a self-referencing name has no inline form
    scope = info.function_scopes.get(fn)
    if scope is None:
        return None
    inner = dict(params or {})
    plist = []
    for p in fn.params:
        b = info.refs[p]
        ip = IParam(b.binding_id, p.name)
        inner[b] = ip
        plist.append(ip)
    # Locals other than parameters would need statements; reject them.
    if any(b.kind != "param" for b in scope.bindings.values()):
        return None
    body_expr = to_inline(body[0].children[0], info, inner)
    if body_expr is None:
        return None
    return IArrow(tuple(plist), body_expr)


def to_inline(node: Node, info: ScopeInfo, params: dict[Binding, IParam] | None = None) -> InlineExpr | None:
    """Convert an AST expression to an InlineExpr, or None if outside the grammar."""
    params = params or {}
    k = node.kind
    if k == "StringLit":
        return IConst(node.value)
    if k == "NumberLit":
        return IConst(node.value)
    if k == "Identifier":
        b = info.refs.get(node)
        if b is None:
            return None
        if b in params:
            return params[b]
        if b.kind in ("param", "catch", "self"):
            return None
        return IRef(b)
    if k == "Unary":
        if node.op not in _INLINE_UNARY:
            return None
        arg = to_inline(node.children[0], info, params)
        return None if arg is None else IUnary(node.op, arg)
    if k == "Binary":
        if node.op not in _INLINE_BINARY:
            return None
        left = to_inline(node.children[0], info, params)
        right = to_inline(node.children[1], info, params)
        if left is None or right is None:
            return None
        return IBinary(node.op, left, right)
    if k == "Member":
        obj = to_inline(node.children[0], info, params)
        if obj is None:
            return None
        prop = node.children[1]
        key = IConst(prop.name) if not node.computed else to_inline(prop, info, params)
        return None if key is None else IMember(obj, key)
    if k == "ObjectLit":
        props = []
        for p in node.children:
            key_node, value_node = p.children
            if key_node.kind == "Identifier":
                key = key_node.name
            elif key_node.kind == "StringLit":
                key = key_node.value
            else:
                key = to_string(key_node.value)
            value = to_inline(value_node, info, params)
            if value is None:
                return None
            props.append((key, value))
        return IObject(tuple(props))
    if k == "Call":
        callee = to_inline(node.children[0], info, params)
        if callee is None:
            return None
        args = []
        for a in node.children[1:]:
            ia = to_inline(a, info, params)
            if ia is None:
                return None
            args.append(ia)
        return ICall(callee, tuple(args))
    if k in ("FunctionExpr", "FunctionDecl"):
        return function_to_arrow(node, info, params)
    return None


def refs_of(e: InlineExpr) -> set[Binding]:
    """Bindings referenced through :class:`IRef` anywhere in ``e``."""
    out: set[Binding] = set()
    stack = [e]
    while stack:
        x = stack.pop()
        if isinstance(x, IRef):
            out.add(x.binding)
        elif isinstance(x, IUnary):
            stack.append(x.arg)
        elif isinstance(x, IBinary):
            stack += [x.left, x.right]
        elif isinstance(x, IMember):
            stack += [x.obj, x.key]
        elif isinstance(x, IObject):
            stack += [v for _, v in x.props]
        elif isinstance(x, ICall):
            stack += [x.callee, *x.args]
        elif isinstance(x, IArrow):
            stack.append(x.body)
    return out


def to_ast(e: InlineExpr) -> Node:
    """Render an InlineExpr as a syntax tree (arrows become function expressions)."""
    if isinstance(e, IConst):
        if isinstance(e.value, str):
            return string_lit(e.value)
        v = e.value
        if v < 0 or (v == 0 and str(v).startswith("-")):
            return Node("Unary", [number_lit(-v)], op="-")
        return number_lit(v)
    if isinstance(e, IParam):
        return ident(e.name)
    if isinstance(e, IRef):
        return ident(e.binding.name)
    if isinstance(e, IUnary):
        return Node("Unary", [to_ast(e.arg)], op=e.op)
    if isinstance(e, IBinary):
        return Node("Binary", [to_ast(e.left), to_ast(e.right)], op=e.op)
    if isinstance(e, IMember):
        return Node("Member", [to_ast(e.obj), to_ast(e.key)], computed=True)
    if isinstance(e, IObject):
        return Node("ObjectLit", [Node("Property", [string_lit(k), to_ast(v)]) for k, v in e.props])
    if isinstance(e, ICall):
        return Node("Call", [to_ast(e.callee), *(to_ast(a) for a in e.args)])
    if isinstance(e, IArrow):
        body = Node("Block", [Node("Return", [to_ast(e.body)])])
        return Node("FunctionExpr", [*(ident(p.name) for p in e.params), body])
    raise TypeError(f"not an inline expression: {e!r}")
