"""Abstract evaluation of expressions: folding, substitution and prelude calls."""

from __future__ import annotations

from typing import Any

from ..analysis.scopes import Binding, ScopeInfo, resolve_scopes
from ..frontend.nodes import Node
from ..sandbox.builtins import STRING_METHODS
from ..sandbox.context import SandboxContext, call, eval_pure
from ..sandbox.errors import PurityViolation, SandboxError
from ..sandbox.values import (
    NULL,
    UNDEFINED,
    array_index,
    binary_op,
    from_units,
    is_primitive,
    to_property_key,
    to_units,
    unary_op,
)
from .inline import (
    IArrow,
    IBinary,
    ICall,
    IConst,
    IMember,
    IObject,
    IParam,
    IRef,
    IUnary,
    InlineExpr,
    function_to_arrow,
    refs_of,
    to_inline,
)
from .lattice import UNINIT, UNKNOWN, AbstractValue, Const, Inlinable, PreludeRef, join, join_states
from .table import GlobalTable

DEFAULT_DEPTH_CAP = 32

_FOLDABLE_BINARY = frozenset({
    "+", "-", "*", "/", "%", "<<", ">>", ">>>", "&", "|", "^",
    "==", "!=", "===", "!==", "<", ">", "<=", ">=",
})
_FOLDABLE_UNARY = frozenset({"-", "+", "!", "~", "typeof", "void"})
_GLOBAL_CONSTANTS = {"undefined": UNDEFINED, "NaN": float("nan"), "Infinity": float("inf")}


def fold_unary(op: str, v: AbstractValue) -> AbstractValue:
    if isinstance(v, Const) and op in _FOLDABLE_UNARY:
        return Const(unary_op(op, v.value))
    return UNKNOWN


def fold_binary(op: str, a: AbstractValue, b: AbstractValue) -> AbstractValue:
    if isinstance(a, Const) and isinstance(b, Const) and op in _FOLDABLE_BINARY:
        return Const(binary_op(op, a.value, b.value))
    return UNKNOWN


def primitive_member(obj: Any, key: Any) -> AbstractValue:
    """Property read on a primitive, mirroring the sandbox's semantics."""
    if obj is UNDEFINED or obj is NULL:
        return UNKNOWN  # throws at runtime
    k = to_property_key(key)
    if isinstance(obj, str):
        units = to_units(obj)
        idx = array_index(k)
        if idx is not None:
            return Const(from_units(units[idx])) if idx < len(units) else Const(UNDEFINED)
        if k == "length":
            return Const(float(len(units)))
        if k in STRING_METHODS:
            return UNKNOWN
    return Const(UNDEFINED)


def _closed_literal(node: Node) -> bool:
    """Subtree built only from literals, array/object literals and operators."""
    k = node.kind
    if k in ("StringLit", "NumberLit", "BoolLit", "NullLit"):
        return True
    if k == "ArrayLit":
        return all(_closed_literal(c) for c in node.children)
    if k == "ObjectLit":
        return all(_closed_literal(p.children[1]) for p in node.children)
    if k == "Unary":
        return node.op in _FOLDABLE_UNARY and _closed_literal(node.children[0])
    if k in ("Binary", "Logical", "Conditional"):
        if k == "Binary" and node.op not in _FOLDABLE_BINARY:
            return False
        return all(_closed_literal(c) for c in node.children)
    return False


def _has_aggregate(node: Node) -> bool:
    stack = [node]
    while stack:
        n = stack.pop()
        if n.kind in ("ArrayLit", "ObjectLit"):
            return True
        stack.extend(n.kids())
    return False


class Evaluator:
    """Evaluates expressions of one function against a mutable abstract state.

    ``tracked`` bindings live in the state; others resolve through the
    global table or are Unknown.
    """

    def __init__(
        self,
        info: ScopeInfo,
        table: GlobalTable,
        ctx: SandboxContext | None,
        tracked: set[Binding],
        depth_cap: int = DEFAULT_DEPTH_CAP,
        check_purity: bool = True,
    ):
        self.info = info
        self.table = table
        self.ctx = ctx
        self.tracked = tracked
        self.depth_cap = depth_cap
        self.check_purity = check_purity
        self.recorder: dict[Node, AbstractValue] | None = None

    # -- bindings ----------------------------------------------------------

    def table_value(self, b: Binding) -> AbstractValue:
        v = self.table.get(b)
        if v is None:
            return UNKNOWN
        return v

    def lookup(self, ident: Node, state: dict) -> AbstractValue:
        b = self.info.refs.get(ident)
        if b is None:
            if ident.name in _GLOBAL_CONSTANTS:
                return Const(_GLOBAL_CONSTANTS[ident.name])
            return UNKNOWN
        if b in self.tracked:
            v = state.get(b, UNINIT)
            if v is not UNINIT:
                return v
        return self.table_value(b)

    def assign(self, b: Binding | None, v: AbstractValue, state: dict) -> None:
        if b is None or b not in self.tracked:
            return
        if b in self.table:
            state[b] = self.table.get(b)
        elif isinstance(v, Inlinable) and isinstance(v.expr, IObject):
            state[b] = UNKNOWN  # objects are mutable once stored
        else:
            state[b] = v

    # -- AST expressions ---------------------------------------------------

    def eval(self, node: Node, state: dict) -> AbstractValue:
        v = self._eval(node, state)
        if self.recorder is not None and node.kind == "Call":
            self.recorder[node] = join(self.recorder.get(node, UNINIT), v)
        return v

    def _eval(self, node: Node, state: dict) -> AbstractValue:
        k = node.kind
        if k in ("StringLit", "NumberLit", "BoolLit"):
            return Const(node.value)
        if k == "NullLit":
            return Const(NULL)
        if k == "Identifier":
            return self.lookup(node, state)
        if k in ("Unary", "Binary", "Logical", "Conditional") and _has_aggregate(node) and _closed_literal(node):
            return self.fold_closed(node)
        if k == "Unary":
            if node.op == "delete":
                self.eval_effects(node.children[0], state)
                return UNKNOWN
            if node.op == "typeof" and node.children[0].kind == "Identifier":
                v = self.lookup(node.children[0], state)
                return fold_unary("typeof", v)
            return fold_unary(node.op, self.eval(node.children[0], state))
        if k == "Binary":
            left = self.eval(node.children[0], state)
            right = self.eval(node.children[1], state)
            return fold_binary(node.op, left, right)
        if k == "Logical":
            return self.eval_logical(node, state)
        if k == "Conditional":
            return self.eval_conditional(node, state)
        if k == "Assign":
            return self.eval_assign(node, state)
        if k == "Update":
            return self.eval_update(node, state)
        if k == "Sequence":
            v: AbstractValue = UNKNOWN
            for c in node.children:
                v = self.eval(c, state)
            return v
        if k == "Member":
            obj = self.eval(node.children[0], state)
            prop = node.children[1]
            key = self.eval(prop, state) if node.computed else Const(prop.name)
            return self.member(obj, key, 0)
        if k == "Call":
            callee = self.eval(node.children[0], state)
            args = [self.eval(a, state) for a in node.children[1:]]
            return self.apply(callee, args, 0)
        if k == "FunctionExpr":
            arrow = function_to_arrow(node, self.info)
            return Inlinable(arrow) if arrow is not None and self._closed(arrow) else UNKNOWN
        if k == "ObjectLit":
            for p in node.children:
                self.eval(p.children[1], state)
            expr = to_inline(node, self.info)
            return Inlinable(expr) if expr is not None and self._closed(expr) else UNKNOWN
        # ArrayLit, New, This and anything else: evaluate parts for effects.
        self.eval_effects(node, state)
        return UNKNOWN

    def _closed(self, expr: InlineExpr) -> bool:
        return refs_of(expr) <= self.table.entries.keys()

    def eval_effects(self, node: Node, state: dict) -> None:
        for c in node.kids():
            if c.kind in ("FunctionExpr", "FunctionDecl", "Property"):
                if c.kind == "Property":
                    self.eval(c.children[1], state)
                continue
            self.eval(c, state)

    def fold_closed(self, node: Node) -> AbstractValue:
        try:
            value = eval_pure(node)
        except SandboxError:
            return UNKNOWN
        return Const(value) if is_primitive(value) else UNKNOWN

    def eval_logical(self, node: Node, state: dict) -> AbstractValue:
        left = self.eval(node.children[0], state)
        if isinstance(left, Const):
            truthy = unary_op("!", left.value) is False
            if (node.op == "&&") == truthy:
                return self.eval(node.children[1], state)
            self.eval(node.children[1], dict(state))  # dead, but its call sites still get values
            return left
        branch = dict(state)
        self.eval(node.children[1], branch)
        merged = join_states(state, branch)
        state.clear()
        state.update(merged)
        return UNKNOWN

    def eval_conditional(self, node: Node, state: dict) -> AbstractValue:
        test, cons, alt = node.children
        t = self.eval(test, state)
        if isinstance(t, Const):
            taken, dead = (cons, alt) if unary_op("!", t.value) is False else (alt, cons)
            self.eval(dead, dict(state))  # dead, but its call sites still get values
            return self.eval(taken, state)
        s1, s2 = dict(state), dict(state)
        v1 = self.eval(cons, s1)
        v2 = self.eval(alt, s2)
        merged = join_states(s1, s2)
        state.clear()
        state.update(merged)
        return join(v1, v2)

    def eval_assign(self, node: Node, state: dict) -> AbstractValue:
        target, value_node = node.children
        if target.kind == "Member":
            self.eval(target.children[0], state)
            if target.computed:
                self.eval(target.children[1], state)
            v = self.eval(value_node, state)
            return v if node.op == "=" else UNKNOWN
        b = self.info.refs.get(target)
        if node.op == "=":
            v = self.eval(value_node, state)
        else:
            current = self.lookup(target, state)
            v = fold_binary(node.op[:-1], current, self.eval(value_node, state))
        self.assign(b, v, state)
        return v

    def eval_update(self, node: Node, state: dict) -> AbstractValue:
        target = node.children[0]
        if target.kind != "Identifier":
            self.eval_effects(target, state)
            return UNKNOWN
        old = fold_unary("+", self.lookup(target, state))
        new = fold_binary("+" if node.op == "++" else "-", old, Const(1.0))
        self.assign(self.info.refs.get(target), new, state)
        return new if node.prefix else old

    # -- values ------------------------------------------------------------

    def member(self, obj: AbstractValue, key: AbstractValue, depth: int) -> AbstractValue:
        if not isinstance(key, Const):
            return UNKNOWN
        if isinstance(obj, Inlinable) and isinstance(obj.expr, IObject):
            prop = obj.expr.get(to_property_key(key.value))
            if prop is None:
                return Const(UNDEFINED)
            return self.eval_inline(prop, obj.env, depth + 1)
        if isinstance(obj, Const):
            return primitive_member(obj.value, key.value)
        return UNKNOWN

    def apply(self, callee: AbstractValue, args: list[AbstractValue], depth: int) -> AbstractValue:
        if depth > self.depth_cap:
            return UNKNOWN
        if isinstance(callee, PreludeRef):
            if self.ctx is None or not all(isinstance(a, Const) for a in args):
                return UNKNOWN
            try:
                result = call(self.ctx, callee.name, [a.value for a in args], check_purity=self.check_purity)
            except PurityViolation:
                raise
            except SandboxError:
                return UNKNOWN
            return Const(result) if is_primitive(result) else UNKNOWN
        if isinstance(callee, Inlinable) and isinstance(callee.expr, IArrow):
            arrow = callee.expr
            env = dict(callee.env)
            for i, p in enumerate(arrow.params):
                env[p.binding_id] = args[i] if i < len(args) else Const(UNDEFINED)
            return self.eval_inline(arrow.body, tuple(env.items()), depth + 1)
        return UNKNOWN

    def eval_inline(self, e: InlineExpr, env: tuple, depth: int) -> AbstractValue:
        if depth > self.depth_cap:
            return UNKNOWN
        if isinstance(e, IConst):
            return Const(e.value)
        if isinstance(e, IParam):
            for pid, v in env:
                if pid == e.binding_id:
                    return v
            return UNKNOWN
        if isinstance(e, IRef):
            v = self.table.get(e.binding)
            return UNKNOWN if v is None else v
        if isinstance(e, IUnary):
            return fold_unary(e.op, self.eval_inline(e.arg, env, depth + 1))
        if isinstance(e, IBinary):
            a = self.eval_inline(e.left, env, depth + 1)
            b = self.eval_inline(e.right, env, depth + 1)
            return fold_binary(e.op, a, b)
        if isinstance(e, IMember):
            obj = self.eval_inline(e.obj, env, depth + 1)
            key = self.eval_inline(e.key, env, depth + 1)
            return self.member(obj, key, depth + 1)
        if isinstance(e, (IObject, IArrow)):
            return Inlinable(e, env)
        if isinstance(e, ICall):
            callee = self.eval_inline(e.callee, env, depth + 1)
            args = [self.eval_inline(a, env, depth + 1) for a in e.args]
            return self.apply(callee, args, depth + 1)
        return UNKNOWN


def eval_abstract(
    expr: Node,
    state: dict | None = None,
    table: GlobalTable | None = None,
    ctx: SandboxContext | None = None,
    info: ScopeInfo | None = None,
    tracked: set[Binding] | None = None,
) -> AbstractValue:
    """Evaluate one expression abstractly.

    With no scope information the expression is treated as closed (every
    identifier other than ``undefined``/``NaN``/``Infinity`` is Unknown).
    """
    if info is None:
        info = resolve_scopes(Node("Program", [Node("ExprStmt", [expr])]))
    ev = Evaluator(info, table or GlobalTable(), ctx, tracked or set())
    return ev.eval(expr, state if state is not None else {})
