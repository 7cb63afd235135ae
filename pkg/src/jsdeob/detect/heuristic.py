"""Structural signatures for the three prelude statements.

The signatures look at tree shapes rather than lexemes, so cosmetic
variants such as ``!false`` for ``!![]`` or ``for (;;)`` for ``while``
still match.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..analysis.scopes import ScopeInfo, resolve_scopes
from ..frontend.nodes import Node, walk
from ..sandbox.context import eval_pure
from ..sandbox.errors import SandboxError
from ..sandbox.values import to_boolean
from .roles import PreludeRoles

DEFAULT_MIN_STRINGS = 8


class NotFound(LookupError):
    pass


@dataclass(frozen=True)
class HeuristicConfig:
    min_strings: int = DEFAULT_MIN_STRINGS


def _closed_numeric(node: Node) -> bool:
    """An expression made only of number literals and arithmetic."""
    for n in walk(node):
        if n.kind == "NumberLit":
            continue
        if n.kind in ("Unary", "Binary") and n.op in ("-", "+", "*", "/", "%"):
            continue
        return False
    return True


def _constant_truthy(test: Node | None) -> bool:
    if test is None:
        return True
    for n in walk(test):
        if n.kind not in ("BoolLit", "NumberLit", "StringLit", "ArrayLit", "ObjectLit", "Unary"):
            return False
    try:
        return to_boolean(eval_pure(test))
    except SandboxError:
        return False


def _function_of(stmt: Node) -> tuple[str, Node] | None:
    """The (name, function node) for ``function f(){}`` or ``var f = function(){}``."""
    if stmt.kind == "FunctionDecl":
        return stmt.name, stmt
    if stmt.kind == "VarDecl" and len(stmt.children) == 1:
        d = stmt.children[0]
        if len(d.children) > 1 and d.children[1].kind == "FunctionExpr":
            return d.children[0].name, d.children[1]
    return None


def _is_member_call(node: Node, prop: str) -> bool:
    if node.kind != "Call":
        return False
    callee = node.children[0]
    if callee.kind != "Member":
        return False
    key = callee.children[1]
    return (key.kind == "Identifier" and not callee.computed and key.name == prop) or (
        key.kind == "StringLit" and key.value == prop
    )


def _refers(node: Node, info: ScopeInfo, binding) -> bool:
    return any(n.kind == "Identifier" and info.refs.get(n) is binding for n in walk(node))


def is_string_array(stmt: Node, info: ScopeInfo, min_strings: int = DEFAULT_MIN_STRINGS) -> bool:
    found = _function_of(stmt)
    if found is None:
        return False
    name, fn = found
    top = info.function_scopes[info.program]
    binding = top.bindings.get(name)
    has_table = any(
        n.kind == "ArrayLit" and sum(c is not None and c.kind == "StringLit" for c in n.children) >= min_strings
        for n in walk(fn.body)
    )
    if not has_table:
        return False
    for n in walk(fn.body):
        if n.kind == "Assign" and n.op == "=" and n.children[0].kind == "Identifier":
            if info.refs.get(n.children[0]) is binding:
                return True
    return False


def is_calls_wrapper(stmt: Node, info: ScopeInfo, array_binding) -> bool:
    found = _function_of(stmt)
    if found is None:
        return False
    _, fn = found
    calls_array = any(
        n.kind == "Call" and n.children[0].kind == "Identifier" and info.refs.get(n.children[0]) is array_binding
        for n in walk(fn.body)
    )
    if not calls_array:
        return False
    return any(
        n.kind == "Binary" and n.op == "-" and n.children[0].kind == "Identifier" and _closed_numeric(n.children[1])
        for n in walk(fn.body)
    )


def _iife(stmt: Node) -> Node | None:
    if stmt.kind != "ExprStmt":
        return None
    e = stmt.children[0]
    while e.kind == "Unary" and e.op in ("!", "+", "-", "void", "~"):
        e = e.children[0]
    if e.kind == "Call" and e.children[0].kind == "FunctionExpr":
        return e
    return None


def is_rotate(stmt: Node) -> bool:
    call = _iife(stmt)
    if call is None:
        return False
    if not any(_closed_numeric(a) for a in call.children[1:]):
        return False
    body = call.children[0].body
    has_loop = has_rotation = has_parse = has_compare = False
    for n in walk(body):
        if n.kind == "While" and _constant_truthy(n.children[0]):
            has_loop = True
        elif n.kind == "DoWhile" and _constant_truthy(n.children[1]):
            has_loop = True
        elif n.kind == "For" and _constant_truthy(n.children[1]):
            has_loop = True
        elif _is_member_call(n, "push") and len(n.children) == 2 and _is_member_call(n.children[1], "shift"):
            has_rotation = True
        elif n.kind == "Call" and n.children[0].kind == "Identifier" and n.children[0].name == "parseInt":
            has_parse = True
        elif n.kind == "Binary" and n.op in ("===", "=="):
            has_compare = True
    return has_loop and has_rotation and has_parse and has_compare


def heuristic_detect(
    program: Node,
    info: ScopeInfo | None = None,
    config: HeuristicConfig | None = None,
) -> PreludeRoles:
    """Locate the prelude by signature; any role with zero or several candidates raises NotFound."""
    config = config or HeuristicConfig()
    info = info or resolve_scopes(program)
    stmts = program.children
    arrays = [i for i, s in enumerate(stmts) if is_string_array(s, info, config.min_strings)]
    if len(arrays) != 1:
        raise NotFound(f"{len(arrays)} string-array candidates")
    a = arrays[0]
    array_binding = info.function_scopes[program].bindings.get(_function_of(stmts[a])[0])
    wrappers = [i for i, s in enumerate(stmts) if i != a and is_calls_wrapper(s, info, array_binding)]
    if len(wrappers) != 1:
        raise NotFound(f"{len(wrappers)} calls-wrapper candidates")
    rotates = [
        i for i, s in enumerate(stmts)
        if i not in (a, wrappers[0]) and is_rotate(s) and _refers(s, info, array_binding)
    ]
    if len(rotates) != 1:
        raise NotFound(f"{len(rotates)} rotate candidates")
    return PreludeRoles(a, wrappers[0], rotates[0], source="heuristic")
