"""Budgeted tree-walking interpreter for the supported subset."""

from __future__ import annotations

import math
import sys
import time
from dataclasses import dataclass
from typing import Any

from ..frontend.nodes import Node
from .builtins import (
    ARRAY_METHODS,
    STRING_METHODS,
    URIError,
    error_object,
    global_names,
    string_method,
)
from .errors import BudgetExceeded, JSThrow, UnsupportedFeature, WallTimeout
from .values import (
    NULL,
    UNDEFINED,
    Closure,
    JSArray,
    JSObject,
    NativeFunction,
    from_units,
    to_units,
    array_index,
    array_join,
    binary_op,
    display,
    to_number,
    to_property_key,
    to_string,
    to_boolean,
    to_uint32,
    type_of,
    unary_op,
)

MAX_CALL_DEPTH = 100

if sys.getrecursionlimit() < 10_000:
    sys.setrecursionlimit(10_000)


@dataclass(frozen=True)
class Budget:
    max_steps: int = 10_000_000
    max_heap_cells: int = 1_000_000
    wall_timeout_secs: float = 60.0

    def __post_init__(self) -> None:
        if self.max_steps <= 0 or self.max_heap_cells <= 0 or self.wall_timeout_secs <= 0:
            raise ValueError("budget limits must be positive")


class Environment:
    __slots__ = ("vars", "parent")

    def __init__(self, vars: dict[str, Any], parent: Environment | None = None):
        self.vars = vars
        self.parent = parent

    def find(self, name: str) -> Environment | None:
        env: Environment | None = self
        while env is not None:
            if name in env.vars:
                return env
            env = env.parent
        return None


class _Break(Exception):
    pass


class _Continue(Exception):
    pass


class _Return(Exception):
    def __init__(self, value: Any):
        self.value = value


_SIGNALS = (JSThrow, _Break, _Continue, _Return)


def _hoisted(body: list[Node]) -> tuple[list[str], list[Node]]:
    names: list[str] = []
    funcs: list[Node] = []
    stack = list(reversed(body))
    while stack:
        node = stack.pop()
        if node is None:
            continue
        k = node.kind
        if k == "FunctionDecl":
            funcs.append(node)
            continue
        if k == "FunctionExpr":
            continue
        if k == "VarDeclarator":
            names.append(node.children[0].name)
        stack.extend(reversed(node.children))
    return names, funcs


class Interpreter:
    def __init__(self, budget: Budget | None = None, console: bool = False):
        self.budget = budget or Budget()
        self.steps = 0
        self.heap = 0
        self.depth = 0
        self.deadline = math.inf
        self.trace: list[str] = []
        self.globals = Environment(global_names())
        if console:
            self.globals.vars["console"] = JSObject({"log": NativeFunction("log", self._console_log)})
        self._hoist_cache: dict[Node, tuple[list[str], list[Node]]] = {}

    # -- accounting --------------------------------------------------------

    def start_clock(self) -> None:
        self.deadline = time.monotonic() + self.budget.wall_timeout_secs

    def tick(self) -> None:
        self.steps += 1
        if self.steps >= self.budget.max_steps:
            self.steps = self.budget.max_steps
            raise BudgetExceeded(f"step budget of {self.budget.max_steps} exhausted")
        if not self.steps & 0x3FF and time.monotonic() > self.deadline:
            raise WallTimeout(f"wall-clock budget of {self.budget.wall_timeout_secs}s exhausted")

    def alloc(self, cells: int) -> None:
        self.heap += cells
        if self.heap > self.budget.max_heap_cells:
            raise BudgetExceeded(f"heap budget of {self.budget.max_heap_cells} cells exhausted")

    def throw(self, name: str, message: str) -> JSThrow:
        return JSThrow(error_object(name, message))

    def _console_log(self, interp: Interpreter, args: list[Any]) -> Any:
        self.trace.append(" ".join(display(a) for a in args))
        return UNDEFINED

    # -- programs and functions -------------------------------------------

    def hoist(self, body: list[Node], env: Environment, key: Node | None = None) -> None:
        if key is not None and key in self._hoist_cache:
            names, funcs = self._hoist_cache[key]
        else:
            names, funcs = _hoisted(body)
            if key is not None:
                self._hoist_cache[key] = (names, funcs)
        for name in names:
            env.vars.setdefault(name, UNDEFINED)
        for fn in funcs:
            env.vars[fn.name] = self.make_closure(fn, env)

    def run_statements(self, statements: list[Node]) -> None:
        self.hoist(statements, self.globals)
        for s in statements:
            self.exec(s, self.globals)

    def make_closure(self, fn: Node, env: Environment) -> Closure:
        self.alloc(1)
        if fn.kind == "FunctionExpr" and fn.name:
            inner = Environment({}, env)
            closure = Closure(fn, inner)
            inner.vars[fn.name] = closure
            return closure
        return Closure(fn, env)

    def call_function(self, fn: Any, args: list[Any]) -> Any:
        self.tick()
        if isinstance(fn, NativeFunction):
            try:
                return fn.fn(self, args)
            except URIError as exc:
                raise self.throw("URIError", str(exc)) from None
        if not isinstance(fn, Closure):
            raise self.throw("TypeError", f"{type_of(fn)} value is not a function")
        if self.depth >= MAX_CALL_DEPTH:
            raise BudgetExceeded("maximum call depth exceeded")
        node = fn.node
        params = node.params
        env = Environment({p.name: (args[i] if i < len(args) else UNDEFINED) for i, p in enumerate(params)},
                          fn.env)
        body = node.body.children
        self.hoist(body, env, key=node)
        self.depth += 1
        try:
            for s in body:
                self.exec(s, env)
        except _Return as r:
            return r.value
        finally:
            self.depth -= 1
        return UNDEFINED

    # -- statements --------------------------------------------------------

    def exec_block(self, stmts: list[Node], env: Environment) -> None:
        for s in stmts:
            self.exec(s, env)

    def exec(self, s: Node, env: Environment) -> None:
        self.tick()
        k = s.kind
        if k == "ExprStmt":
            self.eval(s.children[0], env)
        elif k == "VarDecl":
            for d in s.children:
                if len(d.children) > 1:
                    value = self.eval(d.children[1], env)
                    name = d.children[0].name
                    target = env.find(name) or env
                    target.vars[name] = value
        elif k == "FunctionDecl" or k == "Empty":
            pass
        elif k == "Return":
            raise _Return(self.eval(s.children[0], env) if s.children else UNDEFINED)
        elif k == "If":
            if _truthy(self.eval(s.children[0], env)):
                self.exec(s.children[1], env)
            elif len(s.children) > 2:
                self.exec(s.children[2], env)
        elif k == "Block":
            self.exec_block(s.children, env)
        elif k == "While":
            test, body = s.children
            while _truthy(self.eval(test, env)):
                try:
                    self.exec(body, env)
                except _Break:
                    break
                except _Continue:
                    pass
        elif k == "DoWhile":
            body, test = s.children
            while True:
                try:
                    self.exec(body, env)
                except _Break:
                    break
                except _Continue:
                    pass
                if not _truthy(self.eval(test, env)):
                    break
        elif k == "For":
            init, test, update, body = s.children
            if init is not None:
                if init.kind == "VarDecl":
                    self.exec(init, env)
                else:
                    self.eval(init, env)
            while test is None or _truthy(self.eval(test, env)):
                self.tick()
                try:
                    self.exec(body, env)
                except _Break:
                    break
                except _Continue:
                    pass
                if update is not None:
                    self.eval(update, env)
        elif k == "Break":
            raise _Break()
        elif k == "Continue":
            raise _Continue()
        elif k == "Throw":
            raise JSThrow(self.eval(s.children[0], env))
        elif k == "TryCatch":
            self.exec_try(s, env)
        else:
            raise UnsupportedFeature(f"statement {k}")

    def exec_try(self, s: Node, env: Environment) -> None:
        block, param, handler = s.children[:3]
        finalizer = s.children[3] if len(s.children) > 3 else None
        try:
            try:
                self.exec(block, env)
            except JSThrow as exc:
                if handler is None:
                    raise
                self.exec(handler, Environment({param.name: exc.value}, env))
        except _SIGNALS:
            if finalizer is not None:
                self.exec(finalizer, env)
            raise
        if finalizer is not None:
            self.exec(finalizer, env)

    # -- expressions -------------------------------------------------------

    def eval(self, e: Node, env: Environment) -> Any:
        self.tick()
        k = e.kind
        if k == "Identifier":
            name = e.name
            scope = env.find(name)
            if scope is None:
                raise self.throw("ReferenceError", f"{name} is not defined")
            return scope.vars[name]
        if k == "NumberLit" or k == "StringLit" or k == "BoolLit":
            return e.value
        if k == "Call":
            callee, *arg_nodes = e.children
            if callee.kind == "Member":
                obj = self.eval(callee.children[0], env)
                fn = self.get_member(obj, self.member_key(callee, env))
            else:
                fn = self.eval(callee, env)
            args = [self.eval(a, env) for a in arg_nodes]
            return self.call_function(fn, args)
        if k == "Member":
            obj = self.eval(e.children[0], env)
            return self.get_member(obj, self.member_key(e, env))
        if k == "Binary":
            left = self.eval(e.children[0], env)
            right = self.eval(e.children[1], env)
            op = e.op
            if op == "in":
                return self.has_property(right, to_property_key(left))
            if op == "instanceof":
                raise UnsupportedFeature("instanceof")
            return binary_op(op, left, right)
        if k == "Unary":
            return self.eval_unary(e, env)
        if k == "Logical":
            left = self.eval(e.children[0], env)
            if e.op == "&&":
                return self.eval(e.children[1], env) if _truthy(left) else left
            return left if _truthy(left) else self.eval(e.children[1], env)
        if k == "Conditional":
            test, cons, alt = e.children
            return self.eval(cons if _truthy(self.eval(test, env)) else alt, env)
        if k == "Assign":
            return self.eval_assign(e, env)
        if k == "Update":
            return self.eval_update(e, env)
        if k == "Sequence":
            value = UNDEFINED
            for c in e.children:
                value = self.eval(c, env)
            return value
        if k == "NullLit":
            return NULL
        if k == "ArrayLit":
            items = [self.eval(c, env) for c in e.children]
            self.alloc(len(items) + 1)
            return JSArray(items)
        if k == "ObjectLit":
            props: dict[str, Any] = {}
            for p in e.children:
                key, value = p.children
                props[_key_name(key)] = self.eval(value, env)
            self.alloc(len(props) + 1)
            return JSObject(props)
        if k == "FunctionExpr":
            return self.make_closure(e, env)
        if k == "This":
            raise UnsupportedFeature("'this' is not supported")
        if k == "New":
            raise UnsupportedFeature("'new' is not supported")
        raise UnsupportedFeature(f"expression {k}")

    def member_key(self, member: Node, env: Environment) -> str:
        prop = member.children[1]
        if not member.computed:
            return prop.name
        return to_property_key(self.eval(prop, env))

    def eval_unary(self, e: Node, env: Environment) -> Any:
        op = e.op
        arg = e.children[0]
        if op == "typeof" and arg.kind == "Identifier":
            scope = env.find(arg.name)
            return "undefined" if scope is None else type_of(scope.vars[arg.name])
        if op == "delete":
            if arg.kind == "Member":
                obj = self.eval(arg.children[0], env)
                key = self.member_key(arg, env)
                if isinstance(obj, JSObject):
                    obj.props.pop(key, None)
                elif obj is UNDEFINED or obj is NULL:
                    raise self.throw("TypeError", "cannot delete property of " + to_string(obj))
                return True
            if arg.kind == "Identifier":
                return False
            self.eval(arg, env)
            return True
        return unary_op(op, self.eval(arg, env))

    def assign_to(self, target: Node, env: Environment, value: Any, obj: Any = None, key: str | None = None) -> None:
        if target.kind == "Identifier":
            scope = env.find(target.name) or self.globals
            scope.vars[target.name] = value
        else:
            self.set_member(obj, key, value)

    def eval_assign(self, e: Node, env: Environment) -> Any:
        target, value_node = e.children
        obj = key = None
        if target.kind == "Member":
            obj = self.eval(target.children[0], env)
            key = self.member_key(target, env)
        elif target.kind != "Identifier":
            raise UnsupportedFeature("invalid assignment target")
        if e.op == "=":
            value = self.eval(value_node, env)
        else:
            current = self.eval(target, env) if target.kind == "Identifier" else self.get_member(obj, key)
            value = binary_op(e.op[:-1], current, self.eval(value_node, env))
        self.assign_to(target, env, value, obj, key)
        return value

    def eval_update(self, e: Node, env: Environment) -> Any:
        target = e.children[0]
        obj = key = None
        if target.kind == "Member":
            obj = self.eval(target.children[0], env)
            key = self.member_key(target, env)
            old = to_number(self.get_member(obj, key))
        elif target.kind == "Identifier":
            old = to_number(self.eval(target, env))
        else:
            raise UnsupportedFeature("invalid update target")
        new = old + 1 if e.op == "++" else old - 1
        self.assign_to(target, env, new, obj, key)
        return new if e.prefix else old

    # -- property access ---------------------------------------------------

    def get_member(self, obj: Any, key: str) -> Any:
        if isinstance(obj, JSObject):
            return obj.props.get(key, UNDEFINED)
        if isinstance(obj, JSArray):
            idx = array_index(key)
            if idx is not None:
                return obj.items[idx] if idx < len(obj.items) else UNDEFINED
            if key == "length":
                return float(len(obj.items))
            if key in ARRAY_METHODS:
                return self.array_method(obj, key)
            return UNDEFINED
        if isinstance(obj, str):
            idx = array_index(key)
            if idx is not None:
                units = to_units(obj)
                return from_units(units[idx]) if idx < len(units) else UNDEFINED
            if key == "length":
                return float(len(to_units(obj)))
            if key in STRING_METHODS:
                method = string_method(obj, key)
                return NativeFunction(key, lambda interp, args: method(*args[:2]))
            return UNDEFINED
        if obj is UNDEFINED or obj is NULL:
            raise self.throw("TypeError", f"Cannot read properties of {to_string(obj)} (reading '{key}')")
        return UNDEFINED

    def has_property(self, obj: Any, key: str) -> bool:
        if isinstance(obj, JSObject):
            return key in obj.props
        if isinstance(obj, JSArray):
            idx = array_index(key)
            return key == "length" or (idx is not None and idx < len(obj.items))
        raise self.throw("TypeError", "'in' requires an object")

    def set_member(self, obj: Any, key: str, value: Any) -> None:
        if isinstance(obj, JSObject):
            if key not in obj.props:
                self.alloc(1)
            obj.props[key] = value
        elif isinstance(obj, JSArray):
            idx = array_index(key)
            if idx is not None:
                if idx >= len(obj.items):
                    grow = idx + 1 - len(obj.items)
                    self.alloc(grow)
                    obj.items.extend([UNDEFINED] * grow)
                obj.items[idx] = value
            elif key == "length":
                n = to_uint32(value)
                if n < len(obj.items):
                    del obj.items[n:]
                else:
                    self.alloc(n - len(obj.items))
                    obj.items.extend([UNDEFINED] * (n - len(obj.items)))
        elif obj is UNDEFINED or obj is NULL:
            raise self.throw("TypeError", f"Cannot set properties of {to_string(obj)}")

    def array_method(self, arr: JSArray, name: str) -> NativeFunction:
        if name == "push":
            def push(interp: Interpreter, args: list[Any]) -> float:
                self.alloc(len(args))
                arr.items.extend(args)
                return float(len(arr.items))
            return NativeFunction("push", push)
        if name == "shift":
            return NativeFunction("shift", lambda interp, args: arr.items.pop(0) if arr.items else UNDEFINED)

        def join(interp: Interpreter, args: list[Any]) -> str:
            sep = args[0] if args else UNDEFINED
            return array_join(arr, "," if sep is UNDEFINED else to_string(sep))
        return NativeFunction("join", join)


def _truthy(v: Any) -> bool:
    if v is True:
        return True
    if v is False:
        return False
    return to_boolean(v)


def _key_name(key: Node) -> str:
    if key.kind == "Identifier":
        return key.name
    if key.kind == "StringLit":
        return key.value
    return to_string(key.value)
