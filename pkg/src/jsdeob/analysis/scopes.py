"""Name resolution with function-scoped ``var`` hoisting."""

from __future__ import annotations

from dataclasses import dataclass, field

from ..frontend.nodes import Node

FUNCTION_KINDS = ("FunctionDecl", "FunctionExpr")


@dataclass(eq=False)
class Binding:
    name: str
    binding_id: int
    scope_id: int
    kind: str  # var, function, param, catch, self (named function expression)
    decl: Node | None = None
    function: Node | None = None  # owning function node; the Program for globals

    @property
    def display(self) -> str:
        return f"{self.name}#{self.binding_id}"

    def __repr__(self) -> str:
        return f"Binding({self.display}, {self.kind})"


@dataclass(eq=False)
class Scope:
    scope_id: int
    kind: str  # global, function, catch
    node: Node
    parent: Scope | None
    function: Node
    bindings: dict[str, Binding] = field(default_factory=dict)

    def lookup(self, name: str) -> Binding | None:
        scope: Scope | None = self
        while scope is not None:
            b = scope.bindings.get(name)
            if b is not None:
                return b
            scope = scope.parent
        return None


@dataclass
class ScopeInfo:
    program: Node
    scopes: list[Scope]
    bindings: list[Binding]
    # Identifier node -> Binding; None for free (global) names.
    refs: dict[Node, Binding | None]
    # Function (or Program) node -> its scope.
    function_scopes: dict[Node, Scope]
    # Every Identifier that is a read or write of a variable (not a property name).
    references: dict[Binding, list[Node]] = field(default_factory=dict)

    def binding_of(self, ident: Node) -> Binding | None:
        return self.refs.get(ident)

    def declared_name(self, stmt: Node) -> list[Binding]:
        """Bindings introduced by a top-level statement (function or var names)."""
        if stmt.kind == "FunctionDecl":
            b = self.function_scopes[self.program].bindings.get(stmt.name)
            return [b] if b is not None else []
        if stmt.kind == "VarDecl":
            return [self.refs[d.children[0]] for d in stmt.children]
        return []


class _Resolver:
    def __init__(self, program: Node):
        self.program = program
        self.scopes: list[Scope] = []
        self.bindings: list[Binding] = []
        self.refs: dict[Node, Binding | None] = {}
        self.function_scopes: dict[Node, Scope] = {}
        self.pending: list[tuple[Node, Scope]] = []

    def new_scope(self, kind: str, node: Node, parent: Scope | None, function: Node) -> Scope:
        scope = Scope(len(self.scopes), kind, node, parent, function)
        self.scopes.append(scope)
        return scope

    def declare(self, scope: Scope, name: str, kind: str, decl: Node | None) -> Binding:
        existing = scope.bindings.get(name)
        if existing is not None:
            # Re-declaration of a var/function in one scope is the same binding;
            # a function declaration upgrades the kind.
            if kind == "function":
                existing.kind = "function"
            return existing
        b = Binding(name, len(self.bindings), scope.scope_id, kind, decl, scope.function)
        self.bindings.append(b)
        scope.bindings[name] = b
        return b

    def hoist(self, body_owner: Node, scope: Scope) -> None:
        """Declare vars and function declarations of a function body."""
        stack = list(body_owner.kids()) if body_owner.kind == "Program" else [body_owner.body]
        while stack:
            node = stack.pop()
            k = node.kind
            if k == "FunctionDecl":
                self.declare(scope, node.name, "function", node)
                continue
            if k == "FunctionExpr":
                continue
            if k == "VarDeclarator":
                self.declare(scope, node.children[0].name, "var", node)
            stack.extend(node.kids())

    def run(self) -> ScopeInfo:
        top = self.new_scope("global", self.program, None, self.program)
        self.function_scopes[self.program] = top
        self.hoist(self.program, top)
        for stmt in self.program.children:
            self.visit(stmt, top)
        while self.pending:
            fn, parent = self.pending.pop(0)
            self.visit_function(fn, parent)
        references: dict[Binding, list[Node]] = {}
        for ident, b in self.refs.items():
            if b is not None:
                references.setdefault(b, []).append(ident)
        return ScopeInfo(self.program, self.scopes, self.bindings, self.refs,
                         self.function_scopes, references)

    def visit_function(self, fn: Node, parent: Scope) -> None:
        scope = self.new_scope("function", fn, parent, fn)
        self.function_scopes[fn] = scope
        for p in fn.params:
            self.refs[p] = self.declare(scope, p.name, "param", p)
        self.hoist(fn, scope)
        if fn.kind == "FunctionExpr" and fn.name and fn.name not in scope.bindings:
            self.declare(scope, fn.name, "self", fn)
        for stmt in fn.body.children:
            self.visit(stmt, scope)

    def visit(self, node: Node, scope: Scope) -> None:
        k = node.kind
        if k in FUNCTION_KINDS:
            # Bodies are resolved after the enclosing scope is complete.
            self.pending.append((node, scope))
            return
        if k == "Identifier":
            self.refs[node] = scope.lookup(node.name)
            return
        if k == "Member":
            obj, prop = node.children
            self.visit(obj, scope)
            if node.computed:
                self.visit(prop, scope)
            return
        if k == "Property":
            self.visit(node.children[1], scope)
            return
        if k == "TryCatch":
            block, param, handler = node.children[:3]
            self.visit(block, scope)
            if handler is not None:
                catch_scope = self.new_scope("catch", handler, scope, scope.function)
                self.refs[param] = self.declare(catch_scope, param.name, "catch", param)
                self.visit(handler, catch_scope)
            if len(node.children) > 3:
                self.visit(node.children[3], scope)
            return
        for child in node.kids():
            self.visit(child, scope)


def resolve_scopes(program: Node) -> ScopeInfo:
    """Resolve every variable Identifier in ``program`` to its Binding."""
    return _Resolver(program).run()
