"""Recursive-descent parser producing :class:`~jsdeob.frontend.nodes.Node` trees."""

from __future__ import annotations

from itertools import accumulate

from .lexer import FUTURE_RESERVED, ParseError, Token, tokenize
from .nodes import Node, SourceSpan

ASSIGN_OPS = frozenset({"=", "+=", "-=", "*=", "/=", "%=", "<<=", ">>=", ">>>=", "&=", "|=", "^="})

BINARY_PRECEDENCE = {
    "||": 1, "&&": 2, "|": 3, "^": 4, "&": 5,
    "==": 6, "!=": 6, "===": 6, "!==": 6,
    "<": 7, ">": 7, "<=": 7, ">=": 7, "instanceof": 7, "in": 7,
    "<<": 8, ">>": 8, ">>>": 8,
    "+": 9, "-": 9,
    "*": 10, "/": 10, "%": 10,
}

UNARY_OPS = frozenset({"!", "~", "+", "-", "typeof", "void", "delete"})

_UNSUPPORTED_KEYWORDS = {
    "with": "'with' statements are not supported",
    "switch": "'switch' statements are not supported",
    "debugger": "'debugger' statements are not supported",
}


class Parser:
    def __init__(self, source: str):
        self.source = source
        self.toks = tokenize(source)
        self.i = 0
        self.prev_end = 0
        if source.isascii():
            self._bytes = None
        else:
            self._bytes = [0, *accumulate(len(c.encode("utf-8", "surrogatepass")) for c in source)]

    # -- token helpers -----------------------------------------------------

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def peek(self, k: int = 1) -> Token:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def advance(self) -> Token:
        t = self.toks[self.i]
        if t.type != "eof":
            self.i += 1
        self.prev_end = t.end
        return t

    def at(self, value: str) -> bool:
        t = self.tok
        return t.type in ("punct", "keyword") and t.value == value

    def eat(self, value: str) -> bool:
        if self.at(value):
            self.advance()
            return True
        return False

    def expect(self, value: str) -> Token:
        if not self.at(value):
            raise self.unexpected(f"expected '{value}'")
        return self.advance()

    def unexpected(self, expected: str = "") -> ParseError:
        t = self.tok
        found = "end of input" if t.type == "eof" else repr(t.raw)
        msg = f"unexpected {found}"
        if t.type == "name" and t.value in FUTURE_RESERVED:
            msg = f"unsupported reserved word {t.value!r}"
        if expected:
            msg += f", {expected}"
        return ParseError(msg, t.line, t.column)

    def semicolon(self) -> None:
        if self.eat(";"):
            return
        if self.at("}") or self.tok.type == "eof" or self.tok.newline_before:
            return
        raise self.unexpected("expected ';'")

    def span(self, start: Token) -> SourceSpan:
        a, b = start.start, self.prev_end
        if self._bytes is not None:
            a, b = self._bytes[a], self._bytes[b]
        return SourceSpan(a, b, start.line, start.column)

    def finish(self, node: Node, start: Token) -> Node:
        node.span = self.span(start)
        return node

    def identifier_name(self) -> Node:
        t = self.tok
        if t.type == "name":
            if t.value in FUTURE_RESERVED:
                raise self.unexpected()
            self.advance()
            return self.finish(Node("Identifier", name=t.value), t)
        raise self.unexpected("expected identifier")

    # -- statements --------------------------------------------------------

    def program(self) -> Node:
        start = self.tok
        body = []
        while self.tok.type != "eof":
            body.append(self.statement())
        node = Node("Program", body)
        if body:
            return self.finish(node, start)
        node.span = SourceSpan(0, 0, 1, 1)
        return node

    def statement(self) -> Node:
        t = self.tok
        if t.type == "punct":
            if t.value == "{":
                return self.block()
            if t.value == ";":
                self.advance()
                return self.finish(Node("Empty"), t)
        if t.type == "keyword":
            v = t.value
            if v in _UNSUPPORTED_KEYWORDS:
                raise ParseError(_UNSUPPORTED_KEYWORDS[v], t.line, t.column)
            handler = getattr(self, f"stmt_{v}", None)
            if handler is not None:
                return handler()
        if t.type == "name" and self.peek().type == "punct" and self.peek().value == ":":
            raise ParseError("labelled statements are not supported", t.line, t.column)
        expr = self.expression()
        self.semicolon()
        return self.finish(Node("ExprStmt", [expr]), t)

    def block(self) -> Node:
        start = self.expect("{")
        body = []
        while not self.at("}"):
            if self.tok.type == "eof":
                raise self.unexpected("expected '}'")
            body.append(self.statement())
        self.advance()
        return self.finish(Node("Block", body), start)

    def stmt_var(self, in_for: bool = False) -> Node:
        start = self.advance()
        decls = []
        while True:
            dstart = self.tok
            name = self.identifier_name()
            kids = [name]
            if self.eat("="):
                kids.append(self.assignment(no_in=in_for))
            decls.append(self.finish(Node("VarDeclarator", kids), dstart))
            if not self.eat(","):
                break
        if not in_for:
            self.semicolon()
        return self.finish(Node("VarDecl", decls), start)

    def stmt_function(self) -> Node:
        start = self.tok
        node = self.function(declaration=True)
        return self.finish(node, start)

    def function(self, declaration: bool) -> Node:
        start = self.expect("function")
        if self.at("*"):
            raise ParseError("generator functions are not supported", self.tok.line, self.tok.column)
        name = None
        if self.tok.type == "name":
            name = self.identifier_name().name
        elif declaration:
            raise self.unexpected("expected function name")
        self.expect("(")
        params = []
        while not self.at(")"):
            params.append(self.identifier_name())
            if not self.at(")"):
                self.expect(",")
        self.advance()
        body = self.block()
        kind = "FunctionDecl" if declaration else "FunctionExpr"
        return self.finish(Node(kind, [*params, body], name=name), start)

    def stmt_return(self) -> Node:
        start = self.advance()
        kids = []
        if not (self.at(";") or self.at("}") or self.tok.type == "eof" or self.tok.newline_before):
            kids.append(self.expression())
        self.semicolon()
        return self.finish(Node("Return", kids), start)

    def stmt_throw(self) -> Node:
        start = self.advance()
        if self.tok.newline_before:
            raise self.unexpected("line break after 'throw'")
        arg = self.expression()
        self.semicolon()
        return self.finish(Node("Throw", [arg]), start)

    def stmt_if(self) -> Node:
        start = self.advance()
        self.expect("(")
        test = self.expression()
        self.expect(")")
        kids = [test, self.statement()]
        if self.eat("else"):
            kids.append(self.statement())
        return self.finish(Node("If", kids), start)

    def stmt_while(self) -> Node:
        start = self.advance()
        self.expect("(")
        test = self.expression()
        self.expect(")")
        return self.finish(Node("While", [test, self.statement()]), start)

    def stmt_do(self) -> Node:
        start = self.advance()
        body = self.statement()
        self.expect("while")
        self.expect("(")
        test = self.expression()
        self.expect(")")
        self.eat(";")
        return self.finish(Node("DoWhile", [body, test]), start)

    def stmt_for(self) -> Node:
        start = self.advance()
        self.expect("(")
        init = test = update = None
        if self.at("var"):
            init = self.stmt_var(in_for=True)
        elif not self.at(";"):
            init = self.expression(no_in=True)
        if self.at("in"):
            raise ParseError("'for-in' loops are not supported", self.tok.line, self.tok.column)
        self.expect(";")
        if not self.at(";"):
            test = self.expression()
        self.expect(";")
        if not self.at(")"):
            update = self.expression()
        self.expect(")")
        body = self.statement()
        return self.finish(Node("For", [init, test, update, body]), start)

    def stmt_break(self) -> Node:
        return self._jump("Break")

    def stmt_continue(self) -> Node:
        return self._jump("Continue")

    def _jump(self, kind: str) -> Node:
        start = self.advance()
        if self.tok.type == "name" and not self.tok.newline_before:
            raise ParseError("labelled jumps are not supported", self.tok.line, self.tok.column)
        self.semicolon()
        return self.finish(Node(kind), start)

    def stmt_try(self) -> Node:
        start = self.advance()
        block = self.block()
        param = handler = finalizer = None
        if self.eat("catch"):
            self.expect("(")
            param = self.identifier_name()
            self.expect(")")
            handler = self.block()
        if self.eat("finally"):
            finalizer = self.block()
        if handler is None and finalizer is None:
            raise self.unexpected("expected 'catch' or 'finally'")
        kids = [block, param, handler]
        if finalizer is not None:
            kids.append(finalizer)
        return self.finish(Node("TryCatch", kids), start)

    # -- expressions -------------------------------------------------------

    def expression(self, no_in: bool = False) -> Node:
        start = self.tok
        first = self.assignment(no_in)
        if not self.at(","):
            return first
        items = [first]
        while self.eat(","):
            items.append(self.assignment(no_in))
        return self.finish(Node("Sequence", items), start)

    def assignment(self, no_in: bool = False) -> Node:
        start = self.tok
        left = self.conditional(no_in)
        t = self.tok
        if t.type == "punct" and t.value in ASSIGN_OPS:
            if left.kind not in ("Identifier", "Member"):
                raise ParseError("invalid assignment target", t.line, t.column)
            self.advance()
            right = self.assignment(no_in)
            return self.finish(Node("Assign", [left, right], op=t.value), start)
        return left

    def conditional(self, no_in: bool) -> Node:
        start = self.tok
        test = self.binary(0, no_in)
        if not self.eat("?"):
            return test
        cons = self.assignment()
        self.expect(":")
        alt = self.assignment(no_in)
        return self.finish(Node("Conditional", [test, cons, alt]), start)

    def binary(self, min_prec: int, no_in: bool) -> Node:
        start = self.tok
        left = self.unary()
        while True:
            t = self.tok
            if t.type not in ("punct", "keyword"):
                break
            prec = BINARY_PRECEDENCE.get(t.value)
            if prec is None or prec <= min_prec or (no_in and t.value == "in"):
                break
            self.advance()
            right = self.binary(prec, no_in)
            kind = "Logical" if t.value in ("||", "&&") else "Binary"
            left = self.finish(Node(kind, [left, right], op=t.value), start)
        return left

    def unary(self) -> Node:
        t = self.tok
        if t.type in ("punct", "keyword") and t.value in UNARY_OPS:
            self.advance()
            arg = self.unary()
            return self.finish(Node("Unary", [arg], op=t.value), t)
        if t.type == "punct" and t.value in ("++", "--"):
            self.advance()
            arg = self.unary()
            if arg.kind not in ("Identifier", "Member"):
                raise ParseError("invalid update target", t.line, t.column)
            return self.finish(Node("Update", [arg], op=t.value, prefix=True), t)
        return self.postfix()

    def postfix(self) -> Node:
        start = self.tok
        expr = self.call_member()
        t = self.tok
        if t.type == "punct" and t.value in ("++", "--") and not t.newline_before:
            if expr.kind not in ("Identifier", "Member"):
                raise ParseError("invalid update target", t.line, t.column)
            self.advance()
            return self.finish(Node("Update", [expr], op=t.value, prefix=False), start)
        return expr

    def arguments(self) -> list[Node]:
        self.expect("(")
        args = []
        while not self.at(")"):
            args.append(self.assignment())
            if not self.at(")"):
                self.expect(",")
        self.advance()
        return args

    def call_member(self) -> Node:
        start = self.tok
        if self.at("new"):
            self.advance()
            callee = self.member_only()
            args = self.arguments() if self.at("(") else []
            expr = self.finish(Node("New", [callee, *args]), start)
        else:
            expr = self.primary()
        while True:
            if self.at("."):
                self.advance()
                prop = self.property_name_after_dot()
                expr = self.finish(Node("Member", [expr, prop], computed=False), start)
            elif self.at("["):
                self.advance()
                prop = self.expression()
                self.expect("]")
                expr = self.finish(Node("Member", [expr, prop], computed=True), start)
            elif self.at("("):
                args = self.arguments()
                expr = self.finish(Node("Call", [expr, *args]), start)
            else:
                return expr

    def member_only(self) -> Node:
        """Callee of ``new``: a member expression without call suffixes."""
        start = self.tok
        if self.at("new"):
            self.advance()
            callee = self.member_only()
            args = self.arguments() if self.at("(") else []
            expr = self.finish(Node("New", [callee, *args]), start)
        else:
            expr = self.primary()
        while True:
            if self.at("."):
                self.advance()
                prop = self.property_name_after_dot()
                expr = self.finish(Node("Member", [expr, prop], computed=False), start)
            elif self.at("["):
                self.advance()
                prop = self.expression()
                self.expect("]")
                expr = self.finish(Node("Member", [expr, prop], computed=True), start)
            else:
                return expr

    def property_name_after_dot(self) -> Node:
        t = self.tok
        if t.type in ("name", "keyword"):
            self.advance()
            return self.finish(Node("Identifier", name=t.value), t)
        raise self.unexpected("expected property name")

    def primary(self) -> Node:
        t = self.tok
        if t.type == "name":
            return self.identifier_name()
        if t.type == "num":
            self.advance()
            return self.finish(Node("NumberLit", value=t.value, raw=t.raw), t)
        if t.type == "str":
            self.advance()
            return self.finish(Node("StringLit", value=t.value, raw=t.raw), t)
        if t.type == "keyword":
            if t.value in ("true", "false"):
                self.advance()
                return self.finish(Node("BoolLit", value=t.value == "true"), t)
            if t.value == "null":
                self.advance()
                return self.finish(Node("NullLit"), t)
            if t.value == "this":
                self.advance()
                return self.finish(Node("This"), t)
            if t.value == "function":
                return self.function(declaration=False)
        if t.type == "punct":
            if t.value == "(":
                self.advance()
                expr = self.expression()
                self.expect(")")
                return expr
            if t.value == "[":
                return self.array_literal()
            if t.value == "{":
                return self.object_literal()
            if t.value == "/":
                raise ParseError("regular expression literals are not supported", t.line, t.column)
        raise self.unexpected()

    def array_literal(self) -> Node:
        start = self.expect("[")
        elems = []
        while not self.at("]"):
            if self.at(","):
                raise ParseError("array holes are not supported", self.tok.line, self.tok.column)
            elems.append(self.assignment())
            if not self.at("]"):
                self.expect(",")
        self.advance()
        return self.finish(Node("ArrayLit", elems), start)

    def object_literal(self) -> Node:
        start = self.expect("{")
        props = []
        while not self.at("}"):
            pstart = self.tok
            if pstart.type == "name" and pstart.value in ("get", "set") and self.peek().type in ("name", "str", "num", "keyword"):
                raise ParseError("getters and setters are not supported", pstart.line, pstart.column)
            key = self.property_key()
            self.expect(":")
            value = self.assignment()
            props.append(self.finish(Node("Property", [key, value]), pstart))
            if not self.at("}"):
                self.expect(",")
        self.advance()
        return self.finish(Node("ObjectLit", props), start)

    def property_key(self) -> Node:
        t = self.tok
        if t.type in ("name", "keyword"):
            self.advance()
            return self.finish(Node("Identifier", name=t.value), t)
        if t.type == "str":
            self.advance()
            return self.finish(Node("StringLit", value=t.value, raw=t.raw), t)
        if t.type == "num":
            self.advance()
            return self.finish(Node("NumberLit", value=t.value, raw=t.raw), t)
        raise self.unexpected("expected property key")


def parse(source: str) -> Node:
    """Parse a whole program.

    Raises:
        ParseError: on malformed input or syntax outside the supported subset.
    """
    return Parser(source).program()


def parse_expression(source: str) -> Node:
    p = Parser(source)
    expr = p.expression()
    if p.tok.type != "eof":
        raise p.unexpected("expected end of input")
    return expr


def parse_statement(source: str) -> Node:
    p = Parser(source)
    stmt = p.statement()
    if p.tok.type != "eof":
        raise p.unexpected("expected end of input")
    return stmt
