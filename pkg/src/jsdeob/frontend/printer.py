"""Deterministic pretty printer.

Two-space indentation, one statement per line, single-quoted strings and the
fewest parentheses that preserve the tree.  Number literals keep their source
lexeme when they have one; synthesized numbers print in shortest round-trip
form.
"""

from __future__ import annotations

import math
from decimal import Decimal

from .nodes import Node

INDENT = "  "

# Higher binds tighter.
PREC_SEQUENCE = 0
PREC_ASSIGN = 1
PREC_CONDITIONAL = 2
PREC_UNARY = 13
PREC_POSTFIX = 14
PREC_CALL = 15
PREC_PRIMARY = 17

_BINARY_PREC = {
    "||": 3, "&&": 4, "|": 5, "^": 6, "&": 7,
    "==": 8, "!=": 8, "===": 8, "!==": 8,
    "<": 9, ">": 9, "<=": 9, ">=": 9, "instanceof": 9, "in": 9,
    "<<": 10, ">>": 10, ">>>": 10,
    "+": 11, "-": 11,
    "*": 12, "/": 12, "%": 12,
}


def number_to_string(x: float) -> str:
    """JavaScript ``Number.prototype.toString()`` for radix 10."""
    if math.isnan(x):
        return "NaN"
    if x == 0:
        return "0"
    if x < 0:
        return "-" + number_to_string(-x)
    if math.isinf(x):
        return "Infinity"
    # repr() is the shortest round-tripping spelling, as in JS
    sign, digit_tuple, exponent = Decimal(repr(x)).normalize().as_tuple()
    digits = "".join(map(str, digit_tuple))
    k = len(digits)
    n = exponent + k
    if k <= n <= 21:
        return digits + "0" * (n - k)
    if 0 < n <= 21:
        return digits[:n] + "." + digits[n:]
    if -6 < n <= 0:
        return "0." + "0" * (-n) + digits
    e = n - 1
    esign = "+" if e >= 0 else "-"
    if k == 1:
        return f"{digits}e{esign}{abs(e)}"
    return f"{digits[0]}.{digits[1:]}e{esign}{abs(e)}"


def quote_string(value: str) -> str:
    out = ["'"]
    for ch in value:
        if ch == "'":
            out.append("\\'")
        elif ch == "\\":
            out.append("\\\\")
        elif ch == "\n":
            out.append("\\n")
        elif ch == "\r":
            out.append("\\r")
        elif ch == "\t":
            out.append("\\t")
        elif ch == "\b":
            out.append("\\b")
        elif ch == "\f":
            out.append("\\f")
        elif ch == "\v":
            out.append("\\v")
        elif ord(ch) < 0x20 or ord(ch) == 0x7F:
            out.append(f"\\x{ord(ch):02x}")
        elif ch in "\u2028\u2029" or 0xD800 <= ord(ch) <= 0xDFFF:
            out.append(f"\\u{ord(ch):04x}")
        else:
            out.append(ch)
    out.append("'")
    return "".join(out)


def precedence(node: Node) -> int:
    k = node.kind
    if k == "Sequence":
        return PREC_SEQUENCE
    if k == "Assign":
        return PREC_ASSIGN
    if k == "Conditional":
        return PREC_CONDITIONAL
    if k in ("Binary", "Logical"):
        return _BINARY_PREC[node.op]
    if k == "Unary" or (k == "Update" and node.prefix):
        return PREC_UNARY
    if k == "Update":
        return PREC_POSTFIX
    if k in ("Call", "Member", "New"):
        return PREC_CALL
    return PREC_PRIMARY


class Printer:
    def __init__(self) -> None:
        self.level = 0

    # -- statements --------------------------------------------------------

    def ind(self) -> str:
        return INDENT * self.level

    def statements(self, stmts: list[Node]) -> str:
        return "".join(self.statement(s) for s in stmts)

    def block_body(self, block: Node) -> str:
        """``{ ... }`` with the closing brace at the current indentation."""
        if not block.children:
            return "{}"
        self.level += 1
        inner = self.statements(block.children)
        self.level -= 1
        return "{\n" + inner + self.ind() + "}"

    def nested(self, stmt: Node) -> str:
        """Body of if/while/for: inline block or an indented single statement."""
        if stmt.kind == "Block":
            return " " + self.block_body(stmt)
        self.level += 1
        text = self.statement(stmt)
        self.level -= 1
        return "\n" + text.rstrip("\n")

    def statement(self, s: Node) -> str:
        return self.ind() + self.statement_text(s) + "\n"

    def statement_text(self, s: Node) -> str:
        k = s.kind
        if k == "ExprStmt":
            text = self.expr(s.children[0], PREC_SEQUENCE)
            if text.startswith(("function ", "{")):
                text = "(" + text + ")"
            return text + ";"
        if k == "VarDecl":
            return self.var_decl(s) + ";"
        if k == "FunctionDecl":
            return self.function(s)
        if k == "Return":
            if s.children:
                return "return " + self.expr(s.children[0], PREC_SEQUENCE) + ";"
            return "return;"
        if k == "Throw":
            return "throw " + self.expr(s.children[0], PREC_SEQUENCE) + ";"
        if k == "Block":
            return self.block_body(s)
        if k == "Empty":
            return ";"
        if k == "Break":
            return "break;"
        if k == "Continue":
            return "continue;"
        if k == "If":
            return self.if_stmt(s)
        if k == "While":
            test, body = s.children
            return "while (" + self.expr(test, PREC_SEQUENCE) + ")" + self.nested(body)
        if k == "DoWhile":
            body, test = s.children
            text = "do" + self.nested(body)
            sep = " " if body.kind == "Block" else "\n" + self.ind()
            return text + sep + "while (" + self.expr(test, PREC_SEQUENCE) + ");"
        if k == "For":
            init, test, update, body = s.children
            if init is None:
                a = ""
            elif init.kind == "VarDecl":
                a = self.var_decl(init, no_in=True)
            else:
                a = self.expr(init, PREC_SEQUENCE, no_in=True)
            b = "" if test is None else " " + self.expr(test, PREC_SEQUENCE)
            c = "" if update is None else " " + self.expr(update, PREC_SEQUENCE)
            return f"for ({a};{b};{c})" + self.nested(body)
        if k == "TryCatch":
            block, param, handler = s.children[:3]
            text = "try " + self.block_body(block)
            if handler is not None:
                text += " catch (" + param.name + ") " + self.block_body(handler)
            if len(s.children) > 3:
                text += " finally " + self.block_body(s.children[3])
            return text
        raise ValueError(f"not a statement: {k}")

    def if_stmt(self, s: Node) -> str:
        test, cons = s.children[:2]
        text = "if (" + self.expr(test, PREC_SEQUENCE) + ")" + self.nested(cons)
        if len(s.children) > 2:
            alt = s.children[2]
            sep = " " if cons.kind == "Block" else "\n" + self.ind()
            if alt.kind == "If":
                text += sep + "else " + self.if_stmt(alt)
            else:
                text += sep + "else" + self.nested(alt)
        return text

    def var_decl(self, s: Node, no_in: bool = False) -> str:
        parts = []
        for d in s.children:
            if len(d.children) > 1:
                parts.append(d.children[0].name + " = " + self.expr(d.children[1], PREC_ASSIGN, no_in))
            else:
                parts.append(d.children[0].name)
        return "var " + ", ".join(parts)

    def function(self, f: Node) -> str:
        head = "function " + f.name if f.name else "function "
        params = ", ".join(p.name for p in f.params)
        return f"{head}({params}) " + self.block_body(f.body)

    # -- expressions -------------------------------------------------------

    def expr(self, e: Node, min_prec: int, no_in: bool = False) -> str:
        text = self.expr_text(e, no_in)
        if precedence(e) < min_prec or (no_in and e.kind == "Binary" and e.op == "in"):
            return "(" + text + ")"
        return text

    def expr_text(self, e: Node, no_in: bool = False) -> str:
        k = e.kind
        if k == "Identifier":
            return e.name
        if k == "StringLit":
            return quote_string(e.value)
        if k == "NumberLit":
            return e.raw if e.raw is not None else number_to_string(e.value)
        if k == "BoolLit":
            return "true" if e.value else "false"
        if k == "NullLit":
            return "null"
        if k == "This":
            return "this"
        if k == "ArrayLit":
            return "[" + ", ".join(self.expr(c, PREC_ASSIGN) for c in e.children) + "]"
        if k == "ObjectLit":
            return self.object(e)
        if k == "FunctionExpr":
            return self.function(e)
        if k == "Sequence":
            return ", ".join(self.expr(c, PREC_ASSIGN, no_in) for c in e.children)
        if k == "Assign":
            target, value = e.children
            return self.expr(target, PREC_CALL) + f" {e.op} " + self.expr(value, PREC_ASSIGN, no_in)
        if k == "Conditional":
            test, cons, alt = e.children
            return (self.expr(test, PREC_CONDITIONAL + 1, no_in) + " ? " + self.expr(cons, PREC_ASSIGN)
                    + " : " + self.expr(alt, PREC_ASSIGN, no_in))
        if k in ("Binary", "Logical"):
            left, right = e.children
            p = _BINARY_PREC[e.op]
            return self.expr(left, p, no_in) + f" {e.op} " + self.expr(right, p + 1, no_in)
        if k == "Unary":
            arg = e.children[0]
            text = self.expr(arg, PREC_UNARY)
            if e.op.isalpha():
                return e.op + " " + text
            if text[0] in "+-" and text[0] == e.op[0]:
                return e.op + " " + text
            return e.op + text
        if k == "Update":
            arg = self.expr(e.children[0], PREC_POSTFIX if e.prefix else PREC_CALL)
            return e.op + arg if e.prefix else arg + e.op
        if k == "Call":
            callee, *args = e.children
            return self.callee(callee) + "(" + ", ".join(self.expr(a, PREC_ASSIGN) for a in args) + ")"
        if k == "New":
            callee, *args = e.children
            text = self.expr(callee, PREC_CALL)
            if _has_call(callee):
                text = "(" + text + ")"
            return "new " + text + "(" + ", ".join(self.expr(a, PREC_ASSIGN) for a in args) + ")"
        if k == "Member":
            obj, prop = e.children
            text = self.callee(obj)
            if obj.kind == "NumberLit" and not e.computed and _bare_integer(text):
                text = "(" + text + ")"
            if e.computed:
                return text + "[" + self.expr(prop, PREC_SEQUENCE) + "]"
            return text + "." + prop.name
        raise ValueError(f"not an expression: {k}")

    def callee(self, e: Node) -> str:
        return self.expr(e, PREC_CALL)

    def object(self, e: Node) -> str:
        if not e.children:
            return "{}"
        self.level += 1
        lines = []
        for prop in e.children:
            key, value = prop.children
            if key.kind == "Identifier":
                ktext = key.name
            else:
                ktext = self.expr_text(key)
            lines.append(self.ind() + ktext + ": " + self.expr(value, PREC_ASSIGN))
        self.level -= 1
        return "{\n" + ",\n".join(lines) + "\n" + self.ind() + "}"


def _has_call(e: Node) -> bool:
    while e.kind == "Member":
        e = e.children[0]
    return e.kind == "Call"


def _bare_integer(text: str) -> bool:
    return text.isdigit()


def print_program(program: Node) -> str:
    return Printer().statements(program.children)


def print_statement(stmt: Node) -> str:
    return Printer().statement(stmt)


def print_expression(expr: Node) -> str:
    return Printer().expr(expr, PREC_SEQUENCE)
