"""Tokenizer for the ES5 subset."""

from __future__ import annotations

import re
from dataclasses import dataclass


class ParseError(Exception):
    """Source text outside the supported subset, or malformed."""

    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{line}:{column}: {message}")
        self.message = message
        self.line = line
        self.column = column


KEYWORDS = frozenset({
    "break", "case", "catch", "continue", "debugger", "default", "delete", "do",
    "else", "finally", "for", "function", "if", "in", "instanceof", "new",
    "return", "switch", "this", "throw", "try", "typeof", "var", "void",
    "while", "with", "true", "false", "null",
})

FUTURE_RESERVED = frozenset({
    "class", "const", "enum", "export", "extends", "import", "super",
    "implements", "interface", "let", "package", "private", "protected",
    "public", "static", "yield",
})

RESERVED_WORDS = KEYWORDS | FUTURE_RESERVED

PUNCTUATORS = sorted(
    """>>>= === !== >>> <<= >>= == != <= >= && || ++ -- += -= *= /= %= &= |= ^= << >>
    { } ( ) [ ] ; , < > + - * / % & | ^ ! ~ ? : = .""".split(),
    key=len,
    reverse=True,
)

_IDENT_START = re.compile(r"[A-Za-z_$\u0080-\uffff]")
_IDENT = re.compile(r"[A-Za-z0-9_$\u0080-\uffff]*")
_HEX = re.compile(r"0[xX]([0-9a-fA-F]+)")
_DECIMAL = re.compile(r"(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?")
_LINE_TERMINATORS = "\n\r\u2028\u2029"

_SIMPLE_ESCAPES = {
    "n": "\n", "t": "\t", "r": "\r", "b": "\b", "f": "\f", "v": "\v",
    "'": "'", '"': '"', "\\": "\\",
}


@dataclass
class Token:
    type: str  # name, keyword, num, str, punct, eof
    value: object
    raw: str
    start: int
    end: int
    line: int
    column: int
    newline_before: bool = False


class Lexer:
    def __init__(self, source: str):
        self.src = source
        self.pos = 0
        self.line = 1
        self.line_start = 0

    def error(self, message: str, pos: int | None = None) -> ParseError:
        if pos is None:
            pos = self.pos
        line = self.src.count("\n", 0, pos) + 1
        col = pos - (self.src.rfind("\n", 0, pos) + 1) + 1
        return ParseError(message, line, col)

    def _skip_trivia(self) -> bool:
        """Skip whitespace and comments; report whether a line break was seen."""
        src = self.src
        newline = False
        while self.pos < len(src):
            ch = src[self.pos]
            if ch in _LINE_TERMINATORS:
                newline = True
                self.pos += 1
                if ch == "\n" or (ch == "\r" and not src.startswith("\n", self.pos)):
                    self.line += 1
                    self.line_start = self.pos
            elif ch in " \t\v\f\u00a0\ufeff" or (ch.isspace() and ord(ch) > 127):
                self.pos += 1
            elif src.startswith("//", self.pos):
                while self.pos < len(src) and src[self.pos] not in _LINE_TERMINATORS:
                    self.pos += 1
            elif src.startswith("/*", self.pos):
                close = src.find("*/", self.pos + 2)
                if close < 0:
                    raise self.error("unterminated comment")
                body = src[self.pos:close]
                breaks = body.count("\n")
                if breaks:
                    newline = True
                    self.line += breaks
                    self.line_start = self.pos + body.rfind("\n") + 1
                elif any(c in body for c in _LINE_TERMINATORS):
                    newline = True
                self.pos = close + 2
            else:
                break
        return newline

    def tokens(self) -> list[Token]:
        out: list[Token] = []
        while True:
            newline = self._skip_trivia()
            tok = self._next()
            tok.newline_before = newline
            out.append(tok)
            if tok.type == "eof":
                return out

    def _make(self, type_: str, value: object, start: int) -> Token:
        return Token(type_, value, self.src[start:self.pos], start, self.pos,
                     self._tok_line, self._tok_col)

    def _next(self) -> Token:
        src = self.src
        start = self.pos
        self._tok_line = self.line
        self._tok_col = start - self.line_start + 1
        if start >= len(src):
            return self._make("eof", None, start)
        ch = src[start]
        if _IDENT_START.match(ch) or ch == "\\":
            if ch == "\\":
                raise self.error("unicode escapes in identifiers are not supported")
            m = _IDENT.match(src, start + 1)
            self.pos = m.end()
            word = src[start:self.pos]
            return self._make("keyword" if word in KEYWORDS else "name", word, start)
        if ch.isdigit() or (ch == "." and start + 1 < len(src) and src[start + 1].isdigit()):
            return self._number(start)
        if ch in "'\"":
            return self._string(start, ch)
        if ch == "`":
            raise self.error("template literals are not supported")
        for p in PUNCTUATORS:
            if src.startswith(p, start):
                self.pos = start + len(p)
                return self._make("punct", p, start)
        raise self.error(f"unexpected character {ch!r}")

    def _number(self, start: int) -> Token:
        src = self.src
        m = _HEX.match(src, start)
        if m:
            self.pos = m.end()
            value = float(int(m.group(1), 16))
        else:
            m = _DECIMAL.match(src, start)
            text = m.group(0)
            if len(text) > 1 and text[0] == "0" and text[1].isdigit():
                raise self.error("legacy octal literals are not supported", start)
            self.pos = m.end()
            value = float(text)
        if self.pos < len(src) and (_IDENT_START.match(src[self.pos]) or src[self.pos].isdigit()):
            raise self.error("identifier starts immediately after numeric literal")
        return self._make("num", value, start)

    def _string(self, start: int, quote: str) -> Token:
        src = self.src
        i = start + 1
        parts: list[str] = []
        while True:
            if i >= len(src) or src[i] in _LINE_TERMINATORS:
                raise self.error("unterminated string literal", start)
            c = src[i]
            if c == quote:
                i += 1
                break
            if c != "\\":
                j = i
                while j < len(src) and src[j] not in (quote, "\\") and src[j] not in _LINE_TERMINATORS:
                    j += 1
                parts.append(src[i:j])
                i = j
                continue
            i += 1
            if i >= len(src):
                raise self.error("unterminated string literal", start)
            e = src[i]
            if e in _SIMPLE_ESCAPES:
                parts.append(_SIMPLE_ESCAPES[e])
                i += 1
            elif e == "x":
                hexd = src[i + 1:i + 3]
                if len(hexd) != 2 or not all(h in "0123456789abcdefABCDEF" for h in hexd):
                    raise self.error("malformed \\x escape", i - 1)
                parts.append(chr(int(hexd, 16)))
                i += 3
            elif e == "u":
                hexd = src[i + 1:i + 5]
                if len(hexd) != 4 or not all(h in "0123456789abcdefABCDEF" for h in hexd):
                    raise self.error("malformed \\u escape", i - 1)
                parts.append(chr(int(hexd, 16)))
                i += 5
            elif e == "0" and not (i + 1 < len(src) and src[i + 1].isdigit()):
                parts.append("\0")
                i += 1
            elif e.isdigit():
                raise self.error("octal escapes are not supported", i - 1)
            elif e in _LINE_TERMINATORS:
                # line continuation
                i += 2 if src.startswith("\r\n", i) else 1
                self.line += 1
                self.line_start = i
            else:
                parts.append(e)
                i += 1
        self.pos = i
        return self._make("str", _join_surrogates("".join(parts)), start)


_SURROGATE_PAIR = re.compile("[\ud800-\udbff][\udc00-\udfff]")


def _join_surrogates(s: str) -> str:
    """Combine escaped UTF-16 surrogate pairs into single code points; lone halves stay."""
    return _SURROGATE_PAIR.sub(lambda m: m.group().encode("utf-16-le", "surrogatepass").decode("utf-16-le"), s)


def tokenize(source: str) -> list[Token]:
    return Lexer(source).tokens()
