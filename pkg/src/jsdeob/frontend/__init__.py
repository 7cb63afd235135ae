"""Lexing, parsing, printing and annotation for the supported ES5 subset."""

from .annotate import AnnotatedSource, AnnotateError, annotate, strip_annotations
from .lexer import RESERVED_WORDS, ParseError
from .nodes import Node, SourceSpan, same_tree, walk
from .parser import parse, parse_expression, parse_statement
from .printer import number_to_string, print_expression, print_program, print_statement, quote_string


def span_text(source: str, span: SourceSpan) -> str:
    """Slice ``source`` by a node span (spans are UTF-8 byte offsets)."""
    if source.isascii():
        return source[span.byte_start:span.byte_end]
    return source.encode("utf-8", "surrogatepass")[span.byte_start:span.byte_end].decode("utf-8", "surrogatepass")


__all__ = [
    "AnnotateError",
    "AnnotatedSource",
    "Node",
    "ParseError",
    "RESERVED_WORDS",
    "SourceSpan",
    "annotate",
    "number_to_string",
    "parse",
    "parse_expression",
    "parse_statement",
    "print_expression",
    "print_program",
    "print_statement",
    "quote_string",
    "same_tree",
    "span_text",
    "strip_annotations",
    "walk",
]
