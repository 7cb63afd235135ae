"""Top-level statement annotation used to address statements by integer ID."""

from __future__ import annotations

import re
from dataclasses import dataclass

from .nodes import Node, SourceSpan
from .printer import Printer

_MARKER = re.compile(r"^// </?\d+>$")


class AnnotateError(ValueError):
    pass


@dataclass(frozen=True)
class AnnotatedSource:
    text: str
    segments: list[tuple[int, SourceSpan]]


def annotate(program: Node) -> AnnotatedSource:
    """Wrap every top-level statement in ``// <N>`` / ``// </N>`` comment lines.

    Segment spans locate each printed statement inside ``text``.
    """
    if not program.children:
        raise AnnotateError("program has no top-level statements")
    printer = Printer()
    parts: list[str] = []
    segments: list[tuple[int, SourceSpan]] = []
    offset = 0
    line = 1
    for i, stmt in enumerate(program.children):
        opening = f"// <{i}>\n"
        parts.append(opening)
        offset += len(opening.encode())
        line += 1
        body = printer.statement(stmt)
        nbytes = len(body.encode())
        segments.append((i, SourceSpan(offset, offset + nbytes - 1, line, 1)))
        parts.append(body)
        offset += nbytes
        line += body.count("\n")
        closing = f"// </{i}>\n"
        parts.append(closing)
        offset += len(closing.encode())
        line += 1
    return AnnotatedSource("".join(parts), segments)


def strip_annotations(text: str) -> str:
    """Drop the marker lines added by :func:`annotate`."""
    return "".join(ln for ln in text.splitlines(keepends=True) if not _MARKER.match(ln.rstrip("\n")))
