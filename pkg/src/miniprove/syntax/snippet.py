"""Caret-annotated source excerpts in the style of command-line diagnostics."""
from __future__ import annotations

from typing import Optional

from .ast import SourceSpan


def source_line(source: str, line: int) -> str:
    lines = source.split("\n")
    if not 1 <= line <= len(lines):
        raise ValueError(f"line {line} outside source ({len(lines)} lines)")
    return lines[line - 1].rstrip("\r")


def render_snippet(span: SourceSpan, source: str, tag: Optional[str] = None) -> list[str]:
    """Two lines: the numbered source line and a caret line under the span.

    The caret column lines up with the span's column; the span is underlined
    with ``~`` up to the end of the line.
    """
    text = source_line(source, span.line)
    gutter = f"{span.line:>5} |"
    length = max(1, min(span.length, len(text) - span.column + 1))
    marks = "^" + "~" * (length - 1)
    caret = " " * 6 + "|" + " " * (span.column - 1) + marks
    if tag:
        caret += " " + tag
    return [gutter + text, caret]
