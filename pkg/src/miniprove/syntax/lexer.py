"""Tokenizer for the Mini language (Ada lexical conventions)."""
from __future__ import annotations

from dataclasses import dataclass

from .ast import SourceSpan


class FrontEndError(Exception):
    """A lexical, syntax or semantic error attached to a source span."""

    def __init__(self, span: SourceSpan, message: str):
        super().__init__(f"{span}: {message}")
        self.span = span
        self.message = message


class LexError(FrontEndError):
    pass


KEYWORDS = frozenset("""
    abs and begin body else elsif end for function if in is loop mod not null
    or others out package pragma procedure range rem return some subtype then
    with all xor
""".split())

SYMBOLS = [
    (":=", "assign"), ("=>", "arrow"), ("..", "dotdot"), ("/=", "ne"),
    ("<=", "le"), (">=", "ge"),
    ("(", "lparen"), (")", "rparen"), (",", "comma"), (";", "semicolon"),
    (":", "colon"), ("'", "tick"), ("+", "plus"), ("-", "minus"),
    ("*", "star"), ("/", "slash"), ("=", "eq"), ("<", "lt"), (">", "gt"),
    ("&", "amp"), ("|", "bar"),
]


@dataclass(frozen=True)
class Token:
    kind: str  # ident, int, charlit, strlit, keyword, eof or a symbol name
    text: str
    span: SourceSpan

    @property
    def value(self) -> str:
        """Keywords and identifiers folded to lower case."""
        return self.text.lower() if self.kind in ("ident", "keyword") else self.text

    def __repr__(self) -> str:
        return f"{self.kind} {self.text}"


def tokenize(source: str, file: str = "<input>") -> list[Token]:
    """Split source text into tokens; comments and whitespace are dropped.

    The returned list does not include an end-of-file marker.
    """
    tokens: list[Token] = []
    i, line, line_start = 0, 1, 0
    n = len(source)

    def span(start: int, length: int) -> SourceSpan:
        return SourceSpan(file, line, start - line_start + 1, max(1, length), start)

    while i < n:
        c = source[i]
        if c == "\n":
            i += 1
            line += 1
            line_start = i
            continue
        if c in " \t\r\f\v":
            i += 1
            continue
        if source.startswith("--", i):
            while i < n and source[i] != "\n":
                i += 1
            continue
        if c.isalpha():
            j = i + 1
            while j < n and (source[j].isalnum() or source[j] == "_"):
                j += 1
            text = source[i:j]
            prev = tokens[-1] if tokens else None
            is_attr = prev is not None and prev.kind == "tick"
            kind = "keyword" if text.lower() in KEYWORDS and not is_attr else "ident"
            tokens.append(Token(kind, text, span(i, j - i)))
            i = j
            continue
        if c.isdigit():
            j = i + 1
            while j < n and (source[j].isdigit() or source[j] == "_"):
                j += 1
            tokens.append(Token("int", source[i:j].replace("_", ""), span(i, j - i)))
            i = j
            continue
        if c == "'":
            prev = tokens[-1] if tokens else None
            attribute_tick = prev is not None and (
                prev.kind in ("ident", "rparen", "strlit")
                or (prev.kind == "keyword" and prev.value == "all"))
            if not attribute_tick:
                if i + 2 < n and source[i + 2] == "'" and source[i + 1] != "\n":
                    tokens.append(Token("charlit", source[i + 1], span(i, 3)))
                    i += 3
                    continue
                raise LexError(span(i, 1), "unterminated character literal")
            tokens.append(Token("tick", "'", span(i, 1)))
            i += 1
            continue
        if c == '"':
            j = i + 1
            chars: list[str] = []
            while True:
                if j >= n or source[j] == "\n":
                    raise LexError(span(i, 1), "unterminated string literal")
                if source[j] == '"':
                    if j + 1 < n and source[j + 1] == '"':
                        chars.append('"')
                        j += 2
                        continue
                    break
                chars.append(source[j])
                j += 1
            tokens.append(Token("strlit", "".join(chars), span(i, j + 1 - i)))
            i = j + 1
            continue
        for sym, kind in SYMBOLS:
            if source.startswith(sym, i):
                tokens.append(Token(kind, sym, span(i, len(sym))))
                i += len(sym)
                break
        else:
            raise LexError(span(i, 1), f"illegal character {c!r}")
    return tokens
