"""Lexing, parsing, printing and source excerpts for the Mini language."""
from .ast import SourceSpan, CompilationUnit
from .lexer import FrontEndError, LexError, Token, tokenize
from .parser import ParseError, parse_expression, parse_source, parse_statements, parse_unit
from .pretty import pretty, pretty_unit
from .snippet import render_snippet

__all__ = [
    "CompilationUnit", "FrontEndError", "LexError", "ParseError", "SourceSpan", "Token",
    "parse_expression", "parse_source", "parse_statements", "parse_unit", "pretty",
    "pretty_unit", "render_snippet", "tokenize",
]
