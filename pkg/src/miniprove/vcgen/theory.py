"""Background theory shown by the proof shell.

The declarations describe, in a Why3-like notation, the symbols that
verification conditions use for arrays and for values under relaxed
initialization.  They are documentation for the user; the solver implements
the same semantics natively (see :mod:`miniprove.vcgen.evaluate`).
"""
from __future__ import annotations

import re
from dataclasses import dataclass


@dataclass(frozen=True)
class Declaration:
    name: str
    text: str

    def tokens(self) -> set[str]:
        return set(tokenize(self.text))


_TOKEN = re.compile(r"[A-Za-z_][A-Za-z0-9_']*")


def tokenize(text: str) -> list[str]:
    """Identifier-like tokens; a trailing quote belongs to names like ``'mk``."""
    return _TOKEN.findall(text)


WRAPPER_DECLS = [
    Declaration("character__init_wrapper",
                "type character__init_wrapper =\n"
                "  | character__init_wrapper'mk (rec__value:character) (__attr__init:bool)"),
    Declaration("character__init_wrapper___attr__init__projection",
                "function character__init_wrapper___attr__init__projection (a1:\n"
                "  character__init_wrapper) : bool = __attr__init a1"),
    Declaration("character__init_wrapper__rec__value__projection",
                "function character__init_wrapper__rec__value__projection (a1:\n"
                "  character__init_wrapper) : character = rec__value a1"),
    Declaration("to_wrapper",
                "function to_wrapper (x:character) : character__init_wrapper =\n"
                "  character__init_wrapper'mk x True"),
    Declaration("of_wrapper",
                "function of_wrapper (a:int -> character__init_wrapper) : int -> character =\n"
                "  fun i -> rec__value (get2 a i)"),
]

ARRAY_DECLS = [
    # the backslash before @ is part of the displayed text
    Declaration("get2", "function get2 (f:'a -> 'b) (x:'a) : 'b = f \\@ x"),
    Declaration("set2", "function set2 (f:'a -> 'b) (x:'a) (v:'b) : 'a -> 'b =\n"
                        "  fun y -> if y = x then v else f \\@ y"),
    Declaration("slice", "function slice (f:int -> 'b) (lo:int) (hi:int) : int -> 'b = f"),
    Declaration("const_array", "function const_array (lo:int) (hi:int) (v:'b) : int -> 'b =\n"
                               "  fun y -> v"),
]


def background(relaxed: bool) -> list[Declaration]:
    """Declarations relevant to a VC, wrapper theory first when in use."""
    return (WRAPPER_DECLS if relaxed else []) + ARRAY_DECLS
