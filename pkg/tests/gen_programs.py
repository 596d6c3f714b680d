"""Random subprogram generator and exhaustive-interpretation oracle.

Programs are built from a small grammar over two integer inputs, an
optional in-out string and an integer result.  The oracle runs the reference
interpreter on every input inside the test window, which is the same window
the bounded solver searches.
"""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field

from miniprove import sema as S
from miniprove.interp import ArrayValue, CheckFailure, run
from miniprove.solver import DomainBounds
from miniprove.syntax import parse_source

BOUNDS = DomainBounds(int_lo=-4, int_hi=4, max_len=3, alphabet=(" ", "a"))


@dataclass
class Program:
    source: str
    with_array: bool
    loops: bool
    unroll_limit: int = 16


@dataclass
class _Gen:
    rng: random.Random
    with_array: bool
    ints: list[str] = field(default_factory=lambda: ["X", "Y", "T"])
    depth: int = 0

    def literal(self) -> str:
        r = self.rng.random()
        if r < 0.04:
            return "2147483647"
        return str(self.rng.randint(0, 3))

    def int_expr(self, d: int = 2) -> str:
        r = self.rng.random()
        if d == 0 or r < 0.3:
            if self.with_array and self.rng.random() < 0.15:
                return self.rng.choice(["A'First", "A'Last", "A'Length"])
            return self.rng.choice(self.ints) if self.rng.random() < 0.7 else self.literal()
        op = self.rng.choice(["+", "-", "*", "/", "+", "-"])
        return f"({self.int_expr(d - 1)} {op} {self.int_expr(d - 1)})"

    def bool_expr(self, d: int = 2) -> str:
        r = self.rng.random()
        if d == 0 or r < 0.5:
            if self.with_array and self.rng.random() < 0.25:
                return f"A ({self.int_expr(1)}) = '{self.rng.choice([' ', 'a'])}'"
            if self.with_array and self.rng.random() < 0.1:
                c = self.rng.choice([" ", "a"])
                return f"(for all K in A'Range => A (K) = '{c}')"
            op = self.rng.choice(["<", "<=", "=", "/=", ">"])
            return f"{self.int_expr(1)} {op} {self.int_expr(1)}"
        if r < 0.65:
            return f"not ({self.bool_expr(d - 1)})"
        op = self.rng.choice(["and then", "or else", "and", "or"])
        return f"({self.bool_expr(d - 1)} {op} {self.bool_expr(d - 1)})"

    def stmt(self, indent: str, d: int) -> list[str]:
        r = self.rng.random()
        if r < 0.35:
            return [f"{indent}T := {self.int_expr()};"]
        if r < 0.45:
            return [f"{indent}N := {self.int_expr(1)};"]
        if r < 0.55:
            return [f"{indent}R := {self.int_expr()};"]
        if r < 0.65:
            return [f"{indent}pragma Assert ({self.bool_expr()});"]
        if r < 0.75 and self.with_array:
            c = self.rng.choice([" ", "a"])
            return [f"{indent}A ({self.int_expr(1)}) := '{c}';"]
        if d > 0:
            out = [f"{indent}if {self.bool_expr()} then"]
            out += self.block(indent + "   ", d - 1, 1, 2)
            if self.rng.random() < 0.5:
                out.append(f"{indent}else")
                out += self.block(indent + "   ", d - 1, 1, 2)
            out.append(f"{indent}end if;")
            return out
        return [f"{indent}T := T + 1;"]

    def block(self, indent: str, d: int, lo: int, hi: int) -> list[str]:
        return [line for _ in range(self.rng.randint(lo, hi)) for line in self.stmt(indent, d)]

    def loop(self, indent: str) -> list[str]:
        lo = self.rng.randint(0, 2)
        hi = lo + self.rng.randint(-1, 2)
        self.ints.append("I")
        body = self.block(indent + "   ", 1, 1, 2)
        self.ints.remove("I")
        return [f"{indent}for I in {lo} .. {hi} loop"] + body + [f"{indent}end loop;"]


def generate(seed: int, loops: bool = False) -> Program:
    rng = random.Random(seed)
    with_array = rng.random() < 0.4
    g = _Gen(rng, with_array)
    params = ["X : Integer", "Y : Integer"]
    if with_array:
        params.append("A : in out String")
    params.append("R : out Integer")
    aspects = []
    if rng.random() < 0.3:
        g.ints = ["X", "Y"]
        aspects.append(f"Pre => {g.bool_expr(1)}")
        g.ints = ["X", "Y", "T"]
    body = ["      R := 0;"]
    body += g.block("      ", 2, 1, 4)
    if loops:
        body += g.loop("      ")
        body += g.block("      ", 1, 0, 2)
    if rng.random() < 0.3:
        g.ints = ["X", "Y", "R"]
        aspects.append(f"Post => {g.bool_expr(1)}")
    head = f"   procedure P ({'; '.join(params)})"
    lines = ["package body Gen is", "", head]
    if aspects:
        lines.append("     with " + (",\n          ".join(aspects)))
    lines += ["   is", "      T : Integer := 0;", "      N : Natural := 0;", "   begin"]
    lines += body
    lines += ["   end P;", "", "end Gen;", ""]
    unroll = 16 if not loops or rng.random() < 0.5 else 1
    return Program("\n".join(lines), with_array, loops, unroll)


def compile_program(p: Program):
    unit = parse_source(p.source, "gen.adb")
    unit, table = S.resolve(S.merge_units([unit]))
    return unit, table


def array_inputs(bounds: DomainBounds = BOUNDS):
    """Every string inside the window: bounds first, then contents."""
    for first in range(1, bounds.max_len + 1):
        for last in range(max(0, first - 1), bounds.max_len + 2):
            n = last - first + 1
            if n > bounds.max_len:
                continue
            for cells in itertools.product(bounds.alphabet, repeat=n):
                yield ArrayValue(first, last, list(cells), [True] * n)


def all_inputs(p: Program, bounds: DomainBounds = BOUNDS):
    ints = range(bounds.int_lo, bounds.int_hi + 1)
    arrays = list(array_inputs(bounds)) if p.with_array else [None]
    for x, y, a in itertools.product(ints, ints, arrays):
        args = {"X": x, "Y": y}
        if a is not None:
            args["A"] = a
        yield args


def failures(p: Program, unit, table, bounds: DomainBounds = BOUNDS):
    """Inputs on which the interpreter reports a failing check."""
    sp = unit.find("P")
    out = []
    for args in all_inputs(p, bounds):
        o = run(unit, table, sp, args)
        if isinstance(o, CheckFailure):
            out.append((args, o))
    return out
