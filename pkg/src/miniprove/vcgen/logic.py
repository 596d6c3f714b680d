"""Typed first-order terms used in verification conditions.

Terms are immutable.  Every term may carry the source expression it was
translated from (``src``), which is ignored by equality and hashing and only
serves to print source-level sub-properties in messages.

Sorts:
    int, bool, char       scalars
    wrapper               (character value, init flag) pair
    string                array of characters with bounds
    wstring               array of wrappers with bounds
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import count
from typing import Any, Iterator, Optional

INT, BOOL, CHAR, WRAPPER, STRING, WSTRING = "int", "bool", "char", "wrapper", "string", "wstring"
ARRAY_SORTS = (STRING, WSTRING)

_uids = count(1)


def _src() -> Any:
    return field(default=None, compare=False, hash=False, repr=False)


@dataclass(frozen=True)
class Term:
    @property
    def children(self) -> tuple["Term", ...]:
        return ()


@dataclass(frozen=True)
class Var(Term):
    """A logic symbol.  ``base`` is the source name used for display."""

    base: str
    sort: str
    uid: int = field(default_factory=lambda: next(_uids))
    src: Any = _src()

    def __str__(self) -> str:
        return self.base


@dataclass(frozen=True)
class Const(Term):
    value: Any
    sort: str
    src: Any = _src()


@dataclass(frozen=True)
class App(Term):
    op: str
    args: tuple[Term, ...]
    sort: str
    src: Any = _src()

    @property
    def children(self):
        return self.args


@dataclass(frozen=True)
class Quant(Term):
    """Bounded quantifier over integers ``lo <= var <= hi``."""

    universal: bool
    var: Var
    lo: Term
    hi: Term
    body: Term
    src: Any = _src()
    sort: str = BOOL

    @property
    def children(self):
        return (self.lo, self.hi, self.body)


TRUE = Const(True, BOOL)
FALSE = Const(False, BOOL)


def const_int(v: int) -> Const:
    return Const(v, INT)


def const_char(c: str) -> Const:
    return Const(c, CHAR)


# ------------------------------------------------------------ constructors

def with_src(t: Term, src) -> Term:
    if src is None or getattr(t, "src", None) is src:
        return t
    if isinstance(t, Var):
        return t  # symbols keep their identity
    return type(t)(**{**{f: getattr(t, f) for f in t.__dataclass_fields__}, "src": src})


def app(op: str, *args: Term, sort: str, src=None) -> App:
    return App(op, tuple(args), sort, src)


def not_(a: Term, src=None) -> Term:
    if a == TRUE:
        return FALSE
    if a == FALSE:
        return TRUE
    return App("not", (a,), BOOL, src)


def and_(*xs: Term, src=None) -> Term:
    items = [x for x in xs if x != TRUE]
    if any(x == FALSE for x in items):
        return FALSE
    if not items:
        return TRUE
    out = items[0]
    for x in items[1:]:
        out = App("and", (out, x), BOOL)
    return with_src(out, src) if src is not None else out


def or_(*xs: Term, src=None) -> Term:
    items = [x for x in xs if x != FALSE]
    if any(x == TRUE for x in items):
        return TRUE
    if not items:
        return FALSE
    out = items[0]
    for x in items[1:]:
        out = App("or", (out, x), BOOL)
    return with_src(out, src) if src is not None else out


def implies(a: Term, b: Term, src=None) -> Term:
    if a == TRUE:
        return b
    if a == FALSE or b == TRUE:
        return TRUE
    return App("->", (a, b), BOOL, src)


def eq(a: Term, b: Term, src=None) -> Term:
    return App("=", (a, b), BOOL, src)


def le(a: Term, b: Term, src=None) -> Term:
    return App("<=", (a, b), BOOL, src)


def lt(a: Term, b: Term, src=None) -> Term:
    return App("<", (a, b), BOOL, src)


def in_range(x: Term, lo: Term, hi: Term) -> Term:
    return and_(le(lo, x), le(x, hi))


def add(a: Term, b: Term) -> Term:
    if isinstance(b, Const) and b.value == 0:
        return a
    return App("+", (a, b), INT)


def sub(a: Term, b: Term) -> Term:
    return App("-", (a, b), INT)


def forall(var: Var, lo: Term, hi: Term, body: Term, src=None) -> Term:
    if body == TRUE:
        return TRUE
    return Quant(True, var, lo, hi, body, src)


def exists(var: Var, lo: Term, hi: Term, body: Term, src=None) -> Term:
    return Quant(False, var, lo, hi, body, src)


def ite(c: Term, a: Term, b: Term, src=None) -> Term:
    if c == TRUE:
        return a
    if c == FALSE:
        return b
    return App("ite", (c, a, b), a.sort, src)


def get(arr: Term, i: Term) -> Term:
    return App("get2", (arr, i), WRAPPER if arr.sort == WSTRING else CHAR)


def set_(arr: Term, i: Term, v: Term) -> Term:
    return App("set2", (arr, i, v), arr.sort)


def first(arr: Term) -> Term:
    return App("first", (arr,), INT)


def last(arr: Term) -> Term:
    return App("last", (arr,), INT)


def length(f: Term, l: Term) -> Term:
    return App("length", (f, l), INT)


# ----------------------------------------------------------------- queries

def iter_terms(t: Term) -> Iterator[Term]:
    yield t
    for c in t.children:
        yield from iter_terms(c)


def free_vars(t: Term) -> list[Var]:
    """Free symbols in first-occurrence order."""
    out: dict[Var, None] = {}

    def go(t: Term, bound: frozenset):
        if isinstance(t, Var):
            if t not in bound:
                out.setdefault(t)
        elif isinstance(t, Quant):
            go(t.lo, bound)
            go(t.hi, bound)
            go(t.body, bound | {t.var})
        else:
            for c in t.children:
                go(c, bound)

    go(t, frozenset())
    return list(out)


def subst(t: Term, m: dict[Var, Term]) -> Term:
    if not m:
        return t
    if isinstance(t, Var):
        return m.get(t, t)
    if isinstance(t, Const):
        return t
    if isinstance(t, App):
        args = tuple(subst(a, m) for a in t.args)
        return t if args == t.args else App(t.op, args, t.sort, t.src)
    if isinstance(t, Quant):
        inner = {k: v for k, v in m.items() if k != t.var}
        return Quant(t.universal, t.var, subst(t.lo, m), subst(t.hi, m),
                     subst(t.body, inner), t.src)
    raise TypeError(type(t).__name__)


def calls_in(t: Term) -> list[str]:
    return [x.op[5:] for x in iter_terms(t) if isinstance(x, App) and x.op.startswith("call:")]


# ---------------------------------------------------------------- printing

_INFIX = {"+": 6, "-": 6, "*": 7, "/": 7, "=": 4, "<>": 4, "<": 4, "<=": 4, ">": 4, ">=": 4,
          "and": 3, "or": 2, "->": 1}
_SHOW = {"and": "/\\", "or": "\\/", "->": "->"}


def _char(c: str) -> str:
    return "'" + c + "'"


def _atomic(s: str) -> bool:
    depth = 0
    i = 0
    while i < len(s):
        ch = s[i]
        i += 1
        if ch == "'" and i + 1 < len(s) and s[i + 1] == "'":
            i += 2  # character literal
        elif ch in "([":
            depth += 1
        elif ch in ")]":
            depth -= 1
        elif ch == " " and depth == 0:
            return False
    return True


class Printer:
    """Why3-flavoured rendering; ``names`` maps symbols to display names."""

    def __init__(self, names: Optional[dict[Var, str]] = None):
        self.names = names or {}

    def name(self, v: Var) -> str:
        return self.names.get(v, v.base)

    def arg(self, t: Term) -> str:
        s = self.show(t)
        if s.startswith("(") and s.endswith(")") and _balanced_outer(s):
            return s
        return s if _atomic(s) else f"({s})"

    def show(self, t: Term, prec: int = 0) -> str:
        if isinstance(t, Var):
            return self.name(t)
        if isinstance(t, Const):
            if t.sort == BOOL:
                return "True" if t.value else "False"
            if t.sort == CHAR:
                return _char(t.value)
            if t.sort == INT:
                return str(t.value) if t.value >= 0 else f"({t.value})"
            if t.sort == WRAPPER:
                c, b = t.value
                return f"character__init_wrapper'mk {_char(c)} {'True' if b else 'False'}"
            return repr(t.value)
        if isinstance(t, Quant):
            v = self.name(t.var)
            rng = f"{self.show(t.lo, 5)} <= {v} /\\ {v} <= {self.show(t.hi, 5)}"
            if t.universal:
                s = f"forall {v}:int. {rng} -> {self.show(t.body, 1)}"
            else:
                s = f"exists {v}:int. {rng} /\\ {self.show(t.body, 3)}"
            return f"({s})" if prec > 0 else s
        assert isinstance(t, App)
        op = t.op
        if op == "not":
            return f"not {self.arg(t.args[0])}"
        if op in _INFIX:
            p = _INFIX[op]
            sym = _SHOW.get(op, op)
            # right-associative implication, left-associative others
            lp, rp = (p + 1, p) if op == "->" else (p, p + 1)
            if op in ("and", "or"):
                lp, rp = p, p + 1
            s = f"{self.show(t.args[0], lp)} {sym} {self.show(t.args[1], rp)}"
            return f"({s})" if p < prec else s
        if op == "neg":
            return f"- {self.arg(t.args[0])}"
        if op == "ite":
            s = f"if {self.show(t.args[0])} then {self.show(t.args[1])} else {self.show(t.args[2])}"
            return f"({s})" if prec > 0 else s
        if op == "first" or op == "last":
            a = t.args[0]
            suffix = "'First" if op == "first" else "'Last"
            if isinstance(a, Var):
                return self.name(a) + suffix
            return f"({self.show(a)}){suffix}"
        if op == "length":
            f, l = t.args
            if isinstance(f, Var) and isinstance(l, Var) and f.base.endswith("'First") \
                    and l.base.endswith("'Last") and f.base[:-6] == l.base[:-5]:
                return f.base[:-6] + "'Length"
            return "length " + " ".join(self.arg(a) for a in t.args)
        if op == "str":
            return '"' + t.args[0].value + '"' if isinstance(t.args[0], Const) else "str"
        name = op[5:] if op.startswith("call:") else op
        return name + "".join(" " + self.arg(a) for a in t.args) if t.args else name


def _balanced_outer(s: str) -> bool:
    depth = 0
    for i, ch in enumerate(s):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
            if depth == 0 and i != len(s) - 1:
                return False
    return True


def show(t: Term, names: Optional[dict[Var, str]] = None) -> str:
    return Printer(names).show(t)
