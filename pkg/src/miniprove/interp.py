"""Concrete reference interpreter with run-time checks.

The interpreter is the oracle against which proof results are tested.  It
performs every check the verification-condition generator emits, in the same
order, and reports the first failing one.  Arrays carry one initialization
flag per element.  Reading an uninitialized value of an ordinary object is a
distinct outcome (:class:`UninitRead`); for objects under relaxed
initialization the same read is a failed ``init_check``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Optional, Union

from . import sema as S
from .syntax import ast as A
from .syntax.ast import SourceSpan
from .vcgen.checks import CheckKind
from .vcgen.evaluate import ada_div

DEFAULT_FUEL = 10 ** 5
MAX_DEPTH = 1000


class _Uninit:
    __slots__ = ()

    def __repr__(self) -> str:
        return "UNINIT"


UNINIT: Any = _Uninit()


@dataclass
class ArrayValue:
    first: int
    last: int
    cells: list
    init: list

    @classmethod
    def of(cls, first: int, text: str, initialized: bool = True) -> "ArrayValue":
        return cls(first, first + len(text) - 1, list(text), [initialized] * len(text))

    @classmethod
    def uninitialized(cls, first: int, last: int, fill: str = " ") -> "ArrayValue":
        n = max(0, last - first + 1)
        return cls(first, last, [fill] * n, [False] * n)

    @property
    def length(self) -> int:
        return max(0, self.last - self.first + 1)

    def copy(self) -> "ArrayValue":
        return ArrayValue(self.first, self.last, list(self.cells), list(self.init))

    def text(self) -> str:
        return "".join(self.cells)

    def all_initialized(self) -> bool:
        return all(self.init)


# ---------------------------------------------------------------- outcomes

@dataclass
class Normal:
    bindings: dict
    result: Any = None


@dataclass
class CheckFailure:
    kind: CheckKind
    span: SourceSpan
    bindings: dict = field(default_factory=dict)


@dataclass
class UninitRead:
    span: SourceSpan
    variable: str


@dataclass
class NonTermination:
    reason: str


@dataclass
class Rejected:
    """The inputs violate the precondition, so the run is outside the domain."""

    reason: str = "precondition is false for these inputs"


Outcome = Union[Normal, CheckFailure, UninitRead, NonTermination, Rejected]


class _Stop(Exception):
    def __init__(self, outcome):
        self.outcome = outcome


class _Return(Exception):
    def __init__(self, value):
        self.value = value


@dataclass
class _Frame:
    sp: A.Subprogram
    vals: dict
    names: dict  # uid -> Variable
    result: Any = None


class Interpreter:
    def __init__(self, unit: A.CompilationUnit, table: S.SymbolTable, fuel: int = DEFAULT_FUEL,
                 max_depth: int = MAX_DEPTH):
        self.unit = unit
        self.table = table
        self.fuel = fuel
        self.max_depth = max_depth
        self.steps = 0
        self.depth = 0
        self.frames: list[_Frame] = []

    # ---------------------------------------------------------- helpers

    def tick(self):
        self.steps += 1
        if self.steps > self.fuel:
            raise _Stop(NonTermination("step budget exhausted"))

    def fail(self, kind: CheckKind, span: SourceSpan):
        raise _Stop(CheckFailure(kind, span, self.bindings()))

    def bindings(self) -> dict:
        if not self.frames:
            return {}
        f = self.frames[-1]
        out = {}
        for uid, v in f.names.items():
            x = f.vals.get(uid, UNINIT)
            if x is UNINIT or v.mode == "quant":
                continue
            if isinstance(x, ArrayValue):
                out[f"{v.name}'First"] = x.first
                out[f"{v.name}'Last"] = x.last
                out[v.name] = x.copy()
            else:
                out[v.name] = x
        return out

    def require(self, ok: bool, kind: CheckKind, span: SourceSpan):
        if not ok:
            self.fail(kind, span)

    def in_int(self, v: int, span: SourceSpan):
        self.require(S.INT_MIN <= v <= S.INT_MAX, CheckKind.OVERFLOW, span)
        return v

    def range_check(self, ty: S.Type, v: Any, span: SourceSpan):
        if ty.kind == "int" and ty.constrained:
            self.require(ty.lo <= v <= ty.hi, CheckKind.RANGE, span)

    # ------------------------------------------------------------- entry

    def run(self, sp: A.Subprogram, args: dict) -> Outcome:
        """Execute ``sp`` on ``args`` (parameter name -> value).

        Arrays for ``out`` parameters only contribute their bounds.
        """
        self.steps = 0
        self.depth = 0
        self.frames = []
        try:
            frame = self.enter(sp, args, from_caller=False)
            self.frames.append(frame)
            pre = sp.aspects.pre
            if pre is not None and not self.eval(pre):
                return Rejected()
            result = self.execute(frame)
            return Normal(self.bindings(), result)
        except _Stop as stop:
            return stop.outcome
        except RecursionError:
            return NonTermination("recursion too deep")

    def enter(self, sp: A.Subprogram, args: dict, from_caller: bool) -> _Frame:
        vals, names = {}, {}
        for v in self.table.variables.get(sp.name.lower(), []):
            names[v.uid] = v
        for p in sp.params:
            v = p.decl
            x = args[v.name] if v.name in args else args.get(v.name.lower(), UNINIT)
            if isinstance(x, ArrayValue):
                x = x.copy()
                if v.mode == "out":
                    x = ArrayValue.uninitialized(x.first, x.last)
            elif v.mode == "out":
                x = UNINIT
            vals[v.uid] = x
        return _Frame(sp, vals, names)

    def execute(self, frame: _Frame) -> Any:
        sp = frame.sp
        for d in sp.locals:
            self.declare(d)
        if sp.expr is not None:
            value = self.eval(sp.expr)
            return self.finish(value, sp.expr)
        try:
            self.stmts(sp.body or [])
        except _Return as r:
            return r.value
        if sp.kind == "procedure":
            self.post()
        return None

    def finish(self, value: Any, e: A.Expr) -> Any:
        sp = self.frames[-1].sp
        if sp.result is not None:
            self.range_check(self.table.type_named(sp.result.name), value, e.span)
        self.frames[-1].result = value
        self.post()
        return value

    def post(self):
        post = self.frames[-1].sp.aspects.post
        if post is not None:
            self.require(self.eval(post) is True, CheckKind.POSTCONDITION, post.span)

    def declare(self, d: A.ObjectDecl):
        v: S.Variable = d.decl
        vals = self.frames[-1].vals
        if v.is_array:
            lo, hi = self.eval(v.constraint[0]), self.eval(v.constraint[1])
            arr = ArrayValue.uninitialized(lo, hi)
            if d.init is not None:
                c = self.eval(d.init.value)
                arr.cells = [c] * arr.length
                arr.init = [True] * arr.length
            vals[v.uid] = arr
        elif d.init is not None:
            x = self.eval(d.init)
            self.range_check(v.type, x, d.init.span)
            vals[v.uid] = x
        else:
            vals[v.uid] = UNINIT

    # -------------------------------------------------------- statements

    def stmts(self, stmts: list[A.Stmt], loop_first: Optional[bool] = None):
        for s in stmts:
            self.stmt(s, loop_first)

    def stmt(self, s: A.Stmt, loop_first: Optional[bool] = None):
        self.tick()
        vals = self.frames[-1].vals
        if isinstance(s, A.Null):
            return
        if isinstance(s, A.Assign):
            t = s.target
            if isinstance(t, A.Index):
                v: S.Variable = t.prefix.decl
                x = self.eval(s.value)
                arr = vals[v.uid]
                i = self.eval(t.index)
                self.require(arr.first <= i <= arr.last, CheckKind.ARRAY_INDEX, t.index.span)
                arr.cells[i - arr.first] = x
                arr.init[i - arr.first] = True
                return
            v = t.decl
            if v.is_array:
                arr = vals[v.uid]
                c = self.eval(s.value.value)
                arr.cells = [c] * arr.length
                arr.init = [True] * arr.length
                return
            x = self.eval(s.value)
            self.range_check(v.type, x, s.value.span)
            vals[v.uid] = x
            return
        if isinstance(s, A.Pragma):
            x = self.eval(s.expr)
            if s.name == "Assert":
                self.require(x is True, CheckKind.ASSERTION, s.expr.span)
            else:
                kind = CheckKind.LOOP_INVARIANT_INIT if loop_first else \
                    CheckKind.LOOP_INVARIANT_PRESERVE
                self.require(x is True, kind, s.expr.span)
            return
        if isinstance(s, A.Return):
            if s.value is None:
                self.post()
                raise _Return(None)
            x = self.eval(s.value)
            raise _Return(self.finish(x, s.value))
        if isinstance(s, A.If):
            for cond, body in s.branches:
                if self.eval(cond):
                    self.stmts(body)
                    return
            if s.orelse is not None:
                self.stmts(s.orelse)
            return
        if isinstance(s, A.For):
            lo, hi = self.range_bounds(s.range)
            for k in range(lo, hi + 1):
                self.tick()
                vals[s.decl.uid] = k
                self.stmts(s.body, loop_first=(k == lo))
            vals.pop(s.decl.uid, None)
            return
        raise TypeError(type(s).__name__)

    # ------------------------------------------------------- expressions

    def range_bounds(self, r: A.Range) -> tuple[int, int]:
        if r.of is not None:
            arr = self.eval(r.of)
            return arr.first, arr.last
        return self.eval(r.low), self.eval(r.high)

    def variable(self, e: A.Expr) -> Optional[S.Variable]:
        e = A.strip_parens(e)
        while isinstance(e, (A.Index, A.Slice)):
            e = A.strip_parens(e.prefix)
        return e.decl if isinstance(e, A.Name) else None

    def value(self, e: A.Expr) -> Any:
        """Evaluate, requiring an array to be fully initialized."""
        x = self.eval(e)
        if isinstance(x, ArrayValue) and not x.all_initialized():
            v = self.variable(e)
            if v is not None and v.relaxed:
                self.fail(CheckKind.INIT_CHECK, e.span)
            raise _Stop(UninitRead(e.span, v.name if v else "value"))
        return x

    def eval(self, e: A.Expr) -> Any:
        self.tick()
        if isinstance(e, (A.IntLit, A.CharLit, A.BoolLit)):
            return e.value
        if isinstance(e, A.StrLit):
            return ArrayValue.of(1, e.value)
        if isinstance(e, A.Paren):
            return self.eval(e.inner)
        if isinstance(e, A.Name):
            x = self.frames[-1].vals.get(e.decl.uid, UNINIT)
            if x is UNINIT:
                raise _Stop(UninitRead(e.span, e.ident))
            return x
        if isinstance(e, A.Attribute):
            return self.attribute(e)
        if isinstance(e, A.Unary):
            x = self.eval(e.operand)
            if e.op == "not":
                return not x
            if e.op == "+":
                return x
            return self.in_int(-x, e.span)
        if isinstance(e, A.Binary):
            return self.binary(e)
        if isinstance(e, A.IfExpr):
            if self.eval(e.cond):
                return self.eval(e.then)
            return True if e.orelse is None else self.eval(e.orelse)
        if isinstance(e, A.Quantified):
            lo, hi = self.range_bounds(e.range)
            vals = self.frames[-1].vals
            result = e.universal
            for k in range(lo, hi + 1):
                vals[e.decl.uid] = k
                if bool(self.eval(e.body)) != e.universal:
                    result = not e.universal
                    break
            vals.pop(e.decl.uid, None)
            return result
        if isinstance(e, A.Membership):
            x = self.eval(e.value)
            lo, hi = self.range_bounds(e.range)
            inside = lo <= x <= hi
            return not inside if e.negated else inside
        if isinstance(e, A.Index):
            arr = self.eval(e.prefix)
            i = self.eval(e.index)
            self.require(arr.first <= i <= arr.last, CheckKind.ARRAY_INDEX, e.index.span)
            if not arr.init[i - arr.first]:
                v = self.variable(e.prefix)
                if v is not None and v.relaxed:
                    self.fail(CheckKind.INIT_CHECK, e.span)
                raise _Stop(UninitRead(e.span, v.name if v else "value"))
            return arr.cells[i - arr.first]
        if isinstance(e, A.Slice):
            arr = self.eval(e.prefix)
            lo, hi = self.eval(e.low), self.eval(e.high)
            if lo <= hi:
                self.require(arr.first <= lo and hi <= arr.last, CheckKind.RANGE, e.span)
                a, b = lo - arr.first, hi - arr.first + 1
                return ArrayValue(lo, hi, arr.cells[a:b], arr.init[a:b])
            return ArrayValue(lo, hi, [], [])
        if isinstance(e, A.Call):
            return self.call(e)
        raise TypeError(type(e).__name__)

    def attribute(self, e: A.Attribute) -> Any:
        if e.attr == "Result":
            return self.frames[-1].result
        if e.attr == "Initialized":
            p = A.strip_parens(e.prefix)
            if isinstance(p, A.Index):
                arr = self.eval(p.prefix)
                i = self.eval(p.index)
                self.require(arr.first <= i <= arr.last, CheckKind.ARRAY_INDEX, p.index.span)
                return arr.init[i - arr.first]
            x = self.frames[-1].vals.get(p.decl.uid, UNINIT) if isinstance(p, A.Name) \
                else self.eval(p)
            if isinstance(x, ArrayValue):
                return x.all_initialized()
            return x is not UNINIT
        arr = self.eval(e.prefix)
        if e.attr == "First":
            return arr.first
        if e.attr == "Last":
            return arr.last
        return arr.length

    def binary(self, e: A.Binary) -> Any:
        op = e.op
        if op == "and then":
            return bool(self.eval(e.left)) and bool(self.eval(e.right))
        if op == "or else":
            return bool(self.eval(e.left)) or bool(self.eval(e.right))
        if op in ("=", "/=") and e.left.ty.kind == "string":
            a, b = self.value(e.left), self.value(e.right)
            same = a.cells == b.cells
            return same if op == "=" else not same
        a = self.eval(e.left)
        b = self.eval(e.right)
        if op == "and":
            return a and b
        if op == "or":
            return a or b
        if op == "=":
            return a == b
        if op == "/=":
            return a != b
        if op == "<":
            return a < b
        if op == "<=":
            return a <= b
        if op == ">":
            return a > b
        if op == ">=":
            return a >= b
        if op == "/":
            self.require(b != 0, CheckKind.DIVISION, e.op_span)
            return self.in_int(ada_div(a, b), e.op_span)
        r = {"+": a + b, "-": a - b, "*": a * b}[op]
        return self.in_int(r, e.op_span)

    def call(self, e: A.Call) -> Any:
        callee: A.Subprogram = e.decl
        args = [self.value(a) for a in e.args]
        for a, p, x in zip(e.args, callee.params, args):
            self.range_check(p.decl.type, x, a.span)
        bound = {p.decl.name: x for p, x in zip(callee.params, args)}
        if callee.aspects.pre is not None:
            ok = self.with_frame(callee, bound, lambda: self.eval(callee.aspects.pre))
            self.require(ok is True, CheckKind.PRECONDITION, e.span)
        caller = self.frames[-1].sp
        if callee.aspects.variant is not None and callee.name == caller.name:
            here = self.eval(callee.aspects.variant)
            there = self.with_frame(callee, bound, lambda: self.eval(callee.aspects.variant))
            self.require(0 <= there < here, CheckKind.VARIANT_DECREASE, e.span)
        if callee.body is None and callee.expr is None:
            raise _Stop(NonTermination(f"\"{callee.name}\" has no body"))
        self.depth += 1
        if self.depth > self.max_depth:
            raise _Stop(NonTermination("recursion depth limit reached"))
        try:
            return self.with_frame(callee, bound, lambda: self.execute(self.frames[-1]))
        finally:
            self.depth -= 1

    def with_frame(self, sp: A.Subprogram, args: dict, thunk):
        self.frames.append(self.enter(sp, args, from_caller=True))
        try:
            return thunk()
        finally:
            self.frames.pop()


def run(unit: A.CompilationUnit, table: S.SymbolTable, sp: A.Subprogram, args: dict,
        fuel: int = DEFAULT_FUEL) -> Outcome:
    return Interpreter(unit, table, fuel).run(sp, args)


# ------------------------------------------------------------------ replay

def entry_args(sp: A.Subprogram, vc, model: dict) -> dict:
    """Entry-point bindings of a counterexample as interpreter arguments."""
    args = {}
    for p in sp.params:
        v = p.decl
        t = vc.entry.get(v.name)
        if t is None:
            continue
        if v.is_array:
            fb = model.get(vc.entry[f"{v.name}'First"])
            lb = model.get(vc.entry[f"{v.name}'Last"])
            content = model.get(t)
            if fb is None or lb is None:
                continue
            cells = list(content.data) if content is not None else [" "] * max(0, lb - fb + 1)
            if v.relaxed:
                flags = [c[1] for c in cells]
                cells = [c[0] for c in cells]
            else:
                flags = [True] * len(cells)
            args[v.name] = ArrayValue(fb, lb, cells, flags)
        else:
            x = model.get(t)
            if x is not None:
                args[v.name] = x
    return args


def replay(unit: A.CompilationUnit, table: S.SymbolTable, vc, model: dict,
           fuel: int = DEFAULT_FUEL) -> str:
    """confirmed | spurious | not_applicable."""
    if vc.cut_crossed:
        return "not_applicable"
    ob = vc.obligation
    sp = unit.find(ob.subprogram)
    out = run(unit, table, sp, entry_args(sp, vc, model), fuel)
    if isinstance(out, CheckFailure) and out.kind is ob.kind and out.span == ob.span:
        return "confirmed"
    return "spurious"
