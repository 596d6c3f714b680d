"""Three-valued evaluation of logic terms through compiled closures.

A partial assignment may leave symbols, array cells and entries of
uninterpreted function tables undetermined.  Evaluation then yields
:data:`UNK` unless the result is already forced (``False and _`` is False).
Each undetermined cell or table entry that was needed is recorded in
``Shared.pending`` so that a search procedure knows what to branch on next.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable, Optional

from . import logic as L


class _Unknown:
    __slots__ = ()

    def __repr__(self) -> str:
        return "UNK"


UNK: Any = _Unknown()


class EvalLimit(Exception):
    """Quantifier expansion or recursion beyond the configured limits."""


def ada_div(a: int, b: int) -> int:
    if b == 0:
        return 0
    q = abs(a) // abs(b)
    return q if (a >= 0) == (b >= 0) else -q


# ------------------------------------------------------------------ arrays

class Arr:
    """Array value with bounds; cells are fetched through ``cell``."""

    first: int
    last: int

    @property
    def length(self) -> int:
        return max(0, self.last - self.first + 1)

    def cell(self, k: int, sh: "Shared") -> Any:
        raise NotImplementedError

    def cells(self, sh: "Shared") -> Any:
        """All in-range cells as a tuple, or UNK when some are undetermined."""
        out = []
        unknown = False
        for k in range(self.first, self.last + 1):
            v = self.cell(k, sh)
            if v is UNK:
                unknown = True
            out.append(v)
        return UNK if unknown else tuple(out)


class SymArr(Arr):
    """Free array symbol; its cells live in ``Shared.cells``."""

    __slots__ = ("key", "first", "last", "wrapped")

    def __init__(self, key: int, first: int, last: int, wrapped: bool = False):
        self.key, self.first, self.last, self.wrapped = key, first, last, wrapped

    def cell(self, k, sh):
        v = sh.cells.get((self.key, k), UNK)
        if v is UNK:
            if sh.strict:
                # cells never consulted during search can take any value
                c = sh.alphabet[0]
                return (c, False) if self.wrapped else c
            sh.need(("cell", self.key, k))
        return v


class StoreArr(Arr):
    __slots__ = ("base", "index", "value", "first", "last")

    def __init__(self, base: Arr, index: int, value: Any):
        self.base, self.index, self.value = base, index, value
        self.first, self.last = base.first, base.last

    def cell(self, k, sh):
        return self.value if k == self.index else self.base.cell(k, sh)


class SliceArr(Arr):
    __slots__ = ("base", "first", "last")

    def __init__(self, base: Arr, first: int, last: int):
        self.base, self.first, self.last = base, first, last

    def cell(self, k, sh):
        return self.base.cell(k, sh)


class ConstArr(Arr):
    __slots__ = ("value", "first", "last")

    def __init__(self, first: int, last: int, value: Any):
        self.first, self.last, self.value = first, last, value

    def cell(self, k, sh):
        return self.value


class ConcreteArr(Arr):
    __slots__ = ("data", "first", "last")

    def __init__(self, first: int, last: int, data: tuple):
        self.first, self.last, self.data = first, last, tuple(data)

    def cell(self, k, sh):
        i = k - self.first
        if 0 <= i < len(self.data):
            return self.data[i]
        return sh.default_cell(self.data[0] if self.data else " ")

    def __repr__(self) -> str:
        return f"ConcreteArr({self.first}, {self.last}, {self.data!r})"


class UnwrapArr(Arr):
    """Character view of a wrapper array (``of_wrapper``)."""

    __slots__ = ("base", "first", "last")

    def __init__(self, base: Arr):
        self.base, self.first, self.last = base, base.first, base.last

    def cell(self, k, sh):
        v = self.base.cell(k, sh)
        return UNK if v is UNK else v[0]


def concrete(a: Arr, sh: "Shared") -> Any:
    cs = a.cells(sh)
    return UNK if cs is UNK else ConcreteArr(a.first, a.last, cs)


def value_key(v: Any, sh: "Shared") -> Any:
    """Hashable key of a fully determined value, or UNK."""
    if isinstance(v, Arr):
        cs = v.cells(sh)
        return UNK if cs is UNK else ("arr", v.first, v.last, cs)
    return v


# --------------------------------------------------------------- functions

@dataclass
class LogicFunction:
    """A source function as seen by the logic.

    ``body`` is set for expression functions whose definition is available;
    otherwise the function is uninterpreted, constrained only by
    ``contract`` (a formula over ``params`` and ``result``).
    """

    name: str
    params: list[L.Var]
    result: L.Var
    body: Optional[L.Term] = None
    contract: L.Term = L.TRUE
    result_lo: Optional[int] = None
    result_hi: Optional[int] = None
    array_bounds: dict = field(default_factory=dict)

    @property
    def opaque(self) -> bool:
        return self.body is None


@dataclass
class Shared:
    """State shared by every frame of one evaluation context."""

    alphabet: tuple[str, ...] = (" ", "a", "b")
    int_lo: int = -8
    int_hi: int = 8
    quant_limit: int = 64
    max_depth: int = 40
    cells: dict = field(default_factory=dict)
    tables: dict = field(default_factory=dict)
    pending: dict = field(default_factory=dict)
    functions: dict = field(default_factory=dict)
    compiled: dict = field(default_factory=dict)
    depth: int = 0
    strict: bool = False

    def need(self, item) -> None:
        if not self.strict:
            self.pending.setdefault(item, None)

    def default_cell(self, like):
        return like

    def cell_domain(self, sort: str) -> list:
        if sort == L.WSTRING:
            return [(c, b) for c in self.alphabet for b in (False, True)]
        return list(self.alphabet)


class Env:
    __slots__ = ("vals", "sh")

    def __init__(self, vals: list, sh: Shared):
        self.vals, self.sh = vals, sh


Closure = Callable[[Env], Any]


def _not(x):
    return UNK if x is UNK else (not x)


def _eq(a, b, sh):
    if a is UNK or b is UNK:
        return UNK
    if isinstance(a, Arr):
        if a.first != b.first or a.last != b.last:
            return False
        unknown = False
        for k in range(a.first, a.last + 1):
            x, y = a.cell(k, sh), b.cell(k, sh)
            if x is UNK or y is UNK:
                unknown = True
            elif x != y:
                return False
        return UNK if unknown else True
    return a == b


def _streq(a, b, sh):
    """Ada equality on strings: same length and same characters in order."""
    if a is UNK or b is UNK:
        return UNK
    if a.length != b.length:
        return False
    unknown = False
    for i in range(a.length):
        x, y = a.cell(a.first + i, sh), b.cell(b.first + i, sh)
        if x is UNK or y is UNK:
            unknown = True
        elif x != y:
            return False
    return UNK if unknown else True


# ----------------------------------------------------------------- compiler

class Compiler:
    """Compile terms against a slot layout.

    ``slots`` maps free symbols to positions in ``Env.vals``; ``defs`` maps
    defined symbols to their defining terms, which are evaluated on demand;
    ``bounds`` maps array symbols to their (first, last) bound symbols.
    """

    def __init__(self, slots: dict[L.Var, int], defs: Optional[dict[L.Var, L.Term]] = None,
                 bounds: Optional[dict[L.Var, tuple[L.Term, L.Term]]] = None):
        self.slots = dict(slots)
        self.defs = defs or {}
        self.bounds = bounds or {}
        self.memo: dict[L.Var, Closure] = {}

    def slot(self, v: L.Var) -> int:
        if v not in self.slots:
            self.slots[v] = len(self.slots)
        return self.slots[v]

    @property
    def size(self) -> int:
        return len(self.slots)

    def compile(self, t: L.Term) -> Closure:
        if isinstance(t, L.Const):
            if t.sort == L.WRAPPER:
                val = tuple(t.value)
            else:
                val = t.value
            return lambda env: val
        if isinstance(t, L.Var):
            return self.var(t)
        if isinstance(t, L.Quant):
            return self.quant(t)
        return self.app(t)

    def var(self, v: L.Var) -> Closure:
        if v in self.memo:
            return self.memo[v]
        if v in self.defs:
            box: list = []
            self.memo[v] = lambda env: box[0](env)
            box.append(self.compile(self.defs[v]))
            f = box[0]
            self.memo[v] = f
            return f
        if v.sort in L.ARRAY_SORTS and v not in self.slots:
            fb, lb = self.bounds[v]
            ff, lf = self.compile(fb), self.compile(lb)
            key, wrapped = v.uid, v.sort == L.WSTRING

            def arr(env):
                f, l = ff(env), lf(env)
                if f is UNK or l is UNK:
                    return UNK
                return SymArr(key, f, l, wrapped)
            self.memo[v] = arr
            return arr
        i = self.slot(v)
        f = lambda env: env.vals[i]
        self.memo[v] = f
        return f

    def quant(self, q: L.Quant) -> Closure:
        i = self.slot(q.var)
        lo, hi, body = self.compile(q.lo), self.compile(q.hi), self.compile(q.body)
        universal = q.universal

        def run(env):
            a, b = lo(env), hi(env)
            if a is UNK or b is UNK:
                return UNK
            if b - a + 1 > env.sh.quant_limit:
                raise EvalLimit("quantifier range exceeds the expansion limit")
            vals = env.vals
            saved = vals[i]
            result = universal
            for k in range(a, b + 1):
                vals[i] = k
                r = body(env)
                if r is UNK:
                    result = UNK
                elif r != universal:
                    vals[i] = saved
                    return r
            vals[i] = saved
            return result
        return run

    def app(self, t: L.App) -> Closure:
        op = t.op
        fs = [self.compile(a) for a in t.args]
        if op == "and":
            a, b = fs

            def f(env):
                x = a(env)
                if x is False:
                    return False
                y = b(env)
                if y is False:
                    return False
                return UNK if (x is UNK or y is UNK) else True
            return f
        if op == "or":
            a, b = fs

            def f(env):
                x = a(env)
                if x is True:
                    return True
                y = b(env)
                if y is True:
                    return True
                return UNK if (x is UNK or y is UNK) else False
            return f
        if op == "->":
            a, b = fs

            def f(env):
                x = a(env)
                if x is False:
                    return True
                y = b(env)
                if y is True:
                    return True
                return UNK if (x is UNK or y is UNK) else False
            return f
        if op == "not":
            (a,) = fs
            return lambda env: _not(a(env))
        if op == "ite":
            c, a, b = fs

            def f(env):
                x = c(env)
                if x is UNK:
                    p, q = a(env), b(env)
                    return p if (p is not UNK and q is not UNK and
                                 not isinstance(p, Arr) and p == q) else UNK
                return a(env) if x else b(env)
            return f
        if op in ("+", "-", "*", "/", "<", "<=", ">", ">="):
            a, b = fs
            fn = {"+": lambda x, y: x + y, "-": lambda x, y: x - y, "*": lambda x, y: x * y,
                  "/": ada_div, "<": lambda x, y: x < y, "<=": lambda x, y: x <= y,
                  ">": lambda x, y: x > y, ">=": lambda x, y: x >= y}[op]

            def f(env):
                x = a(env)
                if x is UNK:
                    return UNK
                y = b(env)
                if y is UNK:
                    return UNK
                return fn(x, y)
            return f
        if op == "neg":
            (a,) = fs
            return lambda env: UNK if (x := a(env)) is UNK else -x
        if op == "=":
            a, b = fs
            return lambda env: _eq(a(env), b(env), env.sh)
        if op == "<>":
            a, b = fs
            return lambda env: _not(_eq(a(env), b(env), env.sh))
        if op == "streq":
            a, b = fs
            return lambda env: _streq(a(env), b(env), env.sh)
        if op == "get2":
            a, i = fs

            def f(env):
                arr = a(env)
                if arr is UNK:
                    return UNK
                k = i(env)
                if k is UNK:
                    return UNK
                return arr.cell(k, env.sh)
            return f
        if op == "set2":
            a, i, v = fs

            def f(env):
                arr, k, x = a(env), i(env), v(env)
                if arr is UNK or k is UNK:
                    return UNK
                if x is UNK:
                    return _PartialStore(arr, k, v, env)
                return StoreArr(arr, k, x)
            return f
        if op in ("first", "last"):
            (a,) = fs
            attr = op

            def f(env):
                arr = a(env)
                return UNK if arr is UNK else getattr(arr, attr)
            return f
        if op == "length":
            a, b = fs

            def f(env):
                x, y = a(env), b(env)
                return UNK if (x is UNK or y is UNK) else max(0, y - x + 1)
            return f
        if op == "to_wrapper":
            (a,) = fs
            return lambda env: UNK if (x := a(env)) is UNK else (x, True)
        if op == "mk":
            a, b = fs

            def f(env):
                x, y = a(env), b(env)
                return UNK if (x is UNK or y is UNK) else (x, y)
            return f
        if op == "rec__value":
            (a,) = fs
            return lambda env: UNK if (x := a(env)) is UNK else x[0]
        if op == "__attr__init":
            (a,) = fs
            return lambda env: UNK if (x := a(env)) is UNK else x[1]
        if op == "of_wrapper":
            (a,) = fs
            return lambda env: UNK if (x := a(env)) is UNK else UnwrapArr(x)
        if op == "slice":
            a, lo, hi = fs

            def f(env):
                arr, x, y = a(env), lo(env), hi(env)
                if arr is UNK or x is UNK or y is UNK:
                    return UNK
                return SliceArr(arr, x, y)
            return f
        if op == "const_array":
            lo, hi, v = fs

            def f(env):
                x, y, c = lo(env), hi(env), v(env)
                if x is UNK or y is UNK or c is UNK:
                    return UNK
                return ConstArr(x, y, c)
            return f
        if op == "str":
            text = t.args[0].value
            arr = ConcreteArr(1, len(text), tuple(text))
            return lambda env: arr
        if op.startswith("call:"):
            return self.call(op[5:], fs)
        raise ValueError(f"cannot evaluate operator {op!r}")

    def call(self, name: str, fs: list[Closure]) -> Closure:
        def f(env):
            sh = env.sh
            fn: LogicFunction = sh.functions[name]
            args = [g(env) for g in fs]
            if any(a is UNK for a in args):
                return UNK
            if fn.body is not None:
                return invoke_body(fn, args, sh)
            key = tuple(value_key(a, sh) for a in args)
            if any(k is UNK for k in key):
                return UNK
            entry = (name, key)
            if entry in sh.tables:
                return sh.tables[entry]
            sh.need(("call", name, key, tuple(args)))
            return UNK
        return f


class _PartialStore(Arr):
    """A store whose value is undetermined: only the stored cell is unknown."""

    def __init__(self, base: Arr, index: int, value: Closure, env: Env):
        self.base, self.index, self.value, self.env = base, index, value, env
        self.first, self.last = base.first, base.last

    def cell(self, k, sh):
        if k == self.index:
            return self.value(self.env)
        return self.base.cell(k, sh)


def _frame(fn: LogicFunction, c: Compiler, args: list, sh: Shared) -> Env:
    vals = [UNK] * c.size
    for i, a in enumerate(args):
        vals[i] = a
    # bound symbols of array parameters take the argument's bounds
    for p, (fb, lb) in fn.array_bounds.items():
        a = args[fn.params.index(p)]
        if fb in c.slots:
            vals[c.slots[fb]] = a.first
        if lb in c.slots:
            vals[c.slots[lb]] = a.last
    return Env(vals, sh)


def compiled_function(fn: LogicFunction, sh: Shared):
    """(body closure, compiler) for an available function, cached per context."""
    hit = sh.compiled.get(fn.name)
    if hit is None:
        c = Compiler({p: i for i, p in enumerate(fn.params)})
        hit = (c.compile(fn.body), c)
        sh.compiled[fn.name] = hit
    return hit


def invoke_body(fn: LogicFunction, args: list, sh: Shared):
    body, c = compiled_function(fn, sh)
    if sh.depth >= sh.max_depth:
        raise EvalLimit(f"recursion through {fn.name} exceeds the depth limit")
    env = _frame(fn, c, args, sh)
    sh.depth += 1
    try:
        return body(env)
    finally:
        sh.depth -= 1


def contract_holds(fn: LogicFunction, args: list, result: Any, sh: Shared) -> Any:
    key = ("contract", fn.name)
    hit = sh.compiled.get(key)
    if hit is None:
        slots = {p: i for i, p in enumerate(fn.params)}
        slots[fn.result] = len(slots)
        c = Compiler(slots)
        hit = (c.compile(fn.contract), c)
        sh.compiled[key] = hit
    f, c = hit
    env = _frame(fn, c, args, sh)
    env.vals[len(fn.params)] = result
    return f(env)


def evaluate(t: L.Term, values: dict[L.Var, Any], sh: Optional[Shared] = None,
             defs: Optional[dict] = None, bounds: Optional[dict] = None) -> Any:
    """Evaluate a term once under a (possibly partial) assignment."""
    sh = sh or Shared()
    c = Compiler({}, defs, bounds)
    f = c.compile(t)
    vals = [UNK] * c.size
    for v, i in c.slots.items():
        if v in values:
            vals[i] = values[v]
    return f(Env(vals, sh))
