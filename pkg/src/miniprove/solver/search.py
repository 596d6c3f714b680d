"""Bounded-domain validity checking by backtracking search.

A VC is valid within bounds when no assignment of its symbols inside the
domain windows satisfies every hypothesis while falsifying the goal.  The
search assigns symbols one at a time in a fixed order and evaluates all
formulas three-valued after each step, pruning as soon as a hypothesis is
false or the goal is true.  Array cells and results of uninterpreted
functions are only enumerated when an evaluation actually needs them.

Symbol order: array bound symbols first, then the remaining free symbols in
signature order.  Value order: integers by (|v|, sign) so that -1 precedes 1;
False before True; characters in alphabet order.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Optional, Union

from ..vcgen import logic as L
from ..vcgen.evaluate import (UNK, Arr, Compiler, ConcreteArr, Env, EvalLimit, Shared,
                              contract_holds)
from ..vcgen.generate import Hypothesis, SymbolInfo, VerificationCondition

DEFAULT_BUDGET = 10 ** 7
LEVEL_MULTIPLIER = {0: 1, 1: 10, 2: 100}


class ConfigurationError(Exception):
    """A VC uses a sort the bounded solver cannot enumerate."""


@dataclass(frozen=True)
class DomainBounds:
    int_lo: int = -8
    int_hi: int = 8
    max_len: int = 4
    alphabet: tuple[str, ...] = (" ", "a", "b")
    quant_limit: int = 64
    budget: int = DEFAULT_BUDGET

    def __post_init__(self):
        if self.int_lo > self.int_hi:
            raise ValueError("integer window is empty")
        if self.max_len < 0:
            raise ValueError("maximum array length must be non-negative")
        if not self.alphabet:
            raise ValueError("alphabet must not be empty")

    @classmethod
    def parse(cls, text: str, **kw) -> "DomainBounds":
        """Read ``lo:hi:len`` as given on the command line."""
        lo, hi, n = (int(x) for x in text.split(":"))
        return cls(lo, hi, n, **kw)

    def scaled(self, level: int) -> "DomainBounds":
        return DomainBounds(self.int_lo, self.int_hi, self.max_len, self.alphabet,
                            self.quant_limit, self.budget * LEVEL_MULTIPLIER.get(level, 1))


@dataclass(frozen=True)
class Proved:
    nodes: int = 0

    def __str__(self) -> str:
        return "Proved"


@dataclass(frozen=True)
class Counterexample:
    model: dict = field(hash=False)
    nodes: int = 0

    def __str__(self) -> str:
        return "Counterexample"


@dataclass(frozen=True)
class ResourceOut:
    reason: str = "budget exhausted"
    nodes: int = 0

    def __str__(self) -> str:
        return "ResourceOut"


SolveResult = Union[Proved, Counterexample, ResourceOut]


@dataclass(frozen=True)
class Satisfiable:
    model: dict = field(hash=False)


@dataclass(frozen=True)
class NoModelWithinBounds:
    pass


def int_order(lo: int, hi: int) -> list[int]:
    return sorted(range(lo, hi + 1), key=lambda v: (abs(v), v > 0))


class _Found(Exception):
    pass


class _Budget(Exception):
    pass


class Search:
    def __init__(self, symbols: list[SymbolInfo], hyps: list[Hypothesis], goal: L.Term,
                 functions: dict, bounds: DomainBounds):
        self.bounds = bounds
        self.symbols = symbols
        defs = {s.var: s.definition for s in symbols if s.definition is not None}
        arr_bounds = {s.var: s.bounds for s in symbols
                      if s.var.sort in L.ARRAY_SORTS and s.definition is None and s.bounds}
        statics = [s for s in symbols if s.definition is None and s.var.sort not in L.ARRAY_SORTS]
        for s in statics:
            if s.var.sort not in (L.INT, L.BOOL, L.CHAR):
                raise ConfigurationError(f"unsupported sort {s.var.sort} for {s.var.base}")
        order = [s for s in statics if s.role == "bound"] + \
                [s for s in statics if s.role != "bound"]
        self.order = order
        self.compiler = Compiler({s.var: i for i, s in enumerate(order)}, defs, arr_bounds)
        c = self.compiler
        self.hyps = [c.compile(h.formula) for h in hyps if h.defines is None]
        self.goal = c.compile(goal)
        # length constraint between the two bound symbols of an array
        self.partner: dict[L.Var, L.Var] = {}
        for s in symbols:
            if s.bounds and all(isinstance(b, L.Var) for b in s.bounds):
                self.partner[s.bounds[1]] = s.bounds[0]
        self.dyn = {s.var: (c.compile(s.dyn[0]), c.compile(s.dyn[1])) for s in order if s.dyn}
        self.sh = Shared(alphabet=bounds.alphabet, int_lo=bounds.int_lo, int_hi=bounds.int_hi,
                         quant_limit=bounds.quant_limit, functions=dict(functions))
        self.env = Env([UNK] * c.size, self.sh)
        self.nodes = 0
        self.model: Optional[dict] = None

    # ---------------------------------------------------------- domains

    def domain(self, s: SymbolInfo) -> list:
        v, b = s.var, self.bounds
        if v.sort == L.BOOL:
            return [False, True]
        if v.sort == L.CHAR:
            return list(b.alphabet)
        if s.role == "bound":
            if v.base.endswith("'First"):
                return int_order(1, max(1, b.max_len))
            vals = int_order(0, b.max_len + 1)
            f = self.partner.get(v)
            if f is not None:
                first = self.env.vals[self.compiler.slots[f]]
                if first is not UNK:
                    vals = [x for x in vals if x - first + 1 <= b.max_len]
            return vals
        if v in self.dyn:
            flo, fhi = self.dyn[v]
            lo, hi = flo(self.env), fhi(self.env)
            if lo is UNK or hi is UNK:
                lo, hi = b.int_lo, b.int_hi
            return int_order(lo, hi)
        lo, hi = b.int_lo, b.int_hi
        if s.lo is not None:
            lo = max(lo, s.lo)
        if s.hi is not None:
            hi = min(hi, s.hi)
        return int_order(lo, hi)

    # ----------------------------------------------------------- search

    def status(self) -> str:
        """prune | model | open"""
        env = self.env
        self.sh.pending.clear()
        undecided = False
        for h in self.hyps:
            r = h(env)
            if r is False:
                return "prune"
            if r is UNK:
                undecided = True
        g = self.goal(env)
        if g is True:
            return "prune"
        if g is UNK or undecided:
            return "open"
        return "model"

    def tick(self):
        self.nodes += 1
        if self.nodes > self.bounds.budget:
            raise _Budget()

    def run(self) -> Optional[dict]:
        try:
            self.step(0)
        except _Found:
            return self.model
        return None

    def step(self, k: int):
        self.tick()
        st = self.status()
        if st == "prune":
            return
        if st == "model":
            self.model = self.snapshot()
            raise _Found()
        if k < len(self.order):
            s = self.order[k]
            i = self.compiler.slots[s.var]
            for x in self.domain(s):
                self.env.vals[i] = x
                self.step(k + 1)
            self.env.vals[i] = UNK
            return
        pending = list(self.sh.pending)
        if not pending:
            raise EvalLimit("formula undetermined under a complete assignment")
        item = pending[0]
        sh = self.sh
        if item[0] == "cell":
            _, key, idx = item
            wrapped = any(s.var.uid == key and s.var.sort == L.WSTRING for s in self.symbols)
            for x in sh.cell_domain(L.WSTRING if wrapped else L.STRING):
                sh.cells[(key, idx)] = x
                self.step(k)
            del sh.cells[(key, idx)]
            return
        _, name, key, args = item
        fn = sh.functions[name]
        entry = (name, key)
        for x in self.result_domain(fn):
            ok = contract_holds(fn, list(args), x, sh)
            if ok is False:
                continue
            sh.tables[entry] = x
            self.step(k)
        sh.tables.pop(entry, None)

    def result_domain(self, fn) -> list:
        sort = fn.result.sort
        if sort == L.BOOL:
            return [False, True]
        if sort == L.CHAR:
            return list(self.bounds.alphabet)
        lo, hi = self.bounds.int_lo, self.bounds.int_hi
        if fn.result_lo is not None:
            lo = max(lo, fn.result_lo)
        if fn.result_hi is not None:
            hi = min(hi, fn.result_hi)
        return int_order(lo, hi)

    def snapshot(self) -> dict:
        """Complete model: unassigned scalars take their first domain value,
        arrays become concrete (unread cells take the default)."""
        env, sh = self.env, self.sh
        for s in self.order:
            i = self.compiler.slots[s.var]
            if env.vals[i] is UNK:
                dom = self.domain(s)
                env.vals[i] = dom[0] if dom else 0
        sh.strict = True
        try:
            self.verify()
            model: dict = {}
            for s in self.order:
                model[s.var] = env.vals[self.compiler.slots[s.var]]
            for s in self.symbols:
                if s.var.sort in L.ARRAY_SORTS and s.definition is None and s.bounds:
                    arr = self.compiler.compile(s.var)(env)
                    if arr is not UNK:
                        model[s.var] = ConcreteArr(arr.first, arr.last, arr.cells(sh))
            model["__tables__"] = dict(sh.tables)
            return model
        finally:
            sh.strict = False

    def verify(self):
        env = self.env
        for h in self.hyps:
            if h(env) is not True:
                raise AssertionError("model does not satisfy a hypothesis")
        if self.goal(env) is not False:
            raise AssertionError("model does not falsify the goal")


def _solve(symbols, hyps, goal, functions, bounds: DomainBounds):
    s = Search(symbols, hyps, goal, functions, bounds)
    try:
        model = s.run()
    except _Budget:
        return ResourceOut("budget exhausted", s.nodes), s
    except EvalLimit as e:
        return ResourceOut(str(e), s.nodes), s
    except RecursionError:
        return ResourceOut("recursion too deep", s.nodes), s
    if model is None:
        return Proved(s.nodes), s
    return Counterexample(model, s.nodes), s


def check_validity(vc: VerificationCondition, bounds: Optional[DomainBounds] = None) -> SolveResult:
    """Proved, the first counterexample in enumeration order, or ResourceOut."""
    bounds = bounds or DomainBounds()
    result, _ = _solve(vc.symbols, vc.hypotheses, vc.goal, vc.functions, bounds)
    return result


def check_consistency(symbols: list[SymbolInfo], hyps: list[Hypothesis], functions: dict,
                      bounds: Optional[DomainBounds] = None):
    """Satisfiable(model) or NoModelWithinBounds; ResourceOut when undecided."""
    bounds = bounds or DomainBounds()
    result, _ = _solve(symbols, hyps, L.FALSE, functions, bounds)
    if isinstance(result, Counterexample):
        return Satisfiable(result.model)
    if isinstance(result, Proved):
        return NoModelWithinBounds()
    return result


def evaluate_in_model(vc: VerificationCondition, term: L.Term, model: dict,
                      bounds: Optional[DomainBounds] = None) -> Any:
    """Value of ``term`` (over the VC's symbols) under a complete model."""
    bounds = bounds or DomainBounds()
    s = Search(vc.symbols, [], L.TRUE, vc.functions, bounds)
    for v, x in model.items():
        if isinstance(v, L.Var) and v in s.compiler.slots and v.sort not in L.ARRAY_SORTS:
            s.env.vals[s.compiler.slots[v]] = x
    sh = s.sh
    sh.tables.update(model.get("__tables__", {}))
    for v, x in model.items():
        if isinstance(v, L.Var) and v.sort in L.ARRAY_SORTS and isinstance(x, ConcreteArr):
            for i, c in enumerate(x.data):
                sh.cells[(v.uid, x.first + i)] = c
    sh.strict = True
    f = s.compiler.compile(term)
    if s.compiler.size > len(s.env.vals):
        s.env.vals.extend([UNK] * (s.compiler.size - len(s.env.vals)))
    try:
        value = f(s.env)
        if isinstance(value, Arr) and not isinstance(value, ConcreteArr):
            data = value.cells(sh)
            value = UNK if data is UNK else ConcreteArr(value.first, value.last, data)
        return value
    except (EvalLimit, RecursionError):
        return UNK
