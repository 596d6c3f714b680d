"""SMT-LIB2 export of verification conditions and an external-solver bridge.

Integers are mathematical; characters are their code points; arrays are
SMT arrays from Int, with their bounds carried as separate integer terms.
Array arguments of source functions are passed as (array, first, last).
"""
from __future__ import annotations

import os
import shlex
import subprocess
from typing import Optional

from ..vcgen import logic as L
from ..vcgen.evaluate import LogicFunction
from ..vcgen.generate import VerificationCondition
from .search import Counterexample, Proved, ResourceOut, SolveResult

ENV_SOLVER = "MINIPROVE_SMT_SOLVER"

_PRELUDE = """\
(set-logic ALL)
(set-option :produce-models true)
(define-fun ada_div ((a Int) (b Int)) Int
  (ite (= b 0) 0 (ite (>= (* a b) 0) (div (abs a) (abs b)) (- (div (abs a) (abs b))))))
"""

_WRAPPER = """\
(declare-datatypes ((character__init_wrapper 0))
  (((character__init_wrapper_mk (rec__value Int) (__attr__init Bool)))))
(declare-fun of_wrapper ((Array Int character__init_wrapper)) (Array Int Int))
(assert (forall ((a (Array Int character__init_wrapper)) (i Int))
  (= (select (of_wrapper a) i) (rec__value (select a i)))))
"""


def quote(name: str) -> str:
    simple = all(c.isalnum() or c in "_.-" for c in name) and not name[0].isdigit()
    return name if simple else "|" + name.replace("|", "_") + "|"


def smt_sort(sort: str) -> str:
    return {L.INT: "Int", L.BOOL: "Bool", L.CHAR: "Int", L.WRAPPER: "character__init_wrapper",
            L.STRING: "(Array Int Int)", L.WSTRING: "(Array Int character__init_wrapper)"}[sort]


class Exporter:
    def __init__(self, names: dict[L.Var, str], bounds: dict[L.Term, tuple[L.Term, L.Term]]):
        self.names = names
        self.bounds = dict(bounds)

    def name(self, v: L.Var) -> str:
        return quote(self.names.get(v, v.base))

    def bounds_of(self, t: L.Term) -> tuple[L.Term, L.Term]:
        if t in self.bounds:
            return self.bounds[t]
        if isinstance(t, L.App):
            if t.op == "slice":
                return t.args[1], t.args[2]
            if t.op in ("set2", "of_wrapper"):
                return self.bounds_of(t.args[0])
            if t.op == "const_array":
                return t.args[0], t.args[1]
            if t.op == "str":
                return L.const_int(1), L.const_int(len(t.args[0].value))
            if t.op == "ite":
                return self.bounds_of(t.args[1])
        raise ValueError(f"array term without known bounds: {L.show(t)}")

    def length(self, f: L.Term, l: L.Term) -> str:
        a, b = self.term(f), self.term(l)
        return f"(ite (<= {a} {b}) (+ (- {b} {a}) 1) 0)"

    def term(self, t: L.Term) -> str:
        if isinstance(t, L.Var):
            return self.name(t)
        if isinstance(t, L.Const):
            if t.sort == L.BOOL:
                return "true" if t.value else "false"
            if t.sort == L.CHAR:
                return str(ord(t.value))
            if t.sort == L.INT:
                return str(t.value) if t.value >= 0 else f"(- {-t.value})"
            if t.sort == L.WRAPPER:
                c, b = t.value
                return f"(character__init_wrapper_mk {ord(c)} {'true' if b else 'false'})"
            raise ValueError(f"constant of sort {t.sort}")
        if isinstance(t, L.Quant):
            k = self.name(t.var)
            rng = f"(and (<= {self.term(t.lo)} {k}) (<= {k} {self.term(t.hi)}))"
            if t.universal:
                return f"(forall (({k} Int)) (=> {rng} {self.term(t.body)}))"
            return f"(exists (({k} Int)) (and {rng} {self.term(t.body)}))"
        op, args = t.op, t.args
        a = [self.term(x) for x in args] if op != "str" else []
        simple = {"+": "+", "-": "-", "*": "*", "<": "<", "<=": "<=", ">": ">", ">=": ">=",
                  "=": "=", "and": "and", "or": "or", "->": "=>", "not": "not", "ite": "ite",
                  "<>": "distinct", "/": "ada_div", "neg": "-", "get2": "select",
                  "set2": "store", "rec__value": "rec__value", "__attr__init": "__attr__init",
                  "of_wrapper": "of_wrapper"}
        if op in simple:
            return f"({simple[op]} {' '.join(a)})"
        if op == "to_wrapper":
            return f"(character__init_wrapper_mk {a[0]} true)"
        if op == "mk":
            return f"(character__init_wrapper_mk {a[0]} {a[1]})"
        if op == "slice":
            return a[0]
        if op == "const_array":
            return f"((as const {smt_sort(args[2].sort == L.WRAPPER and L.WSTRING or L.STRING)}) {a[2]})"
        if op == "str":
            out = "((as const (Array Int Int)) 0)"
            for i, c in enumerate(args[0].value):
                out = f"(store {out} {i + 1} {ord(c)})"
            return out
        if op in ("first", "last"):
            f, l = self.bounds_of(args[0])
            return self.term(f if op == "first" else l)
        if op == "length":
            return self.length(args[0], args[1])
        if op == "streq":
            x, y = args
            fx, lx = self.bounds_of(x)
            fy, ly = self.bounds_of(y)
            n = self.length(fx, lx)
            return (f"(and (= {n} {self.length(fy, ly)}) (forall ((k__ Int)) (=> (and (<= 0 k__) "
                    f"(< k__ {n})) (= (select {a[0]} (+ {self.term(fx)} k__)) "
                    f"(select {a[1]} (+ {self.term(fy)} k__))))))")
        if op.startswith("call:"):
            parts = []
            for x, s in zip(args, a):
                parts.append(s)
                if x.sort in L.ARRAY_SORTS:
                    f, l = self.bounds_of(x)
                    parts += [self.term(f), self.term(l)]
            return f"({quote(op[5:])} {' '.join(parts)})" if parts else quote(op[5:])
        raise ValueError(f"cannot export operator {op!r}")


def _function_decls(fns: dict[str, LogicFunction], used: set[str]) -> list[str]:
    out = []
    for name in sorted(used):
        fn = fns[name]
        names = {}
        params, bounds = [], {}
        for p in fn.params:
            names[p] = p.base
            params.append(f"({quote(p.base)} {smt_sort(p.sort)})")
            if p in fn.array_bounds:
                fb, lb = fn.array_bounds[p]
                names[fb], names[lb] = fb.base, lb.base
                params += [f"({quote(fb.base)} Int)", f"({quote(lb.base)} Int)"]
                bounds[p] = (fb, lb)
        names[fn.result] = fn.result.base
        ex = Exporter(names, bounds)
        res = smt_sort(fn.result.sort)
        if fn.body is not None:
            out.append(f"(define-fun-rec {quote(name)} ({' '.join(params)}) {res}\n  "
                       f"{ex.term(fn.body)})")
        else:
            sig = " ".join(p.split(" ", 1)[1][:-1] for p in params)
            out.append(f"(declare-fun {quote(name)} ({sig}) {res})")
            if fn.contract != L.TRUE:
                call = f"({quote(name)} {' '.join(p.split(' ', 1)[0][1:] for p in params)})" \
                    if params else quote(name)
                body = ex.term(fn.contract).replace(quote(fn.result.base), call)
                out.append(f"(assert (forall ({' '.join(params)}) {body}))" if params
                           else f"(assert {body})")
    return out


def export_smtlib(vc: VerificationCondition) -> str:
    """SMT-LIB2 script that is unsat exactly when the VC is valid."""
    names = vc.display_names()
    bounds = {s.var: s.bounds for s in vc.symbols if s.bounds}
    ex = Exporter(names, bounds)
    lines = [f"; {vc.obligation.id}: {vc.obligation.message}", _PRELUDE.rstrip("\n")]
    if any(s.var.sort in (L.WSTRING, L.WRAPPER) for s in vc.symbols) or vc.relaxed:
        lines.append(_WRAPPER.rstrip("\n"))
    used: set[str] = set()
    for term in [vc.goal] + [h.formula for h in vc.hypotheses] + \
            [s.definition for s in vc.symbols if s.definition is not None]:
        used |= set(L.calls_in(term))
    closure = set()
    while used - closure:
        n = (used - closure).pop()
        closure.add(n)
        fn = vc.functions.get(n)
        if fn is not None:
            for t in (fn.body, fn.contract):
                if t is not None:
                    used |= set(L.calls_in(t))
    lines += _function_decls(vc.functions, {n for n in closure if n in vc.functions})
    for s in vc.symbols:
        lines.append(f"(declare-const {ex.name(s.var)} {smt_sort(s.var.sort)})")
        if s.var.sort == L.INT and s.lo is not None:
            lines.append(f"(assert (<= {ex.term(L.const_int(s.lo))} {ex.name(s.var)} "
                         f"{ex.term(L.const_int(s.hi))}))")
        if s.role == "bound" and s.var.base.endswith("'First"):
            lines.append(f"(assert (<= 1 {ex.name(s.var)}))")
        if s.dyn is not None:
            lines.append(f"(assert (<= {ex.term(s.dyn[0])} {ex.name(s.var)} {ex.term(s.dyn[1])}))")
    for name, h in vc.numbered():
        lines.append(f"(assert (! {ex.term(h.formula)} :named {name}))")
    lines.append(f"(assert (not {ex.term(vc.goal)}))")
    lines += ["(check-sat)", "(get-model)"]
    return "\n".join(lines) + "\n"


def run_external(script: str, command: Optional[str] = None, timeout: float = 30.0) -> SolveResult:
    """Run the solver named by ``MINIPROVE_SMT_SOLVER`` on a script."""
    command = command or os.environ.get(ENV_SOLVER)
    if not command:
        return ResourceOut(f"{ENV_SOLVER} is not set")
    try:
        proc = subprocess.run(shlex.split(command), input=script, capture_output=True,
                              text=True, timeout=timeout)
    except (OSError, subprocess.TimeoutExpired) as e:
        return ResourceOut(f"external solver failed: {e}")
    first = proc.stdout.strip().splitlines()[0] if proc.stdout.strip() else ""
    if first == "unsat":
        return Proved()
    if first == "sat":
        return Counterexample({"__smt_model__": proc.stdout.split("\n", 1)[1]})
    return ResourceOut(first or "no answer from external solver")
