"""Verification-condition generation by forward symbolic execution.

Each subprogram is executed symbolically.  Every program variable is mapped
to a logic term; assignments introduce a fresh version of the variable
together with a defining hypothesis, so the hypothesis list of a path reads
as the chronological story of that path.  Conditionals split the path.

Loops are handled in one of three ways (see :func:`decide_loop`):

* small static loops are unrolled;
* loops with invariants are cut at the invariant: one path checks the
  invariant in the first iteration, one path starts from an arbitrary
  iteration in which the invariant holds (all written variables havocked),
  checks the rest of the body, and either checks the invariant again for the
  next iteration or leaves the loop;
* other loops are cut the same way without any invariant.

At every check site the current path yields one verification condition whose
goal is the check formula; afterwards the formula is assumed.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

from .. import sema as S
from ..syntax import ast as A
from . import logic as L
from .checks import CheckKind, CheckObligation
from .evaluate import LogicFunction

INT_MIN, INT_MAX = S.INT_MIN, S.INT_MAX
DEFAULT_UNROLL = 16


# ---------------------------------------------------------------- loops

@dataclass(frozen=True)
class LoopDecision:
    kind: str  # unroll | use_invariant | cannot_unroll
    count: int = 0
    reason: Optional[str] = None

    def __str__(self) -> str:
        if self.kind == "unroll":
            return f"Unroll({self.count})"
        if self.kind == "use_invariant":
            return "UseInvariant"
        return f"CannotUnroll({self.reason!r})"


def decide_loop(loop: S.LoopShape, threshold: int = DEFAULT_UNROLL) -> LoopDecision:
    if loop.invariants:
        return LoopDecision("use_invariant")
    n = S.iteration_count(loop)
    if n != "dynamic" and n <= threshold:
        return LoopDecision("unroll", n)
    return LoopDecision("cannot_unroll", reason="too many loop iterations")


# ---------------------------------------------------------- VC structures

@dataclass
class SymbolInfo:
    """Declaration of one logic symbol of a VC.

    role: bound (array bound), input (initial value), havoc (value after a
    loop cut), loopvar (loop index after a cut), defined (SSA definition),
    fresh (introduced by splitting).
    """

    var: L.Var
    role: str
    lo: Optional[int] = None
    hi: Optional[int] = None
    dyn: Optional[tuple[L.Term, L.Term]] = None
    definition: Optional[L.Term] = None
    bounds: Optional[tuple[L.Term, L.Term]] = None
    source: Optional[str] = None  # source variable this symbol is a version of


@dataclass
class Hypothesis:
    formula: L.Term
    span: Optional[A.SourceSpan]
    origin: str  # pre | def | check | branch | loop | invariant | intro
    defines: Optional[L.Var] = None


@dataclass
class TracePoint:
    span: A.SourceSpan
    values: dict[str, L.Term]


@dataclass
class VerificationCondition:
    obligation: CheckObligation
    symbols: list[SymbolInfo]
    hypotheses: list[Hypothesis]
    goal: L.Term
    cut_crossed: bool
    functions: dict[str, LogicFunction]
    relaxed: bool = False
    trace: list[TracePoint] = field(default_factory=list)
    path: str = ""
    entry: dict[str, L.Term] = field(default_factory=dict)
    leaf_src: Optional[A.Expr] = None
    label: str = "def'vc"
    # left operand of an enclosing plain "and" in a precondition, for checks
    # inside its right operand: (term, span of the operator)
    and_left: Optional[tuple[L.Term, A.SourceSpan]] = None

    @property
    def definitions(self) -> dict[L.Var, L.Term]:
        return {s.var: s.definition for s in self.symbols if s.definition is not None}

    def array_bounds(self) -> dict[L.Var, tuple[L.Term, L.Term]]:
        return {s.var: s.bounds for s in self.symbols
                if s.var.sort in L.ARRAY_SORTS and s.bounds is not None}

    def info(self, v: L.Var) -> Optional[SymbolInfo]:
        for s in self.symbols:
            if s.var == v:
                return s
        return None

    def display_names(self) -> dict[L.Var, str]:
        """Newest version keeps the source name; older ones get 1, 2, ..."""
        groups: dict[str, list[L.Var]] = {}
        for s in self.symbols:
            groups.setdefault(s.var.base, []).append(s.var)
        names: dict[L.Var, str] = {}
        for base, vs in groups.items():
            for age, v in enumerate(reversed(vs)):
                names[v] = base if age == 0 else f"{base}{age}"
        return names

    def numbered(self) -> list[tuple[str, Hypothesis]]:
        """Hypotheses with display names.

        Hypotheses from the path are H1.. with H1 nearest the goal; those
        introduced by splitting the goal are h1, h2, ... in order.
        """
        path = [h for h in self.hypotheses if h.origin != "intro"]
        intro = [h for h in self.hypotheses if h.origin == "intro"]
        n = len(path)
        return [(f"H{n - i}", h) for i, h in enumerate(path)] + \
            [(f"h{i + 1}", h) for i, h in enumerate(intro)]

    def render(self) -> list[str]:
        names = self.display_names()
        out = [f"{name} : {L.show(h.formula, names)}" for name, h in self.numbered()]
        out.append(f"goal {self.label} : {L.show(self.goal, names)}")
        return out


@dataclass
class BranchContext:
    """A program point whose reachability --proof-warnings examines."""

    span: A.SourceSpan
    subprogram: str
    what: str  # body | branch
    symbols: list[SymbolInfo]
    hypotheses: list[Hypothesis]
    functions: dict[str, LogicFunction]


@dataclass
class SubprogramVCs:
    subprogram: A.Subprogram
    obligations: list[CheckObligation]
    vcs: dict[str, list[VerificationCondition]]
    contexts: list[BranchContext]
    decisions: dict[int, LoopDecision]


# ------------------------------------------------------------------ state

@dataclass
class State:
    env: dict[int, L.Term]
    symbols: list[SymbolInfo]
    hyps: list[Hypothesis]
    trace: list[TracePoint]
    cut: bool = False
    done: bool = False
    path: str = ""

    def fork(self) -> "State":
        return State(dict(self.env), list(self.symbols), list(self.hyps), list(self.trace),
                     self.cut, self.done, self.path)


Ctx = tuple  # items: ("guard", term) | ("quant", var, lo, hi)


class Analysis:
    """Shared per-unit information needed to generate VCs."""

    def __init__(self, unit: A.CompilationUnit, table: S.SymbolTable,
                 classes: dict[str, S.FunctionClass], unroll_limit: int = DEFAULT_UNROLL):
        self.unit = unit
        self.table = table
        self.classes = classes
        self.unroll_limit = unroll_limit
        self.decisions = {lid: decide_loop(shape, unroll_limit)
                          for lid, shape in table.loops.items()}
        self.functions: dict[str, LogicFunction] = {}
        for sp in unit.subprograms():
            if sp.kind == "function":
                self.functions[sp.name] = self.logic_function(sp)

    def logic_function(self, sp: A.Subprogram) -> LogicFunction:
        gen = Generator(self, sp, pure=True)
        params, bounds = [], {}
        for p in sp.params:
            v = p.decl
            var = L.Var(v.name, _sort(v))
            params.append(var)
            gen.env0[v.uid] = var
            if v.is_array:
                fb, lb = L.Var(f"{v.name}'First", L.INT), L.Var(f"{v.name}'Last", L.INT)
                bounds[var] = (fb, lb)
                gen.bounds[var] = (fb, lb)
        rt = _result_type(gen, sp)
        result = L.Var(f"{sp.name}'Result", _sort_of_type(rt))
        st = gen.initial_state()
        cls = self.classes[sp.name]
        body = None
        if cls.body_available_for_proof and sp.expr is not None:
            body = gen.expr(sp.expr, st, ())
        contract = L.TRUE
        if sp.aspects.post is not None:
            gen.result_term = result
            post = gen.expr(sp.aspects.post, st, ())
            pre = gen.expr(sp.aspects.pre, st, ()) if sp.aspects.pre is not None else L.TRUE
            contract = L.implies(pre, post)
        lo = hi = None
        if rt.kind == "int":
            lo, hi = rt.lo, rt.hi
            if rt.constrained:
                contract = L.and_(contract, L.in_range(result, L.const_int(lo), L.const_int(hi)))
        return LogicFunction(sp.name, params, result, body, contract, lo, hi, bounds)


def _result_type(gen: "Generator", sp: A.Subprogram) -> S.Type:
    return gen.analysis.table.type_named(sp.result.name)


def _sort_of_type(t: S.Type, relaxed: bool = False) -> str:
    if t.kind == "string":
        return L.WSTRING if relaxed else L.STRING
    return {"int": L.INT, "bool": L.BOOL, "char": L.CHAR}[t.kind]


def _sort(v: S.Variable) -> str:
    return _sort_of_type(v.type, v.relaxed)


# -------------------------------------------------------------- generator

class Generator:
    def __init__(self, analysis: Analysis, sp: A.Subprogram, pure: bool = False):
        self.analysis = analysis
        self.sp = sp
        self.pure = pure
        self.env0: dict[int, L.Term] = {}
        self.bounds: dict[L.Term, tuple[L.Term, L.Term]] = {}
        self.result_term: Optional[L.Term] = None
        self.obligations: dict[tuple, CheckObligation] = {}
        self.ordinals: dict[tuple, int] = {}
        self.vcs: dict[str, list[VerificationCondition]] = {}
        self.contexts: list[BranchContext] = []
        self.relaxed = any(v.relaxed for v in analysis.table.variables.get(sp.name.lower(), []))
        self.in_pre = False
        self.and_left: list[tuple[L.Term, A.SourceSpan]] = []

    # ------------------------------------------------------------ helpers

    def initial_state(self) -> State:
        return State(dict(self.env0), [], [], [])

    def fresh(self, st: State, base: str, sort: str, role: str, source: Optional[str] = None,
              **kw) -> L.Var:
        v = L.Var(base, sort)
        st.symbols.append(SymbolInfo(v, role, source=source, **kw))
        return v

    def define(self, st: State, base: str, term: L.Term, span: Optional[A.SourceSpan],
               source: Optional[str] = None, bounds=None) -> L.Var:
        v = self.fresh(st, base, term.sort, "defined", source=source, definition=term,
                       bounds=bounds)
        if bounds is not None:
            self.bounds[v] = bounds
        st.hyps.append(Hypothesis(L.eq(v, term), span, "def", defines=v))
        return v

    def assume(self, st: State, formula: L.Term, span, origin: str):
        if formula != L.TRUE:
            st.hyps.append(Hypothesis(formula, span, origin))

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
        return L.first(t), L.last(t)

    def site(self, kind: CheckKind, span: A.SourceSpan, node, variable=None,
             extra=None) -> CheckObligation:
        key = (id(node), kind, extra)
        ob = self.obligations.get(key)
        if ob is None:
            loc = (span.file, span.line, span.column, kind)
            n = self.ordinals.get(loc, 0) + 1
            self.ordinals[loc] = n
            ob = CheckObligation(kind, span, self.sp.name, n, expr=node, variable=variable)
            self.obligations[key] = ob
            self.vcs[ob.id] = []
        return ob

    def check(self, st: State, ctx: Ctx, kind: CheckKind, span: A.SourceSpan, node,
              goal: L.Term, variable: Optional[str] = None, extra=None):
        if self.pure:
            return
        ob = self.site(kind, span, node, variable, extra)
        wrapped = wrap(ctx, goal)
        vc = VerificationCondition(
            ob, list(st.symbols), list(st.hyps), wrapped,
            st.cut or _has_opaque(self.analysis, st.hyps, wrapped),
            self.analysis.functions, self.relaxed, list(st.trace), st.path,
            entry=self.entry_terms())
        if self.and_left and kind.reason is not None:
            vc.and_left = self.and_left[-1]
        self.vcs[ob.id].append(vc)
        # A check made under a quantifier would be carried forward as another
        # quantified formula that the range hypotheses already imply.
        if not any(item[0] == "quant" for item in ctx):
            self.assume(st, wrapped, span, "check")

    def entry_terms(self) -> dict[str, L.Term]:
        out = {}
        for p in self.sp.params:
            v = p.decl
            t = self.env0.get(v.uid)
            if t is None:
                continue
            out[v.name] = t
            if v.is_array:
                fb, lb = self.bounds[t]
                out[f"{v.name}'First"] = fb
                out[f"{v.name}'Last"] = lb
        return out

    def mark(self, st: State, span: A.SourceSpan):
        if self.pure:
            return
        vals = {}
        for v in self.analysis.table.variables.get(self.sp.name.lower(), []):
            t = st.env.get(v.uid)
            if t is None or v.mode == "quant":
                continue
            if v.mode == "out" and not v.is_array and t is self.env0.get(v.uid):
                continue  # not assigned yet, its value means nothing
            vals[v.name] = t
        st.trace.append(TracePoint(span, vals))

    def context(self, st: State, span: A.SourceSpan, what: str):
        if not self.pure:
            self.contexts.append(BranchContext(span, self.sp.name, what, list(st.symbols),
                                               list(st.hyps), self.analysis.functions))

    # ------------------------------------------------------- expressions

    def expr(self, e: A.Expr, st: State, ctx: Ctx) -> L.Term:
        t = self._expr(e, st, ctx)
        if getattr(t, "src", None) is None and not isinstance(t, L.Var):
            t = L.with_src(t, e)
        return t

    def value(self, e: A.Expr, st: State, ctx: Ctx) -> L.Term:
        """Expression as a plain value: relaxed arrays are unwrapped after an
        initialization check of every component."""
        t = self.expr(e, st, ctx)
        if t.sort == L.WSTRING:
            fb, lb = self.bounds_of(t)
            k = L.Var("K", L.INT)
            init = L.forall(k, fb, lb, L.eq(L.app("__attr__init", L.get(t, k), sort=L.BOOL), L.TRUE))
            self.check(st, ctx, CheckKind.INIT_CHECK, e.span, e, init,
                       variable=_root_name(e), extra="whole")
            u = L.app("of_wrapper", t, sort=L.STRING, src=e)
            self.bounds[u] = (fb, lb)
            return u
        return t

    def _expr(self, e: A.Expr, st: State, ctx: Ctx) -> L.Term:
        if isinstance(e, A.IntLit):
            return L.Const(e.value, L.INT, e)
        if isinstance(e, A.CharLit):
            return L.Const(e.value, L.CHAR, e)
        if isinstance(e, A.BoolLit):
            return L.Const(e.value, L.BOOL, e)
        if isinstance(e, A.StrLit):
            return L.app("str", L.Const(e.value, "text"), sort=L.STRING, src=e)
        if isinstance(e, A.Paren):
            return self.expr(e.inner, st, ctx)
        if isinstance(e, A.Name):
            return st.env[e.decl.uid]
        if isinstance(e, A.Attribute):
            return self.attribute(e, st, ctx)
        if isinstance(e, A.Unary):
            a = self.expr(e.operand, st, ctx)
            if e.op == "not":
                return L.App("not", (a,), L.BOOL, e)
            if e.op == "+":
                return a
            r = L.App("neg", (a,), L.INT, e)
            self.check(st, ctx, CheckKind.OVERFLOW, e.span, e,
                       L.in_range(r, L.const_int(INT_MIN), L.const_int(INT_MAX)))
            return r
        if isinstance(e, A.Binary):
            return self.binary(e, st, ctx)
        if isinstance(e, A.IfExpr):
            c = self.expr(e.cond, st, ctx)
            a = self.expr(e.then, st, ctx + (("guard", c),))
            if e.orelse is None:
                return L.App("->", (c, a), L.BOOL, e)
            b = self.expr(e.orelse, st, ctx + (("guard", L.not_(c)),))
            return L.App("ite", (c, a, b), a.sort, e)
        if isinstance(e, A.Quantified):
            lo, hi = self.range_terms(e.range, st, ctx)
            k = L.Var(e.var, L.INT)
            st.env[e.decl.uid] = k
            body = self.expr(e.body, st, ctx + (("quant", k, lo, hi),))
            del st.env[e.decl.uid]
            return L.Quant(e.universal, k, lo, hi, body, e)
        if isinstance(e, A.Membership):
            v = self.expr(e.value, st, ctx)
            lo, hi = self.range_terms(e.range, st, ctx)
            t = L.and_(L.le(lo, v), L.le(v, hi))
            return L.not_(t, src=e) if e.negated else L.with_src(t, e)
        if isinstance(e, A.Call):
            return self.call(e, st, ctx)
        if isinstance(e, A.Index):
            return self.index(e, st, ctx)
        if isinstance(e, A.Slice):
            arr = self.expr(e.prefix, st, ctx)
            lo = self.expr(e.low, st, ctx)
            hi = self.expr(e.high, st, ctx)
            fb, lb = self.bounds_of(arr)
            self.check(st, ctx, CheckKind.RANGE, e.span, e,
                       L.implies(L.le(lo, hi), L.and_(L.le(fb, lo), L.le(hi, lb))))
            t = L.App("slice", (arr, lo, hi), arr.sort, e)
            self.bounds[t] = (lo, hi)
            return t
        raise TypeError(f"unexpected {type(e).__name__}")

    def range_terms(self, r: A.Range, st: State, ctx: Ctx) -> tuple[L.Term, L.Term]:
        if r.of is not None:
            return self.bounds_of(self.expr(r.of, st, ctx))
        return self.expr(r.low, st, ctx), self.expr(r.high, st, ctx)

    def attribute(self, e: A.Attribute, st: State, ctx: Ctx) -> L.Term:
        if e.attr == "Result":
            return self.result_term
        if e.attr == "Initialized":
            p = A.strip_parens(e.prefix)
            if isinstance(p, A.Index):
                arr = self.expr(p.prefix, st, ctx)
                i = self.expr(p.index, st, ctx)
                self.index_check(st, ctx, arr, i, p)
                if arr.sort != L.WSTRING:
                    return L.TRUE
                return L.eq(L.app("__attr__init", L.get(arr, i), sort=L.BOOL), L.TRUE, src=e)
            arr = self.expr(p, st, ctx)
            if arr.sort != L.WSTRING:
                return L.TRUE
            fb, lb = self.bounds_of(arr)
            k = L.Var("K", L.INT)
            return L.forall(k, fb, lb, L.eq(L.app("__attr__init", L.get(arr, k), sort=L.BOOL),
                                            L.TRUE), src=e)
        arr = self.expr(e.prefix, st, ctx)
        fb, lb = self.bounds_of(arr)
        if e.attr == "First":
            return fb
        if e.attr == "Last":
            return lb
        return L.App("length", (fb, lb), L.INT, e)

    def binary(self, e: A.Binary, st: State, ctx: Ctx) -> L.Term:
        op = e.op
        if op in ("and then", "or else"):
            a = self.expr(e.left, st, ctx)
            guard = a if op == "and then" else L.not_(a)
            b = self.expr(e.right, st, ctx + (("guard", guard),))
            return L.App("and" if op == "and then" else "or", (a, b), L.BOOL, e)
        if op in ("=", "/=") and e.left.ty.kind == "string":
            a = self.value(e.left, st, ctx)
            b = self.value(e.right, st, ctx)
            t = L.App("streq", (a, b), L.BOOL, e)
            return t if op == "=" else L.App("not", (t,), L.BOOL, e)
        a = self.expr(e.left, st, ctx)
        if op == "and" and self.in_pre:
            self.and_left.append((a, e.op_span))
            try:
                b = self.expr(e.right, st, ctx)
            finally:
                self.and_left.pop()
        else:
            b = self.expr(e.right, st, ctx)
        if op in ("and", "or"):
            return L.App(op, (a, b), L.BOOL, e)
        if op == "=":
            return L.App("=", (a, b), L.BOOL, e)
        if op == "/=":
            return L.App("<>", (a, b), L.BOOL, e)
        if op in ("<", "<=", ">", ">="):
            return L.App(op, (a, b), L.BOOL, e)
        if op == "/":
            self.check(st, ctx, CheckKind.DIVISION, e.op_span, e, L.App("<>", (b, L.const_int(0)), L.BOOL))
        r = L.App(op, (a, b), L.INT, e)
        self.check(st, ctx, CheckKind.OVERFLOW, e.op_span, e,
                   L.in_range(r, L.const_int(INT_MIN), L.const_int(INT_MAX)))
        return r

    def index_check(self, st: State, ctx: Ctx, arr: L.Term, i: L.Term, e: A.Index):
        fb, lb = self.bounds_of(arr)
        self.check(st, ctx, CheckKind.ARRAY_INDEX, e.index.span, e,
                   L.and_(L.le(fb, i), L.le(i, lb)))

    def index(self, e: A.Index, st: State, ctx: Ctx) -> L.Term:
        arr = self.expr(e.prefix, st, ctx)
        i = self.expr(e.index, st, ctx)
        self.index_check(st, ctx, arr, i, e)
        cell = L.get(arr, i)
        if arr.sort == L.WSTRING:
            self.check(st, ctx, CheckKind.INIT_CHECK, e.span, e,
                       L.eq(L.app("__attr__init", cell, sort=L.BOOL), L.TRUE),
                       variable=_root_name(e.prefix))
            return L.App("rec__value", (cell,), L.CHAR, e)
        return L.with_src(cell, e)

    def call(self, e: A.Call, st: State, ctx: Ctx) -> L.Term:
        callee: A.Subprogram = e.decl
        args = [self.value(a, st, ctx) for a in e.args]
        for a, p, t in zip(e.args, callee.params, args):
            pt = p.decl.type
            if pt.kind == "int" and pt.constrained:
                self.check(st, ctx, CheckKind.RANGE, a.span, a,
                           L.in_range(t, L.const_int(pt.lo), L.const_int(pt.hi)))
        if callee.aspects.pre is not None:
            pre = self.instantiate(callee, callee.aspects.pre, args)
            self.check(st, ctx, CheckKind.PRECONDITION, e.span, e, pre)
        if callee.aspects.variant is not None and self._recursive_call(callee):
            here = self.instantiate(callee, callee.aspects.variant,
                                    [self.env0[p.decl.uid] for p in callee.params])
            there = self.instantiate(callee, callee.aspects.variant, args)
            self.check(st, ctx, CheckKind.VARIANT_DECREASE, e.span, e,
                       L.and_(L.le(L.const_int(0), there), L.lt(there, here)))
        rt = self.analysis.table.type_named(callee.result.name)
        return L.App(f"call:{callee.name}", tuple(args), _sort_of_type(rt), e)

    def _recursive_call(self, callee: A.Subprogram) -> bool:
        if self.sp.name != callee.name:
            # mutual recursion: any call inside the same component
            return False
        return True

    def instantiate(self, callee: A.Subprogram, expr: A.Expr, args: list[L.Term]) -> L.Term:
        """Callee expression with parameters replaced by argument terms."""
        g = Generator(self.analysis, callee, pure=True)
        for p, a in zip(callee.params, args):
            g.env0[p.decl.uid] = a
            if p.decl.is_array:
                g.bounds[a] = self.bounds_of(a)
        return g.expr(expr, g.initial_state(), ())

    # -------------------------------------------------------- statements

    def run(self) -> SubprogramVCs:
        sp = self.sp
        st = self.initial_state()
        variables = self.analysis.table.variables.get(sp.name.lower(), [])
        for p in sp.params:
            v = p.decl
            self.declare_input(st, v)
        self.env0 = dict(st.env)
        for d in sp.locals:
            self.declare_local(st, d)
        if sp.aspects.pre is not None:
            self.in_pre = True
            pre = self.expr(sp.aspects.pre, st, ())
            self.in_pre = False
            self.assume(st, pre, sp.aspects.pre.span, "pre")
        self.context(st, sp.begin_span if sp.body is not None else sp.name_span, "body")
        if sp.kind == "function" and sp.expr is not None:
            self.mark(st, sp.expr.span)
            value = self.expr(sp.expr, st, ())
            self.finish_function(st, value, sp.expr)
        elif sp.body is not None:
            states = self.stmts(sp.body, [st])
            for s in states:
                if not s.done and sp.kind == "procedure":
                    self.postcondition(s)
        obligations = sorted(self.obligations.values(), key=lambda o: o.sort_key)
        del variables
        return SubprogramVCs(sp, obligations, self.vcs, self.contexts,
                             {lid: d for lid, d in self.analysis.decisions.items()
                              if self.analysis.table.loop_owner.get(lid) is sp})

    def declare_input(self, st: State, v: S.Variable):
        sort = _sort(v)
        if v.is_array:
            fb = self.fresh(st, f"{v.name}'First", L.INT, "bound", source=v.name)
            lb = self.fresh(st, f"{v.name}'Last", L.INT, "bound", source=v.name)
            var = self.fresh(st, v.name, sort, "input", source=v.name, bounds=(fb, lb))
            self.bounds[var] = (fb, lb)
        else:
            lo, hi = (v.type.lo, v.type.hi) if v.type.kind == "int" else (None, None)
            var = self.fresh(st, v.name, sort, "input", source=v.name, lo=lo, hi=hi)
        st.env[v.uid] = var

    def declare_local(self, st: State, d: A.ObjectDecl):
        v: S.Variable = d.decl
        sort = _sort(v)
        if v.is_array:
            lo = self.expr(v.constraint[0], st, ())
            hi = self.expr(v.constraint[1], st, ())
            fb = self.define(st, f"{v.name}'First", lo, d.span, source=v.name)
            lb = self.define(st, f"{v.name}'Last", hi, d.span, source=v.name)
            if d.init is not None:
                val = self.array_value(d.init, st, v, (fb, lb))
                var = self.define(st, v.name, val, d.span, source=v.name, bounds=(fb, lb))
            else:
                var = self.fresh(st, v.name, sort, "input", source=v.name, bounds=(fb, lb))
                self.bounds[var] = (fb, lb)
        elif d.init is not None:
            val = self.expr(d.init, st, ())
            self.range_check(st, v.type, val, d.init)
            var = self.define(st, v.name, val, d.span, source=v.name)
        else:
            lo, hi = (v.type.lo, v.type.hi) if v.type.kind == "int" else (None, None)
            var = self.fresh(st, v.name, sort, "input", source=v.name, lo=lo, hi=hi)
        st.env[v.uid] = var

    def array_value(self, e: A.Expr, st: State, v: S.Variable, bounds) -> L.Term:
        assert isinstance(e, A.Aggregate)
        c = self.expr(e.value, st, ())
        if v.relaxed:
            c = L.app("to_wrapper", c, sort=L.WRAPPER)
        t = L.App("const_array", (bounds[0], bounds[1], c), L.WSTRING if v.relaxed else L.STRING, e)
        self.bounds[t] = bounds
        return t

    def range_check(self, st: State, ty: S.Type, val: L.Term, e: A.Expr, ctx: Ctx = ()):
        if ty.kind == "int" and ty.constrained:
            self.check(st, ctx, CheckKind.RANGE, e.span, e,
                       L.in_range(val, L.const_int(ty.lo), L.const_int(ty.hi)))

    def stmts(self, stmts: list[A.Stmt], states: list[State]) -> list[State]:
        for s in stmts:
            nxt: list[State] = []
            for st in states:
                if st.done:
                    nxt.append(st)
                else:
                    nxt.extend(self.stmt(s, st))
            states = nxt
        return states

    def stmt(self, s: A.Stmt, st: State) -> list[State]:
        self.mark(st, s.span)
        if isinstance(s, A.Null):
            return [st]
        if isinstance(s, A.Assign):
            self.assign(s, st)
            return [st]
        if isinstance(s, A.Pragma):
            if s.name == "Assert":
                t = self.expr(s.expr, st, ())
                self.check(st, (), CheckKind.ASSERTION, s.expr.span, s, t)
            return [st]
        if isinstance(s, A.Return):
            if s.value is not None:
                value = self.expr(s.value, st, ())
                self.finish_function(st, value, s.value)
            else:
                self.postcondition(st)
            st.done = True
            return [st]
        if isinstance(s, A.If):
            return self.if_stmt(s, st)
        if isinstance(s, A.For):
            return self.loop(s, st)
        raise TypeError(type(s).__name__)

    def assign(self, s: A.Assign, st: State):
        target = s.target
        if isinstance(target, A.Index):
            base: S.Variable = target.prefix.decl
            old = st.env[base.uid]
            val = self.expr(s.value, st, ())
            o = self.define(st, "o", val, s.value.span)
            i = self.expr(target.index, st, ())
            self.index_check(st, (), old, i, target)
            cell = L.app("to_wrapper", o, sort=L.WRAPPER) if old.sort == L.WSTRING else o
            bounds = self.bounds_of(old)
            new = self.define(st, base.name, L.set_(old, i, cell), s.span, source=base.name,
                              bounds=bounds)
            st.env[base.uid] = new
            return
        v: S.Variable = target.decl
        if v.is_array:
            bounds = self.bounds_of(st.env[v.uid])
            val = self.array_value(s.value, st, v, bounds)
            new = self.define(st, v.name, val, s.span, source=v.name, bounds=bounds)
        else:
            val = self.expr(s.value, st, ())
            self.range_check(st, v.type, val, s.value)
            new = self.define(st, v.name, val, s.span, source=v.name)
        st.env[v.uid] = new

    def if_stmt(self, s: A.If, st: State) -> list[State]:
        out: list[State] = []
        rest = st
        for cond, body in s.branches:
            c = self.expr(cond, rest, ())
            taken = rest.fork()
            self.assume(taken, c, cond.span, "branch")
            self.context(taken, cond.span, "branch")
            out.extend(self.stmts(body, [taken]))
            self.assume(rest, L.not_(c), cond.span, "branch")
        if s.orelse is not None:
            self.context(rest, s.else_span, "branch")
            out.extend(self.stmts(s.orelse, [rest]))
        else:
            out.append(rest)
        return out

    def loop(self, s: A.For, st: State) -> list[State]:
        decision = self.analysis.decisions[s.ident]
        shape = self.analysis.table.loops[s.ident]
        lo, hi = self.range_terms(s.range, st, ())
        var = s.decl
        if decision.kind == "unroll":
            a, b = shape.static_bounds
            states = [st]
            for k in range(a, b + 1):
                for x in states:
                    if not x.done:
                        x.env[var.uid] = L.const_int(k)
                states = self.stmts(s.body, states)
            for x in states:
                x.env.pop(var.uid, None)
            return states

        empty = st.fork()
        self.assume(empty, L.lt(hi, lo), s.loop_span, "loop")
        self.assume(st, L.le(lo, hi), s.loop_span, "loop")

        marks = [i for i, b in enumerate(s.body)
                 if isinstance(b, A.Pragma) and b.name == "Loop_Invariant"]
        if marks:
            before, invs, after = s.body[:marks[0]], s.body[marks[0]:marks[-1] + 1], \
                s.body[marks[-1] + 1:]
        else:
            before, invs, after = s.body, [], []

        results = [empty]
        # The first iteration is peeled: its state is exact, so its checks
        # yield counterexamples that replay as real executions.
        first = st.fork()
        first.path = f"first iteration of loop at line {s.loop_span.line}"
        first.env[var.uid] = self.define(first, var.name, lo, s.loop_span, source=var.name)
        for x in self.stmts(before, [first]):
            if invs and not x.done:
                self.check_invariants(x, invs, CheckKind.LOOP_INVARIANT_INIT)

        cut = st.fork()
        cut.cut = True
        cut.path = f"arbitrary iteration of loop at line {s.loop_span.line}"
        for w in shape.write_set:
            if w.uid not in cut.env:
                continue
            old = cut.env[w.uid]
            bounds = self.bounds.get(old) if w.is_array else None
            lo_t, hi_t = (w.type.lo, w.type.hi) if w.type.kind == "int" else (None, None)
            new = self.fresh(cut, w.name, old.sort, "havoc", source=w.name, bounds=bounds,
                             lo=lo_t, hi=hi_t)
            if bounds is not None:
                self.bounds[new] = bounds
            cut.env[w.uid] = new
        j = self.fresh(cut, var.name, L.INT, "loopvar", source=var.name, dyn=(lo, hi))
        self.assume(cut, L.and_(L.le(lo, j), L.le(j, hi)), s.loop_span, "loop")
        cut.env[var.uid] = j
        if invs:
            for p in invs:
                inv = Generator.pure_expr(self, p.expr, cut)
                self.assume(cut, inv, p.expr.span, "invariant")
            states = self.stmts(after, [cut])
        else:
            states = self.stmts(before, [cut])
        for x in states:
            if x.done:
                results.append(x)
                continue
            more = x.fork()
            self.assume(more, L.lt(j, hi), s.loop_span, "loop")
            self.assume(x, L.eq(j, hi), s.loop_span, "loop")
            x.env.pop(var.uid, None)
            results.append(x)
            if invs:
                nxt = self.define(more, var.name, L.add(j, L.const_int(1)), s.loop_span,
                                  source=var.name)
                more.env[var.uid] = nxt
                for y in self.stmts(before, [more]):
                    if not y.done:
                        self.check_invariants(y, invs, CheckKind.LOOP_INVARIANT_PRESERVE)
        return results

    @staticmethod
    def pure_expr(gen: "Generator", e: A.Expr, st: State) -> L.Term:
        saved = gen.pure
        gen.pure = True
        try:
            return gen.expr(e, st, ())
        finally:
            gen.pure = saved

    def check_invariants(self, st: State, invs: list[A.Pragma], kind: CheckKind):
        for p in invs:
            self.mark(st, p.span)
            t = self.expr(p.expr, st, ())
            self.check(st, (), kind, p.expr.span, p, t)

    def finish_function(self, st: State, value: L.Term, e: A.Expr):
        rt = self.analysis.table.type_named(self.sp.result.name)
        self.range_check(st, rt, value, e)
        self.result_term = value
        self.postcondition(st)

    def postcondition(self, st: State):
        post = self.sp.aspects.post
        if post is None:
            return
        t = self.expr(post, st, ())
        self.check(st, (), CheckKind.POSTCONDITION, post.span, post, t)


def wrap(ctx: Ctx, goal: L.Term) -> L.Term:
    for item in reversed(ctx):
        if item[0] == "guard":
            goal = L.implies(item[1], goal)
        else:
            _, k, lo, hi = item
            goal = L.forall(k, lo, hi, goal)
    return goal


def _root_name(e: A.Expr) -> str:
    e = A.strip_parens(e)
    while isinstance(e, (A.Index, A.Slice, A.Attribute)):
        e = e.prefix
    return e.ident if isinstance(e, A.Name) else "value"


def _has_opaque(analysis: Analysis, hyps: list[Hypothesis], goal: L.Term) -> bool:
    def opaque(t: L.Term) -> bool:
        for name in L.calls_in(t):
            fn = analysis.functions.get(name)
            if fn is not None and fn.opaque:
                return True
        return False
    return opaque(goal) or any(opaque(h.formula) for h in hyps)


# ------------------------------------------------------------------- API

def collect_checks(sp: A.Subprogram, analysis: Analysis) -> list[CheckObligation]:
    return generate_vcs(sp, analysis).obligations


def generate_vcs(sp: A.Subprogram, analysis: Analysis) -> SubprogramVCs:
    return Generator(analysis, sp).run()


def analyze_unit(unit: A.CompilationUnit, table: S.SymbolTable,
                 unroll_limit: int = DEFAULT_UNROLL,
                 variant_proved: Union[set, frozenset] = frozenset()) -> Analysis:
    cg = S.build_call_graph(unit)
    classes = {sp.name: S.classify_function(sp, cg, variant_proved) for sp in unit.subprograms()}
    return Analysis(unit, table, classes, unroll_limit)
