"""Name and type resolution, call graph and function classification."""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import count
from typing import Optional, Union

import networkx as nx

from .syntax import ast as A
from .syntax.lexer import FrontEndError

INT_MIN, INT_MAX = -2**31, 2**31 - 1


class SemaError(FrontEndError):
    pass


@dataclass(frozen=True)
class Type:
    kind: str  # int | bool | char | string
    name: str
    lo: Optional[int] = None
    hi: Optional[int] = None

    @property
    def constrained(self) -> bool:
        return self.kind == "int" and (self.lo, self.hi) != (INT_MIN, INT_MAX)

    def __str__(self) -> str:
        return self.name


INTEGER = Type("int", "Integer", INT_MIN, INT_MAX)
NATURAL = Type("int", "Natural", 0, INT_MAX)
POSITIVE = Type("int", "Positive", 1, INT_MAX)
BOOLEAN = Type("bool", "Boolean")
CHARACTER = Type("char", "Character")
STRING = Type("string", "String")

PREDEFINED = {t.name.lower(): t for t in (INTEGER, NATURAL, POSITIVE, BOOLEAN, CHARACTER, STRING)}

_ids = count(1)


@dataclass(eq=False)
class Variable:
    name: str
    type: Type
    mode: str  # in | out | in out | local | loop | quant | result
    span: A.SourceSpan
    relaxed: bool = False
    constraint: Optional[tuple[A.Expr, A.Expr]] = None  # local String bounds
    init: Optional[A.Expr] = None
    uid: int = field(default_factory=lambda: next(_ids))

    @property
    def is_array(self) -> bool:
        return self.type.kind == "string"

    def __repr__(self) -> str:
        return f"<{self.mode} {self.name}: {self.type}>"


@dataclass
class FunctionClass:
    kind: str  # expression_function | regular_function | procedure
    body_available_for_proof: bool
    unavailability_reason: Optional[str] = None


@dataclass
class LoopShape:
    loop: A.For
    static_bounds: Optional[tuple[int, int]]
    invariants: list[A.Pragma]
    write_set: list[Variable]

    @property
    def id(self) -> int:
        return self.loop.ident


@dataclass
class SymbolTable:
    subprograms: dict[str, A.Subprogram] = field(default_factory=dict)
    subtypes: dict[str, Type] = field(default_factory=dict)
    variables: dict[str, list[Variable]] = field(default_factory=dict)  # by subprogram key
    loops: dict[int, LoopShape] = field(default_factory=dict)
    loop_owner: dict[int, A.Subprogram] = field(default_factory=dict)

    def subprogram(self, name: str) -> Optional[A.Subprogram]:
        return self.subprograms.get(name.lower())

    def type_named(self, name: str) -> Optional[Type]:
        return PREDEFINED.get(name.lower()) or self.subtypes.get(name.lower())

    def params(self, sp: A.Subprogram) -> list[Variable]:
        return [p.decl for p in sp.params]


def static_value(e: A.Expr) -> Optional[int]:
    """Value of a compile-time constant integer expression, else None."""
    if isinstance(e, A.IntLit):
        return e.value
    if isinstance(e, A.Paren):
        return static_value(e.inner)
    if isinstance(e, A.Unary) and e.op in "+-":
        v = static_value(e.operand)
        return None if v is None else (v if e.op == "+" else -v)
    if isinstance(e, A.Binary) and e.op in ("+", "-", "*", "/"):
        a, b = static_value(e.left), static_value(e.right)
        if a is None or b is None:
            return None
        if e.op == "+":
            return a + b
        if e.op == "-":
            return a - b
        if e.op == "*":
            return a * b
        if b == 0:
            return None
        q = abs(a) // abs(b)
        return q if (a >= 0) == (b >= 0) else -q
    return None


# ------------------------------------------------------------------ resolver

class Resolver:
    def __init__(self, unit: A.CompilationUnit):
        self.unit = unit
        self.table = SymbolTable()
        self.loop_ids = count(1)

    def error(self, span: A.SourceSpan, msg: str):
        raise SemaError(span, msg)

    def run(self) -> SymbolTable:
        for d in self.unit.declarations:
            if isinstance(d, A.SubtypeDecl):
                self.declare_subtype(d)
            else:
                key = d.name.lower()
                if key in self.table.subprograms or key in self.table.subtypes:
                    self.error(d.name_span, f"\"{d.name}\" is already declared")
                self.table.subprograms[key] = d
        for sp in self.unit.subprograms():
            self.resolve_subprogram(sp)
        return self.table

    def declare_subtype(self, d: A.SubtypeDecl):
        key = d.name.lower()
        if key in self.table.subtypes or key in PREDEFINED:
            self.error(d.span, f"\"{d.name}\" is already declared")
        base = self.table.type_named(d.base)
        if base is None or base.kind != "int":
            self.error(d.span, f"range subtype must derive from an integer type, not \"{d.base}\"")
        lo, hi = static_value(d.low), static_value(d.high)
        if lo is None or hi is None:
            self.error(d.span, "subtype bounds must be static")
        if lo < base.lo or hi > base.hi:
            self.error(d.span, "subtype bounds outside base range")
        self.table.subtypes[key] = Type("int", d.name, lo, hi)

    def type_of_mark(self, tm: A.TypeMark) -> Type:
        t = self.table.type_named(tm.name)
        if t is None:
            self.error(tm.span, f"\"{tm.name}\" is undefined")
        return t

    # ------------------------------------------------------- subprograms

    def resolve_subprogram(self, sp: A.Subprogram):
        scope: dict[str, Variable] = {}
        variables: list[Variable] = []
        relaxed = {n.lower() for n in sp.aspects.relaxed}
        for p in sp.params:
            t = self.type_of_mark(p.type)
            if p.name.lower() in scope:
                self.error(p.span, f"\"{p.name}\" is already declared")
            if sp.kind == "function" and p.mode != "in":
                self.error(p.span, "function parameters must have mode in")
            v = Variable(p.name, t, p.mode, p.span, relaxed=p.name.lower() in relaxed)
            p.decl = v
            scope[p.name.lower()] = v
            variables.append(v)
        self.table.variables[sp.name.lower()] = variables
        result_t = self.type_of_mark(sp.result) if sp.result is not None else None
        self.current = sp
        self.result_type = result_t

        for d in sp.locals:
            if d.name.lower() in scope:
                self.error(d.span, f"\"{d.name}\" is already declared")
            t = self.type_of_mark(d.type)
            constraint = None
            if t.kind == "string":
                if d.type.constraint is None:
                    self.error(d.type.span, "local String objects need index bounds")
                lo = self.expr(d.type.constraint[0], scope)
                hi = self.expr(d.type.constraint[1], scope)
                self.want(lo, "int")
                self.want(hi, "int")
                constraint = (lo, hi)
                d.type.constraint = constraint
            elif d.type.constraint is not None:
                self.error(d.type.span, "index constraint on a non-array type")
            if d.init is not None:
                d.init = self.expr(d.init, scope, target=t)
                self.compatible(d.init, t)
            v = Variable(d.name, t, "local", d.span, relaxed=d.name.lower() in relaxed,
                         constraint=constraint, init=d.init)
            d.decl = v
            scope[d.name.lower()] = v
            variables.append(v)

        for name in sp.aspects.relaxed:
            if name.lower() not in scope:
                self.error(sp.name_span, f"Relaxed_Initialization names unknown object \"{name}\"")

        self.in_post = False
        if sp.aspects.pre is not None:
            sp.aspects.pre = self.expr(sp.aspects.pre, scope)
            self.want(sp.aspects.pre, "bool")
        if sp.aspects.post is not None:
            self.in_post = True
            sp.aspects.post = self.expr(sp.aspects.post, scope)
            self.in_post = False
            self.want(sp.aspects.post, "bool")
        if sp.aspects.variant is not None:
            if sp.kind != "function":
                self.error(sp.name_span, "Subprogram_Variant is only supported on functions")
            sp.aspects.variant = self.expr(sp.aspects.variant, scope)
            self.want(sp.aspects.variant, "int")
        if sp.expr is not None:
            sp.expr = self.expr(sp.expr, scope)
            self.compatible(sp.expr, result_t)
        if sp.body is not None:
            self.stmts(sp.body, scope, in_loop=None, variables=variables)

    def stmts(self, stmts: list[A.Stmt], scope: dict, in_loop: Optional[A.For],
              variables: list[Variable]):
        for s in stmts:
            self.stmt(s, scope, in_loop, variables)

    def stmt(self, s: A.Stmt, scope: dict, in_loop: Optional[A.For], variables: list[Variable]):
        if isinstance(s, A.Null):
            return
        if isinstance(s, A.Assign):
            s.target = self.expr(s.target, scope)
            base = s.target
            if isinstance(base, A.Index):
                base = base.prefix
            if not isinstance(base, A.Name) or not isinstance(base.decl, Variable):
                self.error(s.target.span, "assignment target must be a variable or an element")
            v = base.decl
            if v.mode in ("in", "loop", "quant"):
                self.error(base.span, f"\"{v.name}\" cannot be assigned")
            s.value = self.expr(s.value, scope, target=s.target.ty)
            if isinstance(s.value, A.Aggregate) and isinstance(s.target, A.Index):
                self.error(s.value.span, "aggregate assigned to an element")
            self.compatible(s.value, s.target.ty)
            if s.target.ty.kind == "string" and not isinstance(s.value, A.Aggregate):
                self.error(s.value.span, "whole-array assignment needs an (others => ...) aggregate")
            return
        if isinstance(s, A.If):
            new = []
            for cond, body in s.branches:
                cond = self.expr(cond, scope)
                self.want(cond, "bool")
                self.stmts(body, scope, None if in_loop is None else in_loop, variables)
                new.append((cond, body))
            s.branches = new
            if s.orelse is not None:
                self.stmts(s.orelse, scope, in_loop, variables)
            self.check_no_invariant(s)
            return
        if isinstance(s, A.For):
            s.ident = next(self.loop_ids)
            self.range(s.range, scope)
            if s.var.lower() in scope:
                self.error(s.var_span, f"\"{s.var}\" is already declared")
            v = Variable(s.var, INTEGER, "loop", s.var_span)
            s.decl = v
            variables.append(v)
            inner = dict(scope)
            inner[s.var.lower()] = v
            self.stmts(s.body, inner, s, variables)
            marks = [i for i, b in enumerate(s.body)
                     if isinstance(b, A.Pragma) and b.name == "Loop_Invariant"]
            if marks and marks[-1] - marks[0] + 1 != len(marks):
                self.error(s.body[marks[-1]].span, "loop invariants of a loop must be consecutive")
            lo = hi = None
            if s.range.of is None:
                lo, hi = static_value(s.range.low), static_value(s.range.high)
            shape = LoopShape(
                s, (lo, hi) if lo is not None and hi is not None else None,
                [b for b in s.body if isinstance(b, A.Pragma) and b.name == "Loop_Invariant"],
                write_set(s.body))
            self.table.loops[s.ident] = shape
            self.table.loop_owner[s.ident] = self.current
            return
        if isinstance(s, A.Return):
            if self.result_type is None:
                if s.value is not None:
                    self.error(s.span, "procedure cannot return a value")
            else:
                if s.value is None:
                    self.error(s.span, "function must return a value")
                s.value = self.expr(s.value, scope)
                self.compatible(s.value, self.result_type)
            return
        if isinstance(s, A.Pragma):
            if s.name == "Loop_Invariant" and in_loop is None:
                self.error(s.span, "pragma Loop_Invariant must appear inside a loop")
            s.expr = self.expr(s.expr, scope)
            self.want(s.expr, "bool")
            return
        raise TypeError(type(s).__name__)

    def check_no_invariant(self, s: A.If):
        for _, body in s.branches:
            for b in body:
                if isinstance(b, A.Pragma) and b.name == "Loop_Invariant":
                    self.error(b.span, "pragma Loop_Invariant must appear directly in the loop body")
        for b in s.orelse or []:
            if isinstance(b, A.Pragma) and b.name == "Loop_Invariant":
                self.error(b.span, "pragma Loop_Invariant must appear directly in the loop body")

    def range(self, r: A.Range, scope: dict):
        if r.of is not None:
            r.of = self.expr(r.of, scope)
            self.want(r.of, "string")
        else:
            r.low = self.expr(r.low, scope)
            r.high = self.expr(r.high, scope)
            self.want(r.low, "int")
            self.want(r.high, "int")

    # ------------------------------------------------------- expressions

    def want(self, e: A.Expr, kind: str):
        if e.ty is None or e.ty.kind != kind:
            got = e.ty.name if e.ty is not None else "no value"
            expected = {"int": "an integer", "bool": "a Boolean", "char": "a Character",
                        "string": "a String"}[kind]
            self.error(e.span, f"type mismatch: expected {expected} expression, found {got}")

    def compatible(self, e: A.Expr, t: Optional[Type]):
        if t is None:
            return
        self.want(e, t.kind)

    def expr(self, e: A.Expr, scope: dict, target: Optional[Type] = None) -> A.Expr:
        if isinstance(e, A.IntLit):
            e.ty = INTEGER
        elif isinstance(e, A.CharLit):
            e.ty = CHARACTER
        elif isinstance(e, A.StrLit):
            e.ty = STRING
        elif isinstance(e, A.BoolLit):
            e.ty = BOOLEAN
        elif isinstance(e, A.Name):
            v = scope.get(e.ident.lower())
            if v is not None:
                e.decl = v
                e.ty = v.type
            else:
                sp = self.table.subprogram(e.ident)
                if sp is not None and sp.kind == "function":
                    return self.expr(A.Call(e.ident, [], span=e.span, name_span=e.span), scope)
                self.error(e.span, f"\"{e.ident}\" is undefined")
        elif isinstance(e, A.Paren):
            e.inner = self.expr(e.inner, scope, target)
            e.ty = e.inner.ty
        elif isinstance(e, A.Attribute):
            return self.attribute(e, scope)
        elif isinstance(e, A.Unary):
            e.operand = self.expr(e.operand, scope)
            if e.op == "not":
                self.want(e.operand, "bool")
                e.ty = BOOLEAN
            else:
                self.want(e.operand, "int")
                e.ty = INTEGER
        elif isinstance(e, A.Binary):
            e.left = self.expr(e.left, scope)
            e.right = self.expr(e.right, scope)
            if e.op in ("+", "-", "*", "/"):
                self.want(e.left, "int")
                self.want(e.right, "int")
                e.ty = INTEGER
            elif e.op in ("and", "or", "and then", "or else"):
                self.want(e.left, "bool")
                self.want(e.right, "bool")
                e.ty = BOOLEAN
            elif e.op in ("=", "/="):
                if e.left.ty is None:
                    self.want(e.left, "int")
                self.want(e.right, e.left.ty.kind)
                e.ty = BOOLEAN
            else:
                if e.left.ty is None or e.left.ty.kind not in ("int", "char"):
                    self.want(e.left, "int")
                self.want(e.right, e.left.ty.kind)
                e.ty = BOOLEAN
        elif isinstance(e, A.IfExpr):
            e.cond = self.expr(e.cond, scope)
            self.want(e.cond, "bool")
            e.then = self.expr(e.then, scope, target)
            if e.orelse is None:
                self.want(e.then, "bool")
            else:
                e.orelse = self.expr(e.orelse, scope, target)
                self.want(e.orelse, e.then.ty.kind)
            e.ty = e.then.ty if e.then.ty.kind != "int" else INTEGER
        elif isinstance(e, A.Quantified):
            self.range(e.range, scope)
            if e.var.lower() in scope:
                self.error(e.var_span, f"\"{e.var}\" is already declared")
            v = Variable(e.var, INTEGER, "quant", e.var_span)
            e.decl = v
            inner = dict(scope)
            inner[e.var.lower()] = v
            e.body = self.expr(e.body, inner)
            self.want(e.body, "bool")
            e.ty = BOOLEAN
        elif isinstance(e, A.Membership):
            e.value = self.expr(e.value, scope)
            self.want(e.value, "int")
            self.range(e.range, scope)
            e.ty = BOOLEAN
        elif isinstance(e, A.Call):
            return self.call(e, scope)
        elif isinstance(e, A.Index):
            e.prefix = self.expr(e.prefix, scope)
            self.want(e.prefix, "string")
            e.index = self.expr(e.index, scope)
            self.want(e.index, "int")
            e.ty = CHARACTER
        elif isinstance(e, A.Slice):
            e.prefix = self.expr(e.prefix, scope)
            self.want(e.prefix, "string")
            e.low = self.expr(e.low, scope)
            e.high = self.expr(e.high, scope)
            self.want(e.low, "int")
            self.want(e.high, "int")
            e.ty = STRING
        elif isinstance(e, A.Aggregate):
            if target is None or target.kind != "string":
                self.error(e.span, "aggregate is only allowed as the value of a String assignment")
            e.value = self.expr(e.value, scope)
            self.want(e.value, "char")
            e.ty = STRING
        else:
            raise TypeError(type(e).__name__)
        return e

    def attribute(self, e: A.Attribute, scope: dict) -> A.Expr:
        if e.attr == "Result":
            if not (isinstance(e.prefix, A.Name) and e.prefix.ident.lower() == self.current.name.lower()
                    and self.current.kind == "function" and self.in_post):
                self.error(e.span, "'Result is only allowed in the postcondition of its function")
            e.ty = self.result_type
            return e
        e.prefix = self.expr(e.prefix, scope)
        if e.attr in ("First", "Last", "Length"):
            self.want(e.prefix, "string")
            e.ty = NATURAL if e.attr == "Length" else INTEGER
        elif e.attr == "Initialized":
            base = e.prefix.prefix if isinstance(e.prefix, A.Index) else e.prefix
            if not (isinstance(base, A.Name) and isinstance(base.decl, Variable)):
                self.error(e.span, "'Initialized applies to objects and array components")
            e.ty = BOOLEAN
        else:
            self.error(e.span, f"attribute '{e.attr} is only allowed as a range")
        return e

    def call(self, e: A.Call, scope: dict) -> A.Expr:
        v = scope.get(e.name.lower())
        if v is not None:
            prefix = A.Name(e.name, span=e.name_span)
            prefix.decl = v
            prefix.ty = v.type
            if v.type.kind != "string":
                self.error(e.name_span, f"\"{e.name}\" is not an array")
            if len(e.args) != 1:
                self.error(e.span, "arrays have exactly one index")
            idx = A.Index(prefix, e.args[0], span=e.span)
            return self.expr(idx, scope)
        sp = self.table.subprogram(e.name)
        if sp is None:
            self.error(e.name_span, f"\"{e.name}\" is undefined")
        if sp.kind != "function":
            self.error(e.name_span, f"procedure \"{sp.name}\" cannot be called in an expression")
        if len(e.args) != len(sp.params):
            self.error(e.span, f"wrong number of arguments for \"{sp.name}\": expected "
                       f"{len(sp.params)}, found {len(e.args)}")
        e.args = [self.expr(a, scope) for a in e.args]
        for a, p in zip(e.args, sp.params):
            self.compatible(a, self.type_of_mark(p.type))
        e.decl = sp
        e.ty = self.type_of_mark(sp.result)
        return e


def write_set(stmts: list[A.Stmt]) -> list[Variable]:
    """Variables assigned anywhere in the statements, in first-assignment order."""
    seen: dict[int, Variable] = {}
    for s in A.walk_stmts(stmts):
        if isinstance(s, A.Assign):
            base = s.target.prefix if isinstance(s.target, A.Index) else s.target
            v = base.decl
            seen.setdefault(v.uid, v)
    return list(seen.values())


def resolve(unit: A.CompilationUnit) -> tuple[A.CompilationUnit, SymbolTable]:
    """Bind names, type every expression, and collect loop shapes."""
    table = Resolver(unit).run()
    return unit, table


# ------------------------------------------------------------- call graph

@dataclass
class CallGraph:
    nodes: list[str]
    edges: dict[str, set[str]]
    sites: dict[str, list[A.Call]]  # caller -> call nodes in source order
    sccs: list[list[str]]

    def scc_of(self, name: str) -> list[str]:
        for c in self.sccs:
            if name in c:
                return c
        return [name]

    def recursive(self, name: str) -> bool:
        return len(self.scc_of(name)) > 1 or name in self.edges.get(name, ())


def subprogram_exprs(sp: A.Subprogram):
    for e in (sp.aspects.pre, sp.aspects.post, sp.aspects.variant, sp.expr):
        if e is not None:
            yield e
    for d in sp.locals:
        if d.init is not None:
            yield d.init
        if d.type.constraint is not None:
            yield from d.type.constraint
    for s in A.walk_stmts(sp.body or []):
        yield from A.stmt_exprs(s)


def calls_in(sp: A.Subprogram) -> list[A.Call]:
    out = []
    for e in subprogram_exprs(sp):
        for sub in A.walk(e):
            if isinstance(sub, A.Call):
                out.append(sub)
    return out


def strongly_connected(nodes: list[str], edges: dict[str, set[str]]) -> list[list[str]]:
    """Strongly connected components, each sorted, in a deterministic order."""
    g = nx.DiGraph()
    g.add_nodes_from(nodes)
    g.add_edges_from((a, b) for a, bs in edges.items() for b in bs)
    order = {n: i for i, n in enumerate(nodes)}
    comps = [sorted(c, key=order.get) for c in nx.strongly_connected_components(g)]
    return sorted(comps, key=lambda c: order[c[0]])


def build_call_graph(unit: A.CompilationUnit) -> CallGraph:
    nodes = [sp.name for sp in unit.subprograms()]
    edges: dict[str, set[str]] = {n: set() for n in nodes}
    sites: dict[str, list[A.Call]] = {n: [] for n in nodes}
    for sp in unit.subprograms():
        for c in calls_in(sp):
            callee = c.decl.name if c.decl is not None else c.name
            edges[sp.name].add(callee)
            sites[sp.name].append(c)
    return CallGraph(nodes, edges, sites, strongly_connected(nodes, edges))


def classify_function(sp: A.Subprogram, cg: CallGraph,
                      variant_proved: Union[set[str], frozenset[str]] = frozenset()) -> FunctionClass:
    if sp.kind == "procedure":
        return FunctionClass("procedure", False)
    if not sp.is_expression_function:
        return FunctionClass("regular_function", False)
    if cg.recursive(sp.name):
        if sp.aspects.variant is not None and sp.name in variant_proved:
            return FunctionClass("expression_function", True)
        return FunctionClass("expression_function", False, f"\"{sp.name}\" might not return")
    return FunctionClass("expression_function", True)


def recursive_call_sites(sp: A.Subprogram, cg: CallGraph) -> list[A.Call]:
    scc = set(cg.scc_of(sp.name))
    if not cg.recursive(sp.name):
        return []
    return [c for c in cg.sites.get(sp.name, []) if c.decl is not None and c.decl.name in scc]


def iteration_count(loop: LoopShape) -> Union[int, str]:
    if loop.static_bounds is None:
        return "dynamic"
    lo, hi = loop.static_bounds
    return max(0, hi - lo + 1)


def merge_units(units: list[A.CompilationUnit]) -> A.CompilationUnit:
    """Combine spec and body units into one flat unit.

    A declaration without body is completed by a later body of the same name;
    the merged subprogram keeps the declaration's position and, when the body
    carries no contract of its own, the declaration's aspects.
    """
    decls: list[A.Decl] = []
    pending: dict[str, int] = {}
    name = None
    for u in units:
        name = name or u.package
        for d in u.declarations:
            if not isinstance(d, A.Subprogram):
                decls.append(d)
                continue
            key = d.name.lower()
            if key in pending and d.has_body:
                i = pending.pop(key)
                spec = decls[i]
                if not d.aspects.empty() and not spec.aspects.empty():
                    raise SemaError(d.name_span, f"contract for \"{d.name}\" given twice")
                if [(p.name.lower(), p.mode, p.type.name.lower()) for p in spec.params] != \
                        [(p.name.lower(), p.mode, p.type.name.lower()) for p in d.params]:
                    raise SemaError(d.name_span, f"body of \"{d.name}\" does not match its declaration")
                if d.aspects.empty():
                    d.aspects = spec.aspects
                d.spec_span = spec.name_span
                decls[i] = d
                continue
            if not d.has_body:
                pending[key] = len(decls)
            decls.append(d)
    return A.CompilationUnit(decls, package=name, is_body=False,
                             file=units[0].file if units else "")
