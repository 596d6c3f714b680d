"""Diagnostics: messages, counterexamples, fix hints, notes and lints.

A diagnostic is rendered as a main line ``file:line:col: severity: text``
followed, in this order, by the source snippet, the counterexample excerpt
("e.g. when ..."), the optional trace, the reason for the check and possible
fixes (each with its own snippets).
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Optional

from . import sema as S
from .interp import ArrayValue
from .solver import (Counterexample, DomainBounds, NoModelWithinBounds, Proved,
                     check_consistency, check_validity, evaluate_in_model)
from .syntax import ast as A
from .syntax.ast import SourceSpan
from .syntax.pretty import pretty
from .syntax.snippet import render_snippet
from .vcgen import logic as L
from .vcgen.checks import CheckKind, CheckObligation
from .vcgen.evaluate import UNK, ConcreteArr
from .vcgen.generate import Analysis, BranchContext, Hypothesis, VerificationCondition

SCHEMA_VERSION = 1

_CATEGORY_ORDER = {"flow": CheckKind.INIT_CHECK.order, "info": 20, "lint": 21, "proof_warning": 22}


@dataclass
class FixHint:
    kind: str  # loop_invariant | function_contract | and_then | suspicious_quantifier
    text: list[str]
    spans: list[SourceSpan] = field(default_factory=list)


@dataclass
class Diagnostic:
    severity: str  # medium | warning | info
    span: SourceSpan
    text: str
    category: str  # a check kind value, or flow | info | lint | proof_warning
    ordinal: int = 1
    snippet: list[str] = field(default_factory=list)
    example: list[tuple[str, str]] = field(default_factory=list)
    trace: list[str] = field(default_factory=list)
    reason: Optional[str] = None
    fixes: list[FixHint] = field(default_factory=list)
    extra: list[str] = field(default_factory=list)
    check_id: Optional[str] = None
    bindings: dict = field(default_factory=dict)
    fix_snippets: list[list[str]] = field(default_factory=list)

    @property
    def sort_key(self) -> tuple:
        s = self.span
        order = _CATEGORY_ORDER.get(self.category)
        if order is None:
            order = CheckKind(self.category).order
        return (s.file, s.line, s.column, order, self.ordinal, self.text)

    def header(self) -> str:
        return f"{self.span}: {self.severity}: {self.text}"

    def lines(self) -> list[str]:
        head = self.header()
        out = [head]
        if self.severity == "info":
            indent = " " * len(f"{self.span}: info: ")
            out += [indent + x for x in self.extra]
        out += self.snippet
        if self.severity != "info":
            out += ["  " + x for x in self.extra]
        if self.example:
            first, *rest = [f"{n} = {v}" for n, v in self.example]
            out.append(f"  e.g. when {first}")
            out += [f"        and {x}" for x in rest]
        out += self.trace
        if self.reason:
            out.append(f"  reason for check: {self.reason}")
        for fix, snippet in zip(self.fixes, self.fix_snippets):
            out.append("  possible fix: " + fix.text[0])
            out += ["  " + x for x in fix.text[1:]]
            out += snippet
        return out

    def to_json(self) -> dict:
        return {
            "severity": self.severity,
            "file": self.span.file,
            "line": self.span.line,
            "column": self.span.column,
            "kind": self.category,
            "message": self.text,
            "reason": self.reason,
            "fix": [" ".join(f.text) for f in self.fixes],
            "counterexample": ({"bindings": dict(self.example), "trace": [t.strip() for t in self.trace[1:]]}
                               if self.example else None),
            "check_id": self.check_id,
        }


def snippet(span: SourceSpan, sources: dict[str, str]) -> list[str]:
    src = sources.get(span.file)
    if src is None:
        return []
    return render_snippet(span, src, "here" if _shown_length(span, src) == 1 else None)


def _shown_length(span: SourceSpan, src: str) -> int:
    from .syntax.snippet import source_line
    text = source_line(src, span.line)
    return max(1, min(span.length, len(text) - span.column + 1))


# ------------------------------------------------------------- values

def show_value(x: Any) -> str:
    if isinstance(x, bool):
        return "True" if x else "False"
    if isinstance(x, int):
        return str(x)
    if isinstance(x, str):
        return "'" + x + "'"
    if isinstance(x, tuple) and len(x) == 2:
        return show_value(x[0]) if x[1] else "uninitialized"
    if isinstance(x, ConcreteArr):
        cells = [c[0] if c[1] else "?" for c in x.data] if x.data and isinstance(x.data[0], tuple) \
            else list(x.data)
        return '"' + "".join(cells) + '"'
    if isinstance(x, ArrayValue):
        return '"' + "".join(c if ok else "?" for c, ok in zip(x.cells, x.init)) + '"'
    return str(x)


def counterexample_excerpt(leaf: VerificationCondition, model: dict,
                           bounds: DomainBounds) -> list[tuple[str, str]]:
    """Source-level values of the symbols free in the leaf goal.

    Plain variables come first, then attributes; each group follows the
    order in which the symbols were declared.
    """
    names = leaf.display_names()
    position = {s.var: i for i, s in enumerate(leaf.symbols)}
    plain, attrs = [], []
    for v in sorted(L.free_vars(leaf.goal), key=lambda v: position.get(v, 1 << 30)):
        info = leaf.info(v)
        if info is None or info.source is None:
            continue
        if info.role == "bound":
            label = v.base
        elif info.role == "fresh":
            label = info.source
        else:
            label = names.get(v, v.base)
        value = model.get(v) if info.definition is None else None
        if value is None:
            value = evaluate_in_model(leaf, v, model, bounds)
        if value is UNK or value is None:
            continue
        (attrs if "'" in label else plain).append((label, show_value(value)))
    return plain + attrs


def counterexample_trace(leaf: VerificationCondition, model: dict,
                         bounds: DomainBounds) -> list[str]:
    if not leaf.trace:
        return []
    out = ["  trace:"]
    for point in leaf.trace:
        parts = []
        for name, term in point.values.items():
            x = evaluate_in_model(leaf, term, model, bounds)
            if x is not UNK and x is not None:
                parts.append(f"{name} = {show_value(x)}")
            if term.sort in L.ARRAY_SORTS:
                info = leaf.info(term) if isinstance(term, L.Var) else None
                bnds = info.bounds if info is not None and info.bounds else None
                if bnds is not None:
                    for attr, b in zip(("First", "Last"), bnds):
                        y = evaluate_in_model(leaf, b, model, bounds)
                        if y is not UNK:
                            parts.append(f"{name}'{attr} = {show_value(y)}")
        out.append(f"    {point.span.file}:{point.span.line}: " + (", ".join(parts) or "-"))
    return out


# -------------------------------------------------------------- hints

def _mentions(e: Any, out: set[str]):
    """Names of variables mentioned, ignoring prefixes of bound attributes."""
    if isinstance(e, A.Attribute):
        if e.attr in ("First", "Last", "Length"):
            return
        _mentions(e.prefix, out)
        return
    if isinstance(e, A.Name):
        out.add(e.ident.lower())
        return
    if isinstance(e, A.Quantified) or isinstance(e, A.Membership):
        r = e.range
        for x in (r.low, r.high):
            if x is not None:
                _mentions(x, out)
        _mentions(e.body if isinstance(e, A.Quantified) else e.value, out)
        return
    for c in e.children():
        _mentions(c, out)


def mentioned(e: A.Expr) -> set[str]:
    out: set[str] = set()
    _mentions(e, out)
    return out


def _nodes(s: A.Stmt):
    yield s
    for e in A.stmt_exprs(s):
        yield from A.walk(e)
    if isinstance(s, A.For):
        for b in s.body:
            yield from _nodes(b)
    elif isinstance(s, A.If):
        for cond, body in s.branches:
            for b in body:
                yield from _nodes(b)
        for b in s.orelse or []:
            yield from _nodes(b)


def _contains(s: A.Stmt, node: Any) -> bool:
    return any(n is node for n in _nodes(s))


def _loops_in(s: A.Stmt) -> list[A.For]:
    """Loops of a statement in reverse execution order."""
    if isinstance(s, A.For):
        return [s]
    if isinstance(s, A.If):
        out = []
        for b in reversed(s.orelse or []):
            out += _loops_in(b)
        for cond, body in reversed(s.branches):
            for b in reversed(body):
                out += _loops_in(b)
        return out
    return []


def backward_events(stmts: list[A.Stmt], node: Any, top: bool = True) -> list[tuple[str, Any]]:
    """Loops and whole assignments met when walking backwards from ``node``.

    ``node`` None means the end of the statement list.
    """
    idx = None
    if node is not None:
        for i, s in enumerate(stmts):
            if _contains(s, node):
                idx = i
                break
    out: list[tuple[str, Any]] = []
    before = stmts
    if idx is not None:
        s = stmts[idx]
        if isinstance(s, A.For):
            out += backward_events(s.body, node, top=False)
            out.append(("loop", s))
        elif isinstance(s, A.If):
            for cond, body in s.branches:
                if any(_contains(b, node) for b in body):
                    out += backward_events(body, node, top=False)
            if s.orelse and any(_contains(b, node) for b in s.orelse):
                out += backward_events(s.orelse, node, top=False)
        before = stmts[:idx]
    for s in reversed(before):
        if isinstance(s, A.Assign) and isinstance(s.target, A.Name) and top:
            out.append(("assign", s.target.ident.lower()))
        for loop in _loops_in(s):
            out.append(("loop", loop))
    return out


def tracked_variables(leaf: VerificationCondition) -> list[str]:
    """Source variables the leaf goal depends on, bound attributes excluded."""
    out: list[str] = []
    for v in L.free_vars(leaf.goal):
        info = leaf.info(v)
        if info is None or info.source is None or info.role in ("bound", "fresh"):
            continue
        if info.source not in out:
            out.append(info.source)
    return out


def hint_loop_invariant(leaf: VerificationCondition, sp: A.Subprogram,
                        analysis: Analysis) -> Optional[FixHint]:
    tracked = tracked_variables(leaf)
    if not tracked or sp.body is None:
        return None
    ob = leaf.obligation
    node = None if ob.kind is CheckKind.POSTCONDITION else ob.expr
    live = {t.lower(): t for t in tracked}
    for event, item in backward_events(sp.body, node):
        if event == "assign":
            live.pop(item, None)
            continue
        loop: A.For = item
        decision = analysis.decisions.get(loop.ident)
        if decision is None or decision.kind == "unroll":
            continue
        shape = analysis.table.loops[loop.ident]
        written = {w.name.lower() for w in shape.write_set}
        hit = [name for key, name in live.items() if key in written]
        if not hit:
            continue
        said: set[str] = set()
        for p in shape.invariants:
            said |= mentioned(p.expr)
        if any(h.lower() in said for h in hit):
            continue
        loc = loop.loop_span
        return FixHint("loop_invariant",
                       [f"loop at {loc.file}:{loc.line} should mention {hit[0]} in a loop invariant"],
                       [loc.point()])
    return None


def hint_function_contract(leaf: VerificationCondition, analysis: Analysis) -> Optional[FixHint]:
    for name in L.calls_in(leaf.goal):
        sp = analysis.unit.find(name)
        cls = analysis.classes.get(name)
        if sp is None or cls is None:
            continue
        if cls.kind == "regular_function" and sp.aspects.post is None:
            return FixHint("function_contract",
                           [f"you should consider adding a postcondition to function {sp.name}",
                            "or turning it into an expression function"])
    return None


def hint_and_then(leaf: VerificationCondition, bounds: DomainBounds) -> Optional[FixHint]:
    if leaf.and_left is None:
        return None
    term, op_span = leaf.and_left
    stronger = VerificationCondition(
        leaf.obligation, leaf.symbols, leaf.hypotheses + [Hypothesis(term, None, "intro")],
        leaf.goal, leaf.cut_crossed, leaf.functions, leaf.relaxed)
    if isinstance(check_validity(stronger, bounds), Proved):
        return FixHint("and_then", [f"use \"and then\" instead of \"and\" in the precondition "
                                    f"at {op_span.file}:{op_span.line}"])
    return None


# ----------------------------------------------------------- rendering

@dataclass
class RenderOptions:
    counterexamples: bool = False
    cex_trace: bool = False
    bounds: DomainBounds = field(default_factory=DomainBounds)


def render(ob: CheckObligation, leaf: VerificationCondition, result: Any, sp: A.Subprogram,
           analysis: Analysis, sources: dict[str, str],
           options: Optional[RenderOptions] = None) -> Diagnostic:
    """Diagnostic for an unproved obligation whose first failed leaf is ``leaf``."""
    options = options or RenderOptions()
    fixes: list[FixHint] = []
    fc = hint_function_contract(leaf, analysis)
    if fc:
        fixes.append(fc)
    li = hint_loop_invariant(leaf, sp, analysis)
    if li:
        fixes.append(li)
    if ob.kind.reason is not None:
        at = hint_and_then(leaf, options.bounds)
        if at:
            fixes.append(at)
    text = ob.message
    if ob.kind.is_contract and li is None and leaf.leaf_src is not None:
        text += f", cannot prove {pretty(leaf.leaf_src)}"
    d = Diagnostic("medium", ob.span, text, ob.kind.value, ob.ordinal,
                   snippet(ob.span, sources), reason=ob.kind.reason, fixes=fixes,
                   check_id=ob.id)
    if isinstance(result, Counterexample) and options.counterexamples:
        d.example = counterexample_excerpt(leaf, result.model, options.bounds)
        if options.cex_trace:
            d.trace = counterexample_trace(leaf, result.model, options.bounds)
    d.fix_snippets = [[line for sp_ in f.spans for line in snippet(sp_, sources)] for f in fixes]
    return d


def flow_diagnostic(finding, sources: dict[str, str]) -> Diagnostic:
    return Diagnostic(finding.severity, finding.span, finding.message, "flow")


def lint_suspicious_quantifier(unit: A.CompilationUnit) -> list[Diagnostic]:
    out = []
    for sp in unit.subprograms():
        for root in S.subprogram_exprs(sp):
            for e in A.walk(root):
                if not isinstance(e, A.Quantified) or e.universal:
                    continue
                body = A.strip_parens(e.body)
                if not isinstance(body, A.IfExpr):
                    continue
                orelse = A.strip_parens(body.orelse) if body.orelse is not None else None
                if orelse is not None and not (isinstance(orelse, A.BoolLit) and orelse.value):
                    continue
                p, q = pretty(body.cond), pretty(body.then)
                out.append(Diagnostic(
                    "warning", e.span, "suspicious expression", "lint",
                    extra=[f"did you mean (for all {e.var} => (if {p} then {q}))",
                           f"or (for some {e.var} => {p} and then {q}) instead?"]))
    return out


def info_notes(analysis: Analysis) -> list[Diagnostic]:
    out = []
    for lid, decision in analysis.decisions.items():
        if decision.kind == "cannot_unroll":
            loop = analysis.table.loops[lid].loop
            out.append(Diagnostic("info", loop.loop_span,
                                  f"cannot unroll loop ({decision.reason})", "info"))
    cg = S.build_call_graph(analysis.unit)
    for sp in analysis.unit.subprograms():
        cls = analysis.classes.get(sp.name)
        if cls is None or cls.kind != "expression_function" or cls.body_available_for_proof:
            continue
        sites = S.recursive_call_sites(sp, cg)
        span = sites[0].span if sites else sp.name_span
        out.append(Diagnostic("info", span, "expression function body not available for proof",
                              "info", extra=[f"({cls.unavailability_reason})"]))
    return out


def warn_inconsistencies(contexts: list[BranchContext],
                         bounds: Optional[DomainBounds] = None) -> list[Diagnostic]:
    """Warnings for branch entries and bodies with no model on any path."""
    bounds = bounds or DomainBounds()
    groups: dict[tuple, list[BranchContext]] = {}
    for c in contexts:
        groups.setdefault((c.span.file, c.span.line, c.span.column), []).append(c)
    out = []
    for key, items in groups.items():
        if all(isinstance(check_consistency(c.symbols, c.hypotheses, c.functions, bounds),
                          NoModelWithinBounds) for c in items):
            out.append(Diagnostic("warning", items[0].span,
                                  "context is unsatisfiable (dead code or contradictory contract?)",
                                  "proof_warning"))
    return out


def sort_diagnostics(ds: list[Diagnostic]) -> list[Diagnostic]:
    return sorted(ds, key=lambda d: d.sort_key)


def format_text(ds: list[Diagnostic]) -> str:
    return "".join(line + "\n" for d in sort_diagnostics(ds) for line in d.lines())


def format_json(ds: list[Diagnostic], extra: Optional[dict] = None) -> str:
    doc = {"schema_version": SCHEMA_VERSION,
           "diagnostics": [d.to_json() for d in sort_diagnostics(ds)]}
    if extra:
        doc.update(extra)
    return json.dumps(doc, indent=2, sort_keys=False) + "\n"
