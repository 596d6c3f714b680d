"""Definite-initialization analysis by forward data flow.

Each variable is uninitialized, maybe initialized or initialized; joins take
the weakest state.  Arrays are tracked as one cell: assigning one element
only makes the array "maybe" initialized, however many elements a loop
covers.  Objects under relaxed initialization are left to proof.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum
from typing import Optional

from . import sema as S
from .syntax import ast as A
from .syntax.ast import SourceSpan


class Init(IntEnum):
    UNINITIALIZED = 0
    MAYBE = 1
    INITIALIZED = 2


InitState = dict  # Variable uid -> Init


@dataclass(frozen=True)
class Finding:
    span: SourceSpan
    variable: str
    severity: str = "medium"

    @property
    def message(self) -> str:
        return f"\"{self.variable}\" might not be initialized"


def _meet(a: Optional[InitState], b: Optional[InitState]) -> Optional[InitState]:
    """Join of two states; None stands for an unreachable point."""
    if a is None:
        return b
    if b is None:
        return a
    return {k: min(a[k], b.get(k, Init.UNINITIALIZED)) for k in a}


class _Analyzer:
    def __init__(self, sp: A.Subprogram, variables: list[S.Variable]):
        self.sp = sp
        self.tracked = {v.uid: v for v in variables
                        if v.mode in ("in", "out", "in out", "local") and not v.relaxed}
        self.findings: dict[tuple, Finding] = {}
        self.recording = True

    def read(self, e: A.Expr, st: InitState):
        """Report every read of a not definitely initialized variable in ``e``."""
        if isinstance(e, A.Attribute) and e.attr in ("First", "Last", "Length", "Initialized"):
            if e.attr != "Initialized":
                # bounds are always defined; only index expressions are read
                return
            p = A.strip_parens(e.prefix)
            if isinstance(p, A.Index):
                self.read(p.index, st)
            return
        if isinstance(e, A.Name):
            v = e.decl
            if isinstance(v, S.Variable) and v.uid in self.tracked:
                if st.get(v.uid, Init.INITIALIZED) < Init.INITIALIZED and self.recording:
                    key = (e.span, v.name)
                    self.findings.setdefault(key, Finding(e.span, v.name))
            return
        if isinstance(e, A.Range):
            # X'Range reads only the bounds of X
            for x in (e.low, e.high):
                if x is not None:
                    self.read(x, st)
            return
        if isinstance(e, (A.Quantified, A.Membership)):
            self.read(e.range, st)
            self.read(e.body if isinstance(e, A.Quantified) else e.value, st)
            return
        for c in e.children():
            self.read(c, st)

    def stmts(self, stmts: list[A.Stmt], st: Optional[InitState]) -> Optional[InitState]:
        for s in stmts:
            if st is None:
                return None
            st = self.stmt(s, st)
        return st

    def stmt(self, s: A.Stmt, st: InitState) -> Optional[InitState]:
        if isinstance(s, A.Null):
            return st
        if isinstance(s, A.Assign):
            self.read(s.value, st)
            st = dict(st)
            t = s.target
            if isinstance(t, A.Index):
                self.read(t.index, st)
                v = t.prefix.decl
                if v.uid in st:
                    st[v.uid] = max(st[v.uid], Init.MAYBE)
            elif t.decl.uid in st:
                st[t.decl.uid] = Init.INITIALIZED
            return st
        if isinstance(s, A.Pragma):
            self.read(s.expr, st)
            return st
        if isinstance(s, A.Return):
            if s.value is not None:
                self.read(s.value, st)
            self.exit(st)
            return None
        if isinstance(s, A.If):
            out = None
            rest: Optional[InitState] = st
            for cond, body in s.branches:
                self.read(cond, rest)
                out = _meet(out, self.stmts(body, dict(rest)))
            out = _meet(out, self.stmts(s.orelse, dict(rest)) if s.orelse is not None else rest)
            return out
        if isinstance(s, A.For):
            self.read(s.range, st)
            head = st
            saved = self.recording
            self.recording = False
            while True:
                after = self.stmts(s.body, dict(head))
                new = _meet(st, after)
                if new == head:
                    break
                head = new
            self.recording = saved
            self.stmts(s.body, dict(head))
            return head
        raise TypeError(type(s).__name__)

    def exit(self, st: InitState):
        if self.sp.aspects.post is not None:
            self.read(self.sp.aspects.post, st)

    def run(self) -> list[Finding]:
        sp = self.sp
        st: InitState = {}
        for uid, v in self.tracked.items():
            if v.mode in ("in", "in out"):
                st[uid] = Init.INITIALIZED
            elif v.mode == "out":
                st[uid] = Init.UNINITIALIZED
        for d in sp.locals:
            v = d.decl
            if d.init is not None:
                self.read(d.init, st)
            if v.uid in self.tracked:
                st[v.uid] = Init.INITIALIZED if d.init is not None else Init.UNINITIALIZED
        if sp.aspects.pre is not None:
            self.read(sp.aspects.pre, st)
        if sp.expr is not None:
            self.read(sp.expr, st)
            self.exit(st)
        elif sp.body is not None:
            end = self.stmts(sp.body, st)
            if end is not None and sp.kind == "procedure":
                self.exit(end)
        return sorted(self.findings.values(), key=lambda f: (f.span.file, f.span.line,
                                                             f.span.column, f.variable))


def analyze_init(sp: A.Subprogram, table: S.SymbolTable) -> list[Finding]:
    """Reads of possibly uninitialized variables in ``sp``, one per read site."""
    return _Analyzer(sp, table.variables.get(sp.name.lower(), [])).run()
