"""Typed syntax tree for the Mini language.

Every node carries a :class:`SourceSpan`.  Spans and resolution results are
excluded from equality, so two trees compare equal when they have the same
structure, whatever their positions.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Iterator, Optional, Union


@dataclass(frozen=True)
class SourceSpan:
    file: str
    line: int
    column: int
    length: int = 1
    offset: int = 0

    def __post_init__(self) -> None:
        if self.line < 1 or self.column < 1 or self.length < 1:
            raise ValueError(f"invalid span {self.line}:{self.column}+{self.length}")

    def __str__(self) -> str:
        return f"{self.file}:{self.line}:{self.column}"

    @property
    def key(self) -> tuple[str, int, int]:
        return (self.file, self.line, self.column)

    def point(self) -> "SourceSpan":
        return SourceSpan(self.file, self.line, self.column, 1, self.offset)

    def through(self, other: "SourceSpan") -> "SourceSpan":
        """Span from the start of self to the end of other (same line only)."""
        if other.line != self.line or other.file != self.file:
            return self
        end = other.column + other.length
        return SourceSpan(self.file, self.line, self.column,
                          max(1, end - self.column), self.offset)


NOSPAN = SourceSpan("<none>", 1, 1, 1, 0)


def _span() -> Any:
    return field(default=NOSPAN, compare=False, repr=False)


def _meta() -> Any:
    return field(default=None, compare=False, repr=False)


# ---------------------------------------------------------------- expressions

@dataclass(eq=True)
class Expr:
    def children(self) -> Iterator["Expr"]:
        return iter(())


@dataclass(eq=True)
class IntLit(Expr):
    value: int
    span: SourceSpan = _span()
    ty: Any = _meta()


@dataclass(eq=True)
class CharLit(Expr):
    value: str
    span: SourceSpan = _span()
    ty: Any = _meta()


@dataclass(eq=True)
class StrLit(Expr):
    value: str
    span: SourceSpan = _span()
    ty: Any = _meta()


@dataclass(eq=True)
class BoolLit(Expr):
    value: bool
    span: SourceSpan = _span()
    ty: Any = _meta()


@dataclass(eq=True)
class Name(Expr):
    ident: str
    span: SourceSpan = _span()
    ty: Any = _meta()
    decl: Any = _meta()


@dataclass(eq=True)
class Attribute(Expr):
    prefix: Expr
    attr: str  # canonical spelling: First, Last, Length, Range, Initialized, Result
    span: SourceSpan = _span()
    ty: Any = _meta()

    def children(self):
        yield self.prefix


@dataclass(eq=True)
class Binary(Expr):
    op: str  # + - * / = /= < <= > >= and or "and then" "or else"
    left: Expr
    right: Expr
    span: SourceSpan = _span()
    ty: Any = _meta()
    op_span: SourceSpan = _span()

    def children(self):
        yield self.left
        yield self.right


@dataclass(eq=True)
class Unary(Expr):
    op: str  # not, -, +
    operand: Expr
    span: SourceSpan = _span()
    ty: Any = _meta()

    def children(self):
        yield self.operand


@dataclass(eq=True)
class Paren(Expr):
    inner: Expr
    span: SourceSpan = _span()
    ty: Any = _meta()

    def children(self):
        yield self.inner


@dataclass(eq=True)
class IfExpr(Expr):
    cond: Expr
    then: Expr
    orelse: Optional[Expr]
    span: SourceSpan = _span()
    ty: Any = _meta()

    def children(self):
        yield self.cond
        yield self.then
        if self.orelse is not None:
            yield self.orelse


@dataclass(eq=True)
class Range:
    """Either ``low .. high`` or ``X'Range`` (then ``low``/``high`` are None)."""

    low: Optional[Expr] = None
    high: Optional[Expr] = None
    of: Optional[Expr] = None
    span: SourceSpan = _span()

    def exprs(self) -> Iterator[Expr]:
        if self.of is not None:
            yield self.of
        else:
            yield self.low  # type: ignore[misc]
            yield self.high  # type: ignore[misc]


@dataclass(eq=True)
class Quantified(Expr):
    universal: bool
    var: str
    range: Range
    body: Expr
    span: SourceSpan = _span()
    ty: Any = _meta()
    var_span: SourceSpan = _span()
    decl: Any = _meta()

    def children(self):
        yield from self.range.exprs()
        yield self.body


@dataclass(eq=True)
class Membership(Expr):
    value: Expr
    range: Range
    negated: bool = False
    span: SourceSpan = _span()
    ty: Any = _meta()

    def children(self):
        yield self.value
        yield from self.range.exprs()


@dataclass(eq=True)
class Call(Expr):
    """``F (args)``; the parser also produces this for array indexing."""

    name: str
    args: list[Expr]
    span: SourceSpan = _span()
    ty: Any = _meta()
    decl: Any = _meta()
    name_span: SourceSpan = _span()

    def children(self):
        yield from self.args


@dataclass(eq=True)
class Index(Expr):
    prefix: Expr
    index: Expr
    span: SourceSpan = _span()
    ty: Any = _meta()

    def children(self):
        yield self.prefix
        yield self.index


@dataclass(eq=True)
class Slice(Expr):
    prefix: Expr
    low: Expr
    high: Expr
    span: SourceSpan = _span()
    ty: Any = _meta()

    def children(self):
        yield self.prefix
        yield self.low
        yield self.high


@dataclass(eq=True)
class Aggregate(Expr):
    """``(others => value)``."""

    value: Expr
    span: SourceSpan = _span()
    ty: Any = _meta()

    def children(self):
        yield self.value


def walk(e: Expr) -> Iterator[Expr]:
    yield e
    for c in e.children():
        yield from walk(c)


def strip_parens(e: Expr) -> Expr:
    while isinstance(e, Paren):
        e = e.inner
    return e


# ----------------------------------------------------------------- statements

@dataclass(eq=True)
class Stmt:
    pass


@dataclass(eq=True)
class Assign(Stmt):
    target: Expr  # Name, or Call/Index for an element
    value: Expr
    span: SourceSpan = _span()


@dataclass(eq=True)
class If(Stmt):
    branches: list[tuple[Expr, list[Stmt]]]
    orelse: Optional[list[Stmt]] = None
    span: SourceSpan = _span()
    else_span: SourceSpan = _span()


@dataclass(eq=True)
class For(Stmt):
    var: str
    range: Range
    body: list[Stmt]
    span: SourceSpan = _span()
    loop_span: SourceSpan = _span()
    var_span: SourceSpan = _span()
    decl: Any = _meta()
    ident: int = field(default=0, compare=False, repr=False)


@dataclass(eq=True)
class Return(Stmt):
    value: Optional[Expr] = None
    span: SourceSpan = _span()


@dataclass(eq=True)
class Pragma(Stmt):
    name: str  # Assert | Loop_Invariant
    expr: Expr
    span: SourceSpan = _span()


@dataclass(eq=True)
class Null(Stmt):
    span: SourceSpan = _span()


# --------------------------------------------------------------- declarations

@dataclass(eq=True)
class TypeMark:
    name: str
    constraint: Optional[tuple[Expr, Expr]] = None
    span: SourceSpan = _span()


@dataclass(eq=True)
class Param:
    name: str
    mode: str  # in | out | in out
    type: TypeMark
    span: SourceSpan = _span()
    decl: Any = _meta()


@dataclass(eq=True)
class ObjectDecl:
    name: str
    type: TypeMark
    init: Optional[Expr] = None
    span: SourceSpan = _span()
    decl: Any = _meta()


@dataclass(eq=True)
class Aspects:
    pre: Optional[Expr] = None
    post: Optional[Expr] = None
    relaxed: list[str] = field(default_factory=list)
    variant: Optional[Expr] = None
    spark_mode: bool = False

    def empty(self) -> bool:
        return (self.pre is None and self.post is None and not self.relaxed
                and self.variant is None)


@dataclass(eq=True)
class Subprogram:
    """A procedure, regular function or expression function.

    A declaration without body has ``body is None and expr is None``; the
    driver merges it with the completing body when both are present.
    """

    kind: str  # procedure | function
    name: str
    params: list[Param]
    result: Optional[TypeMark]
    aspects: Aspects
    locals: list[ObjectDecl] = field(default_factory=list)
    body: Optional[list[Stmt]] = None
    expr: Optional[Expr] = None
    span: SourceSpan = _span()
    name_span: SourceSpan = _span()
    begin_span: SourceSpan = _span()
    end_span: SourceSpan = _span()
    spec_span: Optional[SourceSpan] = field(default=None, compare=False, repr=False)

    @property
    def is_expression_function(self) -> bool:
        return self.expr is not None

    @property
    def has_body(self) -> bool:
        return self.body is not None or self.expr is not None


@dataclass(eq=True)
class SubtypeDecl:
    name: str
    base: str
    low: Expr
    high: Expr
    span: SourceSpan = _span()


Decl = Union[Subprogram, SubtypeDecl]


@dataclass(eq=True)
class CompilationUnit:
    declarations: list[Decl]
    package: Optional[str] = None
    is_body: bool = False
    file: str = field(default="", compare=False)

    def subprograms(self) -> list[Subprogram]:
        return [d for d in self.declarations if isinstance(d, Subprogram)]

    def find(self, name: str) -> Optional[Subprogram]:
        for d in self.subprograms():
            if d.name.lower() == name.lower():
                return d
        return None


def stmt_exprs(s: Stmt) -> Iterator[Expr]:
    """Top-level expressions directly owned by a statement."""
    if isinstance(s, Assign):
        yield s.target
        yield s.value
    elif isinstance(s, If):
        for c, _ in s.branches:
            yield c
    elif isinstance(s, For):
        yield from s.range.exprs()
    elif isinstance(s, Return):
        if s.value is not None:
            yield s.value
    elif isinstance(s, Pragma):
        yield s.expr


def walk_stmts(stmts: list[Stmt]) -> Iterator[Stmt]:
    for s in stmts:
        yield s
        if isinstance(s, If):
            for _, b in s.branches:
                yield from walk_stmts(b)
            if s.orelse:
                yield from walk_stmts(s.orelse)
        elif isinstance(s, For):
            yield from walk_stmts(s.body)
