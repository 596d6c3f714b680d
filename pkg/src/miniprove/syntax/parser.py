"""Recursive-descent parser for the Mini language."""
from __future__ import annotations

from typing import Optional

from . import ast as A
from .lexer import FrontEndError, Token, tokenize

ATTRIBUTES = {"first": "First", "last": "Last", "length": "Length",
              "range": "Range", "initialized": "Initialized", "result": "Result"}

RELOPS = {"eq": "=", "ne": "/=", "lt": "<", "le": "<=", "gt": ">", "ge": ">="}


class ParseError(FrontEndError):
    def __init__(self, span: A.SourceSpan, message: str, expected: frozenset[str] = frozenset()):
        super().__init__(span, message)
        self.expected = expected


class Parser:
    def __init__(self, tokens: list[Token], file: str = "<input>", source: str = ""):
        self.toks = tokens
        self.pos = 0
        self.file = file
        if tokens:
            last = tokens[-1].span
            eof = A.SourceSpan(file, last.line, last.column + last.length, 1,
                               last.offset + last.length)
        else:
            eof = A.SourceSpan(file, 1, 1, 1, 0)
        self.eof = Token("eof", "", eof)

    # ------------------------------------------------------------ primitives

    @property
    def tok(self) -> Token:
        return self.toks[self.pos] if self.pos < len(self.toks) else self.eof

    def peek(self, k: int = 1) -> Token:
        j = self.pos + k
        return self.toks[j] if j < len(self.toks) else self.eof

    def at(self, kind: str, value: Optional[str] = None) -> bool:
        t = self.tok
        if value is None:
            return t.kind == kind
        return t.kind == kind and t.value == value

    def at_kw(self, *words: str) -> bool:
        return self.tok.kind == "keyword" and self.tok.value in words

    def accept(self, kind: str, value: Optional[str] = None) -> Optional[Token]:
        if self.at(kind, value):
            t = self.tok
            self.pos += 1
            return t
        return None

    def accept_kw(self, word: str) -> Optional[Token]:
        return self.accept("keyword", word)

    def expect(self, kind: str, value: Optional[str] = None) -> Token:
        t = self.accept(kind, value)
        if t is None:
            want = value if value is not None else kind
            self.error(frozenset([want]))
        return t  # type: ignore[return-value]

    def expect_kw(self, word: str) -> Token:
        return self.expect("keyword", word)

    def expect_ident(self, value: Optional[str] = None) -> Token:
        return self.expect("ident", value)

    def error(self, expected: frozenset[str]):
        t = self.tok
        found = "end of input" if t.kind == "eof" else repr(t.text)
        exp = ", ".join(sorted(expected))
        raise ParseError(t.span, f"syntax error: found {found}, expected {exp}", expected)

    def prev_end(self, start: A.SourceSpan) -> A.SourceSpan:
        """Span from start to the end of the previously consumed token."""
        last = self.toks[self.pos - 1].span
        return start.through(last) if last.line == start.line else start

    # ----------------------------------------------------------------- units

    def parse_unit(self) -> A.CompilationUnit:
        package, is_body = None, False
        if self.accept_kw("package"):
            is_body = self.accept_kw("body") is not None
            package = self.expect_ident().text
            if self.accept_kw("with"):
                self.parse_aspects_list()
            self.expect_kw("is")
            decls = self.parse_decls(until=("end",))
            self.expect_kw("end")
            if self.at("ident"):
                self.pos += 1
            self.expect("semicolon")
        else:
            decls = self.parse_decls(until=())
        if self.tok.kind != "eof":
            self.error(frozenset(["procedure", "function", "subtype", "end of input"]))
        return A.CompilationUnit(decls, package, is_body, self.file)

    def parse_decls(self, until: tuple[str, ...]) -> list[A.Decl]:
        decls: list[A.Decl] = []
        while True:
            if self.tok.kind == "eof" or self.at_kw(*until):
                return decls
            if self.at_kw("procedure", "function"):
                decls.append(self.parse_subprogram())
            elif self.at_kw("subtype"):
                decls.append(self.parse_subtype())
            else:
                self.error(frozenset(["procedure", "function", "subtype"] + list(until)))

    def parse_subtype(self) -> A.SubtypeDecl:
        start = self.expect_kw("subtype").span
        name = self.expect_ident().text
        self.expect_kw("is")
        base = self.expect_ident().text
        self.expect_kw("range")
        low = self.parse_simple()
        self.expect("dotdot")
        high = self.parse_simple()
        self.expect("semicolon")
        return A.SubtypeDecl(name, base, low, high, span=start)

    def parse_subprogram(self) -> A.Subprogram:
        kw = self.tok
        self.pos += 1
        name_tok = self.expect_ident()
        params = self.parse_params() if self.at("lparen") else []
        result = None
        if kw.value == "function":
            self.expect_kw("return")
            result = self.parse_type_mark(allow_constraint=False)
        sub = A.Subprogram(kw.value, name_tok.text, params, result, A.Aspects(),
                           span=kw.span, name_span=name_tok.span)
        if self.accept_kw("with"):
            sub.aspects = self.parse_aspects_list()
        if self.accept("semicolon"):
            return sub
        self.expect_kw("is")
        if kw.value == "function" and self.at("lparen"):
            start = self.tok.span
            sub.expr = self.parse_primary()
            sub.begin_span = start
            if self.accept_kw("with"):
                if not sub.aspects.empty():
                    self.error(frozenset([";"]))
                sub.aspects = self.parse_aspects_list()
            self.expect("semicolon")
            return sub
        sub.locals = self.parse_locals()
        sub.begin_span = self.expect_kw("begin").span
        sub.body = self.parse_stmts(("end",))
        sub.end_span = self.expect_kw("end").span
        if self.at("ident"):
            end_name = self.expect_ident()
            if end_name.value != name_tok.value:
                raise ParseError(end_name.span,
                                 f"syntax error: \"{end_name.text}\" does not match "
                                 f"\"{name_tok.text}\"", frozenset([name_tok.text]))
        self.expect("semicolon")
        return sub

    def parse_params(self) -> list[A.Param]:
        self.expect("lparen")
        params: list[A.Param] = []
        while True:
            names = [self.expect_ident()]
            while self.accept("comma"):
                names.append(self.expect_ident())
            self.expect("colon")
            mode = "in"
            if self.accept_kw("in"):
                mode = "in out" if self.accept_kw("out") else "in"
            elif self.accept_kw("out"):
                mode = "out"
            tm = self.parse_type_mark(allow_constraint=False)
            for n in names:
                params.append(A.Param(n.text, mode, tm, span=n.span))
            if not self.accept("semicolon"):
                break
        self.expect("rparen")
        return params

    def parse_type_mark(self, allow_constraint: bool = True) -> A.TypeMark:
        t = self.expect_ident()
        constraint = None
        if allow_constraint and self.accept("lparen"):
            low = self.parse_simple()
            self.expect("dotdot")
            high = self.parse_simple()
            self.expect("rparen")
            constraint = (low, high)
        return A.TypeMark(t.text, constraint, span=t.span)

    def parse_aspects_list(self) -> A.Aspects:
        asp = A.Aspects()
        while True:
            name = self.expect_ident()
            key = name.value
            if key == "spark_mode":
                asp.spark_mode = True
                if self.accept("arrow"):
                    self.expect_ident()
            else:
                self.expect("arrow")
                if key == "pre":
                    asp.pre = self.parse_expr()
                elif key == "post":
                    asp.post = self.parse_expr()
                elif key == "relaxed_initialization":
                    if self.accept("lparen"):
                        asp.relaxed.append(self.expect_ident().text)
                        while self.accept("comma"):
                            asp.relaxed.append(self.expect_ident().text)
                        self.expect("rparen")
                    else:
                        asp.relaxed.append(self.expect_ident().text)
                elif key == "subprogram_variant":
                    self.expect("lparen")
                    self.expect_ident("decreases")
                    self.expect("arrow")
                    asp.variant = self.parse_expr()
                    self.expect("rparen")
                else:
                    raise ParseError(name.span, f"syntax error: unknown aspect \"{name.text}\"",
                                     frozenset(["Pre", "Post", "Relaxed_Initialization",
                                                "Subprogram_Variant", "SPARK_Mode"]))
            if not self.accept("comma"):
                return asp

    def parse_locals(self) -> list[A.ObjectDecl]:
        decls: list[A.ObjectDecl] = []
        while self.at("ident"):
            names = [self.expect_ident()]
            while self.accept("comma"):
                names.append(self.expect_ident())
            self.expect("colon")
            tm = self.parse_type_mark()
            init = self.parse_expr() if self.accept("assign") else None
            self.expect("semicolon")
            for n in names:
                decls.append(A.ObjectDecl(n.text, tm, init, span=n.span))
        return decls

    # ------------------------------------------------------------ statements

    def parse_stmts(self, until: tuple[str, ...]) -> list[A.Stmt]:
        stmts: list[A.Stmt] = []
        while not self.at_kw(*until):
            if self.tok.kind == "eof":
                self.error(frozenset(until))
            stmts.append(self.parse_stmt())
        return stmts

    def parse_stmt(self) -> A.Stmt:
        t = self.tok
        if self.accept_kw("null"):
            self.expect("semicolon")
            return A.Null(span=t.span)
        if self.accept_kw("return"):
            value = None if self.at("semicolon") else self.parse_expr()
            self.expect("semicolon")
            return A.Return(value, span=t.span)
        if self.accept_kw("pragma"):
            name = self.expect_ident()
            canon = {"assert": "Assert", "loop_invariant": "Loop_Invariant"}.get(name.value)
            if canon is None:
                raise ParseError(name.span, f"syntax error: unknown pragma \"{name.text}\"",
                                 frozenset(["Assert", "Loop_Invariant"]))
            if self.shared_parens():
                e = self.parse_primary()
            else:
                self.expect("lparen")
                e = self.parse_expr()
                self.expect("rparen")
            self.expect("semicolon")
            return A.Pragma(canon, e, span=t.span)
        if self.accept_kw("if"):
            branches = []
            cond = self.parse_expr()
            self.expect_kw("then")
            branches.append((cond, self.parse_stmts(("elsif", "else", "end"))))
            orelse = None
            else_span = A.NOSPAN
            while self.accept_kw("elsif"):
                cond = self.parse_expr()
                self.expect_kw("then")
                branches.append((cond, self.parse_stmts(("elsif", "else", "end"))))
            e = self.accept_kw("else")
            if e:
                else_span = e.span
                orelse = self.parse_stmts(("end",))
            self.expect_kw("end")
            self.expect_kw("if")
            self.expect("semicolon")
            return A.If(branches, orelse, span=t.span, else_span=else_span)
        if self.accept_kw("for"):
            var = self.expect_ident()
            self.expect_kw("in")
            rng = self.parse_range()
            loop_tok = self.expect_kw("loop")
            body = self.parse_stmts(("end",))
            self.expect_kw("end")
            self.expect_kw("loop")
            self.expect("semicolon")
            return A.For(var.text, rng, body, span=t.span, loop_span=loop_tok.span,
                         var_span=var.span)
        if self.at("ident"):
            target = self.parse_name()
            self.expect("assign")
            value = self.parse_expr()
            self.expect("semicolon")
            return A.Assign(target, value, span=t.span)
        self.error(frozenset(["statement"]))
        raise AssertionError  # unreachable

    def shared_parens(self) -> bool:
        """True at '(' opening a conditional or quantified expression."""
        return self.at("lparen") and self.peek().kind == "keyword" and \
            self.peek().value in ("if", "for")

    def parse_range(self) -> A.Range:
        start = self.tok.span
        low = self.parse_simple()
        if self.accept("dotdot"):
            high = self.parse_simple()
            return A.Range(low, high, span=start)
        if isinstance(low, A.Attribute) and low.attr == "Range":
            return A.Range(of=low.prefix, span=start)
        self.error(frozenset([".."]))
        raise AssertionError

    # ----------------------------------------------------------- expressions

    def parse_expr(self) -> A.Expr:
        left = self.parse_relation()
        op_kind: Optional[str] = None
        while self.at_kw("and", "or"):
            op_tok = self.tok
            self.pos += 1
            op = op_tok.value
            if op == "and" and self.accept_kw("then"):
                op = "and then"
            elif op == "or" and self.accept_kw("else"):
                op = "or else"
            if op_kind is not None and op != op_kind:
                raise ParseError(op_tok.span, "syntax error: mixed logical operators "
                                 "require parentheses", frozenset([op_kind]))
            op_kind = op
            right = self.parse_relation()
            left = A.Binary(op, left, right, span=left.span.through(right.span),
                            op_span=op_tok.span)
        return left

    def parse_relation(self) -> A.Expr:
        left = self.parse_simple()
        if self.tok.kind in RELOPS:
            op_tok = self.tok
            self.pos += 1
            right = self.parse_simple()
            return A.Binary(RELOPS[op_tok.kind], left, right,
                            span=left.span.through(right.span), op_span=op_tok.span)
        negated = False
        if self.at_kw("not") and self.peek().kind == "keyword" and self.peek().value == "in":
            self.pos += 1
            negated = True
        if negated or self.at_kw("in"):
            self.expect_kw("in")
            rng = self.parse_range()
            end = rng.high if rng.high is not None else rng.of
            return A.Membership(left, rng, negated, span=left.span.through(end.span))
        return left

    def parse_simple(self) -> A.Expr:
        t = self.tok
        if self.at("minus") or self.at("plus"):
            self.pos += 1
            operand = self.parse_term()
            left: A.Expr = A.Unary(t.text, operand, span=t.span.through(operand.span))
        else:
            left = self.parse_term()
        while self.at("plus") or self.at("minus"):
            op_tok = self.tok
            self.pos += 1
            right = self.parse_term()
            left = A.Binary(op_tok.text, left, right, span=left.span.through(right.span),
                            op_span=op_tok.span)
        return left

    def parse_term(self) -> A.Expr:
        left = self.parse_factor()
        while self.at("star") or self.at("slash"):
            op_tok = self.tok
            self.pos += 1
            right = self.parse_factor()
            left = A.Binary(op_tok.text, left, right, span=left.span.through(right.span),
                            op_span=op_tok.span)
        return left

    def parse_factor(self) -> A.Expr:
        t = self.tok
        if self.accept_kw("not"):
            operand = self.parse_primary()
            return A.Unary("not", operand, span=t.span.through(operand.span))
        return self.parse_primary()

    def parse_primary(self) -> A.Expr:
        t = self.tok
        if self.accept("int"):
            return A.IntLit(int(t.text), span=t.span)
        if self.accept("charlit"):
            return A.CharLit(t.text, span=t.span)
        if self.accept("strlit"):
            return A.StrLit(t.text, span=t.span)
        if self.at("ident"):
            if t.value in ("true", "false"):
                self.pos += 1
                return A.BoolLit(t.value == "true", span=t.span)
            return self.parse_name()
        if self.accept("lparen"):
            if self.accept_kw("if"):
                cond = self.parse_expr()
                self.expect_kw("then")
                then = self.parse_expr()
                orelse = self.parse_expr() if self.accept_kw("else") else None
                self.expect("rparen")
                return A.IfExpr(cond, then, orelse, span=self.prev_end(t.span))
            if self.accept_kw("for"):
                if self.accept_kw("all"):
                    universal = True
                else:
                    self.expect_kw("some")
                    universal = False
                var = self.expect_ident()
                self.expect_kw("in")
                rng = self.parse_range()
                self.expect("arrow")
                body = self.parse_expr()
                self.expect("rparen")
                return A.Quantified(universal, var.text, rng, body,
                                    span=self.prev_end(t.span), var_span=var.span)
            if self.accept_kw("others"):
                self.expect("arrow")
                value = self.parse_expr()
                self.expect("rparen")
                return A.Aggregate(value, span=self.prev_end(t.span))
            inner = self.parse_expr()
            self.expect("rparen")
            return A.Paren(inner, span=self.prev_end(t.span))
        self.error(frozenset(["expression"]))
        raise AssertionError

    def parse_name(self) -> A.Expr:
        t = self.expect_ident()
        e: A.Expr = A.Name(t.text, span=t.span)
        while True:
            if self.at("lparen"):
                if self.shared_parens():
                    # F (for all ...): the argument shares the call's parentheses
                    arg = self.parse_primary()
                    span = e.span.through(arg.span)
                    if isinstance(e, A.Name):
                        e = A.Call(e.ident, [arg], span=span, name_span=e.span)
                    else:
                        e = A.Index(e, arg, span=span)
                    continue
                self.pos += 1
                first = self.parse_expr()
                if self.accept("dotdot"):
                    high = self.parse_simple()
                    self.expect("rparen")
                    # GNAT-style sloc: the node ends at its last operand, not at ')'
                    e = A.Slice(e, first, high, span=e.span.through(high.span))
                    continue
                args = [first]
                while self.accept("comma"):
                    args.append(self.parse_expr())
                self.expect("rparen")
                span = e.span.through(args[-1].span)
                if isinstance(e, A.Name):
                    e = A.Call(e.ident, args, span=span, name_span=e.span)
                elif len(args) == 1:
                    e = A.Index(e, args[0], span=span)
                else:
                    raise ParseError(args[1].span, "syntax error: multi-dimensional "
                                     "indexing is not supported", frozenset([")"]))
            elif self.at("tick"):
                self.pos += 1
                a = self.tok
                if a.kind not in ("ident", "keyword") or a.value not in ATTRIBUTES:
                    self.error(frozenset(ATTRIBUTES.values()))
                self.pos += 1
                e = A.Attribute(e, ATTRIBUTES[a.value], span=e.span.through(a.span))
            else:
                return e


def parse_unit(tokens: list[Token], file: str = "<input>") -> A.CompilationUnit:
    return Parser(tokens, file).parse_unit()


def parse_source(source: str, file: str = "<input>") -> A.CompilationUnit:
    return parse_unit(tokenize(source, file), file)


def parse_expression(source: str, file: str = "<input>") -> A.Expr:
    p = Parser(tokenize(source, file), file)
    e = p.parse_expr()
    if p.tok.kind != "eof":
        p.error(frozenset(["end of input"]))
    return e


def parse_statements(source: str, file: str = "<input>") -> list[A.Stmt]:
    p = Parser(tokenize(source, file), file)
    stmts = []
    while p.tok.kind != "eof":
        stmts.append(p.parse_stmt())
    return stmts
