"""Source-level printing of syntax trees.

The output reparses to a structurally identical tree as long as the tree
carries ``Paren`` nodes wherever the grammar needs them; missing parentheses
are added defensively.
"""
from __future__ import annotations

from . import ast as A

# binding strength, higher binds tighter
_LOGICAL, _RELATION, _SIMPLE, _TERM, _FACTOR, _PRIMARY = range(6)

_LEVEL = {"and": _LOGICAL, "or": _LOGICAL, "and then": _LOGICAL, "or else": _LOGICAL,
          "=": _RELATION, "/=": _RELATION, "<": _RELATION, "<=": _RELATION,
          ">": _RELATION, ">=": _RELATION,
          "+": _SIMPLE, "-": _SIMPLE, "*": _TERM, "/": _TERM}


def _level(e: A.Expr) -> int:
    if isinstance(e, A.Binary):
        return _LEVEL[e.op]
    if isinstance(e, A.Membership):
        return _RELATION
    if isinstance(e, A.Unary):
        return _FACTOR if e.op == "not" else _SIMPLE
    return _PRIMARY


def _wrap(e: A.Expr, need: int) -> str:
    s = pretty(e)
    return f"({s})" if _level(e) < need else s


def _range(r: A.Range) -> str:
    if r.of is not None:
        return f"{_wrap(r.of, _PRIMARY)}'Range"
    return f"{_wrap(r.low, _SIMPLE)} .. {_wrap(r.high, _SIMPLE)}"


def _char(c: str) -> str:
    return f"'{c}'"


def pretty(node) -> str:
    """Print an expression or statement (statements at indent 0)."""
    if isinstance(node, A.Stmt):
        return "\n".join(pretty_stmt(node, 0))
    e = node
    if isinstance(e, A.IntLit):
        return str(e.value)
    if isinstance(e, A.CharLit):
        return _char(e.value)
    if isinstance(e, A.StrLit):
        return '"' + e.value.replace('"', '""') + '"'
    if isinstance(e, A.BoolLit):
        return "True" if e.value else "False"
    if isinstance(e, A.Name):
        return e.ident
    if isinstance(e, A.Attribute):
        return f"{_wrap(e.prefix, _PRIMARY)}'{e.attr}"
    if isinstance(e, A.Paren):
        return f"({pretty(e.inner)})"
    if isinstance(e, A.Unary):
        if e.op == "not":
            return f"not {_wrap(e.operand, _PRIMARY)}"
        return f"{e.op}{_wrap(e.operand, _TERM)}"
    if isinstance(e, A.Binary):
        lvl = _LEVEL[e.op]
        if lvl == _LOGICAL:
            # same-operator chains associate left
            left = pretty(e.left) if (isinstance(e.left, A.Binary) and e.left.op == e.op) \
                else _wrap(e.left, _RELATION)
            return f"{left} {e.op} {_wrap(e.right, _RELATION)}"
        if lvl == _RELATION:
            return f"{_wrap(e.left, _SIMPLE)} {e.op} {_wrap(e.right, _SIMPLE)}"
        return f"{_wrap(e.left, lvl)} {e.op} {_wrap(e.right, lvl + 1)}"
    if isinstance(e, A.Membership):
        neg = "not in" if e.negated else "in"
        return f"{_wrap(e.value, _SIMPLE)} {neg} {_range(e.range)}"
    if isinstance(e, A.IfExpr):
        s = f"(if {pretty(e.cond)} then {pretty(e.then)}"
        if e.orelse is not None:
            s += f" else {pretty(e.orelse)}"
        return s + ")"
    if isinstance(e, A.Quantified):
        q = "all" if e.universal else "some"
        return f"(for {q} {e.var} in {_range(e.range)} => {pretty(e.body)})"
    if isinstance(e, A.Call):
        return f"{e.name} ({', '.join(pretty(a) for a in e.args)})"
    if isinstance(e, A.Index):
        return f"{_wrap(e.prefix, _PRIMARY)} ({pretty(e.index)})"
    if isinstance(e, A.Slice):
        return f"{_wrap(e.prefix, _PRIMARY)} ({_wrap(e.low, _SIMPLE)} .. {_wrap(e.high, _SIMPLE)})"
    if isinstance(e, A.Aggregate):
        return f"(others => {pretty(e.value)})"
    raise TypeError(f"cannot print {type(e).__name__}")


def pretty_stmt(s: A.Stmt, indent: int) -> list[str]:
    pad = " " * indent
    if isinstance(s, A.Assign):
        return [f"{pad}{pretty(s.target)} := {pretty(s.value)};"]
    if isinstance(s, A.Null):
        return [f"{pad}null;"]
    if isinstance(s, A.Return):
        return [f"{pad}return;" if s.value is None else f"{pad}return {pretty(s.value)};"]
    if isinstance(s, A.Pragma):
        if isinstance(s.expr, (A.Quantified, A.IfExpr)):
            return [f"{pad}pragma {s.name} {pretty(s.expr)};"]
        return [f"{pad}pragma {s.name} ({pretty(s.expr)});"]
    if isinstance(s, A.If):
        out: list[str] = []
        for i, (cond, body) in enumerate(s.branches):
            out.append(f"{pad}{'if' if i == 0 else 'elsif'} {pretty(cond)} then")
            for b in body:
                out.extend(pretty_stmt(b, indent + 3))
        if s.orelse is not None:
            out.append(f"{pad}else")
            for b in s.orelse:
                out.extend(pretty_stmt(b, indent + 3))
        out.append(f"{pad}end if;")
        return out
    if isinstance(s, A.For):
        out = [f"{pad}for {s.var} in {_range(s.range)} loop"]
        for b in s.body:
            out.extend(pretty_stmt(b, indent + 3))
        out.append(f"{pad}end loop;")
        return out
    raise TypeError(f"cannot print {type(s).__name__}")


def _type_mark(t: A.TypeMark) -> str:
    if t.constraint is None:
        return t.name
    lo, hi = t.constraint
    return f"{t.name} ({_wrap(lo, _SIMPLE)} .. {_wrap(hi, _SIMPLE)})"


def _aspects(a: A.Aspects) -> list[str]:
    items = []
    if a.spark_mode:
        items.append("SPARK_Mode")
    if a.pre is not None:
        items.append(f"Pre => {pretty(a.pre)}")
    if a.post is not None:
        items.append(f"Post => {pretty(a.post)}")
    if a.relaxed:
        names = a.relaxed[0] if len(a.relaxed) == 1 else f"({', '.join(a.relaxed)})"
        items.append(f"Relaxed_Initialization => {names}")
    if a.variant is not None:
        items.append(f"Subprogram_Variant => (Decreases => {pretty(a.variant)})")
    return items


def pretty_subprogram(sp: A.Subprogram, indent: int = 0) -> list[str]:
    pad = " " * indent
    head = f"{pad}{sp.kind} {sp.name}"
    if sp.params:
        head += " (" + "; ".join(f"{p.name} : {'' if p.mode == 'in' else p.mode + ' '}"
                                 f"{_type_mark(p.type)}" for p in sp.params) + ")"
    if sp.result is not None:
        head += f" return {_type_mark(sp.result)}"
    aspects = _aspects(sp.aspects)
    out = [head]
    if sp.expr is not None:
        out.append(f"{pad}  is {pretty(sp.expr)}")
        if aspects:
            out.append(f"{pad}  with " + f",\n{pad}       ".join(aspects))
        out[-1] += ";"
        return out
    if aspects:
        out.append(f"{pad}  with " + f",\n{pad}       ".join(aspects))
    if sp.body is None:
        out[-1] += ";"
        return out
    out[-1] += " is"
    for d in sp.locals:
        init = f" := {pretty(d.init)}" if d.init is not None else ""
        out.append(f"{pad}   {d.name} : {_type_mark(d.type)}{init};")
    out.append(f"{pad}begin")
    for s in sp.body:
        out.extend(pretty_stmt(s, indent + 3))
    out.append(f"{pad}end {sp.name};")
    return out


def pretty_unit(unit: A.CompilationUnit) -> str:
    out: list[str] = []
    indent = 0
    if unit.package is not None:
        out.append(f"package {'body ' if unit.is_body else ''}{unit.package} is")
        indent = 3
    for d in unit.declarations:
        if isinstance(d, A.SubtypeDecl):
            out.append(f"{' ' * indent}subtype {d.name} is {d.base} range "
                       f"{_wrap(d.low, _SIMPLE)} .. {_wrap(d.high, _SIMPLE)};")
        else:
            out.extend(pretty_subprogram(d, indent))
    if unit.package is not None:
        out.append(f"end {unit.package};")
    return "\n".join(out) + "\n"
