"""Splitting a verification condition into its smallest sub-properties."""
from __future__ import annotations

from dataclasses import replace

from . import logic as L
from .generate import Hypothesis, SymbolInfo, VerificationCondition


def split_vc(vc: VerificationCondition) -> list[VerificationCondition]:
    """Leaves of ``vc``: conjunctions are split, bounded universal goals
    introduce a fresh symbol, and implication antecedents become hypotheses.

    A goal that folds to True yields no leaf.
    """
    taken = {s.var.base for s in vc.symbols}
    out: list[VerificationCondition] = []
    _split(vc, vc.goal, list(vc.symbols), list(vc.hypotheses), taken, out)
    return out


def _fresh_name(taken: set[str]) -> str:
    name, n = "_f", 0
    while name in taken:
        n += 1
        name = f"_f{n}"
    taken.add(name)
    return name


def _split(vc, goal, symbols, hyps, taken, out):
    if goal == L.TRUE:
        return
    if isinstance(goal, L.App) and goal.op == "and":
        a, b = goal.args
        _split(vc, a, symbols, hyps, taken, out)
        extra = []
        if goal.src is not None and getattr(goal.src, "op", None) == "and then":
            extra = [Hypothesis(a, None, "intro")]
        _split(vc, b, symbols, hyps + extra, taken, out)
        return
    if isinstance(goal, L.App) and goal.op == "->":
        a, b = goal.args
        _split(vc, b, symbols, hyps + [Hypothesis(a, None, "intro")], taken, out)
        return
    if isinstance(goal, L.Quant) and goal.universal:
        f = L.Var(_fresh_name(taken), L.INT)
        info = SymbolInfo(f, "fresh", dyn=(goal.lo, goal.hi), source=goal.var.base)
        rng = L.and_(L.le(goal.lo, f), L.le(f, goal.hi))
        body = L.subst(goal.body, {goal.var: f})
        if body.src is None:
            body = L.with_src(body, goal.body.src)
        _split(vc, body, symbols + [info], hyps + [Hypothesis(rng, None, "intro")], taken, out)
        return
    out.append(replace(vc, goal=goal, symbols=symbols, hypotheses=hyps,
                       leaf_src=goal.src if goal.src is not None else vc.leaf_src))
