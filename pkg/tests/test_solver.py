from __future__ import annotations

import itertools
import shutil

import pytest
from conftest import make_vc
from hypothesis import given, settings
from hypothesis import strategies as st

from miniprove.solver import (Counterexample, DomainBounds, NoModelWithinBounds, Proved,
                              ResourceOut, Satisfiable, check_consistency, check_validity,
                              evaluate_in_model, export_smtlib, int_order, run_external)
from miniprove.vcgen import CheckKind, split_vc
from miniprove.vcgen import logic as L
from miniprove.vcgen.evaluate import ConcreteArr


def first_index_leaf(scenario):
    s2 = scenario("s2_index")
    r = s2.vcs("Erase")
    (ob,) = [o for o in r.obligations if o.kind is CheckKind.ARRAY_INDEX]
    for vc in r.vcs[ob.id]:
        for leaf in split_vc(vc):
            if not isinstance(check_validity(leaf), Proved):
                return leaf
    raise AssertionError("index check unexpectedly proved")


def test_int_order():
    assert int_order(-2, 2) == [0, -1, 1, -2, 2]
    assert int_order(1, 3) == [1, 2, 3]


def test_bounds_parse_and_scale():
    b = DomainBounds.parse("-4:4:3")
    assert (b.int_lo, b.int_hi, b.max_len) == (-4, 4, 3)
    assert b.scaled(2).budget == 100 * b.budget
    with pytest.raises(ValueError):
        DomainBounds.parse("4:-4:3")


def _brute_force_first_model(leaf, bounds):
    """First falsifying assignment in the documented enumeration order."""
    free = [s for s in leaf.symbols if s.definition is None]
    bound_syms = [s for s in free if s.role == "bound"]
    scalars = [s for s in free if s.role != "bound" and s.var.sort not in L.ARRAY_SORTS]
    arrays = [s for s in free if s.var.sort in L.ARRAY_SORTS]
    assert not scalars, "oracle covers the array-only signature of this VC"

    def domain(s):
        if s.var.base.endswith("'First"):
            return int_order(1, bounds.max_len)
        return int_order(0, bounds.max_len + 1)

    for values in itertools.product(*(domain(s) for s in bound_syms)):
        model = {s.var: v for s, v in zip(bound_syms, values)}
        lengths = []
        ok = True
        for arr in arrays:
            f, l = model[arr.bounds[0]], model[arr.bounds[1]]
            if l - f + 1 > bounds.max_len or l < f - 1:
                ok = False
            lengths.append(max(0, l - f + 1))
        if not ok:
            continue
        for contents in itertools.product(*(itertools.product(bounds.alphabet, repeat=n)
                                            for n in lengths)):
            m = dict(model)
            for arr, data in zip(arrays, contents):
                m[arr.var] = ConcreteArr(model[arr.bounds[0]], model[arr.bounds[1]], data)
            hyps = all(evaluate_in_model(leaf, h.formula, m, bounds) is True
                       for h in leaf.hypotheses)
            if hyps and evaluate_in_model(leaf, leaf.goal, m, bounds) is False:
                return m
    return None


def test_first_model_matches_exhaustive_enumeration(scenario):
    # oracle: derived (brute force); reference transcript gives S'First = 2
    leaf = first_index_leaf(scenario)
    bounds = DomainBounds()
    res = check_validity(leaf, bounds)
    assert isinstance(res, Counterexample)
    expected = _brute_force_first_model(leaf, bounds)
    names = {s.var: s.var.base for s in leaf.symbols}
    got = {names[v]: x for v, x in res.model.items() if isinstance(v, L.Var) and v.sort == L.INT}
    want = {names[v]: x for v, x in expected.items() if v.sort == L.INT}
    assert got == want
    assert got["S'First"] == 2 and got["S'Last"] == 2


def test_counterexamples_are_honest(scenario):
    for name in ("s2_index", "s3_frame", "s4_contract", "s5b_relaxed"):
        loaded = scenario(name)
        for sp in loaded.unit.subprograms():
            r = loaded.vcs(sp.name)
            for vcs in r.vcs.values():
                for vc in vcs:
                    for leaf in split_vc(vc):
                        res = check_validity(leaf)
                        if not isinstance(res, Counterexample):
                            continue
                        for h in leaf.hypotheses:
                            assert evaluate_in_model(leaf, h.formula, res.model) is True
                        assert evaluate_in_model(leaf, leaf.goal, res.model) is False


def test_tiny_budget_gives_resource_out(scenario):
    leaf = first_index_leaf(scenario)
    res = check_validity(leaf, DomainBounds(budget=1))
    assert isinstance(res, ResourceOut)


def test_consistency():
    x = L.Var("X", L.INT)
    from miniprove.vcgen import Hypothesis, SymbolInfo
    syms = [SymbolInfo(x, "input", lo=-8, hi=8, source="X")]
    sat = check_consistency(syms, [Hypothesis(L.lt(L.const_int(0), x), None, "pre")], {},
                            DomainBounds())
    assert isinstance(sat, Satisfiable) and sat.model[x] == 1
    contradictory = [Hypothesis(L.lt(L.const_int(0), x), None, "pre"),
                     Hypothesis(L.lt(x, L.const_int(0)), None, "pre")]
    assert isinstance(check_consistency(syms, contradictory, {}, DomainBounds()),
                      NoModelWithinBounds)


@settings(max_examples=100, deadline=None)
@given(st.integers(-3, 3), st.integers(-3, 3), st.sampled_from(["<", "<=", "=", ">="]))
def test_linear_goal_agrees_with_enumeration(a, b, op):
    # oracle: derived (direct enumeration of X over the window)
    from miniprove.vcgen import SymbolInfo
    x = L.Var("X", L.INT)
    lhs = L.add(L.app("*", L.const_int(a), x, sort=L.INT), L.const_int(b))
    goal = L.app(op, lhs, L.const_int(0), sort=L.BOOL)
    vc = make_vc([SymbolInfo(x, "input", lo=-8, hi=8, source="X")], goal)
    pyop = {"<": lambda p: p < 0, "<=": lambda p: p <= 0, "=": lambda p: p == 0,
            ">=": lambda p: p >= 0}[op]
    valid = all(pyop(a * v + b) for v in range(-8, 9))
    res = check_validity(vc)
    assert isinstance(res, Proved) == valid
    if not valid:
        assert res.model[x] == next(v for v in int_order(-8, 8) if not pyop(a * v + b))


def test_smtlib_export_shape(scenario):
    leaf = first_index_leaf(scenario)
    text = export_smtlib(leaf)
    assert text.startswith("; strings.adb:6:13:array_index:1")
    assert ":named H1)" in text
    assert text.endswith("(check-sat)\n(get-model)\n")


def test_external_solver_without_command_is_resource_out(monkeypatch):
    monkeypatch.delenv("MINIPROVE_SMT_SOLVER", raising=False)
    assert isinstance(run_external("(check-sat)"), ResourceOut)


@pytest.mark.skipif(shutil.which("z3") is None, reason="z3 not installed")
def test_z3_agrees_on_scenarios(scenario):
    # proved leaves of the fully proved scenario are unsat; the index leaf is sat
    leaf = first_index_leaf(scenario)
    assert isinstance(run_external(export_smtlib(leaf), "z3 -in"), Counterexample)
    s5 = scenario("s5c_proved")
    for sp in s5.unit.subprograms():
        r = s5.vcs(sp.name)
        for vcs in r.vcs.values():
            for vc in vcs:
                for x in split_vc(vc):
                    assert isinstance(run_external(export_smtlib(x), "z3 -in -T:20"), Proved)
