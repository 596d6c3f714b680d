from __future__ import annotations

import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import load_sources
from miniprove import sema as S
from miniprove.syntax import FrontEndError, parse_expression


def test_predefined_ranges():
    assert (S.INT_MIN, S.INT_MAX) == (-2 ** 31, 2 ** 31 - 1)
    assert S.NATURAL.lo == 0 and S.POSITIVE.lo == 1


def _ada_div(a: int, b: int) -> int:
    q = abs(a) // abs(b)
    return q if (a >= 0) == (b >= 0) else -q


@settings(max_examples=200, deadline=None)
@given(st.integers(-50, 50), st.integers(-50, 50), st.sampled_from("+-*/"))
def test_static_value_matches_integer_semantics(a, b, op):
    # oracle: derived (Python integer arithmetic with truncating division)
    e = parse_expression(f"({a}) {op} ({b})")
    got = S.static_value(e)
    if op == "/":
        assert got == (None if b == 0 else _ada_div(a, b))
    else:
        assert got == {"+": a + b, "-": a - b, "*": a * b}[op]


def test_static_value_rejects_names():
    assert S.static_value(parse_expression("S'Length")) is None


def test_iteration_counts(scenario):
    s2 = scenario("s2_index")
    (shape,) = s2.table.loops.values()
    assert S.iteration_count(shape) == "dynamic"
    loaded = load_sources({"p.adb": """package body P is
   procedure Q (X : out Integer) is
   begin
      X := 0;
      for I in 1 .. 20 loop
         X := X + 1;
      end loop;
      for I in 3 .. 2 loop
         X := 0;
      end loop;
   end Q;
end P;
"""})
    counts = sorted(S.iteration_count(s) for s in loaded.table.loops.values())
    assert counts == [0, 20]


def test_function_classes(scenario):
    # oracle: reference transcripts (recursive, regular and expression function variants)
    s3 = scenario("s3_frame")
    assert s3.analysis.classes["All_Blanks"] == S.FunctionClass(
        "expression_function", False, '"All_Blanks" might not return')
    s4 = scenario("s4_contract")
    assert s4.analysis.classes["All_Blanks"].kind == "regular_function"
    s5 = scenario("s5a_flow")
    assert s5.analysis.classes["All_Blanks"] == S.FunctionClass("expression_function", True)
    assert s5.analysis.classes["Erase"].kind == "procedure"


def test_recursive_call_sites(scenario):
    s3 = scenario("s3_frame")
    sp = s3.unit.find("All_Blanks")
    sites = S.recursive_call_sites(sp, S.build_call_graph(s3.unit))
    assert [(c.span.line, c.span.column) for c in sites] == [(6, 18)]


def _reach(edges, a, b):
    seen, todo = set(), [a]
    while todo:
        x = todo.pop()
        for y in edges.get(x, ()):
            if y not in seen:
                seen.add(y)
                todo.append(y)
    return b in seen


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 6).flatmap(
    lambda n: st.sets(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)))
    .map(lambda es: (n, es))))
def test_scc_matches_mutual_reachability(graph):
    # oracle: derived (brute-force reachability)
    n, es = graph
    nodes = [f"F{i}" for i in range(n)]
    edges = {f"F{i}": set() for i in range(n)}
    for a, b in es:
        edges[f"F{a}"].add(f"F{b}")
    comps = S.strongly_connected(nodes, edges)
    where = {x: i for i, c in enumerate(comps) for x in c}
    assert sorted(where) == sorted(nodes)
    for a, b in itertools.product(nodes, nodes):
        same = a == b or (_reach(edges, a, b) and _reach(edges, b, a))
        assert (where[a] == where[b]) == same


@pytest.mark.parametrize("body, message", [
    ("X := Z;", "Z"),
    ("X := 'a';", "type mismatch"),
])
def test_resolution_errors(body, message):
    src = f"package body P is\n   procedure Q (X : out Integer) is\n   begin\n      {body}\n   end Q;\nend P;\n"
    with pytest.raises(FrontEndError) as info:
        load_sources({"p.adb": src})
    assert message in str(info.value)
    assert info.value.span.line == 4


def test_merge_rejects_two_contracts():
    spec = "package P is\n   procedure Q (X : out Integer) with Post => X = 0;\nend P;\n"
    body = ("package body P is\n   procedure Q (X : out Integer) with Post => X = 1 is\n"
            "   begin\n      X := 0;\n   end Q;\nend P;\n")
    with pytest.raises(FrontEndError, match="given twice"):
        load_sources({"p.ads": spec, "p.adb": body})


def test_write_set_of_loop(scenario):
    s2 = scenario("s2_index")
    (shape,) = s2.table.loops.values()
    assert [v.name for v in shape.write_set] == ["S"]
