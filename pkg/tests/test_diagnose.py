from __future__ import annotations

import io
import json

import pytest

from conftest import SCENARIOS, scenario_files
from miniprove import driver
from miniprove.diagnose import Diagnostic, format_text, sort_diagnostics
from miniprove.syntax import SourceSpan

PRE_AND = """package body P is

   procedure Q (X : Integer; Y : Integer; R : out Integer)
     with Pre => X /= 0 and Y / X > 1
   is
   begin
      R := Y;
   end Q;

   procedure T (X : Integer; R : out Integer) is
   begin
      R := X + 1;
      R := 10 / (R - 2);
   end T;

end P;
"""

DEAD = """package body P is

   procedure D (X : Integer; R : out Integer)
     with Pre => X > 0 and then X < 0
   is
   begin
      R := X;
   end D;

end P;
"""


def cli(tmp_path, sources: dict[str, str], *flags: str) -> tuple[int, str]:
    paths = []
    for name, text in sources.items():
        p = tmp_path / name
        p.write_text(text)
        paths.append(str(p))
    buf = io.StringIO()
    code = driver.main(list(flags) + paths, stdout=buf)
    return code, buf.getvalue()


def test_and_then_hint(tmp_path):
    code, out = cli(tmp_path, {"p.adb": PRE_AND})
    assert code == 1
    assert out.splitlines()[:5] == [
        "p.adb:4:31: medium: divide by zero might fail",
        "    4 |     with Pre => X /= 0 and Y / X > 1",
        "      |                              ^ here",
        "  reason for check: divisor must be nonzero",
        '  possible fix: use "and then" instead of "and" in the precondition at p.adb:4',
    ]


def test_and_then_source_has_no_hint(tmp_path):
    code, out = cli(tmp_path, {"p.adb": PRE_AND.replace("X /= 0 and Y", "X /= 0 and then Y")})
    assert "p.adb:4:" not in out


def test_counterexample_gating(tmp_path):
    _, plain = cli(tmp_path, {"p.adb": PRE_AND})
    _, forced = cli(tmp_path, {"p.adb": PRE_AND}, "--counterexamples=on")
    _, level2 = cli(tmp_path, {"p.adb": PRE_AND}, "--level=2")
    _, off = cli(tmp_path, {"p.adb": PRE_AND}, "--level=2", "--counterexamples=off")
    assert "e.g. when" not in plain and "e.g. when" not in off
    assert "  e.g. when R = 2" in forced and forced == level2


def test_trace_lists_program_points(tmp_path):
    _, out = cli(tmp_path, {"p.adb": PRE_AND}, "--level=2", "--cex-trace")
    lines = out.splitlines()
    i = lines.index("  trace:")
    assert lines[i + 1:i + 3] == ["    p.adb:12: X = 1", "    p.adb:13: X = 1, R = 2"]


def test_proof_warnings_are_gated(tmp_path):
    code, out = cli(tmp_path, {"p.adb": DEAD})
    assert out == "" and code == 0
    code, out = cli(tmp_path, {"p.adb": DEAD}, "--proof-warnings")
    assert out == ("p.adb:6:4: warning: context is unsatisfiable "
                   "(dead code or contradictory contract?)\n")
    assert code == 1


def test_function_with_postcondition_gets_no_contract_hint(tmp_path):
    # oracle: derived (variant of the regular-function scenario with a contract added)
    files = scenario_files("s4_contract")
    spec = open(files[0]).read().replace(
        "function All_Blanks (S : String) return Boolean;",
        "function All_Blanks (S : String) return Boolean\n"
        "     with Post => All_Blanks'Result = (for all J in S'Range => S (J) = ' ');")
    assert "All_Blanks'Result" in spec
    body = open(files[1]).read()
    _, out = cli(tmp_path, {"strings.ads": spec, "strings.adb": body})
    assert "consider adding a postcondition" not in out
    # the contract is now strong enough for the caller's postcondition
    assert "strings.ads:8:19" not in out and "strings.ads:5:19" in out


def test_info_lines_only_with_flag():
    buf = io.StringIO()
    driver.main(scenario_files("s3_info"), stdout=buf)
    assert ": info: " not in buf.getvalue()


@pytest.mark.parametrize("expr, fires", [
    ("(for some X in 1 .. 10 => (if P then Q))", True),
    ("(for all X in 1 .. 10 => (if P then Q))", False),
    ("(for some X in 1 .. 10 => P and then Q)", False),
    ("(for some X in 1 .. 10 => P)", False),
])
def test_lint_on_quantified_implication(tmp_path, expr, fires):
    src = f"package body C is\n   function F (P, Q : Boolean) return Boolean is\n     {expr};\nend C;\n"
    code, out = cli(tmp_path, {"c.adb": src})
    assert ("warning: suspicious expression" in out) == fires
    assert code == (1 if fires else 0)


def test_json_fields(tmp_path):
    _, out = cli(tmp_path, {"p.adb": PRE_AND}, "--format=json", "--level=2", "--cex-trace")
    doc = json.loads(out)
    assert doc["schema_version"] == 1
    d = doc["diagnostics"][1]
    assert set(d) == {"severity", "file", "line", "column", "kind", "message", "reason",
                      "fix", "counterexample", "check_id"}
    assert d["check_id"] == "p.adb:13:15:division:1"
    assert d["counterexample"]["bindings"] == {"R": "2"}
    assert d["counterexample"]["trace"] == ["p.adb:12: X = 1", "p.adb:13: X = 1, R = 2"]


def test_sort_order_is_position_then_kind():
    a = Diagnostic("medium", SourceSpan("b.adb", 1, 1), "x", "division")
    b = Diagnostic("medium", SourceSpan("a.adb", 9, 1), "y", "postcondition")
    c = Diagnostic("medium", SourceSpan("a.adb", 9, 1), "z", "array_index")
    assert [d.text for d in sort_diagnostics([a, b, c])] == ["z", "y", "x"]
    assert format_text([]) == ""


def test_flow_finding_is_a_single_line():
    buf = io.StringIO()
    driver.main(scenario_files("s5a_flow"), stdout=buf)
    assert buf.getvalue() == (SCENARIOS / "s5a_flow" / "expected.txt").read_text() \
        .replace("[exit 1]\n", "")
