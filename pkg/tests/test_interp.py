from __future__ import annotations

from conftest import load_sources
from miniprove.interp import (ArrayValue, CheckFailure, NonTermination, Normal, Rejected,
                              UninitRead, replay, run)
from miniprove.solver import Counterexample, check_validity
from miniprove.vcgen import CheckKind, split_vc


def test_index_failure_on_shifted_string(scenario):
    # oracle: reference transcript (J = 1 with S'First = 2 fails at line 6)
    s2 = scenario("s2_index")
    out = run(s2.unit, s2.table, s2.unit.find("Erase"), {"S": ArrayValue.of(2, "x")})
    assert isinstance(out, CheckFailure)
    assert out.kind is CheckKind.ARRAY_INDEX
    assert (out.span.line, out.span.column) == (6, 13)
    assert out.bindings["J"] == 1 and out.bindings["S'First"] == 2


def test_erase_blanks_every_cell(scenario):
    s3 = scenario("s3_frame")
    out = run(s3.unit, s3.table, s3.unit.find("Erase"), {"S": ArrayValue.of(3, "abc")})
    assert isinstance(out, Normal)
    s = out.bindings["S"]
    assert s.text() == "   " and s.all_initialized() and (s.first, s.last) == (3, 5)


def test_recursive_expression_function(scenario):
    s3 = scenario("s3_frame")
    f = s3.unit.find("All_Blanks")
    for text in ["", " ", "  ", "a", " a", "a "]:
        out = run(s3.unit, s3.table, f, {"S": ArrayValue.of(1, text)})
        assert out.result == (text.strip() == ""), text


def test_precondition_rejects_inputs():
    loaded = load_sources({"p.adb": """package body P is
   procedure Q (X : Integer; R : out Integer)
     with Pre => X > 0
   is
   begin
      R := 10 / X;
   end Q;
end P;
"""})
    sp = loaded.unit.find("Q")
    assert isinstance(run(loaded.unit, loaded.table, sp, {"X": 0}), Rejected)
    assert run(loaded.unit, loaded.table, sp, {"X": 3}).bindings["R"] == 3


def test_truncating_division_and_overflow():
    loaded = load_sources({"p.adb": """package body P is
   procedure Q (X : Integer; Y : Integer; R : out Integer) is
   begin
      R := X / Y;
      R := R + 2147483647;
   end Q;
end P;
"""})
    sp = loaded.unit.find("Q")
    assert isinstance(run(loaded.unit, loaded.table, sp, {"X": -7, "Y": 2}), Normal)
    out = run(loaded.unit, loaded.table, sp, {"X": 7, "Y": 2})
    assert isinstance(out, CheckFailure) and out.kind is CheckKind.OVERFLOW
    out = run(loaded.unit, loaded.table, sp, {"X": 7, "Y": 0})
    assert out.kind is CheckKind.DIVISION


def test_reading_out_parameter_before_writing():
    loaded = load_sources({"p.adb": """package body P is
   procedure Q (R : out Integer) is
   begin
      R := R + 1;
   end Q;
end P;
"""})
    out = run(loaded.unit, loaded.table, loaded.unit.find("Q"), {})
    assert isinstance(out, UninitRead) and out.variable == "R"


def test_relaxed_erase_runs_cleanly(scenario):
    # the unproved init checks of this scenario stem from the loop abstraction;
    # concrete runs only read cells written earlier
    s5 = scenario("s5b_relaxed")
    out = run(s5.unit, s5.table, s5.unit.find("Erase"), {"S": ArrayValue.of(1, "ab")})
    assert isinstance(out, Normal)


def test_relaxed_read_of_uninitialized_cell_is_init_check():
    loaded = load_sources({"p.adb": """package body P is
   procedure Q (S : out String; C : out Character)
     with Relaxed_Initialization => S
   is
   begin
      C := S (S'First);
   end Q;
end P;
"""})
    out = run(loaded.unit, loaded.table, loaded.unit.find("Q"), {"S": ArrayValue.of(1, "ab")})
    assert isinstance(out, CheckFailure) and out.kind is CheckKind.INIT_CHECK
    assert out.span.line == 6


def test_fuel_exhaustion_is_non_termination():
    loaded = load_sources({"p.adb": """package body P is
   function F (X : Integer) return Integer is (F (X));
end P;
"""})
    out = run(loaded.unit, loaded.table, loaded.unit.find("F"), {"X": 1}, fuel=500)
    assert isinstance(out, NonTermination)


def _index_counterexample(s2):
    r = s2.vcs("Erase")
    for vcs in r.vcs.values():
        for vc in vcs:
            for leaf in split_vc(vc):
                res = check_validity(leaf)
                if isinstance(res, Counterexample) and not leaf.cut_crossed:
                    return leaf, res.model
    raise AssertionError("no counterexample")


def test_replay_classifications(scenario):
    s2 = scenario("s2_index")
    leaf, model = _index_counterexample(s2)
    assert replay(s2.unit, s2.table, leaf, model) == "confirmed"
    # oracle: derived (mutating the bindings so the index is valid)
    first = leaf.entry["S'First"]
    mutated = dict(model)
    mutated[first] = 1
    assert replay(s2.unit, s2.table, leaf, mutated) == "spurious"


def test_replay_behind_invariant_cut_is_not_applicable(scenario):
    s3 = scenario("s3_frame")
    r = s3.vcs("Erase")
    post = next(ob for ob in r.obligations if ob.kind is CheckKind.POSTCONDITION)
    cut = [vc for vc in r.vcs[post.id] if vc.cut_crossed]
    assert cut
    res = check_validity(split_vc(cut[0])[0])
    assert replay(s3.unit, s3.table, cut[0], getattr(res, "model", {})) == "not_applicable"
