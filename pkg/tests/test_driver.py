from __future__ import annotations

import io
import shutil

from conftest import SCENARIOS, scenario_files

from miniprove import driver


def run(argv, stdin=None) -> tuple[int, str]:
    buf = io.StringIO()
    return driver.main(argv, stdout=buf, stdin=stdin), buf.getvalue()


def test_no_paths_prints_usage():
    code, out = run([])
    assert code == 2 and out.startswith("usage:")


def test_unknown_flag_is_usage_error():
    code, out = run(["--frobnicate", "x.adb"])
    assert code == 2 and "usage:" in out and "--frobnicate" in out


def test_bad_bounds_is_usage_error():
    code, out = run(["--bounds", "4:-4:3", "x.adb"])
    assert code == 2 and "bad --bounds" in out


def test_missing_file_exits_2(tmp_path):
    code, out = run([str(tmp_path / "absent.adb")])
    assert code == 2 and out.startswith("miniprove: ")


def test_parse_error_exits_2(tmp_path):
    p = tmp_path / "bad.adb"
    p.write_text("package body Bad is\n   procedure Q is begin null end Q;\nend Bad;\n")
    code, out = run([str(p)])
    assert code == 2 and out.startswith("bad.adb:")


def test_clean_and_failing_exit_codes():
    assert run(scenario_files("s5c_proved"))[0] == 0
    assert run(scenario_files("s2_index"))[0] == 1


def test_load_orders_declarations_first():
    files = scenario_files("s3_frame")
    sources, _ = driver.load(list(reversed(files)))
    assert list(sources) == ["strings.ads", "strings.adb"]


def test_bounds_option_reaches_summary():
    code, out = run(["--info", "--bounds", "-4:4:3"] + scenario_files("s5c_proved"))
    assert code == 0
    assert out.splitlines()[-1].endswith("(integers -4 .. 4, array length <= 3)")


def test_counterexamples_follow_level():
    assert not driver.Options(level=1).counterexamples_enabled
    assert driver.Options(level=2).counterexamples_enabled
    assert driver.Options(level=0, counterexamples="on").counterexamples_enabled


def test_export_smt_writes_one_file_per_vc(tmp_path):
    out_dir = tmp_path / "smt"
    run(["--export-smt", str(out_dir)] + scenario_files("s2_index"))
    files = sorted(p.name for p in out_dir.iterdir())
    assert any(n.startswith("strings.adb_6_13_array_index_1") for n in files)
    text = next(out_dir.glob("strings.adb_6_13_array_index_1*")).read_text()
    assert text.rstrip().endswith("(get-model)")


def test_scenario_corpus_passes():
    report = driver.run_scenarios(str(SCENARIOS))
    assert report.ok and len(report.cases) >= 9
    assert report.text().endswith(f"{len(report.cases)} of {len(report.cases)} cases passed\n")


def test_scenario_failure_names_first_difference(tmp_path):
    case = tmp_path / "s2_index"
    shutil.copytree(SCENARIOS / "s2_index", case)
    expected = (case / "expected.txt").read_text().splitlines(keepends=True)
    expected[1] = "    6 | something else\n"
    (case / "expected.txt").write_text("".join(expected))
    code, out = run(["--run-scenarios", str(tmp_path)])
    assert code == 1
    first = out.splitlines()[0]
    assert first.startswith("s2_index  FAIL  line 2: expected '    6 | something else'")
    assert out.endswith("0 of 1 cases passed\n")


def test_first_difference_reports_missing_lines():
    assert driver.first_difference("a\nb\n", "a\n") == "line 2: expected 'b', got '<missing>'"
    assert driver.first_difference("a\n", "a\n") == ""


def test_empty_corpus_is_empty_report(tmp_path):
    code, out = run(["--run-scenarios", str(tmp_path)])
    assert code == 0 and out == "0 of 0 cases passed\n"
