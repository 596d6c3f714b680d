from __future__ import annotations

import io

import pytest
from conftest import SCENARIOS, make_vc, scenario_files

from miniprove import driver, explorer
from miniprove.vcgen import logic as L

INIT_ID = "strings.adb:7:62:init_check:1"


@pytest.fixture(scope="module")
def report():
    sources, units = driver.load(scenario_files("s5b_relaxed"))
    return driver.analyze(sources, units, driver.Options(paths=[]))


def session(report, check_id=INIT_ID):
    proved = {c.obligation.id: c.proved for c in report.checks}
    return explorer.start_session(check_id, report.vcs, proved)


def test_script_matches_reference_transcript():
    # oracle: reference transcript (explorer excerpt)
    case = SCENARIOS / "s5b_explore"
    expected = (case / "expected.txt").read_text()
    assert driver.run_case(case) == expected


def test_banner_and_split(report):
    s = session(report)
    banner = s.banner()
    assert banner.startswith(f'check {INIT_ID}: "S" might not be initialized\n')
    assert "H1 : S = set2 S1 J (to_wrapper o)" in banner
    out = explorer.exec_command(s, "split_vc")
    assert out.endswith("goal def'vc : __attr__init (get2 S _f) = True\n\n")
    assert "h1 : S'First <= _f /\\ _f <= J" in out


def test_goals_marks_cursor(report):
    s = session(report)
    explorer.exec_command(s, "split_vc")
    lines = explorer.exec_command(s, "goals").splitlines()
    assert lines[0].startswith("[+] root: forall K:int.")
    assert lines[1].startswith("  [ ] root.1: ") and lines[1].endswith(" <")


def test_prove_reports_counterexample_then_no_open_goal(report):
    s = session(report)
    explorer.exec_command(s, "split_vc")
    out = explorer.exec_command(s, "prove")
    assert out.startswith("counterexample: ")
    assert explorer.exec_command(s, "show") == "no open goal\n\n"
    assert explorer.exec_command(s, "goals").splitlines()[1].startswith("  [!] root.1")


def test_print_and_search(report):
    s = session(report)
    assert explorer.exec_command(s, "print H3") == "H3 : o = ' '\n\n"
    assert explorer.exec_command(s, "print nothing_here") == "no declaration named nothing_here\n\n"
    found = explorer.exec_command(s, "search to_wrapper")
    assert found.splitlines()[0] == "function to_wrapper (x:character) : character__init_wrapper ="
    assert "H1 : S = set2 S1 J (to_wrapper o)" in found


def test_help_unknown_and_quit(report):
    s = session(report)
    assert explorer.exec_command(s, "help").startswith("commands:\n")
    assert explorer.exec_command(s, "frobnicate").startswith("unknown command frobnicate\ncommands:")
    assert explorer.exec_command(s, "quit") == "session closed\n\n" and s.closed


def test_script_stops_at_quit(report):
    s = session(report)
    out = explorer.run_script(s, ["# comment", "quit", "show"])
    assert out.endswith("> quit\nsession closed\n\n")


def test_proved_check_is_noted(report):
    proved = [c.obligation.id for c in report.checks if c.proved]
    assert proved
    s = session(report, proved[0])
    assert s.banner().splitlines()[1] == "already proved"


def test_unknown_id_lists_available(report):
    with pytest.raises(explorer.ExplorerError) as e:
        session(report, "nowhere:1:1:division:1")
    assert INIT_ID in str(e.value)


def test_trivial_goal_closes():
    vc = make_vc([], L.TRUE)
    s = explorer.start_session("t", {"t": [vc]}, {"t": False})
    assert explorer.exec_command(s, "split_vc") == "goal closed\n\n"
    assert explorer.exec_command(s, "prove") == "no open goal\n\n"


def test_interactive_session_reads_stdin():
    buf = io.StringIO()
    code = driver.main(["--explore", INIT_ID] + scenario_files("s5b_relaxed"), stdout=buf,
                       stdin=io.StringIO("print H3\nquit\n"))
    assert code == 0
    text = buf.getvalue()
    assert "> H3 : o = ' '\n\n> session closed\n\n" in text


def test_unknown_id_via_cli_exits_2():
    buf = io.StringIO()
    assert driver.main(["--explore", "x:1:1:division:1"] + scenario_files("s5b_relaxed"),
                       stdout=buf, stdin=io.StringIO("")) == 2
    assert buf.getvalue().startswith("unknown check id x:1:1:division:1")
