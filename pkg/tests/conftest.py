from __future__ import annotations

import os
from dataclasses import dataclass
from pathlib import Path

import pytest

from miniprove import sema as S
from miniprove.driver import scenario_dir
from miniprove.syntax import SourceSpan, parse_source
from miniprove.vcgen import (CheckKind, CheckObligation, Hypothesis, VerificationCondition,
                             analyze_unit, generate_vcs)

SCENARIOS = scenario_dir()

#: Filled by test_acceptance; printed after the run.
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


@dataclass
class Loaded:
    sources: dict[str, str]
    unit: object
    table: S.SymbolTable
    analysis: object

    def vcs(self, name: str):
        return generate_vcs(self.unit.find(name), self.analysis)


def scenario_files(name: str) -> list[str]:
    d = SCENARIOS / name
    return sorted((str(p) for p in d.iterdir() if p.suffix in (".ads", ".adb")),
                  key=lambda p: (not p.endswith(".ads"), p))


def load_sources(sources: dict[str, str], unroll_limit: int = 16,
                 variants: frozenset = frozenset()) -> Loaded:
    """Parse, merge and resolve in-memory sources (declarations first)."""
    names = sorted(sources, key=lambda n: (Path(n).stem, not n.endswith(".ads"), n))
    unit = S.merge_units([parse_source(sources[n], n) for n in names])
    unit, table = S.resolve(unit)
    return Loaded(sources, unit, table, analyze_unit(unit, table, unroll_limit, variants))


def load_scenario(name: str, **kw) -> Loaded:
    files = scenario_files(name)
    return load_sources({os.path.basename(f): Path(f).read_text() for f in files}, **kw)


def make_vc(symbols, goal, hyps=()) -> VerificationCondition:
    """A hand-built assertion VC over the given symbols."""
    span = SourceSpan("t.adb", 1, 1)
    ob = CheckObligation(CheckKind.ASSERTION, span, "T")
    return VerificationCondition(ob, list(symbols), [Hypothesis(h, span, "pre") for h in hyps],
                                 goal, False, {})


@pytest.fixture
def scenario():
    return load_scenario


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}")
