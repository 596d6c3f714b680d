"""Command-line entry point and analysis pipeline.

parse -> resolve -> flow analysis -> VC generation -> bounded solving ->
diagnostics.  Output is assembled in sorted order so that identical inputs
give byte-identical reports.
"""
from __future__ import annotations

import argparse
import io
import os
import shlex
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, TextIO

from . import explorer
from . import sema as S
from .diagnose import (Diagnostic, RenderOptions, flow_diagnostic, format_json, format_text,
                       info_notes, lint_suspicious_quantifier, render, sort_diagnostics,
                       warn_inconsistencies)
from .flow import analyze_init
from .solver import (Counterexample, DomainBounds, Proved, ResourceOut, check_validity,
                     export_smtlib, run_external)
from .syntax import FrontEndError, parse_source
from .vcgen import DEFAULT_UNROLL, CheckKind, analyze_unit, generate_vcs, split_vc
from .vcgen.generate import Analysis, BranchContext, VerificationCondition


@dataclass
class Options:
    paths: list[str] = field(default_factory=list)
    level: int = 0
    info: bool = False
    proof_warnings: bool = False
    counterexamples: str = "auto"  # auto | on | off
    cex_trace: bool = False
    format: str = "text"
    unroll_limit: int = DEFAULT_UNROLL
    bounds: DomainBounds = field(default_factory=DomainBounds)
    explore: Optional[str] = None
    script: Optional[str] = None
    external_solver: bool = False
    export_smt: Optional[str] = None

    @property
    def counterexamples_enabled(self) -> bool:
        if self.counterexamples == "auto":
            return self.level >= 2
        return self.counterexamples == "on"


@dataclass
class CheckResult:
    obligation: object
    vcs: list[VerificationCondition]
    proved: bool
    leaf: Optional[VerificationCondition] = None
    result: object = None


@dataclass
class Report:
    analysis: Analysis
    checks: list[CheckResult]
    diagnostics: list[Diagnostic]
    contexts: list[BranchContext]
    summary: Optional[str] = None

    @property
    def vcs(self) -> dict[str, list[VerificationCondition]]:
        return {c.obligation.id: c.vcs for c in self.checks}

    @property
    def unproved(self) -> list[CheckResult]:
        return [c for c in self.checks if not c.proved]


def load(paths: list[str]) -> tuple[dict[str, str], list]:
    """Read and parse sources; declarations (.ads) come before bodies."""
    ordered = sorted(paths, key=lambda p: (Path(p).stem, not p.endswith(".ads"), p))
    sources, units = {}, []
    for p in ordered:
        name = os.path.basename(p)
        text = Path(p).read_text(encoding="utf-8")
        sources[name] = text
        units.append(parse_source(text, name))
    return sources, units


def solve_obligation(vcs: list[VerificationCondition], bounds: DomainBounds,
                     external: bool = False):
    """(proved, first failed leaf, its result)."""
    for vc in vcs:
        for leaf in split_vc(vc):
            r = check_validity(leaf, bounds)
            if external and not isinstance(r, Proved):
                ext = run_external(export_smtlib(leaf))
                if isinstance(ext, Proved):
                    r = ext
            if not isinstance(r, Proved):
                return False, leaf, r
    return True, None, None


def proved_variants(unit, table, unroll_limit: int, bounds: DomainBounds) -> set[str]:
    """Recursive expression functions whose variant checks all hold."""
    first = analyze_unit(unit, table, unroll_limit)
    cg = S.build_call_graph(unit)
    out = set()
    for sp in unit.subprograms():
        if sp.aspects.variant is None or not cg.recursive(sp.name):
            continue
        r = generate_vcs(sp, first)
        ok = all(solve_obligation(r.vcs[o.id], bounds)[0] for o in r.obligations
                 if o.kind is CheckKind.VARIANT_DECREASE)
        if ok:
            out.add(sp.name)
    return out


def analyze(sources: dict[str, str], units: list, options: Options) -> Report:
    unit = S.merge_units(units)
    unit, table = S.resolve(unit)
    bounds = options.bounds.scaled(options.level)
    variants = proved_variants(unit, table, options.unroll_limit, bounds)
    analysis = analyze_unit(unit, table, options.unroll_limit, variants)
    ropts = RenderOptions(options.counterexamples_enabled, options.cex_trace, bounds)
    diags: list[Diagnostic] = []
    checks: list[CheckResult] = []
    contexts: list[BranchContext] = []
    for sp in unit.subprograms():
        for f in analyze_init(sp, table):
            diags.append(flow_diagnostic(f, sources))
        r = generate_vcs(sp, analysis)
        contexts += r.contexts
        for ob in r.obligations:
            vcs = r.vcs[ob.id]
            proved, leaf, res = solve_obligation(vcs, bounds, options.external_solver)
            checks.append(CheckResult(ob, vcs, proved, leaf, res))
            if not proved:
                diags.append(render(ob, leaf, res, sp, analysis, sources, ropts))
    diags += lint_suspicious_quantifier(unit)
    summary = None
    if options.info:
        diags += info_notes(analysis)
        n = sum(c.proved for c in checks)
        b = bounds
        summary = (f"summary: {n} of {len(checks)} checks proved within bounds "
                   f"(integers {b.int_lo} .. {b.int_hi}, array length <= {b.max_len})")
    if options.proof_warnings:
        diags += warn_inconsistencies(contexts, bounds)
    return Report(analysis, checks, sort_diagnostics(diags), contexts, summary)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="miniprove",
                                description="Prove absence of run-time errors and contracts.")
    p.add_argument("paths", nargs="*", help="source files (.ads, .adb)")
    p.add_argument("--level", type=int, choices=(0, 1, 2), default=0)
    p.add_argument("--info", action="store_true")
    p.add_argument("--proof-warnings", action="store_true")
    p.add_argument("--counterexamples", choices=("auto", "on", "off"), default="auto")
    p.add_argument("--cex-trace", action="store_true")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--unroll-limit", type=int, default=DEFAULT_UNROLL)
    p.add_argument("--bounds", metavar="LO:HI:LEN", help="integer window and maximum array length")
    p.add_argument("--explore", metavar="ID")
    p.add_argument("--script", metavar="FILE")
    p.add_argument("--external-solver", action="store_true")
    p.add_argument("--export-smt", metavar="DIR", help="write one SMT-LIB2 file per VC")
    p.add_argument("--run-scenarios", metavar="DIR", help="run a corpus of expected transcripts")
    return p


class _UsageError(Exception):
    pass


def parse_options(argv: list[str]) -> tuple[Options, argparse.Namespace]:
    parser = build_parser()
    # a window such as "-4:4:3" starts with a dash; bind it to --bounds explicitly
    joined: list[str] = []
    it = iter(argv)
    for a in it:
        joined.append(f"--bounds={next(it, '')}" if a == "--bounds" else a)
    argv = joined
    buf = io.StringIO()
    try:
        old = sys.stderr
        sys.stderr = buf
        try:
            ns = parser.parse_args(argv)
        finally:
            sys.stderr = old
    except SystemExit as e:
        raise _UsageError(buf.getvalue() or parser.format_usage()) from e
    bounds = DomainBounds()
    if ns.bounds:
        try:
            bounds = DomainBounds.parse(ns.bounds)
        except ValueError as e:
            raise _UsageError(parser.format_usage() + f"miniprove: error: bad --bounds: {e}\n")
    opts = Options(ns.paths, ns.level, ns.info, ns.proof_warnings, ns.counterexamples,
                   ns.cex_trace, ns.format, ns.unroll_limit, bounds, ns.explore, ns.script,
                   ns.external_solver, ns.export_smt)
    return opts, ns


def main(argv: Optional[list[str]] = None, stdout: Optional[TextIO] = None,
         stdin: Optional[TextIO] = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    out = stdout or sys.stdout
    try:
        opts, ns = parse_options(argv)
    except _UsageError as e:
        out.write(str(e))
        return 2
    if ns.run_scenarios:
        report = run_scenarios(ns.run_scenarios)
        out.write(report.text())
        return 0 if report.ok else 1
    if not opts.paths:
        out.write(build_parser().format_usage())
        return 2
    try:
        sources, units = load(opts.paths)
        report = analyze(sources, units, opts)
    except FrontEndError as e:
        out.write(f"{e}\n")
        return 2
    except OSError as e:
        out.write(f"miniprove: {e}\n")
        return 2
    if opts.export_smt:
        export_all(report, opts.export_smt)
    if opts.explore:
        return explore(report, opts, out, stdin or sys.stdin)
    if opts.format == "json":
        extra = {"summary": report.summary} if report.summary else None
        out.write(format_json(report.diagnostics, extra))
    else:
        out.write(format_text(report.diagnostics))
        if report.summary:
            out.write(report.summary + "\n")
    findings = [d for d in report.diagnostics if d.severity != "info"]
    return 1 if findings else 0


def explore(report: Report, opts: Options, out: TextIO, stdin: TextIO) -> int:
    proved = {c.obligation.id: c.proved for c in report.checks}
    try:
        session = explorer.start_session(opts.explore, report.vcs, proved,
                                         opts.bounds.scaled(opts.level))
    except explorer.ExplorerError as e:
        out.write(f"{e}\n")
        return 2
    if opts.script:
        commands = explorer.read_script(Path(opts.script).read_text(encoding="utf-8"))
        out.write(explorer.run_script(session, commands))
        return 0
    out.write(session.banner())
    while not session.closed:
        out.write("> ")
        out.flush()
        line = stdin.readline()
        if not line:
            break
        if not line.strip() or line.strip().startswith("#"):
            continue
        out.write(explorer.exec_command(session, line))
    return 0


def export_all(report: Report, directory: str):
    """One SMT-LIB2 file per VC, named by obligation id (and VC index)."""
    os.makedirs(directory, exist_ok=True)
    for c in report.checks:
        base = c.obligation.id.replace(":", "_")
        for i, vc in enumerate(c.vcs, 1):
            name = f"{base}.smt2" if len(c.vcs) == 1 else f"{base}_{i}.smt2"
            Path(directory, name).write_text(export_smtlib(vc), encoding="utf-8")


# -------------------------------------------------------------- scenarios

@dataclass
class CaseResult:
    name: str
    passed: bool
    detail: str = ""


@dataclass
class ScenarioReport:
    cases: list[CaseResult]

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.cases)

    def text(self) -> str:
        lines = []
        width = max([len(c.name) for c in self.cases] + [4])
        for c in self.cases:
            lines.append(f"{c.name:<{width}}  {'pass' if c.passed else 'FAIL'}"
                         + (f"  {c.detail}" if c.detail else ""))
        lines.append(f"{sum(c.passed for c in self.cases)} of {len(self.cases)} cases passed")
        return "\n".join(lines) + "\n"


def run_case(case: Path) -> str:
    """Output of the analyzer on one corpus case, as the expectation records it."""
    flags = (case / "flags").read_text(encoding="utf-8").split() if (case / "flags").exists() else []
    files = sorted(str(p) for p in case.iterdir() if p.suffix in (".ads", ".adb"))
    argv = []
    for f in flags:
        argv.append(str(case / f) if f == "script" else f)
    buf = io.StringIO()
    code = main(argv + files, stdout=buf)
    return buf.getvalue() + f"[exit {code}]\n"


def first_difference(expected: str, actual: str) -> str:
    a, b = expected.splitlines(), actual.splitlines()
    for i in range(max(len(a), len(b))):
        x = a[i] if i < len(a) else "<missing>"
        y = b[i] if i < len(b) else "<missing>"
        if x != y:
            return f"line {i + 1}: expected {x!r}, got {y!r}"
    return ""


def run_scenarios(corpus: str) -> ScenarioReport:
    """Compare each case's output with its ``expected.txt``."""
    cases = []
    root = Path(corpus)
    for case in sorted(p for p in root.iterdir() if p.is_dir()) if root.is_dir() else []:
        expected_file = case / "expected.txt"
        if not expected_file.exists():
            continue
        expected = expected_file.read_text(encoding="utf-8")
        actual = run_case(case)
        if actual == expected:
            cases.append(CaseResult(case.name, True))
        else:
            cases.append(CaseResult(case.name, False, first_difference(expected, actual)))
    return ScenarioReport(cases)


def scenario_dir() -> Path:
    return Path(__file__).parent / "scenarios"


def cli() -> None:
    sys.exit(main())


if __name__ == "__main__":
    cli()
