"""Run the external SMT solver on a script file.

Usage: python3 -m miniprove.solver FILE.smt2
Exit status: 0 proved (unsat), 1 counterexample (sat), 2 resource-out.
"""
from __future__ import annotations

import sys

from .search import Counterexample, Proved
from .smtlib import run_external


def main(argv: list[str] | None = None) -> int:
    args = sys.argv[1:] if argv is None else argv
    if len(args) != 1:
        print(__doc__.strip(), file=sys.stderr)
        return 2
    with open(args[0], encoding="utf-8") as f:
        result = run_external(f.read())
    print(result)
    if isinstance(result, Proved):
        return 0
    if isinstance(result, Counterexample):
        return 1
    return 2


if __name__ == "__main__":
    sys.exit(main())
