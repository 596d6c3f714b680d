"""Textual proof shell over one verification condition.

The session keeps a proof tree whose root is the VC of a check; splitting a
goal adds its sub-goals as children and moves the cursor to the first open
one.  Commands: split_vc, print NAME, search NAME, goals, show, prove, quit,
help.  Each response ends with a blank line.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .solver import Counterexample, DomainBounds, Proved, check_validity
from .vcgen import logic as L
from .vcgen.generate import VerificationCondition
from .vcgen.split import split_vc
from .vcgen.theory import Declaration, background, tokenize

HELP = """\
commands:
  split_vc        introduce quantified variables and hypotheses, split conjunctions
  print NAME      show the declaration or hypothesis named NAME
  search NAME     list declarations and hypotheses mentioning NAME
  goals           show the proof tree
  show            show the current goal
  prove           run the bounded solver on the current goal
  quit            end the session
  help            show this text"""


class ExplorerError(Exception):
    pass


@dataclass
class Node:
    vc: VerificationCondition
    label: str
    children: list["Node"] = field(default_factory=list)
    parent: Optional["Node"] = None
    status: str = "open"  # open | proved | failed | split

    def leaves(self) -> list["Node"]:
        if not self.children:
            return [self]
        return [x for c in self.children for x in c.leaves()]


@dataclass
class Session:
    check_id: str
    root: Node
    current: Optional[Node]
    theory: list[Declaration]
    bounds: DomainBounds = field(default_factory=DomainBounds)
    history: list[str] = field(default_factory=list)
    note: Optional[str] = None
    closed: bool = False

    def banner(self) -> str:
        ob = self.root.vc.obligation
        lines = [f"check {ob.id}: {ob.message}"]
        if self.note:
            lines.append(self.note)
        lines += self.root.vc.render()
        return "\n".join(lines) + "\n\n"


def start_session(check_id: str, vcs: dict[str, list[VerificationCondition]],
                  proved: dict[str, bool], bounds: Optional[DomainBounds] = None) -> Session:
    """Open a session on the VC of ``check_id``.

    ``vcs`` maps check ids to their VCs and ``proved`` to their status.  The
    session starts on the first VC that is not proved.
    """
    if check_id not in vcs:
        known = "\n".join("  " + k for k in sorted(vcs))
        raise ExplorerError(f"unknown check id {check_id}; available ids:\n{known}")
    bounds = bounds or DomainBounds()
    candidates = vcs[check_id]
    if not candidates:
        raise ExplorerError(f"check {check_id} has no verification condition")
    note = None
    chosen = candidates[0]
    if proved.get(check_id):
        note = "already proved"
    else:
        for vc in candidates:
            if not isinstance(check_validity(vc, bounds), Proved):
                if not all(isinstance(check_validity(x, bounds), Proved) for x in split_vc(vc)):
                    chosen = vc
                    break
    root = Node(chosen, "root")
    return Session(check_id, root, root, background(chosen.relaxed), bounds, note=note)


def _goal_text(node: Node) -> list[str]:
    return node.vc.render()


def _advance(s: Session):
    open_leaves = [n for n in s.root.leaves() if n.status == "open"]
    s.current = open_leaves[0] if open_leaves else None


def _hypothesis_items(vc: VerificationCondition) -> list[tuple[str, str]]:
    names = vc.display_names()
    return [(n, f"{n} : {L.show(h.formula, names)}") for n, h in vc.numbered()]


def exec_command(s: Session, command: str) -> str:
    """Run one command; returns its output, terminated by a blank line."""
    command = command.strip()
    s.history.append(command)
    word, _, arg = command.partition(" ")
    arg = arg.strip()
    out: list[str]
    if word == "quit":
        s.closed = True
        out = ["session closed"]
    elif word == "help" or word not in ("split_vc", "print", "search", "goals", "show", "prove"):
        out = ([f"unknown command {word}"] if word != "help" else []) + HELP.split("\n")
    elif word == "goals":
        out = []

        def walk(n: Node, depth: int):
            mark = {"open": "[ ]", "proved": "[x]", "failed": "[!]", "split": "[+]"}[n.status]
            cursor = " <" if n is s.current else ""
            out.append("  " * depth + f"{mark} {n.label}: {L.show(n.vc.goal, n.vc.display_names())}"
                       + cursor)
            for c in n.children:
                walk(c, depth + 1)
        walk(s.root, 0)
    elif s.current is None and word in ("split_vc", "show", "prove"):
        out = ["no open goal"]
    elif word == "show":
        out = _goal_text(s.current)
    elif word == "split_vc":
        node = s.current
        leaves = split_vc(node.vc)
        node.status = "split"
        node.children = [Node(v, f"{node.label}.{i + 1}", parent=node) for i, v in enumerate(leaves)]
        _advance(s)
        if not leaves:
            out = ["goal closed"]
        elif s.current is None:
            out = ["no open goal"]
        else:
            out = _goal_text(s.current)
    elif word == "prove":
        node = s.current
        r = check_validity(node.vc, s.bounds)
        if isinstance(r, Proved):
            node.status = "proved"
            out = ["proved (within bounds)"]
            _advance(s)
        elif isinstance(r, Counterexample):
            node.status = "failed"
            names = node.vc.display_names()
            vals = [f"{names.get(v, v.base)} = {x!r}" for v, x in r.model.items()
                    if isinstance(v, L.Var) and v.sort not in L.ARRAY_SORTS]
            out = ["counterexample: " + ", ".join(vals)]
            _advance(s)
        else:
            out = [f"resource limit reached ({r.reason})"]
    elif word == "print":
        decl = next((d for d in s.theory if d.name == arg), None)
        vc = (s.current or s.root).vc
        hyp = next((text for n, text in _hypothesis_items(vc) if n == arg), None)
        if decl is not None:
            out = decl.text.split("\n")
        elif hyp is not None:
            out = [hyp]
        else:
            out = [f"no declaration named {arg}"]
    else:  # search
        vc = (s.current or s.root).vc
        items = [d.text for d in s.theory if arg in d.tokens()]
        items += [text for n, text in _hypothesis_items(vc)
                  if arg in tokenize(text.split(" : ", 1)[1])]
        if not items:
            out = [f"no declaration named {arg}"]
        else:
            out = []
            for i, text in enumerate(items):
                if i:
                    out.append("")
                out += text.split("\n")
    return "\n".join(out) + "\n\n"


def run_script(s: Session, commands: list[str]) -> str:
    """Transcript of a command script: prompt, command, response."""
    parts = [s.banner()]
    for c in commands:
        c = c.strip()
        if not c or c.startswith("#"):
            continue
        parts.append(f"> {c}\n")
        parts.append(exec_command(s, c))
        if s.closed:
            break
    return "".join(parts)


def read_script(text: str) -> list[str]:
    return [line.strip() for line in text.splitlines()
            if line.strip() and not line.strip().startswith("#")]
