"""Check kinds and check obligations."""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Optional

from ..syntax.ast import SourceSpan


class CheckKind(Enum):
    ARRAY_INDEX = "array_index"
    RANGE = "range"
    OVERFLOW = "overflow"
    DIVISION = "division"
    PRECONDITION = "precondition"
    POSTCONDITION = "postcondition"
    LOOP_INVARIANT_INIT = "loop_invariant_init"
    LOOP_INVARIANT_PRESERVE = "loop_invariant_preserve"
    ASSERTION = "assertion"
    INIT_CHECK = "init_check"
    VARIANT_DECREASE = "variant_decrease"

    @property
    def phrase(self) -> str:
        return _PHRASES[self]

    @property
    def reason(self) -> Optional[str]:
        """Reason text; only run-time checks carry one."""
        return _REASONS.get(self)

    @property
    def is_contract(self) -> bool:
        return self in _CONTRACT

    @property
    def order(self) -> int:
        return _ORDER[self]


_PHRASES = {
    CheckKind.ARRAY_INDEX: "array index check might fail",
    CheckKind.RANGE: "range check might fail",
    CheckKind.OVERFLOW: "overflow check might fail",
    CheckKind.DIVISION: "divide by zero might fail",
    CheckKind.PRECONDITION: "precondition might fail",
    CheckKind.POSTCONDITION: "postcondition might fail",
    CheckKind.LOOP_INVARIANT_INIT: "loop invariant might fail in first iteration",
    CheckKind.LOOP_INVARIANT_PRESERVE: "loop invariant might not be preserved by an arbitrary iteration",
    CheckKind.ASSERTION: "assertion might fail",
    CheckKind.INIT_CHECK: "might not be initialized",
    CheckKind.VARIANT_DECREASE: "subprogram variant might fail",
}

_REASONS = {
    CheckKind.ARRAY_INDEX: "value must be a valid index into the array",
    CheckKind.RANGE: "value must be in range of the target type or array",
    CheckKind.OVERFLOW: "result of operation must fit in the base integer range",
    CheckKind.DIVISION: "divisor must be nonzero",
}

_CONTRACT = {CheckKind.PRECONDITION, CheckKind.POSTCONDITION, CheckKind.LOOP_INVARIANT_INIT,
             CheckKind.LOOP_INVARIANT_PRESERVE, CheckKind.ASSERTION, CheckKind.VARIANT_DECREASE}

_ORDER = {k: i for i, k in enumerate(CheckKind)}

#: Kinds that the reference interpreter reports as run-time failures.
RUNTIME_KINDS = frozenset(_REASONS) | {CheckKind.INIT_CHECK}


@dataclass
class CheckObligation:
    """One language-mandated check site.

    ``variable`` names the object for init checks; ``subprogram`` is the name
    of the owning subprogram.
    """

    kind: CheckKind
    span: SourceSpan
    subprogram: str
    ordinal: int = 1
    expr: Any = field(default=None, compare=False, repr=False)
    variable: Optional[str] = None

    @property
    def id(self) -> str:
        s = self.span
        return f"{s.file}:{s.line}:{s.column}:{self.kind.value}:{self.ordinal}"

    @property
    def sort_key(self) -> tuple:
        s = self.span
        return (s.file, s.line, s.column, self.kind.order, self.ordinal)

    @property
    def message(self) -> str:
        if self.kind is CheckKind.INIT_CHECK:
            return f"\"{self.variable}\" might not be initialized"
        return self.kind.phrase
