"""Check collection, verification-condition generation and splitting."""
from .checks import CheckKind, CheckObligation, RUNTIME_KINDS
from .generate import (DEFAULT_UNROLL, Analysis, BranchContext, Hypothesis, LoopDecision,
                       SubprogramVCs, SymbolInfo, VerificationCondition, analyze_unit,
                       collect_checks, decide_loop, generate_vcs)
from .split import split_vc

__all__ = [
    "Analysis", "BranchContext", "CheckKind", "CheckObligation", "DEFAULT_UNROLL", "Hypothesis",
    "LoopDecision", "RUNTIME_KINDS", "SubprogramVCs", "SymbolInfo", "VerificationCondition",
    "analyze_unit", "collect_checks", "decide_loop", "generate_vcs", "split_vc",
]
