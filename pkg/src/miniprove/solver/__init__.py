"""Bounded-domain solving, consistency checking and SMT-LIB2 export."""
from .search import (DEFAULT_BUDGET, ConfigurationError, Counterexample, DomainBounds,
                     NoModelWithinBounds, Proved, ResourceOut, Satisfiable, SolveResult,
                     check_consistency, check_validity, evaluate_in_model, int_order)

__all__ = [
    "ConfigurationError", "Counterexample", "DEFAULT_BUDGET", "DomainBounds",
    "NoModelWithinBounds", "Proved", "ResourceOut", "Satisfiable", "SolveResult",
    "check_consistency", "check_validity", "evaluate_in_model", "int_order",
]
from .smtlib import ENV_SOLVER, export_smtlib, run_external  # noqa: E402

__all__ += ["ENV_SOLVER", "export_smtlib", "run_external"]
