"""Entry points that pick the case form, normalize and evaluate."""

from __future__ import annotations

from .game import CASE1, CASE2, ConcurrentGame, normalize_priorities, preferred_case
from .mucalc import (
    ALMOST_CASE1,
    ALMOST_CASE2,
    DUAL_OF,
    LIMIT_IPM,
    SolveResult,
    FormulaInstance,
    eval_formula,
)
from .reductions import FP_M, P_M, solve_class
from .stateset import StateSet

U_M = "U-M"
IP_M_LIMIT = "IP-M-limit"
CLASSES = (P_M, U_M, "FP-M", IP_M_LIMIT)


def almost_kind(case: str) -> str:
    return ALMOST_CASE1 if case == CASE1 else ALMOST_CASE2


def solve_formula(g: ConcurrentGame, kind: str) -> tuple[ConcurrentGame, SolveResult]:
    """Normalize ``g`` for ``kind`` and evaluate; returns the normalized game too."""
    case = FormulaInstance(kind).case
    gn, _ = normalize_priorities(g, case)
    return gn, eval_formula(gn, kind)


def solve_almost(g: ConcurrentGame, case: str | None = None) -> tuple[ConcurrentGame, SolveResult]:
    """Almost-sure winning for uniform memoryless strategies."""
    return solve_formula(g, almost_kind(case or preferred_case(g)))


def solve_limit(g: ConcurrentGame) -> tuple[ConcurrentGame, SolveResult]:
    """Limit-sure winning for memoryless strategies with arbitrary precision."""
    return solve_formula(g, LIMIT_IPM)


def solve_complement(g: ConcurrentGame, of: str = U_M, case: str | None = None) -> StateSet:
    """States outside the winning set of ``of``, computed by the dual formula."""
    if of == U_M:
        kind = almost_kind(case or preferred_case(g))
    elif of == IP_M_LIMIT:
        kind = LIMIT_IPM
    else:
        raise ValueError(f"no dual formula for class {of!r}")
    return solve_formula(g, DUAL_OF[kind])[1].winning


def solve(g: ConcurrentGame, cls: str, b: int | None = None) -> StateSet:
    if cls == U_M:
        return solve_almost(g)[1].winning
    if cls == IP_M_LIMIT:
        return solve_limit(g)[1].winning
    if cls == P_M:
        return solve_class(g, P_M)
    if cls in ("FP-M", FP_M):
        return solve_class(g, FP_M, b)
    raise ValueError(f"unknown class {cls!r}")


__all__ = ["CASE1", "CASE2", "U_M", "IP_M_LIMIT", "P_M", "solve", "solve_almost", "solve_limit",
           "solve_complement", "solve_formula"]
