"""Qualitative analysis of concurrent stochastic parity games."""

from .game import (
    CaseForm,
    ConcurrentGame,
    SuccessorDist,
    gen_random,
    normalize_priorities,
    parse_game,
    serialize_game,
)
from .mucalc import FormulaInstance, SolveResult, eval_formula, eval_with_levels_replay
from .predecessors import ApreChain, combined_pred1, combined_pred1_limit, dual_complement, fpre2_direct
from .reductions import TurnBasedGame, reduce_finite_precision, reduce_pure, solve_class, tb_qual_parity
from .solver import solve, solve_almost, solve_complement, solve_limit
from .stateset import StateSet
from .strategy import (
    MemorylessStrategy,
    extract_limit_eps,
    extract_uniform_almost,
    uniformize,
    verify_almost,
    verify_value,
)

__all__ = [
    "ApreChain", "CaseForm", "ConcurrentGame", "FormulaInstance", "MemorylessStrategy", "SolveResult",
    "StateSet", "SuccessorDist", "TurnBasedGame", "combined_pred1", "combined_pred1_limit",
    "dual_complement", "eval_formula", "eval_with_levels_replay", "extract_limit_eps",
    "extract_uniform_almost", "fpre2_direct", "gen_random", "normalize_priorities", "parse_game",
    "reduce_finite_precision", "reduce_pure", "serialize_game", "solve", "solve_almost",
    "solve_class", "solve_complement", "solve_limit", "tb_qual_parity", "uniformize",
    "verify_almost", "verify_value",
]
