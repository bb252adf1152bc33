"""Turn-based reductions for the pure and finite-precision strategy classes.

A concurrent game is unfolded into a turn-based stochastic game where player 1
first commits to a move (an action, or a finite-precision distribution) and
player 2 answers in an intermediate state.  Turn-based games are solved by
viewing them as concurrent games in which the idle player has one dummy
action; there uniform and pure witnesses coincide, so the almost-sure formula
yields pure strategies for player 1 and the positive formula yields pure
counter-strategies for player 2.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Mapping, Sequence

from .errors import BlowupGuard, GameError, InternalSoundnessError
from .game import (
    CASE1,
    ConcurrentGame,
    SuccessorDist,
    game_from_dict,
    game_to_dict,
    normalize_priorities,
    preferred_case,
)
from .mdp import fix_player2, fix_strategy, mdp_qual_parity
from .mucalc import (
    ALMOST_CASE1,
    ALMOST_CASE2,
    POSITIVE_CASE1,
    POSITIVE_CASE2,
    eval_formula,
)
from .predecessors import Counter, GoodSet
from .stateset import StateSet
from .strategy import MemorylessStrategy, uniformize  # noqa: F401  (re-exported)

IDLE = "_"
FP_LIMIT = 10**6


@dataclass(frozen=True)
class TurnBasedGame:
    """Turn-based stochastic game; ``owner[s]`` (1 or 2) picks ``moves[s]``.

    ``source[s]`` is the index of the concurrent-game state that ``s`` stands
    for (itself for copied states, the originating state for intermediate ones).
    """

    state_names: tuple[str, ...]
    owner: tuple[int, ...]
    priority: tuple[int, ...]
    moves: tuple[tuple[str, ...], ...]
    trans: tuple[tuple[SuccessorDist, ...], ...]
    source: tuple[int, ...]

    def __post_init__(self):
        n = len(self.state_names)
        for seq in (self.owner, self.priority, self.moves, self.trans, self.source):
            if len(seq) != n:
                raise GameError("turn-based game fields have inconsistent lengths")
        for s in range(n):
            if self.owner[s] not in (1, 2):
                raise GameError(f"state {self.state_names[s]!r} has owner {self.owner[s]!r}")
            if not self.moves[s] or len(self.moves[s]) != len(self.trans[s]):
                raise GameError(f"state {self.state_names[s]!r} has mismatched moves")

    @property
    def n(self) -> int:
        return len(self.state_names)

    def to_concurrent(self) -> ConcurrentGame:
        moves1, moves2, delta = [], [], []
        for s in range(self.n):
            if self.owner[s] == 1:
                moves1.append(self.moves[s])
                moves2.append((IDLE,))
                delta.append(tuple((d,) for d in self.trans[s]))
            else:
                moves1.append((IDLE,))
                moves2.append(self.moves[s])
                delta.append((tuple(self.trans[s]),))
        return ConcurrentGame(self.state_names, self.priority, tuple(moves1), tuple(moves2), tuple(delta))

    def to_dict(self) -> dict[str, Any]:
        doc = game_to_dict(self.to_concurrent())
        for s, entry in enumerate(doc["states"]):
            entry["owner"] = self.owner[s]
            entry["source"] = self.state_names[self.source[s]]
        return doc

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def turn_based_from_dict(doc: Mapping) -> TurnBasedGame:
    g = game_from_dict(doc)
    owners, moves, trans, source = [], [], [], []
    for s, entry in enumerate(doc["states"]):
        owner = entry.get("owner")
        if owner not in (1, 2):
            raise GameError(f"state {g.state_names[s]!r} needs owner 1 or 2")
        idle = g.moves2[s] if owner == 1 else g.moves1[s]
        if len(idle) != 1:
            raise GameError(f"state {g.state_names[s]!r}: the non-owner must have exactly one action")
        owners.append(owner)
        if owner == 1:
            moves.append(g.moves1[s])
            trans.append(tuple(row[0] for row in g.delta[s]))
        else:
            moves.append(g.moves2[s])
            trans.append(tuple(g.delta[s][0]))
        src = entry.get("source", g.state_names[s])
        source.append(g.index(src) if isinstance(src, str) else int(src))
    return TurnBasedGame(g.state_names, tuple(owners), g.priority, tuple(moves), tuple(trans), tuple(source))


def _fresh(name: str, taken: set[str]) -> str:
    out = name
    k = 1
    while out in taken:
        out = f"{name}#{k}"
        k += 1
    taken.add(out)
    return out


def reduce_pure(g: ConcurrentGame) -> TurnBasedGame:
    """Player 1 commits to an action first, then player 2 replies."""
    return _reduce(g, [[(name, {a: Fraction(1)}) for a, name in enumerate(g.moves1[s])] for s in g.states()])


def fp_distributions(k: int, b: int) -> list[tuple[Fraction, ...]]:
    """All probability vectors of length ``k`` whose entries are ``i/j`` with ``j <= b``.

    Ordered lexicographically from the largest first entry, so ``b = 1``
    gives the point distributions in action order.
    """
    if b < 1 or k < 1:
        raise ValueError("need b >= 1 and k >= 1")
    values = sorted({Fraction(i, j) for j in range(1, b + 1) for i in range(j + 1)}, reverse=True)
    out: list[tuple[Fraction, ...]] = []

    def rec(prefix: list[Fraction], left: Fraction):
        if len(out) > FP_LIMIT:
            return
        if len(prefix) == k - 1:
            if left in values_set:
                out.append(tuple(prefix + [left]))
            return
        for v in values:
            if v <= left:
                prefix.append(v)
                rec(prefix, left - v)
                prefix.pop()

    values_set = set(values)
    rec([], Fraction(1))
    return out


def _fmt(f: tuple[Fraction, ...]) -> str:
    return ",".join(str(x) for x in f)


def reduce_finite_precision(g: ConcurrentGame, b: int) -> TurnBasedGame:
    """Player 1 commits to a distribution with denominators at most ``b``."""
    cache: dict[int, list[tuple[Fraction, ...]]] = {}
    total = 0
    per_state = []
    for s in g.states():
        k = len(g.moves1[s])
        if k not in cache:
            cache[k] = fp_distributions(k, b)
        total += len(cache[k])
        if total > FP_LIMIT:
            raise BlowupGuard(total, FP_LIMIT)
        per_state.append([(_fmt(f), {a: p for a, p in enumerate(f) if p > 0}) for f in cache[k]])
    return _reduce(g, per_state)


def _reduce(g: ConcurrentGame, choices: Sequence[Sequence[tuple[str, dict[int, Fraction]]]]) -> TurnBasedGame:
    n = g.n
    taken = set(g.state_names)
    names = list(g.state_names)
    owner = [1] * n
    prio = list(g.priority)
    moves: list[tuple[str, ...]] = [()] * n
    trans: list[tuple[SuccessorDist, ...]] = [()] * n
    source = list(range(n))
    for s in g.states():
        mv, tr = [], []
        for label, dist in choices[s]:
            aux = len(names)
            names.append(_fresh(f"{g.state_names[s]}|{label}", taken))
            owner.append(2)
            prio.append(g.priority[s])
            source.append(s)
            rows = []
            for b in range(len(g.moves2[s])):
                rows.append(_mix_dist(g, s, dist, b))
            moves.append(tuple(g.moves2[s]))
            trans.append(tuple(rows))
            mv.append(label)
            tr.append(SuccessorDist(((aux, 1.0),)))
        moves[s] = tuple(mv)
        trans[s] = tuple(tr)
    return TurnBasedGame(tuple(names), tuple(owner), tuple(prio), tuple(moves), tuple(trans), tuple(source))


def _mix_dist(g: ConcurrentGame, s: int, dist: dict[int, Fraction], b: int) -> SuccessorDist:
    if len(dist) == 1:
        (a,) = dist
        return g.delta[s][a][b]
    explicit = all(g.delta[s][a][b].explicit for a in dist)
    acc: dict[int, float] = {}
    for a, w in dist.items():
        for t, p in g.delta[s][a][b].probabilities():
            acc[t] = acc.get(t, 0.0) + float(w) * p
    items = sorted(acc.items())
    if explicit:
        return SuccessorDist(tuple(items))
    return SuccessorDist(tuple((t, None) for t, _ in items))


# ---------------------------------------------------------------------------
# Turn-based solving

def tb_qual_parity(tb: TurnBasedGame) -> tuple[StateSet, tuple[int, ...], tuple[int, ...]]:
    """Almost-sure winning set of player 1 and pure memoryless witnesses for both players.

    Player 1's choice wins almost surely from every state of ``win1``; player 2's
    choice wins with positive probability from every other state.  Both are
    checked on the induced MDPs before returning.
    """
    cg = tb.to_concurrent()
    case = preferred_case(cg)
    gn, _ = normalize_priorities(cg, case)
    almost_kind, positive_kind = (ALMOST_CASE1, POSITIVE_CASE1) if case == CASE1 else (ALMOST_CASE2, POSITIVE_CASE2)
    r1 = eval_formula(gn, almost_kind)
    r2 = eval_formula(gn, positive_kind)
    win1 = r1.winning
    if r2.winning != ~win1:
        raise InternalSoundnessError("positive and almost-sure regions do not partition the states")

    choice1 = []
    choice2 = []
    for s in range(tb.n):
        c1 = c2 = 0
        if tb.owner[s] == 1 and s in r1.admit and isinstance(r1.admit[s][1], GoodSet):
            c1 = r1.admit[s][1].actions[0]
        if tb.owner[s] == 2 and s in r2.admit and isinstance(r2.admit[s][1], Counter):
            c2 = r2.admit[s][1].reply_to((0,))
        choice1.append(c1)
        choice2.append(c2)

    sigma1 = MemorylessStrategy.uniform([(c,) for c in choice1])
    _, pos2 = mdp_qual_parity(fix_strategy(cg, sigma1), controller_wins_even=False)
    if not win1.isdisjoint(pos2):
        raise InternalSoundnessError("player-1 choice does not win almost surely")
    almost1, _ = mdp_qual_parity(fix_player2(cg, choice2), controller_wins_even=True)
    if not almost1 <= win1:
        raise InternalSoundnessError("player-2 choice does not win with positive probability")

    strat1 = tuple(c if tb.owner[s] == 1 else 0 for s, c in enumerate(choice1))
    strat2 = tuple(c if tb.owner[s] == 2 else 0 for s, c in enumerate(choice2))
    return win1, strat1, strat2


P_M = "P-M"
FP_M = "bFP-M"


def solve_class(g: ConcurrentGame, cls: str, b: int | None = None) -> StateSet:
    """Almost-sure winning set for pure (``P-M``) or ``b``-finite-precision memoryless strategies."""
    if cls == P_M:
        tb = reduce_pure(g)
    elif cls in (FP_M, "FP-M"):
        if b is None:
            raise ValueError("finite-precision class needs b")
        tb = reduce_finite_precision(g, b)
    else:
        raise ValueError(f"unknown class {cls!r}")
    win, _, _ = tb_qual_parity(tb)
    return StateSet(g.n, win.mask & ((1 << g.n) - 1))
