"""Memoryless player-1 strategies: representation, extraction from solver results, verification."""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .errors import EpsSearchExhausted, GameError, InternalSoundnessError, MissingEps
from .game import ConcurrentGame
from .mdp import fix_strategy, mdp_qual_parity, mdp_value_parity
from .mucalc import TARGET, SolveResult, build_formula, formula_size
from .predecessors import GoodSet, Ranks, good_sets
from .stateset import StateSet

UNIFORM = "uniform"
RANKED = "ranked"
WEIGHTED = "weighted"


@dataclass(frozen=True)
class MemorylessStrategy:
    """Per-state choice of player 1.

    ``table[s]`` is a tuple of actions for ``uniform`` strategies and a dict
    from action to rank (``ranked``) or to weight (``weighted``) otherwise.
    A ranked strategy is instantiated at ``eps`` with weight proportional to
    ``eps ** rank``.
    """

    kind: str
    table: tuple
    eps: float | None = None
    bound: float | None = None

    def __post_init__(self):
        if self.kind not in (UNIFORM, RANKED, WEIGHTED):
            raise ValueError(f"unknown strategy kind {self.kind!r}")
        for s, entry in enumerate(self.table):
            if not entry:
                raise ValueError(f"empty choice at state {s}")

    @classmethod
    def uniform(cls, supports: Sequence[Sequence[int]]) -> MemorylessStrategy:
        return cls(UNIFORM, tuple(tuple(sorted(set(u))) for u in supports))

    @classmethod
    def ranked(cls, ranks: Sequence[Mapping[int, int]], eps: float | None = None,
               bound: float | None = None) -> MemorylessStrategy:
        return cls(RANKED, tuple(dict(sorted(r.items())) for r in ranks), eps, bound)

    @classmethod
    def weighted(cls, weights: Sequence[Mapping[int, float]]) -> MemorylessStrategy:
        return cls(WEIGHTED, tuple({a: float(w) for a, w in sorted(ws.items()) if w > 0} for ws in weights))

    @property
    def needs_eps(self) -> bool:
        return self.kind == RANKED

    def support(self, s: int) -> tuple[int, ...]:
        entry = self.table[s]
        return tuple(entry) if self.kind == UNIFORM else tuple(sorted(entry))

    def distribution(self, s: int, eps: float | None = None) -> dict[int, float]:
        entry = self.table[s]
        if self.kind == UNIFORM:
            return {a: 1.0 / len(entry) for a in entry}
        if self.kind == WEIGHTED:
            total = sum(entry.values())
            return {a: w / total for a, w in entry.items()}
        if eps is None:
            eps = self.eps
        if eps is None:
            raise MissingEps("a ranked strategy needs eps")
        low = min(entry.values())
        raw = {a: eps ** (r - low) for a, r in entry.items()}
        total = sum(raw.values())
        return {a: w / total for a, w in raw.items()}

    def with_eps(self, eps: float, bound: float | None = None) -> MemorylessStrategy:
        return MemorylessStrategy(self.kind, self.table, eps, bound)

    def fits(self, g: ConcurrentGame) -> bool:
        return len(self.table) == g.n and all(
            all(0 <= a < len(g.moves1[s]) for a in self.support(s)) for s in g.states()
        )


def uniformize(strat: MemorylessStrategy) -> MemorylessStrategy:
    """Same supports, uniform weights."""
    return MemorylessStrategy.uniform([strat.support(s) for s in range(len(strat.table))])


# ---------------------------------------------------------------------------
# Verification

def verify_almost(g: ConcurrentGame, strat: MemorylessStrategy, claim: StateSet) -> bool:
    """True iff player 2 cannot win with positive probability from any claimed state."""
    if strat.needs_eps:
        raise ValueError("verify_almost expects a support strategy")
    if not claim:
        return True
    _, positive = mdp_qual_parity(fix_strategy(g, strat), controller_wins_even=False)
    return claim.isdisjoint(positive)


def verify_value(g: ConcurrentGame, strat: MemorylessStrategy, eps: float | None,
                 claim: StateSet | None = None) -> np.ndarray:
    """Best-response probability of player 2's objective, per state."""
    return mdp_value_parity(fix_strategy(g, strat, eps), controller_wins_even=False)


# ---------------------------------------------------------------------------
# Extraction

def _fallback(g: ConcurrentGame, s: int) -> tuple[int, ...]:
    return (0,)


def extract_uniform_almost(g: ConcurrentGame, result: SolveResult) -> MemorylessStrategy:
    """Uniform memoryless strategy from the support witnesses recorded at admission.

    The strategy is checked with :func:`verify_almost`; if that fails other
    witnesses at the same valuations are tried before giving up.
    """
    supports = []
    for s in g.states():
        adm = result.admit.get(s)
        if adm is not None and isinstance(adm[1], GoodSet):
            supports.append(adm[1].actions)
        else:
            supports.append(_fallback(g, s))
    strat = MemorylessStrategy.uniform(supports)
    if verify_almost(g, strat, result.winning):
        return strat

    form = build_formula(result.kind, formula_size(g, result.kind))
    alternatives: dict[int, list[tuple[int, ...]]] = {}
    for s in result.winning:
        term_k, _ = result.admit[s]
        if term_k == TARGET:
            continue
        values = [StateSet(g.n, m) for m in result.valuations[result.levels[s]]]
        chain = form.chain(form.terms[term_k], values)
        alternatives[s] = [u for u in good_sets(g, s, chain) if u != supports[s]]
    for s, alts in alternatives.items():
        for u in alts:
            trial = list(supports)
            trial[s] = u
            cand = MemorylessStrategy.uniform(trial)
            if verify_almost(g, cand, result.winning):
                return cand
    widest = list(supports)
    for s, alts in alternatives.items():
        if alts:
            widest[s] = max(alts + [supports[s]], key=len)
    cand = MemorylessStrategy.uniform(widest)
    if verify_almost(g, cand, result.winning):
        return cand
    raise InternalSoundnessError("no recorded support witness yields an almost-sure winning strategy")


MAX_HALVINGS = 60


def compose_ranks(g: ConcurrentGame, result: SolveResult) -> MemorylessStrategy:
    """Combine per-state rank witnesses into one ranked strategy.

    Local ranks are scaled by ``(R + 1) ** c`` where ``R`` is the largest local
    rank and ``c`` the state's level in the outermost least fixpoint, so states
    admitted later use far smaller probabilities on their higher ranks.
    """
    x_var = result.variables[1] if len(result.variables) > 1 else None
    local = {}
    for s, (_, wit) in result.admit.items():
        if isinstance(wit, Ranks):
            local[s] = wit.as_dict()
    top = max((r for rs in local.values() for r in rs.values()), default=0)
    table = []
    for s in g.states():
        if s in local and s in result.winning:
            chunk = result.level_of(s, x_var) if x_var is not None else 0
            scale = (top + 1) ** chunk
            table.append({a: r * scale for a, r in local[s].items()})
        else:
            table.append({a: 0 for a in _fallback(g, s)})
    return MemorylessStrategy.ranked(table)


def extract_limit_eps(g: ConcurrentGame, result: SolveResult, eps_target: float) -> tuple[MemorylessStrategy, float]:
    """Ranked strategy and an epsilon at which every winning state fails with probability <= eps_target."""
    if not 0 < eps_target < 1:
        raise ValueError("eps_target must lie in (0, 1)")
    strat = compose_ranks(g, result)
    claim = list(result.winning)
    eps = eps_target
    for _ in range(MAX_HALVINGS + 1):
        values = verify_value(g, strat, eps, result.winning)
        bound = max((float(values[s]) for s in claim), default=0.0)
        if bound <= eps_target:
            return strat.with_eps(eps, bound), bound
        eps /= 2
    raise EpsSearchExhausted(f"no eps down to {eps * 2:g} met the bound {eps_target:g}")


# ---------------------------------------------------------------------------
# JSON

RESERVED = ("kind", "eps", "bound", "states")


def strategy_to_dict(g: ConcurrentGame, strat: MemorylessStrategy) -> dict:
    per_state = {}
    for s in g.states():
        name = g.state_names[s]
        entry = strat.table[s]
        if strat.kind == UNIFORM:
            per_state[name] = {"support": [g.moves1[s][a] for a in entry]}
        elif strat.kind == RANKED:
            per_state[name] = {"ranks": {g.moves1[s][a]: r for a, r in entry.items()}}
        else:
            per_state[name] = {"weights": {g.moves1[s][a]: w for a, w in entry.items()}}
    doc: dict = {"kind": strat.kind}
    if strat.eps is not None:
        doc["eps"] = strat.eps
    if strat.bound is not None:
        doc["bound"] = strat.bound
    if any(name in RESERVED for name in per_state):
        doc["states"] = per_state
    else:
        doc.update(per_state)
    return doc


def strategy_to_json(g: ConcurrentGame, strat: MemorylessStrategy) -> str:
    return json.dumps(strategy_to_dict(g, strat), indent=2)


def strategy_from_dict(g: ConcurrentGame, doc: Mapping) -> MemorylessStrategy:
    if not isinstance(doc, Mapping):
        raise GameError("strategy document must be a JSON object")
    kind = doc.get("kind", UNIFORM)
    if kind not in (UNIFORM, RANKED, WEIGHTED):
        raise GameError(f"unknown strategy kind {kind!r}")
    per_state = doc["states"] if isinstance(doc.get("states"), Mapping) else {
        k: v for k, v in doc.items() if k not in RESERVED
    }
    table = []
    for s in g.states():
        name = g.state_names[s]
        entry = per_state.get(name)
        names = {a: i for i, a in enumerate(g.moves1[s])}

        def act(a):
            if a not in names:
                raise GameError(f"unknown action {a!r} at state {name!r}")
            return names[a]

        if entry is None:
            table.append((0,) if kind == UNIFORM else {0: 0 if kind == RANKED else 1.0})
        elif "support" in entry:
            if kind != UNIFORM:
                raise GameError(f"state {name!r} gives a support in a {kind} strategy")
            sup = tuple(sorted({act(a) for a in entry["support"]}))
            if not sup:
                raise GameError(f"empty support at state {name!r}")
            table.append(sup)
        elif "ranks" in entry:
            if kind != RANKED:
                raise GameError(f"state {name!r} gives ranks in a {kind} strategy")
            rk = {act(a): int(r) for a, r in entry["ranks"].items()}
            if not rk or min(rk.values()) < 0:
                raise GameError(f"bad ranks at state {name!r}")
            table.append(dict(sorted(rk.items())))
        elif "weights" in entry:
            if kind != WEIGHTED:
                raise GameError(f"state {name!r} gives weights in a {kind} strategy")
            ws = {act(a): float(w) for a, w in entry["weights"].items() if float(w) > 0}
            if not ws:
                raise GameError(f"bad weights at state {name!r}")
            table.append(dict(sorted(ws.items())))
        else:
            raise GameError(f"state {name!r} needs 'support', 'ranks' or 'weights'")
    return MemorylessStrategy(kind, tuple(table), doc.get("eps"), doc.get("bound"))


def strategy_from_json(g: ConcurrentGame, text: str) -> MemorylessStrategy:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise GameError(f"malformed strategy JSON: {exc}") from None
    return strategy_from_dict(g, doc)
