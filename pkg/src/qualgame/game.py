"""Concurrent stochastic game model, JSON (de)serialization and generators."""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Any, Mapping, Sequence

from .errors import (
    BadProbabilitySum,
    DuplicateTransition,
    EmptyMoveSet,
    GameError,
    MissingTransition,
    MixedProbabilityMode,
    UnknownAction,
    UnknownState,
)
from .stateset import StateSet

PROB_TOL = 1e-9


@dataclass(frozen=True)
class SuccessorDist:
    """Successor distribution of one joint move.

    ``entries`` holds ``(state, p)`` pairs.  Either every ``p`` is ``None``
    (only the support is known) or every ``p`` is a float and they sum to 1.
    """

    entries: tuple[tuple[int, float | None], ...]

    def __post_init__(self):
        if not self.entries:
            raise GameError("successor distribution with empty support")
        targets = [t for t, _ in self.entries]
        if len(set(targets)) != len(targets):
            raise GameError("successor distribution lists a state twice")
        explicit = [p is not None for _, p in self.entries]
        if any(explicit) and not all(explicit):
            raise GameError("successor distribution mixes explicit and absent probabilities")

    @property
    def explicit(self) -> bool:
        return self.entries[0][1] is not None

    @cached_property
    def mask(self) -> int:
        m = 0
        for t, _ in self.entries:
            m |= 1 << t
        return m

    def support(self) -> tuple[int, ...]:
        return tuple(t for t, _ in self.entries)

    def probabilities(self) -> list[tuple[int, float]]:
        """Explicit probabilities, or uniform over the support when absent."""
        if self.explicit:
            return [(t, float(p)) for t, p in self.entries]
        u = 1.0 / len(self.entries)
        return [(t, u) for t, _ in self.entries]


@dataclass(frozen=True)
class ConcurrentGame:
    """Finite two-player concurrent game with a parity priority per state.

    Player actions are indexed per state: action ``a`` at state ``s`` is
    ``moves1[s][a]`` and carries no relation to action ``a`` elsewhere.
    ``delta[s][a][b]`` is the successor distribution of the joint move.
    """

    state_names: tuple[str, ...]
    priority: tuple[int, ...]
    moves1: tuple[tuple[str, ...], ...]
    moves2: tuple[tuple[str, ...], ...]
    delta: tuple[tuple[tuple[SuccessorDist, ...], ...], ...]

    def __post_init__(self):
        n = len(self.state_names)
        if n == 0:
            raise GameError("a game needs at least one state")
        if len(set(self.state_names)) != n:
            raise GameError("duplicate state names")
        for seq, what in ((self.priority, "priority"), (self.moves1, "moves1"),
                          (self.moves2, "moves2"), (self.delta, "delta")):
            if len(seq) != n:
                raise GameError(f"{what} has {len(seq)} entries for {n} states")
        for s in range(n):
            p = self.priority[s]
            if isinstance(p, bool) or not isinstance(p, int) or p < 0:
                raise GameError(f"priority of {self.state_names[s]!r} must be a nonnegative int")
            if not self.moves1[s] or not self.moves2[s]:
                raise EmptyMoveSet(self.state_names[s])
            rows = self.delta[s]
            if len(rows) != len(self.moves1[s]) or any(len(r) != len(self.moves2[s]) for r in rows):
                raise GameError(f"delta at {self.state_names[s]!r} does not match the move sets")
            for row in rows:
                for d in row:
                    if any(not 0 <= t < n for t, _ in d.entries):
                        raise GameError("successor index out of range")

    @property
    def state_count(self) -> int:
        return len(self.state_names)

    @property
    def n(self) -> int:
        return len(self.state_names)

    def states(self) -> range:
        return range(self.n)

    def all_states(self) -> StateSet:
        return StateSet.full(self.n)

    def no_states(self) -> StateSet:
        return StateSet.empty(self.n)

    def set_of(self, items: Sequence[int | str]) -> StateSet:
        """Build a state set from indices and/or state names."""
        return StateSet.of(self.n, (self.index(x) if isinstance(x, str) else x for x in items))

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise UnknownState(name) from None

    @cached_property
    def _index(self) -> dict[str, int]:
        return {name: i for i, name in enumerate(self.state_names)}

    def names(self, states: StateSet) -> list[str]:
        return [self.state_names[i] for i in states]

    @cached_property
    def dest(self) -> tuple[tuple[tuple[int, ...], ...], ...]:
        """Support bit masks: ``dest[s][a][b]``."""
        return tuple(tuple(tuple(d.mask for d in row) for row in rows) for rows in self.delta)

    @cached_property
    def succ_mask(self) -> tuple[int, ...]:
        """Mask of every state reachable from ``s`` in one step."""
        out = []
        for rows in self.dest:
            m = 0
            for row in rows:
                for d in row:
                    m |= d
            out.append(m)
        return tuple(out)

    @cached_property
    def has_probabilities(self) -> bool:
        return all(d.explicit for rows in self.delta for row in rows for d in row)

    def with_priorities(self, priority: Sequence[int]) -> ConcurrentGame:
        return replace(self, priority=tuple(priority))

    def with_delta(self, delta) -> ConcurrentGame:
        return replace(self, delta=delta)


# ---------------------------------------------------------------------------
# JSON

def _load(text: str | bytes | Mapping) -> Mapping:
    if isinstance(text, Mapping):
        return text
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise GameError(f"malformed JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise GameError("game document must be a JSON object")
    return doc


def _require(doc: Mapping, key: str, kind: type):
    if key not in doc:
        raise GameError(f"missing key {key!r}")
    value = doc[key]
    if not isinstance(value, kind):
        raise GameError(f"{key!r} must be a {kind.__name__}")
    return value


def _parse_moves(doc: Mapping, key: str, names: list[str], index: dict[str, int]) -> list[tuple[str, ...]]:
    table = _require(doc, key, dict)
    for name in table:
        if name not in index:
            raise UnknownState(name)
    out = []
    for name in names:
        acts = table.get(name)
        if not acts:
            raise EmptyMoveSet(name)
        if not isinstance(acts, list) or not all(isinstance(a, str) for a in acts):
            raise GameError(f"{key}[{name!r}] must be a list of action names")
        if len(set(acts)) != len(acts):
            raise GameError(f"{key}[{name!r}] repeats an action name")
        out.append(tuple(acts))
    return out


def _parse_dist(entry: Mapping, index: dict[str, int], triple) -> SuccessorDist:
    succ = entry.get("succ")
    if not isinstance(succ, list) or not succ:
        raise GameError(f"transition {triple} needs a nonempty 'succ' list")
    items = []
    seen = set()
    for e in succ:
        if not isinstance(e, dict) or "to" not in e:
            raise GameError(f"transition {triple} has a successor without 'to'")
        to = e["to"]
        if to not in index:
            raise UnknownState(to)
        if to in seen:
            raise GameError(f"transition {triple} lists successor {to!r} twice")
        seen.add(to)
        p = e.get("p")
        if p is not None:
            if isinstance(p, bool) or not isinstance(p, (int, float)) or not 0 < p <= 1:
                raise GameError(f"transition {triple} has probability {p!r} outside (0, 1]")
            p = float(p)
        items.append((index[to], p))
    explicit = [p is not None for _, p in items]
    if any(explicit) and not all(explicit):
        raise MixedProbabilityMode(*triple)
    if all(explicit):
        total = math.fsum(p for _, p in items)
        if abs(total - 1.0) > PROB_TOL:
            raise BadProbabilitySum(*triple, total)
    return SuccessorDist(tuple(items))


def game_from_dict(doc: Mapping) -> ConcurrentGame:
    states = _require(doc, "states", list)
    if not states:
        raise GameError("'states' must be nonempty")
    names: list[str] = []
    prios: list[int] = []
    for st in states:
        if not isinstance(st, dict) or not isinstance(st.get("name"), str):
            raise GameError("each state needs a string 'name'")
        p = st.get("priority")
        if isinstance(p, bool) or not isinstance(p, int) or p < 0:
            raise GameError(f"state {st['name']!r} needs a nonnegative integer 'priority'")
        names.append(st["name"])
        prios.append(p)
    if len(set(names)) != len(names):
        raise GameError("duplicate state names")
    index = {name: i for i, name in enumerate(names)}
    moves1 = _parse_moves(doc, "moves1", names, index)
    moves2 = _parse_moves(doc, "moves2", names, index)
    act1 = [{a: i for i, a in enumerate(m)} for m in moves1]
    act2 = [{b: i for i, b in enumerate(m)} for m in moves2]

    table: dict[tuple[int, int, int], SuccessorDist] = {}
    for entry in _require(doc, "delta", list):
        if not isinstance(entry, dict):
            raise GameError("delta entries must be objects")
        src, a1, a2 = entry.get("from"), entry.get("a1"), entry.get("a2")
        if src not in index:
            raise UnknownState(src)
        s = index[src]
        if a1 not in act1[s]:
            raise UnknownAction(src, a1)
        if a2 not in act2[s]:
            raise UnknownAction(src, a2)
        key = (s, act1[s][a1], act2[s][a2])
        if key in table:
            raise DuplicateTransition(src, a1, a2)
        table[key] = _parse_dist(entry, index, (src, a1, a2))

    delta = []
    for s, name in enumerate(names):
        rows = []
        for a, an in enumerate(moves1[s]):
            row = []
            for b, bn in enumerate(moves2[s]):
                if (s, a, b) not in table:
                    raise MissingTransition(name, an, bn)
                row.append(table[(s, a, b)])
            rows.append(tuple(row))
        delta.append(tuple(rows))
    return ConcurrentGame(tuple(names), tuple(prios), tuple(moves1), tuple(moves2), tuple(delta))


def parse_game(text: str | bytes | Mapping) -> ConcurrentGame:
    """Parse and validate a game document (JSON text or an already-loaded dict)."""
    return game_from_dict(_load(text))


def game_to_dict(g: ConcurrentGame) -> dict[str, Any]:
    names = g.state_names
    delta = []
    for s in g.states():
        for a, an in enumerate(g.moves1[s]):
            for b, bn in enumerate(g.moves2[s]):
                succ = []
                for t, p in g.delta[s][a][b].entries:
                    e: dict[str, Any] = {"to": names[t]}
                    if p is not None:
                        e["p"] = p
                    succ.append(e)
                delta.append({"from": names[s], "a1": an, "a2": bn, "succ": succ})
    return {
        "states": [{"name": names[s], "priority": g.priority[s]} for s in g.states()],
        "moves1": {names[s]: list(g.moves1[s]) for s in g.states()},
        "moves2": {names[s]: list(g.moves2[s]) for s in g.states()},
        "delta": delta,
    }


def serialize_game(g: ConcurrentGame) -> str:
    return json.dumps(game_to_dict(g), indent=2)


def stateset_to_json(g: ConcurrentGame, states: StateSet) -> str:
    return json.dumps(g.names(states))


def stateset_from_json(g: ConcurrentGame, text: str | list) -> StateSet:
    items = json.loads(text) if isinstance(text, (str, bytes)) else text
    if not isinstance(items, list) or not all(isinstance(x, str) for x in items):
        raise GameError("a state set must be a JSON array of state names")
    return g.set_of(items)


# ---------------------------------------------------------------------------
# Priority normal forms

CASE1 = "Case1"
CASE2 = "Case2"


@dataclass(frozen=True)
class CaseForm:
    """How priorities were brought into ``[0..2n-1]`` (Case1) or ``[1..2n]`` (Case2)."""

    case_tag: str
    n: int
    shift: int
    padded_classes: frozenset[int] = field(default_factory=frozenset)

    @property
    def low(self) -> int:
        return 0 if self.case_tag == CASE1 else 1

    @property
    def high(self) -> int:
        return 2 * self.n - 1 if self.case_tag == CASE1 else 2 * self.n

    def variable_count(self) -> int:
        return 2 * self.n + 1 if self.case_tag == CASE1 else 2 * self.n


def _plan_case(priorities: Sequence[int], target: str) -> CaseForm:
    if target == CASE1:
        shift = 0
        top = max(priorities)
        n = max(1, (top + 2) // 2)
    elif target == CASE2:
        shift = 2 if min(priorities) == 0 else 0
        top = max(priorities) + shift
        n = max(1, (top + 1) // 2)
    else:
        raise ValueError(f"unknown case form {target!r}")
    form = CaseForm(target, n, shift)
    used = {p + shift for p in priorities}
    padded = frozenset(range(form.low, form.high + 1)) - used
    return CaseForm(target, n, shift, padded)


def normalize_priorities(g: ConcurrentGame, target: str) -> tuple[ConcurrentGame, CaseForm]:
    """Shift priorities by an even amount so they fit the requested case form."""
    form = _plan_case(g.priority, target)
    if form.shift == 0:
        return g, form
    return g.with_priorities([p + form.shift for p in g.priority]), form


def preferred_case(g: ConcurrentGame) -> str:
    """The form needing fewer fixpoint variables; Case2 on a tie."""
    c1 = _plan_case(g.priority, CASE1).variable_count()
    c2 = _plan_case(g.priority, CASE2).variable_count()
    return CASE1 if c1 < c2 else CASE2


def fits_case(g: ConcurrentGame, form: str, n: int | None = None) -> bool:
    lo = 0 if form == CASE1 else 1
    if min(g.priority) < lo:
        return False
    if n is None:
        return True
    hi = 2 * n - 1 if form == CASE1 else 2 * n
    return max(g.priority) <= hi


# ---------------------------------------------------------------------------
# Random instances

def gen_random(n_states: int, max_act: int, max_succ: int, max_prio: int, seed: int) -> ConcurrentGame:
    """Deterministic pseudo-random game with uniform successor probabilities."""
    if min(n_states, max_act, max_succ) < 1 or max_prio < 0:
        raise ValueError("n_states, max_act and max_succ must be >= 1, max_prio >= 0")
    rng = random.Random(seed)
    names = tuple(f"s{i}" for i in range(n_states))
    prios, m1, m2, delta = [], [], [], []
    for _ in range(n_states):
        k1 = rng.randint(1, max_act)
        k2 = rng.randint(1, max_act)
        prios.append(rng.randint(0, max_prio))
        m1.append(tuple(f"a{i}" for i in range(k1)))
        m2.append(tuple(f"b{i}" for i in range(k2)))
        rows = []
        for _a in range(k1):
            row = []
            for _b in range(k2):
                m = rng.randint(1, min(max_succ, n_states))
                targets = sorted(rng.sample(range(n_states), m))
                row.append(SuccessorDist(tuple((t, 1.0 / m) for t in targets)))
            rows.append(tuple(row))
        delta.append(tuple(rows))
    return ConcurrentGame(names, tuple(prios), tuple(m1), tuple(m2), tuple(delta))


def perturb_probabilities(g: ConcurrentGame, seed: int) -> ConcurrentGame:
    """Same supports, freshly drawn positive probabilities."""
    rng = random.Random(seed)
    delta = []
    for rows in g.delta:
        new_rows = []
        for row in rows:
            new_row = []
            for d in row:
                w = [rng.uniform(0.05, 1.0) for _ in d.entries]
                total = sum(w)
                probs = [x / total for x in w]
                probs[-1] = 1.0 - math.fsum(probs[:-1])
                new_row.append(SuccessorDist(tuple((t, p) for (t, _), p in zip(d.entries, probs))))
            new_rows.append(tuple(new_row))
        delta.append(tuple(new_rows))
    return g.with_delta(tuple(delta))


def strip_probabilities(g: ConcurrentGame) -> ConcurrentGame:
    """Support-only copy of ``g``."""
    delta = tuple(
        tuple(tuple(SuccessorDist(tuple((t, None) for t, _ in d.entries)) for d in row) for row in rows)
        for rows in g.delta
    )
    return g.with_delta(delta)
