"""Markov chains and MDPs: SCCs, end components, qualitative and quantitative parity."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import MissingEps, NoProbabilities
from .game import ConcurrentGame
from .stateset import StateSet

Transition = tuple[tuple[int, float], ...]


@dataclass(frozen=True)
class MDP:
    """Finite MDP; ``actions[s][i]`` is the successor distribution of action ``i``.

    ``exact`` is False when the probabilities were substituted (uniform over
    supports) rather than given by the source model.
    """

    priority: tuple[int, ...]
    actions: tuple[tuple[Transition, ...], ...]
    exact: bool = True
    action_names: tuple[tuple[str, ...], ...] | None = None

    def __post_init__(self):
        if len(self.priority) != len(self.actions):
            raise ValueError("priority and actions lengths differ")
        for s, acts in enumerate(self.actions):
            if not acts:
                raise ValueError(f"state {s} has no actions")
            for tr in acts:
                if not tr:
                    raise ValueError(f"state {s} has an action with empty support")

    @property
    def n(self) -> int:
        return len(self.priority)

    def support(self, s: int, i: int) -> int:
        m = 0
        for t, _ in self.actions[s][i]:
            m |= 1 << t
        return m

    def supports(self) -> list[list[int]]:
        return [[self.support(s, i) for i in range(len(acts))] for s, acts in enumerate(self.actions)]


def _mix(rows: Iterable[tuple[float, Transition]]) -> Transition:
    acc: dict[int, float] = {}
    for w, tr in rows:
        if w == 0.0:
            continue
        for t, p in tr:
            acc[t] = acc.get(t, 0.0) + w * p
    return tuple(sorted((t, p) for t, p in acc.items() if p > 0.0))


def fix_strategy(g: ConcurrentGame, strat, eps: float | None = None) -> MDP:
    """Player-2 MDP left after player 1 commits to the memoryless ``strat``."""
    if strat.needs_eps and eps is None:
        raise MissingEps("a ranked strategy needs eps")
    acts = []
    for s in g.states():
        dist = strat.distribution(s, eps)
        row = []
        for b in range(len(g.moves2[s])):
            row.append(_mix((w, tuple(g.delta[s][a][b].probabilities())) for a, w in dist.items()))
        acts.append(tuple(row))
    return MDP(g.priority, tuple(acts), g.has_probabilities, g.moves2)


def fix_player2(g: ConcurrentGame, choice: Sequence[int]) -> MDP:
    """Player-1 MDP left after player 2 commits to a pure memoryless choice."""
    acts = []
    for s in g.states():
        b = choice[s]
        acts.append(tuple(tuple(g.delta[s][a][b].probabilities()) for a in range(len(g.moves1[s]))))
    return MDP(g.priority, tuple(acts), g.has_probabilities, g.moves1)


def restrict_to_choice(m: MDP, choice: Sequence[int]) -> MDP:
    """Markov chain obtained by fixing one action per state."""
    return MDP(m.priority, tuple((m.actions[s][choice[s]],) for s in range(m.n)), m.exact)


# ---------------------------------------------------------------------------
# Graph utilities

def sccs(nodes: Sequence[int], succ: dict[int, int]) -> list[int]:
    """Strongly connected components (as masks) of the graph on ``nodes``.

    ``succ[v]`` is the successor mask of ``v``; edges leaving ``nodes`` are ignored.
    Components come out in reverse topological order.
    """
    inside = 0
    for v in nodes:
        inside |= 1 << v
    index: dict[int, int] = {}
    low: dict[int, int] = {}
    on_stack = 0
    stack: list[int] = []
    out: list[int] = []
    counter = 0
    for root in nodes:
        if root in index:
            continue
        work = [(root, _bits(succ[root] & inside))]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack |= 1 << root
        while work:
            v, it = work[-1]
            advanced = False
            for w in it:
                if w not in index:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack |= 1 << w
                    work.append((w, _bits(succ[w] & inside)))
                    advanced = True
                    break
                if (on_stack >> w) & 1:
                    low[v] = min(low[v], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[v])
            if low[v] == index[v]:
                comp = 0
                while True:
                    w = stack.pop()
                    on_stack &= ~(1 << w)
                    comp |= 1 << w
                    if w == v:
                        break
                out.append(comp)
    return out


def _bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def _members(mask: int) -> list[int]:
    return list(_bits(mask))


def backward_reach(n: int, edges: list[list[int]], target: int, within: int | None = None) -> int:
    """States (inside ``within``) with some listed successor mask leading to ``target``."""
    if within is None:
        within = (1 << n) - 1
    reach = target & within
    changed = True
    while changed:
        changed = False
        for s in _bits(within & ~reach):
            if any(m & reach for m in edges[s]):
                reach |= 1 << s
                changed = True
    return reach


# ---------------------------------------------------------------------------
# Markov chains

def _chain_succ(chain: MDP) -> dict[int, int]:
    if any(len(a) != 1 for a in chain.actions):
        raise ValueError("expected a Markov chain (one action per state)")
    return {s: chain.support(s, 0) for s in range(chain.n)}


def bsccs(chain: MDP) -> list[int]:
    succ = _chain_succ(chain)
    out = []
    for comp in sccs(range(chain.n), succ):
        if all(succ[s] & ~comp == 0 for s in _bits(comp)):
            out.append(comp)
    return out


def mc_almost_parity(chain: MDP, even_is_win: bool) -> StateSet:
    """States whose every reachable bottom component has max priority of the wanted parity."""
    succ = _chain_succ(chain)
    bad = 0
    for comp in bsccs(chain):
        top = max(chain.priority[s] for s in _bits(comp))
        if (top % 2 == 0) != even_is_win:
            bad |= comp
    edges = [[succ[s]] for s in range(chain.n)]
    doomed = backward_reach(chain.n, edges, bad)
    return StateSet(chain.n, ((1 << chain.n) - 1) & ~doomed)


def mc_positive_parity(chain: MDP, even_is_win: bool) -> StateSet:
    """States from which some bottom component of the wanted parity is reachable."""
    succ = _chain_succ(chain)
    good = 0
    for comp in bsccs(chain):
        top = max(chain.priority[s] for s in _bits(comp))
        if (top % 2 == 0) == even_is_win:
            good |= comp
    edges = [[succ[s]] for s in range(chain.n)]
    return StateSet(chain.n, backward_reach(chain.n, edges, good))


# ---------------------------------------------------------------------------
# End components

def mec_decomposition(m: MDP, within: int | None = None,
                      allowed: list[list[int]] | None = None) -> list[tuple[int, dict[int, tuple[int, ...]]]]:
    """Maximal end components inside ``within`` as ``(state mask, state -> actions)``.

    Classic refinement: drop actions that can leave their SCC, drop states
    without actions, recompute SCCs, until nothing changes.
    """
    n = m.n
    supp = m.supports()
    if within is None:
        within = (1 << n) - 1
    acts = {}
    for s in _bits(within):
        cand = range(len(m.actions[s])) if allowed is None else allowed[s]
        acts[s] = [i for i in cand if supp[s][i] & ~within == 0]
    alive = within
    while True:
        for s in list(_bits(alive)):
            if not acts[s]:
                alive &= ~(1 << s)
        succ = {}
        for s in _bits(alive):
            mk = 0
            for i in acts[s]:
                mk |= supp[s][i]
            succ[s] = mk
        comps = sccs(_members(alive), succ)
        comp_of = {}
        for c in comps:
            for s in _bits(c):
                comp_of[s] = c
        changed = False
        for s in _bits(alive):
            keep = [i for i in acts[s] if supp[s][i] & ~comp_of[s] == 0]
            if len(keep) != len(acts[s]):
                acts[s] = keep
                changed = True
            if not keep:
                alive &= ~(1 << s)
                changed = True
        if not changed:
            return [(c, {s: tuple(acts[s]) for s in _bits(c)}) for c in comps]


def winning_end_states(m: MDP, even: bool) -> int:
    """Union of end components whose maximum priority has the wanted parity."""
    win = 0
    prios = sorted(set(m.priority))
    for d in prios:
        if (d % 2 == 0) != even:
            continue
        within = 0
        for s in range(m.n):
            if m.priority[s] <= d:
                within |= 1 << s
        for comp, _ in mec_decomposition(m, within):
            if any(m.priority[s] == d for s in _bits(comp)):
                win |= comp
    return win


def almost_sure_reach(m: MDP, target: int) -> int:
    """States from which the controller reaches ``target`` with probability 1."""
    n = m.n
    supp = m.supports()
    region = (1 << n) - 1
    while True:
        edges = [[mk for mk in supp[s] if mk & ~region == 0] for s in range(n)]
        new = backward_reach(n, edges, target, region)
        if new == region:
            return region
        region = new


def positive_reach(m: MDP, target: int) -> int:
    return backward_reach(m.n, m.supports(), target)


def mdp_qual_parity(m: MDP, controller_wins_even: bool) -> tuple[StateSet, StateSet]:
    """Almost-sure and positive winning sets of the controller."""
    good = winning_end_states(m, controller_wins_even)
    return StateSet(m.n, almost_sure_reach(m, good)), StateSet(m.n, positive_reach(m, good))


# ---------------------------------------------------------------------------
# Quantitative

def max_reach_values(m: MDP, target: int, sweeps: int = 2000, tol: float = 1e-12) -> np.ndarray:
    """Maximal probability of reaching ``target``.

    Value iteration (bounded sweeps) seeds a policy that is then improved to
    optimality; each policy is evaluated by an exact linear solve.
    """
    n = m.n
    one = almost_sure_reach(m, target)
    some = positive_reach(m, target)
    unknown = [s for s in range(n) if (some & ~one) >> s & 1]
    x = np.zeros(n)
    for s in _bits(one):
        x[s] = 1.0
    if not unknown:
        return x

    rows = {s: [(np.array([t for t, _ in tr], dtype=int), np.array([p for _, p in tr])) for tr in m.actions[s]]
            for s in unknown}

    def q(s, vec):
        return [float(np.dot(ps, vec[ts])) for ts, ps in rows[s]]

    for _ in range(sweeps):
        delta = 0.0
        for s in unknown:
            v = max(q(s, x))
            delta = max(delta, abs(v - x[s]))
            x[s] = v
        if delta < tol:
            break

    pos = {s: i for i, s in enumerate(unknown)}
    policy = _progressing_policy(m, unknown, x, one, q)
    for _ in range(10_000):
        A = np.eye(len(unknown))
        rhs = np.zeros(len(unknown))
        for s in unknown:
            ts, ps = rows[s][policy[s]]
            for t, p in zip(ts, ps):
                if t in pos:
                    A[pos[s], pos[t]] -= p
                elif (one >> t) & 1:
                    rhs[pos[s]] += p
        sol = np.linalg.solve(A, rhs)
        for s in unknown:
            x[s] = sol[pos[s]]
        improved = False
        for s in unknown:
            qs = q(s, x)
            best = max(qs)
            if best > qs[policy[s]] + 1e-13 * max(1.0, best):
                policy[s] = qs.index(best)
                improved = True
        if not improved:
            break
    return np.clip(x, 0.0, 1.0)


def _progressing_policy(m: MDP, unknown, x, one, q) -> dict[int, int]:
    """Near-greedy policy in which every state moves closer to the value-1 region."""
    supp = m.supports()
    policy = {}
    reached = one
    pending = set(unknown)
    while pending:
        step = {}
        for s in sorted(pending):
            qs = q(s, x)
            best = max(qs)
            cands = [i for i, v in enumerate(qs) if v >= best - 1e-9 and supp[s][i] & reached]
            if cands:
                step[s] = cands[0]
        if not step:
            for s in sorted(pending):
                cands = [i for i in range(len(supp[s])) if supp[s][i] & reached]
                if cands:
                    step[s] = cands[0]
        if not step:
            raise AssertionError("positively reaching state without a progressing action")
        for s, i in step.items():
            policy[s] = i
            reached |= 1 << s
        pending -= set(step)
    return policy


def mdp_value_parity(m: MDP, controller_wins_even: bool, allow_uniform: bool = True) -> np.ndarray:
    """Optimal probability that the controller's parity objective holds."""
    if not m.exact and not allow_uniform:
        raise NoProbabilities("support-only model and uniform substitution disabled")
    good = winning_end_states(m, controller_wins_even)
    return max_reach_values(m, good)
