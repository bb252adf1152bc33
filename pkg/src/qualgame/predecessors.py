"""One-step predecessor operators with action-level witnesses.

Player-1 operators are decided exactly by enumerating nonempty action
supports (``combined_pred1``) or rank assignments (``combined_pred1_limit``).
Player-2 operators are available in two independent ways: directly by
enumeration (``fpre2_direct``) and as complements of the player-1 operators
on complemented arguments (``dual_complement``).

Internally every set is an ``int`` bit mask; the public functions accept and
return :class:`StateSet`.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, product
from typing import Iterator, Sequence

from .errors import NestingViolation
from .game import ConcurrentGame
from .stateset import StateSet

INF = 1 << 30


@dataclass(frozen=True)
class ApreChain:
    """Argument list of a combined predecessor operator.

    ``pairs`` is ``[(Y_n, X_n), ..., (Y_{n-i}, X_{n-i})]``; ``pre_set`` is the
    optional trailing set and ``lpre_pair`` the optional ``(Y', X')`` of the
    appended limit disjunct.
    """

    pairs: tuple[tuple[StateSet, StateSet], ...] = ()
    pre_set: StateSet | None = None
    lpre_pair: tuple[StateSet, StateSet] | None = None

    def __init__(self, pairs: Sequence[tuple[StateSet, StateSet]] = (), pre_set=None, lpre_pair=None):
        object.__setattr__(self, "pairs", tuple((y, x) for y, x in pairs))
        object.__setattr__(self, "pre_set", pre_set)
        object.__setattr__(self, "lpre_pair", None if lpre_pair is None else tuple(lpre_pair))

    def sets(self) -> list[StateSet]:
        out = [s for pair in self.pairs for s in pair]
        if self.pre_set is not None:
            out.append(self.pre_set)
        if self.lpre_pair is not None:
            out.extend(self.lpre_pair)
        return out

    def complemented(self) -> ApreChain:
        return ApreChain(
            [(~y, ~x) for y, x in self.pairs],
            None if self.pre_set is None else ~self.pre_set,
            None if self.lpre_pair is None else (~self.lpre_pair[0], ~self.lpre_pair[1]),
        )

    def nesting_ok(self) -> bool:
        """Check ``X' <= X_n <= ... <= X_{n-i} <= pre <= Y_{n-i} <= ... <= Y_n <= Y'``."""
        seq: list[StateSet] = []
        if self.lpre_pair is not None:
            seq.append(self.lpre_pair[1])
        seq.extend(x for _, x in self.pairs)
        if self.pre_set is not None:
            seq.append(self.pre_set)
        seq.extend(y for y, _ in reversed(self.pairs))
        if self.lpre_pair is not None:
            seq.append(self.lpre_pair[0])
        return all(a <= b for a, b in zip(seq, seq[1:]))

    def masks(self):
        pairs = tuple((y.mask, x.mask) for y, x in self.pairs)
        pre = None if self.pre_set is None else self.pre_set.mask
        lpre = None if self.lpre_pair is None else (self.lpre_pair[0].mask, self.lpre_pair[1].mask)
        return pairs, pre, lpre


@dataclass(frozen=True)
class GoodSet:
    """Nonempty support whose uniform mixture witnesses membership."""

    actions: tuple[int, ...]


@dataclass(frozen=True)
class Ranks:
    """Rank assignment: ``ranks`` pairs an action with its rank, sorted by action."""

    ranks: tuple[tuple[int, int], ...]

    @property
    def domain(self) -> tuple[int, ...]:
        return tuple(a for a, _ in self.ranks)

    def as_dict(self) -> dict[int, int]:
        return dict(self.ranks)


@dataclass(frozen=True)
class Counter:
    """Player-2 replies refuting every player-1 support: ``replies[i]`` answers ``supports[i]``."""

    supports: tuple[tuple[int, ...], ...]
    replies: tuple[int, ...]

    def reply_to(self, support: tuple[int, ...]) -> int:
        return self.replies[self.supports.index(tuple(support))]


Witness = GoodSet | Ranks | Counter


# ---------------------------------------------------------------------------
# Per-state tables

def _subsets(k: int) -> list[tuple[int, ...]]:
    return [c for r in range(1, k + 1) for c in combinations(range(k), r)]


def _rank_vectors(m: int) -> list[tuple[int, ...]]:
    out = []
    for vec in product(range(m), repeat=m):
        if set(vec) == set(range(max(vec) + 1)):
            out.append(vec)
    return out


class StateTable:
    """Precomputed destination masks for one state."""

    __slots__ = ("k1", "k2", "dest", "subsets", "udest", "succ", "rank_cands")

    def __init__(self, g: ConcurrentGame, s: int):
        self.k1 = len(g.moves1[s])
        self.k2 = len(g.moves2[s])
        self.dest = g.dest[s]
        self.succ = g.succ_mask[s]
        self.subsets = _subsets(self.k1)
        self.udest = []
        for u in self.subsets:
            row = []
            for b in range(self.k2):
                m = 0
                for a in u:
                    m |= self.dest[a][b]
                row.append(m)
            self.udest.append(tuple(row))
        self.rank_cands = None

    def rank_candidates(self) -> list[tuple[int, tuple[int, ...], tuple[int, ...]]]:
        """``(subset index, domain, rank vector)`` in enumeration order."""
        if self.rank_cands is None:
            cands = []
            for ui, dom in enumerate(self.subsets):
                for vec in _rank_vectors(len(dom)):
                    cands.append((ui, dom, vec))
            self.rank_cands = cands
        return self.rank_cands


def tables(g: ConcurrentGame) -> list[StateTable]:
    cache = g.__dict__.get("_pred_tables")
    if cache is None:
        cache = [StateTable(g, s) for s in g.states()]
        g.__dict__["_pred_tables"] = cache
    return cache


# ---------------------------------------------------------------------------
# Mask-level predicates

def _apre_ok(d: int, pairs, pre) -> bool:
    for y, x in pairs:
        if d & ~y == 0 and d & x:
            return True
    return pre is not None and d & ~pre == 0


def support_ok(tab: StateTable, ui: int, pairs, pre) -> bool:
    return all(_apre_ok(d, pairs, pre) for d in tab.udest[ui])


def ranks_ok(tab: StateTable, ui: int, dom, vec, pairs, pre, lpre) -> bool:
    ly, lx = lpre
    for b in range(tab.k2):
        mx = my = INF
        for a, r in zip(dom, vec):
            d = tab.dest[a][b]
            if d & lx and r < mx:
                mx = r
            if d & ~ly and r < my:
                my = r
        if mx < INF and mx < my:
            continue
        if _apre_ok(tab.udest[ui][b], pairs, pre):
            continue
        return False
    return True


def goodset_at(tab: StateTable, pairs, pre) -> tuple[int, ...] | None:
    for ui, u in enumerate(tab.subsets):
        if support_ok(tab, ui, pairs, pre):
            return u
    return None


def ranks_at(tab: StateTable, pairs, pre, lpre) -> Ranks | None:
    for ui, dom, vec in tab.rank_candidates():
        if ranks_ok(tab, ui, dom, vec, pairs, pre, lpre):
            return Ranks(tuple(zip(dom, vec)))
    return None


def counter_at(tab: StateTable, pairs, pre) -> Counter | None:
    """Refutation of the player-1 operator: one bad reply per support, or None."""
    replies = []
    for row in tab.udest:
        for b, d in enumerate(row):
            if not _apre_ok(d, pairs, pre):
                replies.append(b)
                break
        else:
            return None
    return Counter(tuple(tab.subsets), tuple(replies))


def _restrict(tab: StateTable, pairs, pre, lpre):
    """Mask arguments down to the one-step successors (used as a memo key)."""
    m = tab.succ
    rp = tuple((y & m, x & m) for y, x in pairs)
    rpre = None if pre is None else pre & m
    rl = None if lpre is None else (lpre[0] & m, lpre[1] & m)
    return rp, rpre, rl


# ---------------------------------------------------------------------------
# Public operators

def _check_chain(g: ConcurrentGame, chain: ApreChain) -> None:
    for s in chain.sets():
        if s.n != g.n:
            raise ValueError("chain set over a different universe")
    if not chain.pairs and chain.pre_set is None and chain.lpre_pair is None:
        raise ValueError("empty argument chain")


def combined_pred1(g: ConcurrentGame, chain: ApreChain) -> tuple[StateSet, dict[int, GoodSet]]:
    """States where some uniform support satisfies a disjunct against every reply.

    Returns the set and the smallest witnessing support per member (ties broken
    lexicographically on action indices).
    """
    if chain.lpre_pair is not None:
        raise ValueError("combined_pred1 takes a chain without lpre_pair")
    _check_chain(g, chain)
    pairs, pre, _ = chain.masks()
    mask = 0
    wit: dict[int, GoodSet] = {}
    for s, tab in enumerate(tables(g)):
        u = goodset_at(tab, pairs, pre)
        if u is not None:
            mask |= 1 << s
            wit[s] = GoodSet(u)
    return StateSet(g.n, mask), wit


def combined_pred1_limit(g: ConcurrentGame, chain: ApreChain) -> tuple[StateSet, dict[int, Ranks]]:
    """Combined operator with the appended limit disjunct, decided over rank assignments."""
    if chain.lpre_pair is None:
        raise ValueError("combined_pred1_limit needs lpre_pair")
    _check_chain(g, chain)
    pairs, pre, lpre = chain.masks()
    mask = 0
    wit: dict[int, Ranks] = {}
    for s, tab in enumerate(tables(g)):
        r = ranks_at(tab, pairs, pre, lpre)
        if r is not None:
            mask |= 1 << s
            wit[s] = r
    return StateSet(g.n, mask), wit


def check_goodset(g: ConcurrentGame, s: int, chain: ApreChain, support: Sequence[int]) -> bool:
    """Re-check a support witness at ``s`` directly from the definition."""
    support = tuple(sorted(set(support)))
    if not support or any(not 0 <= a < len(g.moves1[s]) for a in support):
        return False
    pairs, pre, _ = chain.masks()
    for b in range(len(g.moves2[s])):
        d = 0
        for a in support:
            d |= g.dest[s][a][b]
        if not _apre_ok(d, pairs, pre):
            return False
    return True


def check_ranks(g: ConcurrentGame, s: int, chain: ApreChain, ranks: dict[int, int]) -> bool:
    """Re-check a rank witness at ``s`` directly from the definition."""
    if not ranks or any(not 0 <= a < len(g.moves1[s]) for a in ranks):
        return False
    used = sorted(set(ranks.values()))
    if used != list(range(len(used))):
        return False
    pairs, pre, lpre = chain.masks()
    ly, lx = lpre
    for b in range(len(g.moves2[s])):
        hit_x = [r for a, r in ranks.items() if g.dest[s][a][b] & lx]
        hit_out = [r for a, r in ranks.items() if g.dest[s][a][b] & ~ly]
        if hit_x and min(hit_x) < min(hit_out, default=INF):
            continue
        d = 0
        for a in ranks:
            d |= g.dest[s][a][b]
        if _apre_ok(d, pairs, pre):
            continue
        return False
    return True


def good_sets(g: ConcurrentGame, s: int, chain: ApreChain) -> Iterator[tuple[int, ...]]:
    """Every support witnessing ``s`` for ``chain``, in witness order."""
    pairs, pre, _ = chain.masks()
    tab = tables(g)[s]
    for ui, u in enumerate(tab.subsets):
        if support_ok(tab, ui, pairs, pre):
            yield u


ODD = "odd"
EVEN = "even"


def _fpre2_ok(d: int, ys: list[int], xs: list[int], odd: bool) -> bool:
    if d & ys[0]:
        return True
    for m in range(1, len(ys)):
        if d & ys[m] and d & ~xs[m - 1] == 0:
            return True
    return odd and d & ~xs[-1] == 0


def fpre2_direct(g: ConcurrentGame, chain: ApreChain, mode: str) -> StateSet:
    """Player-2 positive predecessor computed by brute force.

    With ``pairs = [(Y_n, X_n), ..., (Y_m, X_m)]`` a reply ``b`` to support
    ``U`` is good when ``D = Dest(s, U, b)`` meets ``Y_n``, or meets ``Y_{j-1}``
    while staying inside ``X_j``; in odd mode also when ``D`` stays inside the
    last ``X``.  Even mode takes ``pre_set`` as the final ``Y`` of that ladder,
    so empty pairs plus ``pre_set = P`` is the plain positive predecessor of P.
    """
    if chain.lpre_pair is not None:
        raise ValueError("fpre2_direct takes a chain without lpre_pair")
    if mode == ODD:
        if chain.pre_set is not None or not chain.pairs:
            raise ValueError("odd mode needs pairs and no pre_set")
    elif mode == EVEN:
        if chain.pre_set is None:
            raise ValueError("even mode needs pre_set")
    else:
        raise ValueError(f"unknown mode {mode!r}")
    _check_chain(g, chain)
    ys = [y.mask for y, _ in chain.pairs]
    xs = [x.mask for _, x in chain.pairs]
    if mode == EVEN:
        ys.append(chain.pre_set.mask)
    odd = mode == ODD
    mask = 0
    for s, tab in enumerate(tables(g)):
        if all(any(_fpre2_ok(d, ys, xs, odd) for d in row) for row in tab.udest):
            mask |= 1 << s
    return StateSet(g.n, mask)


DUAL_KINDS = ("fpreodd", "fpreeven", "frpreodd", "frpreeven")


def _validate_dual(chain: ApreChain, kind: str) -> None:
    if kind not in DUAL_KINDS:
        raise ValueError(f"unknown dual kind {kind!r}")
    limit = kind.startswith("frpre")
    if limit != (chain.lpre_pair is not None):
        raise ValueError(f"{kind} {'needs' if limit else 'takes no'} lpre_pair")
    even = kind.endswith("even")
    if even != (chain.pre_set is not None):
        raise ValueError(f"{kind} {'needs' if even else 'takes no'} trailing set")
    if not even and not chain.pairs and not limit:
        raise ValueError(f"{kind} needs at least one pair")


def dual_complement(g: ConcurrentGame, chain: ApreChain, kind: str, check: bool = True) -> StateSet:
    """Player-2 operator as ``S`` minus the player-1 operator on complemented arguments.

    ``chain`` holds the player-2 operator's own arguments.  For the ``frpre``
    kinds ``chain.lpre_pair`` carries the leading ``(Y, X)`` pair.
    """
    _validate_dual(chain, kind)
    _check_chain(g, chain)
    comp = chain.complemented()
    if check and not comp.nesting_ok():
        raise NestingViolation(f"complemented arguments of {kind} are not nested")
    if comp.lpre_pair is None:
        inner, _ = combined_pred1(g, comp)
    else:
        inner, _ = combined_pred1_limit(g, comp)
    return ~inner
