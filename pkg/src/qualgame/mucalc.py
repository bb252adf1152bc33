"""Nested fixpoint evaluation of the winning-set formulas.

Each formula is a prefix of alternating greatest (``Y``) and least (``X``)
fixpoint variables plus one term per priority class.  A term names which
variables feed a predecessor operator: a list of ``(Y_j, X_j)`` pairs, an
optional trailing set, and for the limit formulas an extra limit pair.
The dual formulas swap every fixpoint and replace the player-1 operator by
its complement on complemented arguments.

Evaluation is the plain nested iteration: greatest fixpoints start from the
full set, least fixpoints from the empty set, and the innermost loop
stabilizes before its parent takes a step.  For every state in the result we
keep the iteration index of every variable at the moment the state was
admitted, the priority term that admitted it, and the witness found there.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .errors import CaseMismatch, InternalSoundnessError
from .game import CASE1, CASE2, ConcurrentGame
from .predecessors import (
    ApreChain,
    Counter,
    GoodSet,
    Ranks,
    Witness,
    check_goodset,
    check_ranks,
    counter_at,
    goodset_at,
    ranks_at,
    tables,
)
from .stateset import StateSet

ALMOST_CASE1 = "AlmostCase1"
ALMOST_CASE2 = "AlmostCase2"
LIMIT_IPM = "LimitIPM"
POSITIVE_CASE1 = "PositiveCase1"
POSITIVE_CASE2 = "PositiveCase2"
LIMIT_COMPLEMENT = "LimitComplement"

KINDS = (ALMOST_CASE1, ALMOST_CASE2, LIMIT_IPM, POSITIVE_CASE1, POSITIVE_CASE2, LIMIT_COMPLEMENT)
_CASE_OF = {
    ALMOST_CASE1: CASE1, POSITIVE_CASE1: CASE1,
    ALMOST_CASE2: CASE2, POSITIVE_CASE2: CASE2,
    LIMIT_IPM: CASE2, LIMIT_COMPLEMENT: CASE2,
}
DUAL_OF = {
    ALMOST_CASE1: POSITIVE_CASE1, ALMOST_CASE2: POSITIVE_CASE2, LIMIT_IPM: LIMIT_COMPLEMENT,
    POSITIVE_CASE1: ALMOST_CASE1, POSITIVE_CASE2: ALMOST_CASE2, LIMIT_COMPLEMENT: LIMIT_IPM,
}

TARGET = -1  # term index recorded for states admitted through the target set


@dataclass(frozen=True)
class FormulaInstance:
    kind: str
    target_T: StateSet | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown formula kind {self.kind!r}")

    @property
    def case(self) -> str:
        return _CASE_OF[self.kind]

    @property
    def dual(self) -> bool:
        return self.kind in (POSITIVE_CASE1, POSITIVE_CASE2, LIMIT_COMPLEMENT)

    @property
    def limit(self) -> bool:
        return self.kind in (LIMIT_IPM, LIMIT_COMPLEMENT)


@dataclass(frozen=True)
class Term:
    pairs: tuple[tuple[int, int], ...]
    pre: int | None = None
    lpre: tuple[int, int] | None = None


@dataclass(frozen=True)
class Formula:
    names: tuple[str, ...]
    is_mu: tuple[bool, ...]
    terms: dict[int, Term]
    dual: bool
    limit: bool

    def chain(self, term: Term, values: Sequence[StateSet]) -> ApreChain:
        return ApreChain(
            [(values[y], values[x]) for y, x in term.pairs],
            None if term.pre is None else values[term.pre],
            None if term.lpre is None else (values[term.lpre[0]], values[term.lpre[1]]),
        )


def formula_size(g: ConcurrentGame, kind: str) -> int:
    """The ``n`` of the case form ``g``'s priorities must fit for ``kind``."""
    case = _CASE_OF[kind]
    top = max(g.priority)
    if case == CASE1:
        return max(1, (top + 2) // 2)
    if min(g.priority) < 1:
        raise CaseMismatch(f"{kind} needs priorities >= 1, found {min(g.priority)}")
    return max(1, (top + 1) // 2)


def build_formula(kind: str, n: int) -> Formula:
    names: list[str] = []
    is_mu: list[bool] = []
    idx: dict[str, int] = {}

    def var(name: str, mu: bool) -> None:
        idx[name] = len(names)
        names.append(name)
        is_mu.append(mu)

    case = _CASE_OF[kind]
    limit = kind in (LIMIT_IPM, LIMIT_COMPLEMENT)
    terms: dict[int, Term] = {}
    if case == CASE1:
        for j in range(n, 0, -1):
            var(f"Y{j}", False)
            var(f"X{j}", True)
        var("Y0", False)
        for j in range(n):
            pairs = tuple((idx[f"Y{m}"], idx[f"X{m}"]) for m in range(n, j, -1))
            terms[2 * j + 1] = Term(pairs)
            terms[2 * j] = Term(pairs, idx[f"Y{j}"])
    else:
        if limit:
            var(f"Y{n}", False)
            var(f"X{n}", True)
        for j in range(n - 1, -1, -1):
            var(f"Y{j}", False)
            var(f"X{j}", True)
        lpre = (idx[f"Y{n}"], idx[f"X{n}"]) if limit else None
        for j in range(n):
            pairs = tuple((idx[f"Y{m}"], idx[f"X{m}"]) for m in range(n - 1, j - 1, -1))
            terms[2 * j + 1] = Term(pairs, None, lpre)
        for j in range(1, n + 1):
            pairs = tuple((idx[f"Y{m}"], idx[f"X{m}"]) for m in range(n - 1, j - 1, -1))
            terms[2 * j] = Term(pairs, idx[f"Y{j - 1}"], lpre)
    dual = kind in (POSITIVE_CASE1, POSITIVE_CASE2, LIMIT_COMPLEMENT)
    if dual:
        is_mu = [not m for m in is_mu]
    return Formula(tuple(names), tuple(is_mu), terms, dual, limit)


@dataclass
class SolveResult:
    """Winning set plus, per member, its levels and admitting term and witness.

    ``valuations`` maps a levels tuple to the variable values (as masks,
    outermost first) in force when states with those levels were admitted.
    """

    kind: str
    winning: StateSet
    levels: dict[int, tuple[int, ...]]
    admit: dict[int, tuple[int, Witness | None]]
    valuations: dict[tuple[int, ...], tuple[int, ...]]
    variables: tuple[str, ...]
    body_evaluations: int = 0
    target_T: StateSet | None = None
    stats: dict = field(default_factory=dict)

    def valuation(self, s: int) -> dict[str, StateSet]:
        masks = self.valuations[self.levels[s]]
        n = self.winning.n
        return {name: StateSet(n, m) for name, m in zip(self.variables, masks)}

    def level_of(self, s: int, var: str) -> int:
        return self.levels[s][self.variables.index(var)]


def _op_at(tab, term: Term, vals: list[int], full: int, dual: bool):
    """Decide the term's operator at one state.

    Returns ``(member, witness)``.  For the dual formulas membership means the
    player-1 operator fails on the complemented arguments.
    """
    if dual:
        pairs = tuple((full & ~vals[y], full & ~vals[x]) for y, x in term.pairs)
        pre = None if term.pre is None else full & ~vals[term.pre]
        lpre = None if term.lpre is None else (full & ~vals[term.lpre[0]], full & ~vals[term.lpre[1]])
    else:
        pairs = tuple((vals[y], vals[x]) for y, x in term.pairs)
        pre = None if term.pre is None else vals[term.pre]
        lpre = None if term.lpre is None else (vals[term.lpre[0]], vals[term.lpre[1]])
    if lpre is None:
        if dual:
            c = counter_at(tab, pairs, pre)
            return c is not None, c
        u = goodset_at(tab, pairs, pre)
        return u is not None, (GoodSet(u) if u is not None else None)
    r = ranks_at(tab, pairs, pre, lpre)
    if dual:
        return r is None, None
    return r is not None, r


def _memo_key(s: int, term: Term, vals: list[int], succ: int):
    return (s,) + tuple(vals[y] & succ for y, _ in term.pairs) + tuple(
        vals[x] & succ for _, x in term.pairs
    ) + (
        None if term.pre is None else vals[term.pre] & succ,
        None if term.lpre is None else (vals[term.lpre[0]] & succ, vals[term.lpre[1]] & succ),
    )


def evaluate(g: ConcurrentGame, inst: FormulaInstance, fixed_outer: StateSet | None = None) -> SolveResult:
    """Evaluate ``inst`` on ``g``; ``fixed_outer`` pins the outermost variable (testing aid)."""
    n_form = formula_size(g, inst.kind)
    hi = 2 * n_form - 1 if inst.case == CASE1 else 2 * n_form
    if max(g.priority) > hi:
        raise CaseMismatch(f"priority {max(g.priority)} outside the {inst.case} range")
    form = build_formula(inst.kind, n_form)
    tabs = tables(g)
    n = g.n
    full = (1 << n) - 1
    target = 0 if inst.target_T is None else inst.target_T.mask
    prio = g.priority
    nv = len(form.names)
    vals = [0] * nv
    idx = [0] * nv
    valuations: dict[tuple[int, ...], tuple[int, ...]] = {}
    memo: dict = {}
    limit_evals = (n + 1) ** nv
    state = {"evals": 0}
    terms = [form.terms[prio[s]] for s in range(n)]

    def body():
        state["evals"] += 1
        if state["evals"] > limit_evals:
            raise InternalSoundnessError("fixpoint iteration exceeded its height bound")
        mask = 0
        recs = {}
        lv = tuple(idx)
        for s in range(n):
            bit = 1 << s
            if target & bit:
                if not form.dual:
                    mask |= bit
                    recs[s] = (lv, TARGET, None)
                continue
            term = terms[s]
            key = _memo_key(s, term, vals, tabs[s].succ)
            hit = memo.get(key)
            if hit is None:
                hit = _op_at(tabs[s], term, vals, full, form.dual)
                memo[key] = hit
            if hit[0]:
                mask |= bit
                recs[s] = (lv, prio[s], hit[1])
        if recs:
            valuations[lv] = tuple(vals)
        return mask, recs

    def eval_var(d: int):
        if d == nv:
            return body()
        if d == 0 and fixed_outer is not None:
            vals[0] = fixed_outer.mask
            idx[0] = 0
            return eval_var(1)
        mu = form.is_mu[d]
        cur = 0 if mu else full
        k = 0
        records = {}
        while True:
            vals[d] = cur
            idx[d] = k
            new, inner = eval_var(d + 1)
            if mu:
                for s, rec in inner.items():
                    if not (cur >> s) & 1:
                        records[s] = rec
            if new == cur:
                break
            cur = new
            k += 1
        if not mu:
            records = inner
        return cur, records

    win, records = eval_var(0)
    used = {rec[0] for rec in records.values()}
    return SolveResult(
        kind=inst.kind,
        winning=StateSet(n, win),
        levels={s: rec[0] for s, rec in sorted(records.items())},
        admit={s: (rec[1], rec[2]) for s, rec in sorted(records.items())},
        valuations={lv: valuations[lv] for lv in used},
        variables=form.names,
        body_evaluations=state["evals"],
        target_T=inst.target_T,
    )


def eval_formula(g: ConcurrentGame, inst: FormulaInstance | str) -> SolveResult:
    """Evaluate a winning-set formula; ``g`` must already fit the formula's case form."""
    if isinstance(inst, str):
        inst = FormulaInstance(inst)
    return evaluate(g, inst)


def body_pass(g: ConcurrentGame, inst: FormulaInstance, values: Sequence[StateSet]) -> StateSet:
    """One application of the formula body at the given variable values."""
    form = build_formula(inst.kind, formula_size(g, inst.kind))
    if len(values) != len(form.names):
        raise ValueError(f"expected {len(form.names)} values, got {len(values)}")
    tabs = tables(g)
    full = (1 << g.n) - 1
    vals = [v.mask for v in values]
    target = 0 if inst.target_T is None else inst.target_T.mask
    mask = 0
    for s in g.states():
        bit = 1 << s
        if target & bit:
            mask |= 0 if form.dual else bit
            continue
        if _op_at(tabs[s], form.terms[g.priority[s]], vals, full, form.dual)[0]:
            mask |= bit
    return StateSet(g.n, mask)


def _recheck(g: ConcurrentGame, form: Formula, s: int, term_k: int, wit, values: list[StateSet]) -> bool:
    term = form.terms.get(term_k)
    if term is None or term_k != g.priority[s]:
        return False
    chain = form.chain(term, values)
    if not form.dual:
        if form.limit:
            return isinstance(wit, Ranks) and check_ranks(g, s, chain, wit.as_dict())
        return isinstance(wit, GoodSet) and check_goodset(g, s, chain, wit.actions)
    comp = chain.complemented()
    if comp.lpre_pair is not None:
        return not check_any_ranks(g, s, comp)
    if not isinstance(wit, Counter):
        return False
    for u, b in zip(wit.supports, wit.replies):
        d = 0
        for a in u:
            d |= g.dest[s][a][b]
        if check_goodset_dest(d, comp):
            return False
    return set(wit.supports) == set(tables(g)[s].subsets)


def check_goodset_dest(d: int, chain: ApreChain) -> bool:
    pairs, pre, _ = chain.masks()
    for y, x in pairs:
        if d & ~y == 0 and d & x:
            return True
    return pre is not None and d & ~pre == 0


def check_any_ranks(g: ConcurrentGame, s: int, chain: ApreChain) -> bool:
    tab = tables(g)[s]
    return any(check_ranks(g, s, chain, dict(zip(dom, vec))) for _, dom, vec in tab.rank_candidates())


def eval_with_levels_replay(g: ConcurrentGame, inst: FormulaInstance | str, result: SolveResult) -> bool:
    """Re-verify every recorded admission at its recorded valuation."""
    if isinstance(inst, str):
        inst = FormulaInstance(inst)
    form = build_formula(inst.kind, formula_size(g, inst.kind))
    if tuple(form.names) != tuple(result.variables):
        return False
    target = inst.target_T
    for s in result.winning:
        lv = result.levels.get(s)
        if lv is None or s not in result.admit or lv not in result.valuations:
            return False
        masks = result.valuations[lv]
        values = [StateSet(g.n, m) for m in masks]
        for d, mu in enumerate(form.is_mu):
            if mu and s in values[d]:
                return False
        term_k, wit = result.admit[s]
        if term_k == TARGET:
            if form.dual or target is None or s not in target:
                return False
            continue
        if target is not None and s in target and form.dual:
            return False
        if not _recheck(g, form, s, term_k, wit, values):
            return False
    if set(result.levels) != set(result.winning):
        return False
    return True
