"""Brute-force reference procedures and the differential test driver.

The ``oracle_*`` functions only rely on the game model and the MDP routines:
they enumerate player-1 memoryless strategies and ask the MDP solver whether
player 2 can spoil the objective.
"""

from __future__ import annotations

import json
import math
import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from itertools import combinations, product
from typing import Callable, Sequence

from .errors import BlowupGuard, InternalSoundnessError
from .game import CASE1, CASE2, ConcurrentGame, game_to_dict, gen_random, normalize_priorities, perturb_probabilities, strip_probabilities
from .mdp import fix_strategy, mdp_qual_parity, mdp_value_parity
from .mucalc import (
    ALMOST_CASE1,
    ALMOST_CASE2,
    LIMIT_COMPLEMENT,
    LIMIT_IPM,
    POSITIVE_CASE1,
    POSITIVE_CASE2,
    eval_formula,
    eval_with_levels_replay,
)
from .predecessors import ApreChain, dual_complement, fpre2_direct
from .reductions import FP_M, P_M, solve_class
from .stateset import StateSet
from .strategy import MemorylessStrategy, extract_uniform_almost, verify_almost

STRATEGY_LIMIT = 10**5
PATTERN_LIMIT = 10**4
DEFAULT_GRID = (0.1, 0.01, 0.001)


def _supports(k: int) -> list[tuple[int, ...]]:
    return [c for r in range(1, k + 1) for c in combinations(range(k), r)]


def _guard(counts: Sequence[int], limit: int) -> None:
    total = math.prod(counts)
    if total > limit:
        raise BlowupGuard(total, limit)


def _almost_over(g: ConcurrentGame, per_state: Sequence[Sequence[tuple[int, ...]]]) -> StateSet:
    win = StateSet.empty(g.n)
    full = StateSet.full(g.n)
    for choice in product(*per_state):
        _, spoil = mdp_qual_parity(fix_strategy(g, MemorylessStrategy.uniform(choice)), controller_wins_even=False)
        win = win | ~spoil
        if win == full:
            break
    return win


def oracle_almost_UM(g: ConcurrentGame) -> StateSet:
    """Almost-sure winning states by enumerating every uniform memoryless strategy."""
    per_state = [_supports(len(m)) for m in g.moves1]
    _guard([len(p) for p in per_state], STRATEGY_LIMIT)
    return _almost_over(g, per_state)


def oracle_almost_PM(g: ConcurrentGame) -> StateSet:
    """Almost-sure winning states by enumerating every pure memoryless strategy."""
    per_state = [[(a,) for a in range(len(m))] for m in g.moves1]
    _guard([len(p) for p in per_state], STRATEGY_LIMIT)
    return _almost_over(g, per_state)


def _rank_patterns(k: int) -> list[dict[int, int]]:
    out = []
    for dom in _supports(k):
        for vec in product(range(len(dom)), repeat=len(dom)):
            if set(vec) == set(range(max(vec) + 1)):
                out.append(dict(zip(dom, vec)))
    return out


def oracle_limit_IPM(g: ConcurrentGame, eps_grid: Sequence[float] = DEFAULT_GRID) -> StateSet:
    """Approximate limit-sure winning states over rank-pattern strategies.

    A state counts when, for some pattern, player 2's best-response value is
    nonincreasing along the descending grid and ends below its smallest point.
    """
    grid = sorted(eps_grid, reverse=True)
    per_state = [_rank_patterns(len(m)) for m in g.moves1]
    _guard([len(p) for p in per_state], PATTERN_LIMIT)
    win = 0
    full = (1 << g.n) - 1
    for choice in product(*per_state):
        strat = MemorylessStrategy.ranked(choice)
        series = [mdp_value_parity(fix_strategy(g, strat, e), controller_wins_even=False) for e in grid]
        for s in range(g.n):
            vals = [float(v[s]) for v in series]
            if all(b <= a + 1e-9 for a, b in zip(vals, vals[1:])) and vals[-1] < grid[-1]:
                win |= 1 << s
        if win == full:
            break
    return StateSet(g.n, win)


# ---------------------------------------------------------------------------
# Differential harness

@dataclass
class DiffConfig:
    count: int = 200
    states: int = 4
    actions: int = 2
    succ: int = 2
    prio: int = 3
    seed: int = 1
    jobs: int = 1
    duality_tuples: int = 3


@dataclass
class DiffReport:
    instances: int
    mismatches: list[dict] = field(default_factory=list)
    wall_time: float = 0.0
    checks: dict[str, dict[str, int]] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return not self.mismatches

    def to_dict(self) -> dict:
        return {
            "instances": self.instances,
            "passed": self.passed,
            "checks": {k: dict(v) for k, v in sorted(self.checks.items())},
            "mismatches": self.mismatches,
            "wall_time": round(self.wall_time, 3),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def instance_seeds(seed: int, count: int) -> list[int]:
    rng = random.Random(seed)
    return [rng.getrandbits(63) for _ in range(count)]


def _solve_um(g: ConcurrentGame, case: str) -> StateSet:
    gn, _ = normalize_priorities(g, case)
    return eval_formula(gn, ALMOST_CASE1 if case == CASE1 else ALMOST_CASE2).winning


def default_um_solver(g: ConcurrentGame) -> StateSet:
    return _solve_um(g, CASE2)


def random_nested(n: int, length: int, rng: random.Random) -> list[StateSet]:
    """Increasing sequence of ``length`` random subsets of ``{0..n-1}``."""
    cur = rng.getrandbits(n) & rng.getrandbits(n) if n else 0
    out = []
    for _ in range(length):
        out.append(StateSet(n, cur))
        cur |= rng.getrandbits(n) & rng.getrandbits(n)
    return out


def random_p2_chain(n: int, pairs: int, even: bool, limit: bool, rng: random.Random) -> ApreChain:
    """Player-2 arguments whose complements are nested as the player-1 operator needs."""
    length = 2 * pairs + (1 if even else 0) + (2 if limit else 0)
    seq = random_nested(n, length, rng)
    pos = 0
    lx = None
    if limit:
        lx = seq[pos]
        pos += 1
    xs = seq[pos:pos + pairs]
    pos += pairs
    pre = None
    if even:
        pre = seq[pos]
        pos += 1
    ys = list(reversed(seq[pos:pos + pairs]))
    pos += pairs
    ly = seq[pos] if limit else None
    p1 = ApreChain(list(zip(ys, xs)), pre, (ly, lx) if limit else None)
    return p1.complemented()


def check_duality(g: ConcurrentGame, rng: random.Random, tuples: int = 3) -> list[str]:
    """Compare direct and complemented player-2 operators on random argument tuples."""
    failures = []
    n = g.n
    for _ in range(tuples):
        for even in (False, True):
            pairs = rng.randint(0 if even else 1, 3)
            chain = random_p2_chain(n, pairs, even, False, rng)
            kind = "fpreeven" if even else "fpreodd"
            direct = fpre2_direct(g, chain, "even" if even else "odd")
            dual = dual_complement(g, chain, kind)
            if direct != dual:
                failures.append(f"{kind} pairs={pairs}")
            # limit variant: the complement must sit between two direct computations
            lchain = random_p2_chain(n, pairs, even, True, rng)
            fr = dual_complement(g, lchain, "frpreeven" if even else "frpreodd")
            ly, lx = lchain.lpre_pair
            mode = "even" if even else "odd"
            low = fpre2_direct(g, ApreChain([(StateSet.empty(n), lx)] + list(lchain.pairs), lchain.pre_set), mode)
            high = fpre2_direct(g, ApreChain([(ly, lx)] + list(lchain.pairs), lchain.pre_set), mode)
            if not (low <= fr <= high):
                failures.append(f"frpre{mode} sandwich pairs={pairs}")
    return failures


Check = Callable[[ConcurrentGame], StateSet]


def check_instance(seed: int, cfg: DiffConfig, um_solver: Check | None = None) -> tuple[dict[str, bool], list[dict]]:
    """Run every differential check on the game generated from ``seed``."""
    g = gen_random(cfg.states, cfg.actions, cfg.succ, cfg.prio, seed)
    solver = um_solver or default_um_solver
    results: dict[str, bool] = {}
    mismatches: list[dict] = []

    def record(name: str, ok: bool, cls: str = "", expected=None, got=None):
        results[name] = results.get(name, True) and ok
        if not ok:
            mismatches.append({
                "seed": seed,
                "check": name,
                "class": cls,
                "expected": _fmt(g, expected),
                "got": _fmt(g, got),
                "game": game_to_dict(g),
            })

    um = solver(g)
    record("U-M vs oracle", um == (o := oracle_almost_UM(g)), "U-M", o, um)
    pm = solve_class(g, P_M)
    record("P-M vs oracle", pm == (o := oracle_almost_PM(g)), "P-M", o, pm)

    rng = random.Random(seed)
    dual_failures = check_duality(g, rng, cfg.duality_tuples)
    record("duality", not dual_failures, "predecessors", [], dual_failures)

    results_by_kind = {}
    for kind, case in ((ALMOST_CASE1, CASE1), (ALMOST_CASE2, CASE2), (LIMIT_IPM, CASE2),
                       (POSITIVE_CASE1, CASE1), (POSITIVE_CASE2, CASE2), (LIMIT_COMPLEMENT, CASE2)):
        gn, _ = normalize_priorities(g, case)
        res = eval_formula(gn, kind)
        results_by_kind[kind] = (gn, res)
        record("replay", eval_with_levels_replay(gn, kind, res), kind, True, False)
    w = {k: r.winning for k, (_, r) in results_by_kind.items()}
    for almost, positive in ((ALMOST_CASE1, POSITIVE_CASE1), (ALMOST_CASE2, POSITIVE_CASE2),
                             (LIMIT_IPM, LIMIT_COMPLEMENT)):
        record("complementation", w[positive] == ~w[almost], positive, ~w[almost], w[positive])
    record("case cross-check", w[ALMOST_CASE1] == w[ALMOST_CASE2], "U-M", w[ALMOST_CASE1], w[ALMOST_CASE2])

    um_ref = w[ALMOST_CASE2]
    lim = w[LIMIT_IPM]
    record("inclusion", pm <= um_ref, "P-M <= U-M", um_ref, pm)
    record("inclusion", um_ref <= lim, "U-M <= IP-M-limit", lim, um_ref)
    try:
        fps = [solve_class(g, FP_M, b) for b in (1, 2, 3)]
        record("inclusion", fps[0] <= fps[1] <= fps[2], "FP-M monotone", fps[1], fps[0])
        kmax = max(len(m) for m in g.moves1)
        fp_k = fps[kmax - 1] if kmax <= 3 else solve_class(g, FP_M, kmax)
        record("inclusion", fp_k == um_ref, f"FP-M({kmax}) == U-M", um_ref, fp_k)
    except BlowupGuard:
        pass

    pert = perturb_probabilities(g, seed ^ 0x5EED)
    bare = strip_probabilities(g)
    for other, label in ((pert, "perturbed"), (bare, "support-only")):
        for kind in (ALMOST_CASE2, LIMIT_IPM, POSITIVE_CASE1):
            case = CASE1 if kind == POSITIVE_CASE1 else CASE2
            on, _ = normalize_priorities(other, case)
            got = eval_formula(on, kind).winning
            record("support-independence", got == w[kind], f"{kind} {label}", w[kind], got)
        got = solve_class(other, P_M)
        record("support-independence", got == pm, f"P-M {label}", pm, got)

    gn, res = results_by_kind[ALMOST_CASE2]
    ok = True
    if res.winning:
        try:
            strat = extract_uniform_almost(gn, res)
            ok = verify_almost(g, strat, res.winning)
        except InternalSoundnessError:
            ok = False
    record("strategy soundness", ok, "U-M", True, ok)
    return results, mismatches


def _fmt(g: ConcurrentGame, value):
    if isinstance(value, StateSet):
        return g.names(value)
    return value


def _run_one(args):
    seed, cfg, solver = args
    return seed, check_instance(seed, cfg, solver)


def run_differential(cfg: DiffConfig, um_solver: Check | None = None) -> DiffReport:
    """Generate ``cfg.count`` games and cross-check every solver against the references."""
    start = time.perf_counter()
    seeds = instance_seeds(cfg.seed, cfg.count)
    jobs = [(s, cfg, um_solver) for s in seeds]
    if cfg.jobs > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            outcomes = list(pool.map(_run_one, jobs, chunksize=max(1, len(jobs) // (4 * cfg.jobs))))
    else:
        outcomes = [_run_one(j) for j in jobs]
    report = DiffReport(instances=len(seeds))
    for seed, (results, mismatches) in sorted(outcomes, key=lambda o: o[0]):
        for name, ok in results.items():
            bucket = report.checks.setdefault(name, {"pass": 0, "fail": 0})
            bucket["pass" if ok else "fail"] += 1
        report.mismatches.extend(mismatches)
    report.wall_time = time.perf_counter() - start
    return report
