import json

import pytest

from qualgame.errors import GameError, MissingEps
from qualgame.game import ConcurrentGame, SuccessorDist, gen_random
from qualgame.solver import solve_almost, solve_limit
from qualgame.stateset import StateSet
from qualgame.strategy import (
    MemorylessStrategy,
    compose_ranks,
    extract_limit_eps,
    extract_uniform_almost,
    strategy_from_json,
    strategy_to_dict,
    strategy_to_json,
    verify_almost,
    verify_value,
)

FIG2_RANKS = MemorylessStrategy.ranked([{0: 0, 1: 1}, {0: 0}, {0: 0}, {0: 0}])


def test_mp_uniform_extraction(mp):
    _, res = solve_almost(mp)
    strat = extract_uniform_almost(mp, res)
    assert strat.support(0) == (0, 1)
    assert verify_almost(mp, strat, mp.all_states())


def test_absorbing_even_state():
    d = SuccessorDist(((0, 1.0),))
    g = ConcurrentGame(("s",), (2,), (("x", "y"),), (("z",),), (((d,), (d,)),))
    _, res = solve_almost(g)
    strat = extract_uniform_almost(g, res)
    assert len(strat.support(0)) == 1


def test_verify_almost_examples(mp):
    uni = MemorylessStrategy.uniform([(0, 1), (0,)])
    pure = MemorylessStrategy.uniform([(0,), (0,)])
    assert verify_almost(mp, uni, mp.all_states())
    assert not verify_almost(mp, pure, mp.set_of(["s0"]))
    assert verify_almost(mp, pure, mp.no_states())


def test_verify_value_fig2(fig2):
    claim = fig2.set_of(["s0", "s1", "s3"])
    prev = None
    for eps in (0.1, 0.01, 0.001):
        v = verify_value(fig2, FIG2_RANKS, eps, claim)
        assert v[0] <= 0.1 + 1e-9
        if prev is not None:
            assert all(v[s] <= prev[s] + 1e-12 for s in claim)
        prev = v
    with pytest.raises(MissingEps):
        verify_value(fig2, FIG2_RANKS, None)


def test_uniform_ranks_on_almost_set(mp):
    strat = MemorylessStrategy.ranked([{0: 0, 1: 0}, {0: 0}])
    v = verify_value(mp, strat, 0.3, mp.all_states())
    assert list(v) == [0.0, 0.0]


@pytest.mark.parametrize("target", [0.1, 0.01])
def test_fig2_limit_extraction(fig2, target):
    _, res = solve_limit(fig2)
    strat, bound = extract_limit_eps(fig2, res, target)
    r = strat.table[0]
    assert r[0] == 0 and r[1] >= 1
    assert bound <= target
    v = verify_value(fig2, strat, strat.eps, res.winning)
    assert max(v[s] for s in res.winning) <= target + 1e-6
    assert strat.table[1] == {0: 0}


def test_mp_limit_is_uniform(mp):
    _, res = solve_limit(mp)
    strat, bound = extract_limit_eps(mp, res, 0.5)
    assert len(set(strat.table[0].values())) == 1
    assert bound == 0.0


def test_eps_target_range(fig2):
    _, res = solve_limit(fig2)
    with pytest.raises(ValueError):
        extract_limit_eps(fig2, res, 1.0)


@pytest.mark.parametrize("seed", range(60))
def test_random_limit_extraction(seed):
    g = gen_random(4, 3, 2, 3, seed)
    _, res = solve_limit(g)
    if not res.winning:
        return
    strat, bound = extract_limit_eps(g, res, 0.05)
    assert bound <= 0.05
    assert strat.fits(g)


@pytest.mark.parametrize("seed", range(60))
def test_random_uniform_extraction(seed):
    g = gen_random(5, 3, 2, 4, seed)
    _, res = solve_almost(g)
    strat = extract_uniform_almost(g, res)
    assert verify_almost(g, strat, res.winning)


def test_compose_ranks_scales_by_level(fig2):
    _, res = solve_limit(fig2)
    strat = compose_ranks(fig2, res)
    assert strat.kind == "ranked" and strat.eps is None


def test_distribution_kinds():
    assert MemorylessStrategy.uniform([(2, 0)]).distribution(0) == {0: 0.5, 2: 0.5}
    w = MemorylessStrategy.weighted([{0: 3.0, 1: 1.0}])
    assert w.distribution(0) == {0: 0.75, 1: 0.25}
    r = MemorylessStrategy.ranked([{0: 1, 1: 2}])
    assert r.distribution(0, 0.5) == pytest.approx({0: 2 / 3, 1: 1 / 3})
    with pytest.raises(MissingEps):
        r.distribution(0)
    with pytest.raises(ValueError):
        MemorylessStrategy.uniform([()])


def test_json_round_trip(fig2, mp):
    strat = FIG2_RANKS.with_eps(0.1, 0.05)
    back = strategy_from_json(fig2, strategy_to_json(fig2, strat))
    assert back == strat
    uni = MemorylessStrategy.uniform([(0, 1), (0,)])
    assert strategy_from_json(mp, strategy_to_json(mp, uni)) == uni
    w = MemorylessStrategy.weighted([{0: 0.25, 1: 0.75}, {0: 1.0}])
    assert strategy_from_json(mp, strategy_to_json(mp, w)) == w


def test_json_reserved_state_name():
    d = SuccessorDist(((0, 1.0),))
    g = ConcurrentGame(("kind",), (2,), (("x",),), (("y",),), (((d,),),))
    strat = MemorylessStrategy.uniform([(0,)])
    doc = strategy_to_dict(g, strat)
    assert doc["states"] == {"kind": {"support": ["x"]}}
    assert strategy_from_json(g, json.dumps(doc)) == strat


def test_json_errors(mp):
    with pytest.raises(GameError):
        strategy_from_json(mp, '{"kind": "uniform", "s0": {"support": ["zz"]}}')
    with pytest.raises(GameError):
        strategy_from_json(mp, '{"kind": "ranked", "s0": {"support": ["a"]}}')
    with pytest.raises(GameError):
        strategy_from_json(mp, "[1]")
    with pytest.raises(GameError):
        strategy_from_json(mp, "{")
