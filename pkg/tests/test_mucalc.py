import dataclasses

import pytest

from qualgame.errors import CaseMismatch
from qualgame.game import CASE1, CASE2, gen_random, normalize_priorities
from qualgame.mucalc import (
    ALMOST_CASE1,
    ALMOST_CASE2,
    DUAL_OF,
    KINDS,
    LIMIT_COMPLEMENT,
    LIMIT_IPM,
    POSITIVE_CASE1,
    POSITIVE_CASE2,
    FormulaInstance,
    body_pass,
    eval_formula,
    eval_with_levels_replay,
)
from qualgame.predecessors import GoodSet
from qualgame.stateset import StateSet


def norm(g, kind):
    return normalize_priorities(g, FormulaInstance(kind).case)[0]


def run(g, kind):
    gn = norm(g, kind)
    return gn, eval_formula(gn, kind)


def S(g, *names):
    return g.set_of(names)


def test_mp_almost(mp):
    _, res = run(mp, ALMOST_CASE2)
    assert res.winning == mp.all_states()
    assert res.admit[0][1] == GoodSet((0, 1))


def test_fig3_almost(fig3):
    assert not run(fig3, ALMOST_CASE1)[1].winning
    assert not run(fig3, ALMOST_CASE2)[1].winning


def test_fig2_limit(fig2):
    assert run(fig2, LIMIT_IPM)[1].winning == S(fig2, "s0", "s1", "s3")
    assert run(fig2, ALMOST_CASE2)[1].winning == S(fig2, "s1")
    assert run(fig2, LIMIT_COMPLEMENT)[1].winning == S(fig2, "s2")


def test_fig4_limit(fig4):
    assert not run(fig4, LIMIT_IPM)[1].winning


@pytest.mark.parametrize("name", ["mp", "fig2", "fig3", "fig4"])
@pytest.mark.parametrize("kind", KINDS)
def test_fixture_replay(request, name, kind):
    g = request.getfixturevalue(name)
    gn, res = run(g, kind)
    assert eval_with_levels_replay(gn, kind, res)


def test_broken_witness_detected(mp):
    gn, res = run(mp, ALMOST_CASE2)
    term, _ = res.admit[0]
    broken = dataclasses.replace(res, admit={**res.admit, 0: (term, GoodSet((0,)))})
    assert not eval_with_levels_replay(gn, ALMOST_CASE2, broken)


def test_permuted_levels_detected():
    caught = 0
    for seed in range(200):
        g = gen_random(4, 2, 2, 3, seed)
        for kind in (ALMOST_CASE2, LIMIT_IPM, POSITIVE_CASE1):
            gn, res = run(g, kind)
            members = list(res.winning)
            distinct = [(s, t) for s in members for t in members if s < t and res.levels[s] != res.levels[t]]
            if not distinct:
                continue
            s, t = distinct[0]
            levels = dict(res.levels)
            levels[s], levels[t] = levels[t], levels[s]
            if not eval_with_levels_replay(gn, kind, dataclasses.replace(res, levels=levels)):
                caught += 1
    assert caught > 0


@pytest.mark.parametrize("seed", range(40))
def test_fixpoint_and_replay_on_random_games(seed):
    g = gen_random(5, 2, 2, 4, seed)
    for kind in KINDS:
        gn, res = run(g, kind)
        inst = FormulaInstance(kind)
        w = res.winning
        assert body_pass(gn, inst, [w] * len(res.variables)) == w
        assert eval_with_levels_replay(gn, kind, res)
        assert set(res.levels) == set(w)


@pytest.mark.parametrize("seed", range(60))
def test_complementation(seed):
    g = gen_random(4, 2, 2, 3, seed)
    for kind in (ALMOST_CASE1, ALMOST_CASE2, LIMIT_IPM):
        w = run(g, kind)[1].winning
        assert run(g, DUAL_OF[kind])[1].winning == ~w


@pytest.mark.parametrize("seed", range(40))
def test_cases_agree(seed):
    g = gen_random(5, 2, 2, 5, seed)
    assert run(g, ALMOST_CASE1)[1].winning == run(g, ALMOST_CASE2)[1].winning
    assert run(g, POSITIVE_CASE1)[1].winning == run(g, POSITIVE_CASE2)[1].winning


@pytest.mark.parametrize("seed", range(40))
def test_almost_within_limit(seed):
    g = gen_random(4, 3, 2, 3, seed)
    assert run(g, ALMOST_CASE2)[1].winning <= run(g, LIMIT_IPM)[1].winning


def test_case_mismatch():
    g = gen_random(3, 2, 2, 3, 0).with_priorities([0, 1, 2])
    for kind in (ALMOST_CASE2, POSITIVE_CASE2, LIMIT_IPM, LIMIT_COMPLEMENT):
        with pytest.raises(CaseMismatch):
            eval_formula(g, kind)
    eval_formula(g, ALMOST_CASE1)


def test_target_set_is_absorbed(fig3):
    gn = norm(fig3, ALMOST_CASE1)
    t = S(gn, "s1")
    inst = FormulaInstance(ALMOST_CASE1, t)
    res = eval_formula(gn, inst)
    assert t <= res.winning
    assert eval_with_levels_replay(gn, inst, res)
    assert body_pass(gn, inst, [res.winning] * len(res.variables)) == res.winning


def test_valuations_are_recorded(fig2):
    gn, res = run(fig2, LIMIT_IPM)
    for s in res.winning:
        val = res.valuation(s)
        assert set(val) == set(res.variables)
        assert all(isinstance(v, StateSet) for v in val.values())
    assert res.body_evaluations > 0


def test_string_kind_accepted(mp):
    assert eval_formula(mp, ALMOST_CASE2).winning == eval_formula(mp, FormulaInstance(ALMOST_CASE2)).winning


def test_unknown_kind():
    with pytest.raises(ValueError):
        FormulaInstance("Nope")


def test_case_of_kinds():
    assert FormulaInstance(ALMOST_CASE1).case == CASE1
    assert FormulaInstance(LIMIT_COMPLEMENT).case == CASE2
    assert FormulaInstance(POSITIVE_CASE2).dual and FormulaInstance(LIMIT_IPM).limit
