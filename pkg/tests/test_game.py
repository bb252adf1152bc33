import json

import pytest

from qualgame.errors import (
    BadProbabilitySum,
    DuplicateTransition,
    EmptyMoveSet,
    GameError,
    MissingTransition,
    MixedProbabilityMode,
    UnknownAction,
    UnknownState,
)
from qualgame.fixtures import fixture_text
from qualgame.game import (
    CASE1,
    CASE2,
    gen_random,
    game_to_dict,
    normalize_priorities,
    parse_game,
    perturb_probabilities,
    preferred_case,
    serialize_game,
    stateset_from_json,
    stateset_to_json,
    strip_probabilities,
)

from conftest import det_game


def mp_doc():
    return json.loads(fixture_text("matching_pennies"))


def test_matching_pennies_parses(mp):
    assert mp.state_count == 2
    assert mp.moves1[0] == ("a", "b")
    assert mp.moves2[0] == ("c", "d")
    assert mp.priority == (1, 2)


def test_fig3_parses(fig3):
    assert fig3.state_count == 3
    assert fig3.priority == (1, 2, 3)


def test_missing_transition():
    doc = mp_doc()
    doc["delta"] = [t for t in doc["delta"] if not (t["from"] == "s0" and t["a1"] == "b" and t["a2"] == "d")]
    with pytest.raises(MissingTransition) as exc:
        parse_game(doc)
    assert exc.value.triple == ("s0", "b", "d")


def test_bad_probability_sum():
    doc = mp_doc()
    doc["delta"][0]["succ"] = [{"to": "s0", "p": 0.5}, {"to": "s1", "p": 0.4}]
    with pytest.raises(BadProbabilitySum) as exc:
        parse_game(doc)
    assert abs(exc.value.total - 0.9) < 1e-12


def test_probability_tolerance_accepts_rounding():
    doc = mp_doc()
    doc["delta"][0]["succ"] = [{"to": "s0", "p": 0.1}, {"to": "s1", "p": 0.9 + 5e-10}]
    parse_game(doc)


def test_mixed_probability_mode():
    doc = mp_doc()
    doc["delta"][0]["succ"] = [{"to": "s0", "p": 0.5}, {"to": "s1"}]
    with pytest.raises(MixedProbabilityMode):
        parse_game(doc)


def test_unknown_state_and_action():
    doc = mp_doc()
    doc["delta"][0]["succ"] = [{"to": "nowhere"}]
    with pytest.raises(UnknownState):
        parse_game(doc)
    doc = mp_doc()
    doc["delta"][0]["a1"] = "z"
    with pytest.raises(UnknownAction):
        parse_game(doc)


def test_empty_move_set():
    doc = mp_doc()
    doc["moves2"]["s1"] = []
    with pytest.raises(EmptyMoveSet):
        parse_game(doc)


def test_duplicate_transition():
    doc = mp_doc()
    doc["delta"].append(dict(doc["delta"][0]))
    with pytest.raises(DuplicateTransition):
        parse_game(doc)


@pytest.mark.parametrize("text", ["not json", "[]", "{}", '{"states": []}'])
def test_malformed_documents(text):
    with pytest.raises(GameError):
        parse_game(text)


def test_support_only_game_is_accepted():
    doc = mp_doc()
    for t in doc["delta"]:
        for e in t["succ"]:
            e.pop("p", None)
    g = parse_game(doc)
    assert not g.has_probabilities
    assert g.delta[0][0][0].probabilities() == [(1, 1.0)]


@pytest.mark.parametrize("name", ["matching_pennies", "fig2", "fig3", "fig4"])
def test_round_trip_fixtures(name):
    g = parse_game(fixture_text(name))
    assert parse_game(serialize_game(g)) == g


@pytest.mark.parametrize("seed", range(20))
def test_round_trip_random(seed):
    g = gen_random(4, 2, 2, 3, seed)
    assert parse_game(serialize_game(g)) == g
    bare = strip_probabilities(g)
    assert parse_game(serialize_game(bare)) == bare


def test_gen_random_minimal():
    g = gen_random(1, 1, 1, 0, 99)
    assert g.n == 1 and g.priority == (0,)
    assert g.dest[0][0][0] == 1


def test_gen_random_deterministic_and_bounded():
    assert gen_random(4, 2, 2, 3, 7) == gen_random(4, 2, 2, 3, 7)
    assert gen_random(4, 2, 2, 3, 7) != gen_random(4, 2, 2, 3, 8)
    for seed in range(30):
        g = gen_random(5, 3, 2, 4, seed)
        for s in g.states():
            assert 1 <= len(g.moves1[s]) <= 3 and 1 <= len(g.moves2[s]) <= 3
            assert 0 <= g.priority[s] <= 4
            for row in g.delta[s]:
                for d in row:
                    assert 1 <= len(d.entries) <= 2
                    assert abs(sum(p for _, p in d.entries) - 1) < 1e-12


def test_perturb_keeps_supports():
    g = gen_random(5, 3, 3, 4, 3)
    p = perturb_probabilities(g, 11)
    assert p.dest == g.dest
    assert p != g


def test_stateset_json(mp):
    s = stateset_from_json(mp, '["s1"]')
    assert list(s) == [1]
    assert stateset_to_json(mp, mp.all_states()) == '["s0", "s1"]'
    with pytest.raises(UnknownState):
        stateset_from_json(mp, '["zz"]')


# -- priority normal forms

def game_with(prios):
    return det_game([[[i]] for i in range(len(prios))], prios)


def test_normalize_case1_pads_bottom():
    g, form = normalize_priorities(game_with([1, 2, 3]), CASE1)
    assert (form.n, form.shift, form.low, form.high) == (2, 0, 0, 3)
    assert form.padded_classes == frozenset({0})
    assert g.priority == (1, 2, 3)


def test_normalize_case2_shifts_zero():
    g, form = normalize_priorities(game_with([0, 1]), CASE2)
    assert form.shift == 2
    assert g.priority == (2, 3)
    assert (form.low, form.high) == (1, 4)
    assert form.padded_classes == frozenset({1, 4})


def test_normalize_case2_already_in_form():
    g0 = game_with([1, 2])
    g, form = normalize_priorities(g0, CASE2)
    assert g is g0 and form.n == 1 and form.shift == 0 and not form.padded_classes


@pytest.mark.parametrize("seed", range(40))
@pytest.mark.parametrize("case", [CASE1, CASE2])
def test_normalize_preserves_structure_and_parity(seed, case):
    g0 = gen_random(4, 2, 2, 5, seed)
    g, form = normalize_priorities(g0, case)
    assert form.shift % 2 == 0
    assert (g.moves1, g.moves2, g.delta, g.state_names) == (g0.moves1, g0.moves2, g0.delta, g0.state_names)
    assert all((p - q) == form.shift for p, q in zip(g.priority, g0.priority))
    assert all(form.low <= p <= form.high for p in g.priority)
    assert not form.padded_classes & set(g.priority)


def test_preferred_case():
    assert preferred_case(game_with([1, 2])) == CASE2
    assert preferred_case(game_with([0, 1])) == CASE1
