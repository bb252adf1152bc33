import json
import subprocess
import sys

import pytest

from qualgame.cli import main
from qualgame.fixtures import fixture_path


def fx(name):
    return str(fixture_path(name))


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.mark.parametrize("cls,want", [("U-M", ["s0", "s1"]), ("P-M", ["s1"]), ("IP-M-limit", ["s0", "s1"])])
def test_solve_matching_pennies(capsys, cls, want):
    code, out, _ = run(capsys, "solve", "--class", cls, "--game", fx("matching_pennies"))
    assert code == 0 and json.loads(out) == want


def test_solve_fig3_limit(capsys):
    code, out, _ = run(capsys, "solve", "--class", "IP-M-limit", "--game", fx("fig3"))
    assert code == 0 and json.loads(out) == []


def test_solve_fp_and_complement(capsys):
    code, out, _ = run(capsys, "solve", "--class", "FP-M", "--b", "2", "--game", fx("matching_pennies"))
    assert json.loads(out) == ["s0", "s1"]
    code, out, _ = run(capsys, "solve", "--class", "complement", "--of", "IP-M-limit", "--game", fx("fig2"))
    assert json.loads(out) == ["s2"]
    _, um, _ = run(capsys, "solve", "--class", "U-M", "--game", fx("fig2"))
    _, co, _ = run(capsys, "solve", "--class", "complement", "--game", fx("fig2"))
    assert sorted(json.loads(um) + json.loads(co)) == ["s0", "s1", "s2", "s3"]


def test_usage_errors(capsys):
    assert run(capsys, "solve", "--class", "FP-M", "--game", fx("fig2"))[0] == 2
    assert run(capsys, "solve", "--class", "bogus", "--game", fx("fig2"))[0] == 2
    assert run(capsys, "strategy", "--class", "IP-M-limit", "--game", fx("fig2"))[0] == 2
    assert run(capsys)[0] == 2


def test_validation_errors(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"states": [{"name": "s", "priority": 0}], "moves1": {"s": ["a"]}, '
                   '"moves2": {"s": ["b"]}, "delta": []}')
    code, _, err = run(capsys, "solve", "--class", "U-M", "--game", str(bad))
    assert code == 3 and "no transition" in err
    assert run(capsys, "solve", "--class", "U-M", "--game", str(tmp_path / "missing.json"))[0] == 3


def test_strategy_and_verify(capsys, tmp_path):
    code, out, _ = run(capsys, "strategy", "--class", "IP-M-limit", "--eps", "0.01", "--game", fx("fig2"))
    assert code == 0
    doc = json.loads(out)
    assert doc["kind"] == "ranked" and doc["bound"] <= 0.01
    strat = tmp_path / "s.json"
    strat.write_text(out)
    claim = tmp_path / "c.json"
    claim.write_text('["s0", "s1", "s3"]')
    code, out, _ = run(capsys, "verify", "--game", fx("fig2"), "--strategy", str(strat),
                       "--claim", str(claim), "--eps", "0.01")
    assert code == 0 and json.loads(out)["pass"]
    claim.write_text('["s2"]')
    code, out, _ = run(capsys, "verify", "--game", fx("fig2"), "--strategy", str(strat),
                       "--claim", str(claim), "--eps", "0.01")
    assert code == 1 and not json.loads(out)["pass"]


def test_uniform_strategy_verify(capsys, tmp_path):
    code, out, _ = run(capsys, "strategy", "--class", "U-M", "--game", fx("matching_pennies"))
    assert json.loads(out)["s0"]["support"] == ["a", "b"]
    strat = tmp_path / "s.json"
    strat.write_text(out)
    claim = tmp_path / "c.json"
    claim.write_text('["s0", "s1"]')
    args = ["verify", "--game", fx("matching_pennies"), "--strategy", str(strat), "--claim", str(claim)]
    assert run(capsys, *args)[0] == 0
    strat.write_text('{"kind": "uniform", "s0": {"support": ["a"]}, "s1": {"support": ["a"]}}')
    assert run(capsys, *args)[0] == 1


def test_reduce_and_oracle(capsys):
    code, out, _ = run(capsys, "reduce", "--pure", "--game", fx("matching_pennies"))
    assert code == 0 and len(json.loads(out)["states"]) == 5
    code, out, _ = run(capsys, "reduce", "--fp", "2", "--game", fx("matching_pennies"))
    assert len(json.loads(out)["states"]) == 2 + 3 + 1
    assert run(capsys, "reduce", "--game", fx("matching_pennies"))[0] == 2
    code, out, _ = run(capsys, "oracle", "--class", "IP-M-limit", "--game", fx("fig2"))
    assert json.loads(out) == ["s0", "s1", "s3"]


def test_random_and_diff(capsys):
    code, a, _ = run(capsys, "random", "--states", "3", "--actions", "2", "--succ", "2", "--prio", "3", "--seed", "4")
    _, b, _ = run(capsys, "random", "--states", "3", "--actions", "2", "--succ", "2", "--prio", "3", "--seed", "4")
    assert code == 0 and a == b and len(json.loads(a)["states"]) == 3
    code, out, _ = run(capsys, "diff", "--count", "5", "--states", "4", "--actions", "2", "--seed", "1")
    _, again, _ = run(capsys, "diff", "--count", "5", "--states", "4", "--actions", "2", "--seed", "1")
    assert code == 0 and json.loads(out)["passed"] and out == again


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "qualgame", "solve", "--class", "U-M",
                           "--game", fx("matching_pennies")], capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout) == ["s0", "s1"]
