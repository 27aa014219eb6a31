import json
import subprocess
import sys
from pathlib import Path

import pytest

from valuations.cli import main

WS = str(Path(__file__).resolve().parent.parent / "workspace")


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_integrate_worked_instance(capsys):
    code, out, _ = run(capsys, "integrate", WS, "nu", "h")
    assert code == 0 and out.strip() == "5/12 == 5/12 OK"
    code, out, _ = run(capsys, "integrate", WS, "zero", "h")
    assert code == 0 and out.strip() == "0 == 0 OK"


def test_integrate_mismatch_exit_2(capsys):
    code, _, err = run(capsys, "integrate", WS, "nu", "g")
    assert code == 2 and "PosetMismatch" in err


def test_unknown_name_exit_2(capsys):
    code, _, err = run(capsys, "compare", WS, "nu", "nobody")
    assert code == 2 and "NameNotFound" in err


@pytest.mark.parametrize(
    "v1, v2, relation",
    [("delta_a", "delta_b", "LEQ"), ("nu", "nu", "EQ"), ("half_a", "half_b", "INCOMPARABLE"), ("half_bot", "split", "LEQ")],
)
def test_compare(capsys, v1, v2, relation):
    code, out, _ = run(capsys, "compare", WS, v1, v2, "--json")
    data = json.loads(out)
    assert code == 0 and data["relation"] == relation == data["oracle"]


def test_fubini_json(capsys):
    code, out, _ = run(capsys, "fubini", WS, "nu", "mu", "k", "--json")
    data = json.loads(out)
    assert code == 0 and data["lhs"] == data["rhs"] == data["product"] == "11/48"


def test_laws(capsys):
    code, out, _ = run(capsys, "laws", "--seed", "1", "--trials", "200")
    assert code == 0
    assert out.splitlines() == ["left_unit: 200/200", "right_unit: 200/200", "associativity: 200/200"]


def test_pushforward(capsys):
    code, out, _ = run(capsys, "pushforward", WS, "lebesgue", "ab")
    assert code == 0 and out.splitlines()[0] == "1/2 a, 1/2 b"


def test_eval(capsys):
    code, out, _ = run(capsys, "eval", WS, "case_mix")
    assert code == 0 and out.splitlines()[0] == "1/3 c"
    code, _, err = run(capsys, "eval", WS, "case_chain")
    assert code == 2 and "ContinuityViolation" in err


def test_equiv(capsys):
    assert run(capsys, "equiv", WS, "swap_xy", "swap_yx")[0] == 0
    assert run(capsys, "equiv", WS, "bias_half", "bias_third")[0] == 1
    assert run(capsys, "equiv", WS, "bias_half", "bias_third", "--expect", "different")[0] == 0


def test_central(capsys):
    code, out, _ = run(capsys, "central", WS, "nu", "--trials", "500")
    assert code == 0 and out.startswith("falsified: false")


def test_suite_subset(capsys):
    code, out, _ = run(capsys, "suite", "--criteria", "3", "--json")
    data = json.loads(out)
    assert code == 0 and data["criteria"][0]["details"]["worked_instance"] == "5/12 == 5/12"
    assert run(capsys, "suite", "--criteria", "42")[0] == 2


def test_json_is_deterministic():
    cmd = [sys.executable, "-m", "valuations", "fubini", WS, "nu", "mu", "k", "--json"]
    first = subprocess.run(cmd, capture_output=True, check=True).stdout
    second = subprocess.run(cmd, capture_output=True, check=True).stdout
    assert first == second
