from fractions import Fraction as Q
from pathlib import Path

import pytest

from valuations import FormatError, NameNotFound, build_poset, make_simple
from valuations.formats import (
    Workspace,
    dump_biintegrand,
    dump_cdf,
    dump_integrand,
    dump_poset,
    dump_stepmap,
    dump_valuation,
    load_workspace,
    rational,
)
from valuations.integration import Integrand
from valuations.interval import Cdf, StepMap
from valuations.monad import BiIntegrand

WORKSPACE = Path(__file__).resolve().parent.parent / "workspace"


def load(text):
    ws = Workspace()
    ws.load_text(text, "test")
    return ws


def test_rational():
    assert rational("3/4") == Q(3, 4)
    assert rational("1") == 1
    for bad in ("0.5", "1e-3", "1/0", "a/b", "1/2/3"):
        with pytest.raises(FormatError):
            rational(bad)


def test_decimal_weight_rejected():
    with pytest.raises(FormatError) as info:
        load("poset P\nelem a\nvaluation v on P\natom a 0.5\n")
    assert info.value.line == 4


def test_unknown_poset():
    with pytest.raises(NameNotFound):
        load("valuation v on Nowhere\natom a 1/2\n")


def test_errors_carry_line_numbers():
    with pytest.raises(FormatError) as info:
        load("poset P\nelem a\nelem b\ncover a b\ncover b a\n")
    assert info.value.source == "test"
    with pytest.raises(FormatError) as info:
        load("poset P\nelem a\nvaluation v on P\natom a 3/4\natom a 1/2\n")
    assert "exceeds 1" in str(info.value)
    with pytest.raises(FormatError):
        load("elem a\n")
    with pytest.raises(FormatError):
        load("poset P\nelem a\nposet P\nelem b\n")


def test_round_trip():
    p = build_poset(["bot", "l", "r", "top"], [("bot", "l"), ("bot", "r"), ("l", "top"), ("r", "top"), ("bot", "top")])
    e = build_poset(["u", "v"], [])
    nu = make_simple(p, [("l", "1/3"), ("top", "1/6")])
    h = Integrand.from_dict(p, {"bot": "0", "l": "1/2", "r": "1/4", "top": "1"})
    k = BiIntegrand.from_dict(e, e, {("u", "u"): "1/2", ("u", "v"): "0", ("v", "u"): "1", ("v", "v"): "1/3"})
    F = Cdf.from_points([("0", "0", "1/8"), ("1/3", "1/4", "1/2"), ("1", "7/8", "7/8")])
    f = StepMap.from_ids(p, 2, ["bot", "l", "top", "r"])
    text = "\n".join([
        dump_poset(p, "P"), dump_poset(e, "E"), dump_valuation(nu, "nu", "P"), dump_integrand(h, "h", "P"),
        dump_biintegrand(k, "k", "E", "E"), dump_cdf(F, "F"), dump_stepmap(f, "f", "P"),
    ])
    assert "cover bot top" not in text  # only covering pairs are written
    ws = load(text)
    assert ws.posets["P"] == p
    assert ws.valuations["nu"] == nu
    assert ws.integrands["h"] == h
    assert ws.biintegrands["k"] == k
    assert ws.cdfs["F"] == F
    assert ws.stepmaps["f"] == f


def test_checked_in_workspace():
    ws = load_workspace(WORKSPACE)
    assert {"C2", "A2", "V", "T"} <= set(ws.posets)
    assert ws.valuations["nu"].weights == {"a": Q(1, 2), "b": Q(1, 4)}
    assert {"swap_xy", "swap_yx", "bias_half", "bias_third"} <= set(ws.programs)
    with pytest.raises(NameNotFound):
        ws.get("valuations", "missing")
