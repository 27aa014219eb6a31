from fractions import Fraction as Q

import pytest

from valuations import (
    BiIntegrand,
    ChainNotMonotone,
    FormatError,
    antichain,
    build_poset,
    check_pointwise_leq,
    dirac,
    interval_fubini_check,
    lebesgue,
    make_simple,
    mass,
    pushforward,
    refinement_chain_check,
)
from valuations.integration import Integrand
from valuations.interval import (
    Cdf,
    StepMap,
    cell_mass,
    change_of_variable_check,
    check_pushforward,
    preimage_intervals,
    preimage_mass,
)


@pytest.fixture
def skew():
    return Cdf.from_points([("0", "0", "1/8"), ("1/3", "1/4", "1/2"), ("1", "7/8", "7/8")])


def test_lebesgue_measure():
    F = lebesgue()
    assert F.measure(0, 1) == 1
    assert F.measure(Q(1, 4), Q(3, 4)) == Q(1, 2)
    assert F.measure(Q(1, 3), Q(1, 3)) == 0


def test_atoms(skew):
    assert skew.atom_at_zero == Q(1, 8)
    assert skew.below(Q(1, 3)) == Q(1, 4)
    assert skew.upto(Q(1, 3)) == Q(1, 2)
    assert skew.measure(Q(1, 3), Q(1, 3), closed_left=True) == Q(1, 4)
    assert skew.measure(0, 1, closed_left=True) == skew.total == Q(7, 8)
    assert skew.measure(0, 1) == Q(3, 4)


def test_cdf_validation():
    with pytest.raises(FormatError):
        Cdf.from_points([("0", "0", "1/2"), ("1", "1/4", "1/4")])  # decreasing
    with pytest.raises(FormatError):
        Cdf.from_points([("0", "0", "0"), ("1/2", "1", "1")])  # stops short of 1
    with pytest.raises(FormatError):
        Cdf.from_points([("0", "0", "1/2"), ("1", "1", "3/2")])  # too much mass
    deficit = Cdf.from_points([("0", "0", "0"), ("1", "1/2", "1/2")])
    assert deficit.total == Q(1, 2)


def test_pushforward_examples(a2, vee, skew):
    F = lebesgue()
    assert pushforward(F, StepMap.from_ids(a2, 1, ["a", "b"])) == make_simple(a2, [("a", "1/2"), ("b", "1/2")])
    assert pushforward(F, StepMap.from_ids(a2, 2, ["a", "a", "b", "b"])) == make_simple(a2, [("a", "1/2"), ("b", "1/2")])
    assert pushforward(skew, StepMap.constant(vee, "a", 3)) == make_simple(vee, [("a", "7/8")])


def test_skew_on_fine_cells(vee, skew):
    f = StepMap.from_ids(vee, 3, ["bot", "a", "a", "b", "bot", "b", "a", "b"])
    assert cell_mass(skew, 3, 0) == Q(11, 64)
    assert cell_mass(skew, 3, 2) == Q(39, 128)
    assert pushforward(skew, f).weights == {"bot": Q(31, 128), "a": Q(27, 64), "b": Q(27, 128)}
    assert check_pushforward(skew, f)


def test_preimage_intervals(a2):
    f = StepMap.from_ids(a2, 2, ["a", "b", "b", "a"])
    assert preimage_intervals(f, a2.mask_of(["b"])) == [(Q(1, 4), Q(3, 4), False)]
    assert preimage_intervals(f, a2.mask_of(["a"])) == [(0, Q(1, 4), False), (Q(3, 4), 1, True)]
    assert preimage_mass(lebesgue(), f, a2.mask_of(["a"])) == Q(1, 2)


def test_refine_preserves_pushforward(vee, skew):
    f = StepMap.from_ids(vee, 1, ["bot", "b"])
    assert pushforward(skew, f.refine(4)) == pushforward(skew, f)


def test_pointwise_leq(a2, vee):
    f = StepMap.from_ids(vee, 1, ["a", "b"])
    assert check_pointwise_leq(f, f)
    assert check_pointwise_leq(StepMap.from_ids(vee, 1, ["bot", "bot"]), f)
    assert not check_pointwise_leq(StepMap.from_ids(a2, 1, ["a", "b"]), StepMap.from_ids(a2, 1, ["b", "a"]))


def test_change_of_variable(a2, vee, skew):
    g = Integrand.from_dict(a2, {"a": "0", "b": "1"})
    f = StepMap.from_ids(a2, 1, ["a", "b"])
    assert change_of_variable_check(g, f, lebesgue())
    assert change_of_variable_check(Integrand.constant(vee, "1/3"), StepMap.from_ids(vee, 1, ["a", "b"]), skew)
    assert change_of_variable_check(g, StepMap.constant(a2, "b", 2), skew)


def test_refinement_chains(vee):
    F = lebesgue()
    lo, hi = StepMap.from_ids(vee, 1, ["bot", "bot"]), StepMap.from_ids(vee, 1, ["a", "b"])
    assert refinement_chain_check([lo, lo, lo], F)
    assert refinement_chain_check([lo, hi], F)
    assert pushforward(F, lo) == dirac(vee, "bot")
    with pytest.raises(ChainNotMonotone):
        refinement_chain_check([hi, lo], F)


def test_interval_fubini(a2, vee, skew):
    e = build_poset(["p", "q"], [("p", "q")])
    mu = make_simple(e, [("p", "1/3"), ("q", "1/3")])
    h = BiIntegrand.from_dict(
        vee, e,
        {("bot", "p"): "0", ("bot", "q"): "1/4", ("a", "p"): "1/2", ("a", "q"): "1/2", ("b", "p"): "1/8", ("b", "q"): "1"},
    )
    assert interval_fubini_check(skew, StepMap.constant(vee, "a", 2), mu, h)
    assert interval_fubini_check(lebesgue(), StepMap.from_ids(vee, 2, ["bot", "a", "b", "a"]), mu, h)
    nothing = Cdf.from_points([("0", "0", "0"), ("1", "0", "0")])
    assert interval_fubini_check(nothing, StepMap.from_ids(vee, 1, ["a", "b"]), mu, h)
    assert mass(pushforward(nothing, StepMap.from_ids(vee, 1, ["a", "b"])), {"a", "b", "bot"}) == 0
