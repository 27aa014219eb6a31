from fractions import Fraction as Q

import pytest

from valuations import (
    MassExceedsOne,
    NegativeWeight,
    NotUpperSet,
    PosetMismatch,
    check_modularity,
    dirac,
    make_simple,
    mass,
    stochastic_leq_exhaustive,
    stochastic_leq_flow,
    zero,
)
from valuations.poset import upper_set
from valuations.valuation import compare, format_atoms, max_flow, mix, to_fraction


def test_merge_duplicate_atoms(c2):
    assert make_simple(c2, [("a", "1/2"), ("a", "1/4")]).weights == {"a": Q(3, 4)}


def test_mass_exceeds_one(c2):
    with pytest.raises(MassExceedsOne):
        make_simple(c2, [("a", "3/4"), ("b", "1/2")])


def test_negative_weight(c2):
    with pytest.raises(NegativeWeight):
        make_simple(c2, [("a", "-1/4")])


def test_floats_refused(c2):
    with pytest.raises(TypeError):
        make_simple(c2, [("a", 0.5)])
    with pytest.raises(ValueError):
        to_fraction("0.5")


def test_empty_is_zero(c2):
    nu = make_simple(c2, [])
    assert nu == zero(c2)
    assert mass(nu, {"a", "b"}) == 0
    assert format_atoms(nu) == "0"


def test_dirac_masses(c2):
    assert mass(dirac(c2, "b"), {"b"}) == 1
    assert mass(dirac(c2, "a"), {"b"}) == 0
    assert mass(dirac(c2, "a"), {"a", "b"}) == 1


def test_mass_examples(c2):
    nu = make_simple(c2, [("a", "1/2"), ("b", "1/4")])
    assert mass(nu, {"b"}) == Q(1, 4)
    assert mass(nu, set()) == 0
    assert mass(nu, upper_set(c2, {"a", "b"})) == Q(3, 4)
    with pytest.raises(NotUpperSet):
        mass(nu, {"a"})


def test_modularity(c2, vee):
    assert check_modularity(dirac(c2, "a"))
    assert check_modularity(make_simple(c2, [("a", "1/2"), ("b", "1/4")]))
    assert check_modularity(zero(vee))


def test_order_examples(c2, a2, vee):
    da, db = dirac(c2, "a"), dirac(c2, "b")
    for leq in (stochastic_leq_exhaustive, stochastic_leq_flow):
        assert leq(da, db) and not leq(db, da)
        ha, hb = make_simple(a2, [("a", "1/2")]), make_simple(a2, [("b", "1/2")])
        assert not leq(ha, hb) and not leq(hb, ha)
        assert leq(da, da)
        assert leq(make_simple(vee, [("bot", "1/2")]), make_simple(vee, [("a", "1/4"), ("b", "1/4")]))
        assert not leq(make_simple(vee, [("bot", "3/4")]), make_simple(vee, [("a", "1/4"), ("b", "1/4")]))


def test_compare(c2, a2):
    assert compare(dirac(c2, "a"), dirac(c2, "b")) == "LEQ"
    assert compare(dirac(c2, "b"), dirac(c2, "a")) == "GEQ"
    assert compare(dirac(a2, "a"), dirac(a2, "b")) == "INCOMPARABLE"
    assert compare(zero(c2), zero(c2)) == "EQ"


def test_poset_mismatch(c2, a2):
    with pytest.raises(PosetMismatch):
        stochastic_leq_flow(dirac(c2, "a"), dirac(a2, "a"))


def test_max_flow_small():
    # diamond s -> {1, 2} -> t with a cross arc
    arcs = [(0, 1, Q(1)), (0, 2, Q(1, 2)), (1, 3, Q(1, 3)), (1, 2, Q(1)), (2, 3, Q(1))]
    assert max_flow(4, arcs, 0, 3) == Q(4, 3)


def test_mix(c2):
    nu = mix(c2, [(Q(1, 2), dirac(c2, "a")), (Q(1, 4), dirac(c2, "b"))])
    assert nu == make_simple(c2, [("a", "1/2"), ("b", "1/4")])
