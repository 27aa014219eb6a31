from fractions import Fraction as Q

import pytest
from hypothesis import strategies as st

from valuations import antichain, build_poset, chain, make_simple
from valuations.integration import Integrand
from valuations.poset import _bits


@pytest.fixture
def c2():
    return chain("a", "b")


@pytest.fixture
def a2():
    return antichain("a", "b")


@pytest.fixture
def vee():
    return build_poset(["bot", "a", "b"], [("bot", "a"), ("bot", "b")])


def brute_upper_masks(p):
    """Every subset of the carrier that is closed upward, by direct filtering."""
    n = len(p)
    out = []
    for mask in range(1 << n):
        if all(mask >> j & 1 for i in range(n) if mask >> i & 1 for j in range(n) if p.leq_idx(i, j)):
            out.append(mask)
    return out


@st.composite
def posets(draw, max_elems=6, prefix="e"):
    n = draw(st.integers(1, max_elems))
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    covers = draw(st.lists(st.sampled_from(pairs), max_size=2 * n)) if pairs else []
    names = [f"{prefix}{k}" for k in range(n)]
    return build_poset(names, [(names[i], names[j]) for i, j in covers])


@st.composite
def valuations_on(draw, p, denom=48):
    n = len(p)
    budget = draw(st.integers(0, denom))
    atoms = []
    for x in p.elements:
        if budget == 0:
            break
        w = draw(st.integers(0, budget))
        budget -= w
        atoms.append((x, Q(w, denom)))
    draw(st.randoms()).shuffle(atoms)
    return make_simple(p, atoms[:n])


@st.composite
def integrands_on(draw, p, denom=24):
    seeds = [Q(draw(st.integers(0, denom)), denom) for _ in range(len(p))]
    return Integrand(p, tuple(max(seeds[j] for j in _bits(p.down[i])) for i in range(len(p))))
