"""Simple subprobability valuations and the stochastic order.

On a finite poset every continuous valuation is a finite subconvex sum of
Dirac valuations, so a valuation is stored as its atoms and evaluated on an
upper set by summing the weights that fall inside it.
"""

from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from .errors import MassExceedsOne, NegativeWeight, NotUpperSet, PosetMismatch
from .poset import DEFAULT_MAX_ELEMS, FinitePoset, UpperSet, _mask_is_upper, enumerate_upper_sets

_RATIONAL = re.compile(r"^\s*-?\d+(/\d+)?\s*$")


def to_fraction(value) -> Fraction:
    """Coerce ``value`` to an exact rational; floats and decimal strings are refused."""
    if isinstance(value, bool):
        raise TypeError("booleans are not weights")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        if not _RATIONAL.match(value):
            raise ValueError(f"{value!r} is not an exact rational p/q")
        return Fraction(value.strip())
    raise TypeError(f"{type(value).__name__} is not an exact rational")


@dataclass(frozen=True)
class SimpleValuation:
    poset: FinitePoset
    # (element index, weight) pairs, sorted by index, weights > 0
    atoms: tuple[tuple[int, Fraction], ...]

    @property
    def total(self) -> Fraction:
        return sum((w for _, w in self.atoms), Fraction(0))

    @property
    def weights(self) -> dict[str, Fraction]:
        return {self.poset.elements[i]: w for i, w in self.atoms}

    def weight(self, x: str) -> Fraction:
        i = self.poset.index(x)
        for k, w in self.atoms:
            if k == i:
                return w
        return Fraction(0)

    @property
    def support_mask(self) -> int:
        mask = 0
        for i, _ in self.atoms:
            mask |= 1 << i
        return mask

    def __repr__(self):
        if not self.atoms:
            return "SimpleValuation(0)"
        terms = " + ".join(f"{w}*{self.poset.elements[i]}" for i, w in self.atoms)
        return f"SimpleValuation({terms})"


def _from_indexed(p: FinitePoset, pairs: Iterable[tuple[int, Fraction]]) -> SimpleValuation:
    acc: dict[int, Fraction] = {}
    for i, w in pairs:
        if w < 0:
            raise NegativeWeight(f"weight {w} on {p.elements[i]!r} is negative")
        acc[i] = acc.get(i, Fraction(0)) + w
    atoms = tuple(sorted((i, w) for i, w in acc.items() if w != 0))
    total = sum((w for _, w in atoms), Fraction(0))
    if total > 1:
        raise MassExceedsOne(f"total mass {total} exceeds 1")
    return SimpleValuation(p, atoms)


def make_simple(p: FinitePoset, atoms: Iterable[tuple[str, object]]) -> SimpleValuation:
    return _from_indexed(p, ((p.index(x), to_fraction(w)) for x, w in atoms))


def zero(p: FinitePoset) -> SimpleValuation:
    return SimpleValuation(p, ())


def dirac(p: FinitePoset, x: str) -> SimpleValuation:
    return SimpleValuation(p, ((p.index(x), Fraction(1)),))


def mix(p: FinitePoset, terms: Iterable[tuple[Fraction, SimpleValuation]]) -> SimpleValuation:
    """The subconvex combination ``sum c_k * nu_k``, built through the same checks as make_simple."""
    pairs = []
    for c, nu in terms:
        same_poset(p, nu.poset)
        pairs.extend((i, c * w) for i, w in nu.atoms)
    return _from_indexed(p, pairs)


def same_poset(p: FinitePoset, q: FinitePoset):
    if p != q:
        raise PosetMismatch(f"{p!r} and {q!r} differ")


def mass(nu: SimpleValuation, u) -> Fraction:
    """``nu(U)`` for an upper set ``U``; any other subset is rejected.

    ``u`` is an :class:`UpperSet` or an iterable of element identifiers.
    """
    if isinstance(u, UpperSet):
        same_poset(nu.poset, u.poset)
        mask = u.mask
    else:
        mask = nu.poset.mask_of(u)
    if not _mask_is_upper(nu.poset, mask):
        raise NotUpperSet(f"{sorted(nu.poset.members_of(mask))} is not an upper set")
    return _mass_mask(nu, mask)


def _mass_mask(nu: SimpleValuation, mask: int) -> Fraction:
    return sum((w for i, w in nu.atoms if mask >> i & 1), Fraction(0))


def check_modularity(nu: SimpleValuation, max_elems: int = DEFAULT_MAX_ELEMS) -> bool:
    opens = [u.mask for u in enumerate_upper_sets(nu.poset, max_elems)]
    if _mass_mask(nu, 0) != 0:
        return False
    table = {m: _mass_mask(nu, m) for m in opens}
    for a in opens:
        for b in opens:
            if table[a] + table[b] != table[a | b] + table[a & b]:
                return False
    return True


def stochastic_leq_exhaustive(nu1: SimpleValuation, nu2: SimpleValuation, max_elems: int = DEFAULT_MAX_ELEMS) -> bool:
    same_poset(nu1.poset, nu2.poset)
    for u in enumerate_upper_sets(nu1.poset, max_elems):
        if _mass_mask(nu1, u.mask) > _mass_mask(nu2, u.mask):
            return False
    return True


def max_flow(n_nodes: int, arcs: list[tuple[int, int, Fraction]], source: int, sink: int) -> Fraction:
    """Edmonds-Karp over exact rationals.

    Arcs are explored in insertion order, so the augmenting paths (and any
    trace derived from them) are deterministic.
    """
    cap: dict[tuple[int, int], Fraction] = {}
    adj: list[list[int]] = [[] for _ in range(n_nodes)]
    for a, b, c in arcs:
        if (a, b) not in cap:
            adj[a].append(b)
            cap[(a, b)] = Fraction(0)
        if (b, a) not in cap:
            adj[b].append(a)
            cap[(b, a)] = Fraction(0)
        cap[(a, b)] += c
    flow = Fraction(0)
    while True:
        parent = {source: None}
        queue = deque([source])
        while queue and sink not in parent:
            a = queue.popleft()
            for b in adj[a]:
                if b not in parent and cap[(a, b)] > 0:
                    parent[b] = a
                    queue.append(b)
        if sink not in parent:
            return flow
        path = []
        b = sink
        while parent[b] is not None:
            path.append((parent[b], b))
            b = parent[b]
        push = min(cap[e] for e in path)
        for a, b in path:
            cap[(a, b)] -= push
            cap[(b, a)] += push
        flow += push


def stochastic_leq_flow(nu1: SimpleValuation, nu2: SimpleValuation) -> bool:
    """Decide ``nu1 <= nu2`` as a transport problem.

    Mass of ``nu1`` may only move upward in the order.  ``nu1 <= nu2`` iff
    all of it can be shipped into the atoms of ``nu2`` without exceeding
    their weights (supply-demand form of Hall's theorem: the cut conditions
    are exactly ``nu1(U) <= nu2(U)`` for the up-closures ``U`` of sets of
    atoms).  Surplus mass in ``nu2`` is simply left unused.
    """
    same_poset(nu1.poset, nu2.poset)
    p = nu1.poset
    supply = nu1.atoms
    demand = nu2.atoms
    if not supply:
        return True
    source, sink = 0, 1 + len(supply) + len(demand)
    arcs = []
    for a, (_, w) in enumerate(supply):
        arcs.append((source, 1 + a, w))
    total = nu1.total
    for a, (i, _) in enumerate(supply):
        for b, (j, _) in enumerate(demand):
            if p.leq_idx(i, j):
                arcs.append((1 + a, 1 + len(supply) + b, total))
    for b, (_, v) in enumerate(demand):
        arcs.append((1 + len(supply) + b, sink, v))
    return max_flow(sink + 1, arcs, source, sink) == total


def stochastic_leq(nu1: SimpleValuation, nu2: SimpleValuation) -> bool:
    return stochastic_leq_flow(nu1, nu2)


def compare(nu1: SimpleValuation, nu2: SimpleValuation) -> str:
    """One of ``EQ``, ``LEQ``, ``GEQ`` or ``INCOMPARABLE``."""
    le = stochastic_leq_flow(nu1, nu2)
    ge = stochastic_leq_flow(nu2, nu1)
    if le and ge:
        return "EQ"
    if le:
        return "LEQ"
    if ge:
        return "GEQ"
    return "INCOMPARABLE"


def format_atoms(nu: SimpleValuation) -> str:
    """``1/2 a, 1/4 b``; the zero valuation renders as ``0``."""
    if not nu.atoms:
        return "0"
    return ", ".join(f"{w} {nu.poset.elements[i]}" for i, w in nu.atoms)
