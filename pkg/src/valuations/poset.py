"""Finite posets, their upper sets and monotone maps.

A finite poset is trivially directed complete: every directed subset has a
greatest element.  Its Scott-open sets are therefore exactly the upper sets,
and Scott-continuous maps between finite posets are exactly the monotone
ones.  Everything downstream relies on these two facts.

Order relations are stored as bitmasks: ``up[i]`` has bit ``j`` set iff
``elements[i] <= elements[j]``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import CycleDetected, DuplicateElement, NotMonotone, NotUpperSet, TooLarge, UnknownElement

DEFAULT_MAX_ELEMS = 16


def _bits(mask: int):
    i = 0
    while mask:
        if mask & 1:
            yield i
        mask >>= 1
        i += 1


@dataclass(frozen=True, eq=False)
class FinitePoset:
    elements: tuple[str, ...]
    up: tuple[int, ...]
    name: str = field(default="", compare=False)
    # (left, right) when built by product(); element (i, j) sits at i * len(right) + j
    factors: tuple["FinitePoset", "FinitePoset"] | None = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "_index", {x: i for i, x in enumerate(self.elements)})
        down = [0] * len(self.elements)
        for i, mask in enumerate(self.up):
            for j in _bits(mask):
                down[j] |= 1 << i
        object.__setattr__(self, "down", tuple(down))
        object.__setattr__(self, "_hash", hash((self.elements, self.up)))

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, FinitePoset):
            return NotImplemented
        return self._hash == other._hash and self.elements == other.elements and self.up == other.up

    def __hash__(self):
        return self._hash

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __contains__(self, x):
        return x in self._index

    def __repr__(self):
        label = self.name or "poset"
        return f"<FinitePoset {label} |{len(self)}|>"

    def index(self, x: str) -> int:
        try:
            return self._index[x]
        except KeyError:
            raise UnknownElement(f"{x!r} is not an element of {self!r}") from None

    @property
    def full_mask(self) -> int:
        return (1 << len(self.elements)) - 1

    @property
    def leq_matrix(self) -> np.ndarray:
        n = len(self.elements)
        m = np.zeros((n, n), dtype=bool)
        for i, mask in enumerate(self.up):
            for j in _bits(mask):
                m[i, j] = True
        return m

    def leq_idx(self, i: int, j: int) -> bool:
        return bool(self.up[i] >> j & 1)

    def leq(self, x: str, y: str) -> bool:
        return self.leq_idx(self.index(x), self.index(y))

    @property
    def is_antichain(self) -> bool:
        return all(mask == 1 << i for i, mask in enumerate(self.up))

    def topological_order(self) -> list[int]:
        """Indices ordered so that every element precedes everything above it."""
        return sorted(range(len(self.elements)), key=lambda i: bin(self.down[i]).count("1"))

    def mask_of(self, members: Iterable[str]) -> int:
        mask = 0
        for x in members:
            mask |= 1 << self.index(x)
        return mask

    def members_of(self, mask: int) -> frozenset[str]:
        return frozenset(self.elements[i] for i in _bits(mask))

    def pair_index(self, i: int, j: int) -> int:
        _, right = self.factors
        return i * len(right) + j


def build_poset(elements: Sequence[str], covers: Iterable[tuple[str, str]], name: str = "") -> FinitePoset:
    """Build a poset from its elements and a generating (cover) relation.

    ``leq`` is the reflexive-transitive closure of ``covers``, computed by
    squaring the boolean relation matrix until it stabilises.
    """
    elements = tuple(elements)
    seen = set()
    for x in elements:
        if x in seen:
            raise DuplicateElement(f"duplicate element {x!r}")
        seen.add(x)
    index = {x: i for i, x in enumerate(elements)}
    n = len(elements)
    rel = np.eye(n, dtype=np.int64)
    for lo, hi in covers:
        for x in (lo, hi):
            if x not in index:
                raise UnknownElement(f"cover mentions unknown element {x!r}")
        rel[index[lo], index[hi]] = 1
    while True:
        nxt = ((rel @ rel) > 0).astype(np.int64)
        if np.array_equal(nxt, rel):
            break
        rel = nxt
    both = (rel & rel.T) - np.eye(n, dtype=np.int64)
    if both.any():
        i, j = map(int, np.argwhere(both)[0])
        raise CycleDetected(f"{elements[i]!r} and {elements[j]!r} lie on a cycle")
    up = tuple(sum(1 << j for j in range(n) if rel[i, j]) for i in range(n))
    return FinitePoset(elements, up, name=name)


def chain(*elements: str, name: str = "") -> FinitePoset:
    return build_poset(elements, zip(elements, elements[1:]), name=name)


def antichain(*elements: str, name: str = "") -> FinitePoset:
    return build_poset(elements, [], name=name)


@dataclass(frozen=True)
class UpperSet:
    poset: FinitePoset
    mask: int

    @property
    def members(self) -> frozenset[str]:
        return self.poset.members_of(self.mask)

    def __contains__(self, x):
        return bool(self.mask >> self.poset.index(x) & 1)

    def __len__(self):
        return bin(self.mask).count("1")

    def __repr__(self):
        return "UpperSet{" + ", ".join(x for x in self.poset.elements if x in self) + "}"


def _mask_is_upper(p: FinitePoset, mask: int) -> bool:
    return all(p.up[i] & ~mask == 0 for i in _bits(mask))


def is_upper_set(p: FinitePoset, s: Iterable[str]) -> bool:
    return _mask_is_upper(p, p.mask_of(s))


def upper_set(p: FinitePoset, members: Iterable[str]) -> UpperSet:
    mask = p.mask_of(members)
    if not _mask_is_upper(p, mask):
        raise NotUpperSet(f"{sorted(p.members_of(mask))} is not upward closed")
    return UpperSet(p, mask)


def up_closure(p: FinitePoset, mask: int) -> int:
    out = 0
    for i in _bits(mask):
        out |= p.up[i]
    return out


def enumerate_upper_sets(p: FinitePoset, max_elems: int = DEFAULT_MAX_ELEMS) -> list[UpperSet]:
    """Every upper set of ``p`` exactly once, from the empty set upward.

    Elements are decided from the top of a linear extension downward.  An
    element may join only if everything strictly above it already has;
    excluding is always possible at that point, so no branch dead-ends.
    """
    n = len(p)
    if n > max_elems:
        raise TooLarge(f"{n} elements exceeds the upper-set enumeration bound {max_elems}")
    order = p.topological_order()[::-1]
    out: list[UpperSet] = []

    def walk(k: int, mask: int):
        if k == n:
            out.append(UpperSet(p, mask))
            return
        i = order[k]
        walk(k + 1, mask)
        if p.up[i] & ~(mask | 1 << i) == 0:
            walk(k + 1, mask | 1 << i)

    walk(0, 0)
    out.sort(key=lambda u: (bin(u.mask).count("1"), u.mask))
    return out


def product(p: FinitePoset, q: FinitePoset) -> FinitePoset:
    """Componentwise-ordered Cartesian product.

    For finite posets the Scott topology of the product coincides with the
    product of the Scott topologies (both are the upper sets of the
    componentwise order), so iterated integrals over ``p x q`` always agree.
    """
    nq = len(q)
    elements = tuple(f"({x},{y})" for x in p.elements for y in q.elements)
    up = []
    for i in range(len(p)):
        for j in range(nq):
            mask = 0
            for i2 in _bits(p.up[i]):
                for j2 in _bits(q.up[j]):
                    mask |= 1 << (i2 * nq + j2)
            up.append(mask)
    name = f"{p.name}x{q.name}" if p.name and q.name else ""
    return FinitePoset(elements, tuple(up), name=name, factors=(p, q))


@dataclass(frozen=True)
class MonotoneMap:
    source: FinitePoset
    target: FinitePoset
    table: tuple[int, ...]

    @classmethod
    def from_dict(cls, source: FinitePoset, target: FinitePoset, mapping: dict[str, str], check: bool = True):
        missing = [x for x in source.elements if x not in mapping]
        if missing:
            raise UnknownElement(f"map is not total: no image for {missing}")
        for x in mapping:
            source.index(x)
        table = tuple(target.index(mapping[x]) for x in source.elements)
        m = cls(source, target, table)
        if check and not check_monotone(m):
            raise NotMonotone("map does not preserve the order")
        return m

    def __call__(self, x: str) -> str:
        return self.target.elements[self.table[self.source.index(x)]]


def identity_map(p: FinitePoset) -> MonotoneMap:
    return MonotoneMap(p, p, tuple(range(len(p))))


def constant_map(source: FinitePoset, target: FinitePoset, c: str) -> MonotoneMap:
    return MonotoneMap(source, target, (target.index(c),) * len(source))


def compose(g: MonotoneMap, f: MonotoneMap) -> MonotoneMap:
    """``g`` after ``f``."""
    return MonotoneMap(f.source, g.target, tuple(g.table[k] for k in f.table))


def check_monotone(m: MonotoneMap) -> bool:
    if len(m.table) != len(m.source):
        raise UnknownElement("map table is not total on its source")
    for k in m.table:
        if not 0 <= k < len(m.target):
            raise UnknownElement(f"map image index {k} outside target")
    src, tgt = m.source, m.target
    for i in range(len(src)):
        for j in _bits(src.up[i]):
            if not tgt.leq_idx(m.table[i], m.table[j]):
                return False
    return True


def preimage(m: MonotoneMap, u: UpperSet) -> UpperSet:
    mask = 0
    for i, k in enumerate(m.table):
        if u.mask >> k & 1:
            mask |= 1 << i
    return UpperSet(m.source, mask)
