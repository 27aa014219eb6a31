"""Monad structure on simple valuations over finite posets.

Unit, functor action, Kleisli extension, strength and the product
valuation, together with exact checks of the Fubini and disintegration
identities.  Every equality here is exact rational equality.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Mapping, Sequence

from .errors import ContinuityViolation, NotMonotone, PosetMismatch, UnknownElement
from .integration import Integrand, integrate
from .poset import FinitePoset, MonotoneMap, _bits
from .poset import product as _product
from .valuation import (
    SimpleValuation,
    _from_indexed,
    _mass_mask,
    dirac,
    same_poset,
    stochastic_leq_flow,
    to_fraction,
)


@lru_cache(maxsize=256)
def product(p: FinitePoset, q: FinitePoset) -> FinitePoset:
    return _product(p, q)


@dataclass(frozen=True)
class KleisliMap:
    """A Scott-continuous map ``D -> V E``: monotone into the stochastic order."""

    source: FinitePoset
    target: FinitePoset
    table: tuple[SimpleValuation, ...]

    def __call__(self, x: str) -> SimpleValuation:
        return self.table[self.source.index(x)]


def kleisli_map(
    source: FinitePoset,
    target: FinitePoset,
    table: Sequence[SimpleValuation] | Mapping[str, SimpleValuation] | Callable[[str], SimpleValuation],
    check: bool = True,
) -> KleisliMap:
    if callable(table):
        rows = tuple(table(x) for x in source.elements)
    elif isinstance(table, Mapping):
        missing = [x for x in source.elements if x not in table]
        if missing:
            raise UnknownElement(f"Kleisli map has no image for {missing}")
        rows = tuple(table[x] for x in source.elements)
    else:
        rows = tuple(table)
        if len(rows) != len(source):
            raise UnknownElement("Kleisli map table is not total")
    for row in rows:
        same_poset(target, row.poset)
    f = KleisliMap(source, target, rows)
    if check:
        check_kleisli_continuity(f)
    return f


def check_kleisli_continuity(f: KleisliMap):
    src = f.source
    for i in range(len(src)):
        for j in _bits(src.up[i] & ~(1 << i)):
            if not stochastic_leq_flow(f.table[i], f.table[j]):
                raise ContinuityViolation(
                    f"{src.elements[i]!r} <= {src.elements[j]!r} but their images are not stochastically ordered"
                )


def unit(p: FinitePoset, x: str) -> SimpleValuation:
    return dirac(p, x)


def unit_map(p: FinitePoset) -> KleisliMap:
    return KleisliMap(p, p, tuple(dirac(p, x) for x in p.elements))


def vmap(g: MonotoneMap, nu: SimpleValuation) -> SimpleValuation:
    same_poset(g.source, nu.poset)
    return _from_indexed(g.target, ((g.table[i], w) for i, w in nu.atoms))


def kleisli_ext(f: KleisliMap, nu: SimpleValuation) -> SimpleValuation:
    """``f^dagger(nu) = sum_i w_i * f(x_i)`` over the atoms of ``nu``."""
    same_poset(f.source, nu.poset)
    pairs = []
    for i, w in nu.atoms:
        pairs.extend((k, w * v) for k, v in f.table[i].atoms)
    out = _from_indexed(f.target, pairs)
    # sum w_i <= 1 and each image has mass <= 1, so this never trips
    assert out.total <= 1
    return out


def kleisli_compose(g: KleisliMap, f: KleisliMap) -> KleisliMap:
    """``g^dagger . f``."""
    same_poset(f.target, g.source)
    return KleisliMap(f.source, g.target, tuple(kleisli_ext(g, row) for row in f.table))


def strength(d: FinitePoset, x: str, nu: SimpleValuation) -> SimpleValuation:
    """``(x, nu) |-> delta_x (x) nu`` on ``d x nu.poset``."""
    pd = product(d, nu.poset)
    i = d.index(x)
    return SimpleValuation(pd, tuple((pd.pair_index(i, j), v) for j, v in nu.atoms))


def costrength(nu: SimpleValuation, e: FinitePoset, y: str) -> SimpleValuation:
    pd = product(nu.poset, e)
    j = e.index(y)
    return SimpleValuation(pd, tuple((pd.pair_index(i, j), w) for i, w in nu.atoms))


def product_valuation(nu: SimpleValuation, mu: SimpleValuation) -> SimpleValuation:
    pd = product(nu.poset, mu.poset)
    return _from_indexed(pd, ((pd.pair_index(i, j), w * v) for i, w in nu.atoms for j, v in mu.atoms))


def product_left_first(nu: SimpleValuation, mu: SimpleValuation) -> SimpleValuation:
    """Draw ``x`` from ``nu`` first, then ``y`` from ``mu``: bind over the strength."""
    d, e = nu.poset, mu.poset
    f = kleisli_map(d, product(d, e), lambda x: strength(d, x, mu), check=False)
    return kleisli_ext(f, nu)


def product_right_first(nu: SimpleValuation, mu: SimpleValuation) -> SimpleValuation:
    """Draw ``y`` from ``mu`` first, then ``x`` from ``nu``: bind over the costrength."""
    d, e = nu.poset, mu.poset
    f = kleisli_map(e, product(d, e), lambda y: costrength(nu, e, y), check=False)
    return kleisli_ext(f, mu)


@dataclass(frozen=True)
class BiIntegrand:
    """A monotone map ``left x right -> [0, 1]``; ``values[i][j]`` is ``h(x_i, y_j)``."""

    left: FinitePoset
    right: FinitePoset
    values: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self):
        if len(self.values) != len(self.left) or any(len(row) != len(self.right) for row in self.values):
            raise UnknownElement("bi-integrand is not total on the product")
        # the Integrand constructor carries the range and monotonicity checks
        self.as_integrand()

    @classmethod
    def from_dict(cls, left: FinitePoset, right: FinitePoset, values: Mapping[tuple[str, str], object]):
        for x, y in values:
            left.index(x)
            right.index(y)
        rows = []
        for x in left.elements:
            row = []
            for y in right.elements:
                if (x, y) not in values:
                    raise UnknownElement(f"bi-integrand has no value at ({x}, {y})")
                row.append(to_fraction(values[(x, y)]))
            rows.append(tuple(row))
        return cls(left, right, tuple(rows))

    def __call__(self, x: str, y: str) -> Fraction:
        return self.values[self.left.index(x)][self.right.index(y)]

    def as_integrand(self) -> Integrand:
        return Integrand(product(self.left, self.right), tuple(v for row in self.values for v in row))


@dataclass(frozen=True)
class FubiniResult:
    lhs: Fraction
    rhs: Fraction
    joint: Fraction

    @property
    def equal(self) -> bool:
        return self.lhs == self.rhs

    @property
    def agrees(self) -> bool:
        """lhs, rhs and the integral against the product valuation all coincide."""
        return self.lhs == self.rhs == self.joint


def _inner(poset: FinitePoset, values) -> Integrand:
    try:
        return Integrand(poset, tuple(values))
    except NotMonotone as exc:
        raise NotMonotone(f"inner integral is not monotone: {exc}") from None


def fubini_check(nu: SimpleValuation, mu: SimpleValuation, h: BiIntegrand) -> FubiniResult:
    """Both iterated integrals of ``h`` and its integral against ``nu (x) mu``."""
    if h.left != nu.poset or h.right != mu.poset:
        raise PosetMismatch("bi-integrand is not defined on nu.poset x mu.poset")
    d, e = nu.poset, mu.poset
    # x |-> int h(x, .) dmu, then integrate against nu
    y_inner = _inner(d, (sum((v * h.values[i][j] for j, v in mu.atoms), Fraction(0)) for i in range(len(d))))
    lhs = integrate(y_inner, nu)
    # y |-> int h(., y) dnu, then integrate against mu
    x_inner = _inner(e, (sum((w * h.values[i][j] for i, w in nu.atoms), Fraction(0)) for j in range(len(e))))
    rhs = integrate(x_inner, mu)
    joint = integrate(h.as_integrand(), product_valuation(nu, mu))
    return FubiniResult(lhs, rhs, joint)


def disintegration_check(f: KleisliMap, mu: SimpleValuation, h: Integrand) -> bool:
    """``int h d(f^dagger mu) == int_t (int h df(t)) dmu``."""
    same_poset(f.source, mu.poset)
    same_poset(f.target, h.poset)
    lhs = integrate(h, kleisli_ext(f, mu))
    inner = _inner(f.source, (integrate(h, row) for row in f.table))
    rhs = integrate(inner, mu)
    return lhs == rhs


def kleisli_integral_coherent(f: KleisliMap, nu: SimpleValuation, upper_mask: int) -> bool:
    """``f^dagger(nu)(U) == int_x f(x)(U) dnu`` for the upper set given by ``upper_mask``."""
    out = kleisli_ext(f, nu)
    inner = _inner(f.source, (_mass_mask(row, upper_mask) for row in f.table))
    return _mass_mask(out, upper_mask) == integrate(inner, nu)
