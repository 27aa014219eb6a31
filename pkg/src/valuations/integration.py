"""Choquet integration of monotone [0,1]-valued maps against simple valuations."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from .errors import NotMonotone, UnknownElement
from .poset import FinitePoset, _bits, _mask_is_upper
from .valuation import SimpleValuation, _mass_mask, same_poset, to_fraction


@dataclass(frozen=True)
class Integrand:
    """A monotone map from a finite poset into the rationals of [0, 1]."""

    poset: FinitePoset
    values: tuple[Fraction, ...]

    def __post_init__(self):
        p = self.poset
        if len(self.values) != len(p):
            raise UnknownElement("integrand is not total on its poset")
        for i, v in enumerate(self.values):
            if not 0 <= v <= 1:
                raise ValueError(f"value {v} at {p.elements[i]!r} lies outside [0, 1]")
        for i in range(len(p)):
            for j in _bits(p.up[i]):
                if self.values[i] > self.values[j]:
                    raise NotMonotone(
                        f"{p.elements[i]!r} <= {p.elements[j]!r} but {self.values[i]} > {self.values[j]}"
                    )

    @classmethod
    def from_dict(cls, p: FinitePoset, values: Mapping[str, object]) -> "Integrand":
        for x in values:
            p.index(x)
        missing = [x for x in p.elements if x not in values]
        if missing:
            raise UnknownElement(f"integrand has no value for {missing}")
        return cls(p, tuple(to_fraction(values[x]) for x in p.elements))

    @classmethod
    def constant(cls, p: FinitePoset, c) -> "Integrand":
        return cls(p, (to_fraction(c),) * len(p))

    def __call__(self, x: str) -> Fraction:
        return self.values[self.poset.index(x)]

    def threshold_mask(self, t: Fraction) -> int:
        """``{x : h(x) >= t}`` as a bitmask."""
        return sum(1 << i for i, v in enumerate(self.values) if v >= t)


def integrate(h: Integrand, nu: SimpleValuation) -> Fraction:
    """Closed form for a simple valuation: the weighted sum of ``h`` over the atoms."""
    same_poset(h.poset, nu.poset)
    return sum((w * h.values[i] for i, w in nu.atoms), Fraction(0))


def integrate_riemann_oracle(h: Integrand, nu: SimpleValuation) -> Fraction:
    """``int_0^1 nu(h^{-1}(t, 1]) dt`` evaluated exactly as a step-function area.

    With ``0 = t_0 < t_1 < ... < t_k`` the distinct values of ``h`` (plus 0),
    the set ``h^{-1}(t, 1]`` is constant for ``t`` in ``[t_{j-1}, t_j)``: a
    point ``x`` has ``h(x) > t`` there exactly when ``h(x) >= t_j``, because
    no value of ``h`` falls strictly between ``t_{j-1}`` and ``t_j``.  Above
    ``t_k`` the set is empty.  The single points ``t_j`` themselves do not
    change a Riemann integral.
    """
    same_poset(h.poset, nu.poset)
    levels = sorted(set(h.values) | {Fraction(0)})
    total = Fraction(0)
    for lo, hi in zip(levels, levels[1:]):
        mask = h.threshold_mask(hi)
        assert _mask_is_upper(h.poset, mask), "threshold set of a monotone map must be upper"
        total += (hi - lo) * _mass_mask(nu, mask)
    return total
