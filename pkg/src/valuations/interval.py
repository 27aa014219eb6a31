"""Valuations on [0, 1] given by CDFs, and their push-forwards along dyadic step maps.

A :class:`Cdf` is piecewise linear between rational breakpoints.  Each
breakpoint ``x`` carries two cumulative values: ``left = nu([0, x))`` and
``right = nu([0, x])``; their difference is the atom at ``x``.  The first
breakpoint is 0 (with ``left = 0``) and the last is 1.

A :class:`StepMap` of level ``m`` sends the cell ``[k/2^m, (k+1)/2^m)`` to
one poset element; the last cell is closed at 1.  The preimage of any set
of elements is then a finite union of such cells, which the CDF measures
exactly.
"""

from __future__ import annotations

from bisect import bisect_left
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import ChainNotMonotone, FormatError, PosetMismatch, UnknownElement
from .integration import Integrand, integrate
from .monad import BiIntegrand, fubini_check
from .poset import FinitePoset, enumerate_upper_sets
from .valuation import SimpleValuation, _from_indexed, _mass_mask, same_poset, stochastic_leq_flow, to_fraction


@dataclass(frozen=True)
class Cdf:
    breakpoints: tuple[Fraction, ...]
    left: tuple[Fraction, ...]
    right: tuple[Fraction, ...]

    def __post_init__(self):
        xs, ls, rs = self.breakpoints, self.left, self.right
        if not (len(xs) == len(ls) == len(rs)) or len(xs) < 2:
            raise FormatError("a CDF needs at least the breakpoints 0 and 1, each with left and right values")
        if xs[0] != 0 or xs[-1] != 1:
            raise FormatError("CDF breakpoints must start at 0 and end at 1")
        if any(a >= b for a, b in zip(xs, xs[1:])):
            raise FormatError("CDF breakpoints must be strictly increasing")
        if ls[0] != 0:
            raise FormatError("nothing lies below 0: left value at 0 must be 0")
        seq = [v for pair in zip(ls, rs) for v in pair]
        if any(a > b for a, b in zip(seq, seq[1:])):
            raise FormatError("cumulative values must be nondecreasing")
        if seq[-1] > 1:
            raise FormatError(f"total mass {seq[-1]} exceeds 1")

    @classmethod
    def from_points(cls, points: Sequence[tuple[object, object, object]]) -> "Cdf":
        pts = [tuple(to_fraction(v) for v in p) for p in points]
        return cls(tuple(p[0] for p in pts), tuple(p[1] for p in pts), tuple(p[2] for p in pts))

    @property
    def total(self) -> Fraction:
        return self.right[-1]

    @property
    def atom_at_zero(self) -> Fraction:
        return self.right[0]

    @property
    def cumulative(self) -> tuple[Fraction, ...]:
        return self.right

    def _interp(self, t: Fraction) -> Fraction:
        k = bisect_left(self.breakpoints, t) - 1
        x0, x1 = self.breakpoints[k], self.breakpoints[k + 1]
        r0, l1 = self.right[k], self.left[k + 1]
        return r0 + (l1 - r0) * (t - x0) / (x1 - x0)

    def below(self, t) -> Fraction:
        """``nu([0, t))``."""
        t = Fraction(t)
        if not 0 <= t <= 1:
            raise ValueError(f"{t} outside [0, 1]")
        k = bisect_left(self.breakpoints, t)
        if k < len(self.breakpoints) and self.breakpoints[k] == t:
            return self.left[k]
        return self._interp(t)

    def upto(self, t) -> Fraction:
        """``nu([0, t])``."""
        t = Fraction(t)
        if not 0 <= t <= 1:
            raise ValueError(f"{t} outside [0, 1]")
        k = bisect_left(self.breakpoints, t)
        if k < len(self.breakpoints) and self.breakpoints[k] == t:
            return self.right[k]
        return self._interp(t)

    def measure(self, a, b, closed_left: bool = False, closed_right: bool = True) -> Fraction:
        """Mass of the interval between ``a`` and ``b`` with the given endpoint conventions."""
        a, b = Fraction(a), Fraction(b)
        if b < a or (a == b and not (closed_left and closed_right)):
            return Fraction(0)
        hi = self.upto(b) if closed_right else self.below(b)
        lo = self.below(a) if closed_left else self.upto(a)
        return hi - lo


def lebesgue() -> Cdf:
    return Cdf((Fraction(0), Fraction(1)), (Fraction(0), Fraction(1)), (Fraction(0), Fraction(1)))


@dataclass(frozen=True)
class StepMap:
    level: int
    target: FinitePoset
    cells: tuple[int, ...]

    def __post_init__(self):
        if self.level < 0:
            raise ValueError("level must be nonnegative")
        if len(self.cells) != 2 ** self.level:
            raise FormatError(f"level {self.level} needs {2 ** self.level} cells, got {len(self.cells)}")
        for k in self.cells:
            if not 0 <= k < len(self.target):
                raise UnknownElement(f"cell value index {k} outside the target poset")

    @classmethod
    def from_ids(cls, target: FinitePoset, level: int, ids: Sequence[str]) -> "StepMap":
        return cls(level, target, tuple(target.index(x) for x in ids))

    @classmethod
    def constant(cls, target: FinitePoset, x: str, level: int = 0) -> "StepMap":
        return cls(level, target, (target.index(x),) * 2 ** level)

    @property
    def ids(self) -> tuple[str, ...]:
        return tuple(self.target.elements[k] for k in self.cells)

    def refine(self, level: int) -> "StepMap":
        if level < self.level:
            raise ValueError("cannot refine to a coarser level")
        rep = 2 ** (level - self.level)
        return StepMap(level, self.target, tuple(k for k in self.cells for _ in range(rep)))

    def cell_bounds(self, k: int) -> tuple[Fraction, Fraction]:
        n = 2 ** self.level
        return Fraction(k, n), Fraction(k + 1, n)


def cell_mass(F: Cdf, level: int, k: int) -> Fraction:
    """Mass of ``[k/2^m, (k+1)/2^m)``, the last cell closed at 1; cell 0 holds any atom at 0."""
    n = 2 ** level
    lo, hi = Fraction(k, n), Fraction(k + 1, n)
    return F.measure(lo, hi, closed_left=True, closed_right=(k == n - 1))


def pushforward(F: Cdf, f: StepMap) -> SimpleValuation:
    return _from_indexed(f.target, ((d, cell_mass(F, f.level, k)) for k, d in enumerate(f.cells)))


def preimage_intervals(f: StepMap, mask: int) -> list[tuple[Fraction, Fraction, bool]]:
    """``f^{-1}`` of a set of elements as maximal intervals ``[a, b)`` (``[a, 1]`` when the flag is set)."""
    n = 2 ** f.level
    out = []
    k = 0
    while k < n:
        if mask >> f.cells[k] & 1:
            start = k
            while k < n and mask >> f.cells[k] & 1:
                k += 1
            out.append((Fraction(start, n), Fraction(k, n), k == n))
        else:
            k += 1
    return out


def preimage_mass(F: Cdf, f: StepMap, mask: int) -> Fraction:
    return sum((F.measure(a, b, closed_left=True, closed_right=closed) for a, b, closed in preimage_intervals(f, mask)), Fraction(0))


def check_pushforward(F: Cdf, f: StepMap, max_elems: int = 16) -> bool:
    """``f_*(F)(O) == F(f^{-1}(O))`` on every upper set ``O``, the right side from merged intervals."""
    nu = pushforward(F, f)
    return all(_mass_mask(nu, u.mask) == preimage_mass(F, f, u.mask) for u in enumerate_upper_sets(f.target, max_elems))


def check_pointwise_leq(f: StepMap, g: StepMap) -> bool:
    same_poset(f.target, g.target)
    m = max(f.level, g.level)
    a, b = f.refine(m), g.refine(m)
    return all(f.target.leq_idx(x, y) for x, y in zip(a.cells, b.cells))


def change_of_variable_check(g: Integrand, f: StepMap, F: Cdf) -> bool:
    """``int g d(f_* F) == int (g . f) dF``, the right side summed cell by cell."""
    same_poset(g.poset, f.target)
    lhs = integrate(g, pushforward(F, f))
    rhs = sum((g.values[d] * cell_mass(F, f.level, k) for k, d in enumerate(f.cells)), Fraction(0))
    return lhs == rhs


def refinement_chain_check(chain: Sequence[StepMap], F: Cdf) -> bool:
    for k, (f, g) in enumerate(zip(chain, chain[1:])):
        if not check_pointwise_leq(f, g):
            raise ChainNotMonotone(f"step maps {k} and {k + 1} are not pointwise ordered")
    images = [pushforward(F, f) for f in chain]
    return all(stochastic_leq_flow(a, b) for a, b in zip(images, images[1:]))


def interval_fubini_check(F: Cdf, f: StepMap, mu: SimpleValuation, h: BiIntegrand) -> bool:
    if h.left != f.target:
        raise PosetMismatch("bi-integrand's left factor is not the step map's target")
    return fubini_check(pushforward(F, f), mu, h).agrees
