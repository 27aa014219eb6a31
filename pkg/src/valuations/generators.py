"""Random instances for the property checks.

All generators take an explicit ``random.Random`` so every stream is
reproducible from a seed.  Weights and integrand values live on the
``k/64`` grid.
"""

from __future__ import annotations

import random
from fractions import Fraction

from .integration import Integrand
from .interval import Cdf, StepMap, lebesgue
from .lang import Call, Case, Choice, Const, Fail, Let, SampleStep, Var, build_program, free_vars, parse
from .monad import BiIntegrand, KleisliMap, product
from .poset import FinitePoset, MonotoneMap, _bits, build_poset, up_closure
from .valuation import SimpleValuation, _from_indexed

GRID = 64


def stream(seed: int, index: int) -> random.Random:
    """Independent deterministic stream for trial ``index`` under ``seed``."""
    return random.Random(f"{seed}/{index}")


def random_poset(rng: random.Random, n: int, density: float | None = None, prefix: str = "e") -> FinitePoset:
    """Random covers over ``n`` elements; each cover is oriented along a hidden rank, so no cycle can form."""
    if density is None:
        density = rng.choice([0.0, 0.15, 0.3, 0.5])
    names = [f"{prefix}{k}" for k in range(n)]
    rank = list(range(n))
    rng.shuffle(rank)
    covers = []
    for _ in range(int(density * n * (n - 1) / 2) + rng.randint(0, 1)):
        if n < 2:
            break
        a, b = rng.sample(range(n), 2)
        if rank[a] > rank[b]:
            a, b = b, a
        covers.append((names[a], names[b]))
    return build_poset(names, covers)


def random_masses(rng: random.Random, k: int, full: bool = False) -> list[Fraction]:
    """``k`` grid masses whose sum is at most 1 (exactly 1 when ``full``)."""
    if k == 0:
        return []
    total = GRID if full else rng.randint(0, GRID)
    cuts = sorted(rng.randint(0, total) for _ in range(k - 1))
    parts = [b - a for a, b in zip([0] + cuts, cuts + [total])]
    return [Fraction(p, GRID) for p in parts]


def random_valuation(rng: random.Random, p: FinitePoset, full: bool = False) -> SimpleValuation:
    n = len(p)
    k = rng.randint(0, n) if not full else rng.randint(1, n)
    support = rng.sample(range(n), k)
    return _from_indexed(p, zip(support, random_masses(rng, k, full)))


def _monotone_completion(rng: random.Random, p: FinitePoset) -> tuple[Fraction, ...]:
    seeds = [Fraction(rng.randint(0, GRID), GRID) for _ in range(len(p))]
    if rng.random() < 0.3:
        # sparse seeds give many ties and many zero values
        seeds = [s if rng.random() < 0.3 else Fraction(0) for s in seeds]
    return tuple(max(seeds[j] for j in _bits(p.down[i])) for i in range(len(p)))


def random_integrand(rng: random.Random, p: FinitePoset) -> Integrand:
    return Integrand(p, _monotone_completion(rng, p))


def random_biintegrand(rng: random.Random, d: FinitePoset, e: FinitePoset) -> BiIntegrand:
    flat = _monotone_completion(rng, product(d, e))
    m = len(e)
    return BiIntegrand(d, e, tuple(flat[i * m:(i + 1) * m] for i in range(len(d))))


def random_monotone_map(rng: random.Random, source: FinitePoset, target: FinitePoset) -> MonotoneMap:
    """Assign images bottom-up, each chosen among the common upper bounds of what lies below."""
    for _ in range(8):
        table = [None] * len(source)
        for i in source.topological_order():
            allowed = target.full_mask
            for j in _bits(source.down[i] & ~(1 << i)):
                allowed &= target.up[table[j]]
            if not allowed:
                break
            table[i] = rng.choice(list(_bits(allowed)))
        else:
            return MonotoneMap(source, target, tuple(table))
    c = rng.randrange(len(target))
    return MonotoneMap(source, target, (c,) * len(source))


def random_upper_mask(rng: random.Random, p: FinitePoset) -> int:
    seeds = sum(1 << i for i in range(len(p)) if rng.random() < 0.4)
    return up_closure(p, seeds)


def random_kleisli_map(rng: random.Random, source: FinitePoset, target: FinitePoset) -> KleisliMap:
    """``x |-> sum_k c_k [x in U_k] delta_{g_k(x)}`` with monotone ``g_k`` and upper ``U_k``.

    Each summand is monotone in ``x`` for the stochastic order, hence so is
    the sum.  Constant summands (``U_k`` everything, ``g_k`` constant) are
    included through the generators above.
    """
    k = rng.randint(1, 4)
    coeffs = random_masses(rng, k, full=rng.random() < 0.5)
    parts = []
    for c in coeffs:
        g = random_monotone_map(rng, source, target)
        u = source.full_mask if rng.random() < 0.5 else random_upper_mask(rng, source)
        parts.append((c, g, u))
    rows = []
    for i in range(len(source)):
        rows.append(_from_indexed(target, ((g.table[i], c) for c, g, u in parts if u >> i & 1)))
    return KleisliMap(source, target, tuple(rows))


# -- programs ----------------------------------------------------------------


def program_pool():
    """Posets, CDFs, step maps and definitions shared by generated programs."""
    source = """
    poset A2 = {a, b};
    poset A3 = {p, q, r};
    poset C2 = {lo, hi; lo < hi};
    poset V = {bot, l, r; bot < l, bot < r};
    poset C3 = {z0, z1, z2; z0 < z1 < z2};
    def coin(u: A2) = case var u { a -> choice 1/4 (const C2.lo) (const C2.hi) ; b -> fail C2 };
    def lift(u: V) = case var u { bot -> const C3.z0 ; l -> const C3.z1 ; r -> const C3.z2 };
    main = const A2.a;
    """
    skew = Cdf.from_points([("0", "0", "1/8"), ("1/3", "1/4", "1/2"), ("1", "7/8", "7/8")])
    base = parse(source)
    posets = base.posets
    cdfs = {"leb": lebesgue(), "skew": skew}
    stepmaps = {
        "sC2": StepMap.from_ids(posets["C2"], 2, ["lo", "lo", "hi", "hi"]),
        "sV": StepMap.from_ids(posets["V"], 3, ["bot", "l", "l", "r", "bot", "r", "l", "bot"]),
        "sA3": StepMap.from_ids(posets["A3"], 1, ["q", "r"]),
    }
    return posets, list(base.defs.values()), cdfs, stepmaps


class ProgramGenerator:
    """Random well-typed expressions whose denotations are monotone in every variable.

    ``case`` over an ordered poset only uses constant arms given by a
    monotone map, which keeps every generated let body continuous.
    """

    def __init__(self, rng: random.Random, posets, defs, cdfs, stepmaps):
        self.rng = rng
        self.posets = posets
        self.defs = {d.name: d for d in defs}
        self.cdfs = cdfs
        self.stepmaps = stepmaps
        self.counter = 0
        self.names = sorted(posets)
        anything = Const(self.names[0], posets[self.names[0]].elements[0])
        self.returns = dict(build_program(posets, defs, anything).returns)

    def fresh(self) -> str:
        self.counter += 1
        return f"t{self.counter}"

    def expr(self, ty: str, scope: dict[str, str], depth: int):
        rng = self.rng
        p = self.posets[ty]
        options = ["const"]
        in_scope = [v for v, t in scope.items() if t == ty]
        if in_scope:
            options += ["var"] * 3
        if rng.random() < 0.08:
            options.append("fail")
        samplers = [s for s, f in sorted(self.stepmaps.items()) if f.target == p]
        if samplers:
            options.append("sample")
        if depth > 0:
            options += ["choice", "choice", "let", "case"]
            options += ["call" for fn in self.defs.values() if self.returns[fn.name] == ty]
        kind = rng.choice(options)
        if kind == "const":
            return Const(ty, rng.choice(p.elements))
        if kind == "var":
            return Var(rng.choice(in_scope))
        if kind == "fail":
            return Fail(ty)
        if kind == "sample":
            return SampleStep(rng.choice(sorted(self.cdfs)), rng.choice(samplers))
        if kind == "choice":
            prob = Fraction(rng.randint(0, 12), 12)
            return Choice(prob, self.expr(ty, scope, depth - 1), self.expr(ty, scope, depth - 1))
        if kind == "let":
            q = rng.choice(self.names)
            name = self.fresh()
            bound = self.expr(q, scope, depth - 1)
            return Let(name, bound, self.expr(ty, {**scope, name: q}, depth - 1))
        if kind == "case":
            q = rng.choice(self.names)
            qp = self.posets[q]
            scrutinee = self.expr(q, scope, depth - 1)
            if qp.is_antichain:
                arms = tuple((x, self.expr(ty, scope, depth - 1)) for x in qp.elements)
            else:
                g = random_monotone_map(rng, qp, p)
                arms = tuple((x, Const(ty, p.elements[g.table[i]])) for i, x in enumerate(qp.elements))
            return Case(scrutinee, arms)
        fn = rng.choice([fn for fn in sorted(self.defs.values(), key=lambda f: f.name) if self.returns[fn.name] == ty])
        return Call(fn.name, tuple(self.expr(t, scope, depth - 1) for _, t in fn.params))

    def program(self, main):
        return build_program(self.posets, list(self.defs.values()), main, self.cdfs, self.stepmaps)


def random_let_swap(rng: random.Random, pool=None, depth: int = 2):
    """``let x = e1 in let y = e2 in e`` and its swap, with ``e1``, ``e2`` closed."""
    posets, defs, cdfs, stepmaps = pool or program_pool()
    g = ProgramGenerator(rng, posets, defs, cdfs, stepmaps)
    t1, t2 = rng.choice(g.names), rng.choice(g.names)
    t = rng.choice([t1, t2, rng.choice(g.names)])
    e1 = g.expr(t1, {}, depth)
    e2 = g.expr(t2, {}, depth)
    for _ in range(20):
        e = g.expr(t, {"x": t1, "y": t2}, depth)
        if {"x", "y"} <= free_vars(e):
            break
    first = Let("x", e1, Let("y", e2, e))
    second = Let("y", e2, Let("x", e1, e))
    return g.program(first), g.program(second)
