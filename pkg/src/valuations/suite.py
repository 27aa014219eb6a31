"""Randomised property suites, one per acceptance criterion.

Each runner returns a :class:`Criterion` whose ``details`` hold only
strings, integers and booleans, so a report is reproducible byte for byte
from its seed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from . import generators as gen
from .checks import central_falsifier, check_monad_laws
from .integration import Integrand, integrate, integrate_riemann_oracle
from .interval import (
    Cdf,
    StepMap,
    change_of_variable_check,
    check_pushforward,
    interval_fubini_check,
    lebesgue,
    refinement_chain_check,
)
from .lang import check_equiv, evaluate, parse
from .monad import (
    disintegration_check,
    fubini_check,
    kleisli_integral_coherent,
    product_left_first,
    product_right_first,
    product_valuation,
)
from .poset import _bits, chain
from .valuation import _from_indexed, format_atoms, make_simple, stochastic_leq_exhaustive, stochastic_leq_flow


@dataclass
class Criterion:
    number: int
    title: str
    passed: bool
    details: dict = field(default_factory=dict)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        summary = ", ".join(f"{k}={v}" for k, v in self.details.items())
        return f"[{status}] {self.number}. {self.title}: {summary}"

    def as_dict(self) -> dict:
        return {"number": self.number, "title": self.title, "passed": self.passed, "details": self.details}


def monad_laws(seed: int, trials: int = 1000, max_elems: int = 8) -> Criterion:
    report = check_monad_laws(seed, trials, max_elems)
    details = {law: f"{n}/{trials}" for law, n in report.passed.items()}
    return Criterion(1, "monad laws", report.ok, details)


def fubini(seed: int, trials: int = 1000, max_elems: int = 8) -> Criterion:
    agree = strength_ok = 0
    for t in range(trials):
        rng = gen.stream(seed, t)
        d = gen.random_poset(rng, rng.randint(1, max_elems), prefix="x")
        e = gen.random_poset(rng, rng.randint(1, max_elems), prefix="y")
        nu, mu = gen.random_valuation(rng, d), gen.random_valuation(rng, e)
        h = gen.random_biintegrand(rng, d, e)
        agree += fubini_check(nu, mu, h).agrees
        strength_ok += product_left_first(nu, mu) == product_right_first(nu, mu) == product_valuation(nu, mu)
    details = {"iterated_equal": f"{agree}/{trials}", "double_strength_equal": f"{strength_ok}/{trials}"}
    return Criterion(2, "Fubini / commutativity", agree == strength_ok == trials, details)


def worked_integral() -> tuple[Fraction, Fraction]:
    c = chain("a", "b")
    nu = make_simple(c, [("a", "1/2"), ("b", "1/4")])
    h = Integrand.from_dict(c, {"a": "1/3", "b": "1"})
    return integrate(h, nu), integrate_riemann_oracle(h, nu)


def integral_oracle(seed: int, trials: int = 1000, max_elems: int = 8) -> Criterion:
    agree = 0
    for t in range(trials):
        rng = gen.stream(seed, t)
        p = gen.random_poset(rng, rng.randint(1, max_elems))
        h, nu = gen.random_integrand(rng, p), gen.random_valuation(rng, p)
        agree += integrate(h, nu) == integrate_riemann_oracle(h, nu)
    closed, oracle = worked_integral()
    worked = closed == oracle == Fraction(5, 12)
    details = {"agree": f"{agree}/{trials}", "worked_instance": f"{closed} == {oracle}"}
    return Criterion(3, "integral oracle equivalence", agree == trials and worked, details)


def _pushed_up(rng, nu):
    """A valuation above ``nu``: atoms moved upward, then spare mass added."""
    p = nu.poset
    pairs = [(rng.choice(list(_bits(p.up[i]))), w) for i, w in nu.atoms]
    spare = 1 - nu.total
    if spare and rng.random() < 0.5:
        pairs.append((rng.randrange(len(p)), spare * Fraction(rng.randint(0, 4), 4)))
    return _from_indexed(p, pairs)


def order_agreement(seed: int, pairs: int = 500, max_elems: int = 12) -> Criterion:
    agree = leq = 0
    for t in range(pairs):
        rng = gen.stream(seed, t)
        p = gen.random_poset(rng, rng.randint(1, max_elems))
        nu1 = gen.random_valuation(rng, p)
        nu2 = _pushed_up(rng, nu1) if rng.random() < 0.5 else gen.random_valuation(rng, p)
        a, b = stochastic_leq_flow(nu1, nu2), stochastic_leq_exhaustive(nu1, nu2)
        agree += a == b
        leq += b
    details = {"agree": f"{agree}/{pairs}", "leq_true": str(leq), "leq_false": str(pairs - leq)}
    return Criterion(4, "stochastic order: flow vs exhaustive", agree == pairs, details)


def disintegration(seed: int, trials: int = 500, max_elems: int = 8) -> Criterion:
    ok = coherent = 0
    for t in range(trials):
        rng = gen.stream(seed, t)
        c = gen.random_poset(rng, rng.randint(1, max_elems), prefix="c")
        d = gen.random_poset(rng, rng.randint(1, max_elems), prefix="d")
        f = gen.random_kleisli_map(rng, c, d)
        mu = gen.random_valuation(rng, c)
        h = gen.random_integrand(rng, d)
        ok += disintegration_check(f, mu, h)
        coherent += kleisli_integral_coherent(f, mu, gen.random_upper_mask(rng, d))
    details = {"identity": f"{ok}/{trials}", "kleisli_integral": f"{coherent}/{trials}"}
    return Criterion(5, "disintegration identity", ok == coherent == trials, details)


def standard_cdfs() -> dict[str, Cdf]:
    """Lebesgue plus non-uniform CDFs: atoms at 0, at a dyadic point, inside, at 1, deficits."""
    pts = Cdf.from_points
    return {
        "lebesgue": lebesgue(),
        "atom0": pts([("0", "0", "1/4"), ("1", "1", "1")]),
        "skew": pts([("0", "0", "1/8"), ("1/3", "1/4", "1/2"), ("1", "7/8", "7/8")]),
        "front": pts([("0", "0", "0"), ("1/5", "3/4", "3/4"), ("1", "1", "1")]),
        "mid": pts([("0", "0", "0"), ("1/2", "1/4", "3/4"), ("1", "1", "1")]),
        "atom1": pts([("0", "0", "0"), ("1", "1/2", "1")]),
        "half": pts([("0", "0", "0"), ("5/7", "1/3", "1/3"), ("1", "1/2", "1/2")]),
        "zero": pts([("0", "0", "0"), ("1", "0", "0")]),
    }


def _bump(rng, f: StepMap) -> StepMap:
    g = f.refine(f.level + 1) if f.level < 6 and rng.random() < 0.7 else f
    p = g.target
    cells = tuple(rng.choice(list(_bits(p.up[k]))) if rng.random() < 0.3 else k for k in g.cells)
    return StepMap(g.level, p, cells)


def pushforward_suite(seed: int, maps: int = 60, max_level: int = 6, max_elems: int = 6) -> Criterion:
    cdfs = standard_cdfs()
    counts = {"pushforward": 0, "change_of_variable": 0, "interval_fubini": 0, "chains": 0}
    total = 0
    levels = set()
    for t in range(maps):
        rng = gen.stream(seed, t)
        d = gen.random_poset(rng, rng.randint(1, max_elems), prefix="d")
        level = t % (max_level + 1)
        levels.add(level)
        f = StepMap(level, d, tuple(rng.randrange(len(d)) for _ in range(2 ** level)))
        chain_maps = [f]
        while len(chain_maps) < 4:
            chain_maps.append(_bump(rng, chain_maps[-1]))
        e = gen.random_poset(rng, rng.randint(1, 4), prefix="e")
        for F in cdfs.values():
            total += 1
            counts["pushforward"] += check_pushforward(F, f)
            counts["change_of_variable"] += change_of_variable_check(gen.random_integrand(rng, d), f, F)
            mu = gen.random_valuation(rng, e)
            counts["interval_fubini"] += interval_fubini_check(F, f, mu, gen.random_biintegrand(rng, d, e))
            counts["chains"] += refinement_chain_check(chain_maps, F)
    details = {k: f"{v}/{total}" for k, v in counts.items()}
    details["cdfs"] = str(len(cdfs))
    details["step_maps"] = str(maps)
    details["levels"] = f"{min(levels)}..{max(levels)}"
    return Criterion(6, "push-forward correctness and centrality", all(v == total for v in counts.values()), details)


def central(seed: int, valuations: int = 20, trials: int = 500, max_elems: int = 6) -> Criterion:
    falsified = 0
    digests = []
    for k in range(valuations):
        rng = gen.stream(seed, k)
        d = gen.random_poset(rng, rng.randint(1, max_elems), prefix="x")
        nu = gen.random_valuation(rng, d)
        res = central_falsifier(nu, trials, seed * 1000 + k, max_elems)
        falsified += res.falsified
        digests.append(res.digest)
    rng = gen.stream(seed, 0)
    d = gen.random_poset(rng, rng.randint(1, max_elems), prefix="x")
    again = central_falsifier(gen.random_valuation(rng, d), trials, seed * 1000, max_elems)
    deterministic = again.digest == digests[0]
    details = {
        "falsified": f"{falsified}/{valuations}",
        "trials_each": str(trials),
        "deterministic": str(deterministic).lower(),
    }
    return Criterion(7, "central falsifier soundness", falsified == 0 and deterministic, details)


COUNTEREXAMPLE = (
    "poset A2 = {a, b};\nmain = choice 1/2 (const A2.a) (const A2.b);\n",
    "poset A2 = {a, b};\nmain = choice 1/3 (const A2.a) (const A2.b);\n",
)


def program_equivalence(seed: int, swaps: int = 300) -> Criterion:
    pool = gen.program_pool()
    equal = 0
    for t in range(swaps):
        first, second = gen.random_let_swap(gen.stream(seed, t), pool)
        equal += check_equiv(first, second)
    p1, p2 = (parse(src) for src in COUNTEREXAMPLE)
    distinguished = not check_equiv(p1, p2)
    details = {
        "swaps_equal": f"{equal}/{swaps}",
        "counterexample": f"[{format_atoms(evaluate(p1))}] vs [{format_atoms(evaluate(p2))}]: {'different' if distinguished else 'EQUAL'}",
    }
    return Criterion(8, "program equivalence (let reordering)", equal == swaps and distinguished, details)


RUNNERS = {
    1: monad_laws,
    2: fubini,
    3: integral_oracle,
    4: order_agreement,
    5: disintegration,
    6: pushforward_suite,
    7: central,
    8: program_equivalence,
}


def run_all(seed: int, only=None) -> list[Criterion]:
    return [RUNNERS[k](seed) for k in sorted(RUNNERS) if only is None or k in only]

