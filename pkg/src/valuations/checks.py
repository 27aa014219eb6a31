"""Randomised law checks: the monad laws and the central-valuation falsifier."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

from . import generators as gen
from .formats import dump_biintegrand, dump_poset, dump_valuation
from .monad import fubini_check, kleisli_compose, kleisli_ext, unit, unit_map
from .valuation import SimpleValuation


@dataclass
class LawReport:
    trials: int
    passed: dict[str, int] = field(default_factory=lambda: {"left_unit": 0, "right_unit": 0, "associativity": 0})

    @property
    def ok(self) -> bool:
        return all(n == self.trials for n in self.passed.values())


def check_monad_laws(seed: int, trials: int, max_elems: int = 6) -> LawReport:
    """Left unit, right unit and associativity on random Kleisli maps.

    Each side of each law is computed separately and compared as atom
    tables.
    """
    report = LawReport(trials)
    for t in range(trials):
        rng = gen.stream(seed, t)
        d = gen.random_poset(rng, rng.randint(1, max_elems), prefix="d")
        e = gen.random_poset(rng, rng.randint(1, max_elems), prefix="e")
        c = gen.random_poset(rng, rng.randint(1, max_elems), prefix="c")
        f = gen.random_kleisli_map(rng, d, e)
        g = gen.random_kleisli_map(rng, e, c)
        nu = gen.random_valuation(rng, d)
        x = rng.choice(d.elements)
        if kleisli_ext(f, unit(d, x)) == f(x):
            report.passed["left_unit"] += 1
        if kleisli_ext(unit_map(d), nu) == nu:
            report.passed["right_unit"] += 1
        if kleisli_ext(g, kleisli_ext(f, nu)) == kleisli_ext(kleisli_compose(g, f), nu):
            report.passed["associativity"] += 1
    return report


@dataclass
class FalsifierResult:
    falsified: bool
    trials: int
    digest: str
    witness: str | None = None


def central_falsifier(nu: SimpleValuation, trials: int, seed: int, max_elems: int = 6) -> FalsifierResult:
    """Search for ``(E, mu, h)`` on which the two iterated integrals against ``nu`` differ.

    On a finite poset every valuation is simple, so ``mu`` ranges over
    simple valuations whichever class of valuations one quantifies over.
    Trial ``t`` draws from its own stream, so results do not depend on how
    trials are scheduled.  ``digest`` hashes every generated instance; equal
    seeds give equal digests.
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    sha = hashlib.sha256()
    for t in range(trials):
        rng = gen.stream(seed, t)
        e = gen.random_poset(rng, rng.randint(1, max_elems), prefix="y")
        mu = gen.random_valuation(rng, e)
        h = gen.random_biintegrand(rng, nu.poset, e)
        instance = dump_poset(e, "E") + dump_valuation(mu, "mu", "E") + dump_biintegrand(h, "h", "D", "E")
        sha.update(instance.encode())
        res = fubini_check(nu, mu, h)
        if not res.agrees:
            return FalsifierResult(True, t + 1, sha.hexdigest(), f"# trial {t}\n" + instance)
    return FalsifierResult(False, trials, sha.hexdigest())
