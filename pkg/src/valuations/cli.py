"""Command-line entry point.

Every command prints a human-readable report, or a JSON document with
``--json``.  Exit codes: 0 when every check in the command held, 1 when one
failed, 2 for input errors (unknown names, malformed files, mismatched
posets).
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from .checks import central_falsifier, check_monad_laws
from .errors import InputError, ValuationError
from .formats import load_workspace
from .integration import integrate, integrate_riemann_oracle
from .interval import check_pushforward, pushforward
from .lang import check_equiv, evaluate
from .monad import fubini_check
from .poset import DEFAULT_MAX_ELEMS
from .suite import RUNNERS
from .valuation import compare, format_atoms, same_poset, stochastic_leq_exhaustive


class Report:
    def __init__(self, command: str):
        self.command = command
        self.ok = True
        self.lines: list[str] = []
        self.data: dict = {"command": command}

    def check(self, condition: bool) -> bool:
        self.ok = self.ok and bool(condition)
        return bool(condition)

    def say(self, line: str):
        self.lines.append(line)


def _q(x: Fraction) -> str:
    return str(x)


def _atoms(nu) -> dict[str, str]:
    return {x: _q(w) for x, w in nu.weights.items()}


def cmd_integrate(ws, args) -> Report:
    r = Report("integrate")
    nu = ws.get("valuations", args.valuation)
    h = ws.get("integrands", args.integrand)
    same_poset(h.poset, nu.poset)
    closed, oracle = integrate(h, nu), integrate_riemann_oracle(h, nu)
    ok = r.check(closed == oracle)
    r.say(f"{closed} == {oracle} {'OK' if ok else 'FAIL'}")
    r.data.update(closed_form=_q(closed), oracle=_q(oracle))
    return r


def cmd_compare(ws, args) -> Report:
    r = Report("compare")
    nu1 = ws.get("valuations", args.v1)
    nu2 = ws.get("valuations", args.v2)
    relation = compare(nu1, nu2)
    r.say(relation)
    r.data["relation"] = relation
    if len(nu1.poset) <= args.max_elems:
        le = stochastic_leq_exhaustive(nu1, nu2, args.max_elems)
        ge = stochastic_leq_exhaustive(nu2, nu1, args.max_elems)
        oracle = {(True, True): "EQ", (True, False): "LEQ", (False, True): "GEQ", (False, False): "INCOMPARABLE"}[(le, ge)]
        ok = r.check(oracle == relation)
        r.say(f"exhaustive oracle: {oracle} {'agrees' if ok else 'DISAGREES'}")
        r.data["oracle"] = oracle
    return r


def cmd_fubini(ws, args) -> Report:
    r = Report("fubini")
    nu = ws.get("valuations", args.nu)
    mu = ws.get("valuations", args.mu)
    h = ws.get("biintegrands", args.h)
    res = fubini_check(nu, mu, h)
    ok = r.check(res.agrees)
    r.say(f"lhs {res.lhs}  rhs {res.rhs}  product {res.joint}  {'OK' if ok else 'FAIL'}")
    r.data.update(lhs=_q(res.lhs), rhs=_q(res.rhs), product=_q(res.joint), equal=res.equal)
    return r


def cmd_laws(ws, args) -> Report:
    r = Report("laws")
    rep = check_monad_laws(args.seed, args.trials, args.poset_size)
    for law, n in rep.passed.items():
        r.check(n == rep.trials)
        r.say(f"{law}: {n}/{rep.trials}")
    r.data.update(seed=args.seed, trials=args.trials, passed=dict(rep.passed))
    return r


def cmd_pushforward(ws, args) -> Report:
    r = Report("pushforward")
    F = ws.get("cdfs", args.cdf)
    f = ws.get("stepmaps", args.stepmap)
    nu = pushforward(F, f)
    r.say(format_atoms(nu))
    r.data["atoms"] = _atoms(nu)
    if len(f.target) <= args.max_elems:
        ok = r.check(check_pushforward(F, f, args.max_elems))
        r.say(f"mass on every upper set matches the preimage measure: {'OK' if ok else 'FAIL'}")
        r.data["preimage_check"] = ok
    return r


def cmd_eval(ws, args) -> Report:
    r = Report("eval")
    prog = ws.get("programs", args.program)
    nu = evaluate(prog)
    r.say(format_atoms(nu))
    r.say(f"mass {nu.total}, deficit {1 - nu.total}")
    r.data.update(poset=prog.result, atoms=_atoms(nu), mass=_q(nu.total))
    return r


def cmd_equiv(ws, args) -> Report:
    r = Report("equiv")
    p1 = ws.get("programs", args.p1)
    p2 = ws.get("programs", args.p2)
    equal = check_equiv(p1, p2)
    verdict = "EQUIVALENT" if equal else "DIFFERENT"
    r.check(equal == (args.expect == "equal"))
    r.say(f"{verdict} (expected {args.expect})")
    r.data.update(equivalent=equal, expected=args.expect, left=_atoms(evaluate(p1)), right=_atoms(evaluate(p2)))
    return r


def cmd_central(ws, args) -> Report:
    r = Report("central")
    nu = ws.get("valuations", args.valuation)
    res = central_falsifier(nu, args.trials, args.seed, args.poset_size)
    r.check(not res.falsified)
    r.say(f"falsified: {str(res.falsified).lower()} ({res.trials} trials, digest {res.digest[:16]})")
    if res.witness:
        r.say(res.witness)
    r.data.update(falsified=res.falsified, trials=res.trials, seed=args.seed, digest=res.digest, witness=res.witness)
    return r


def cmd_suite(ws, args) -> Report:
    r = Report("suite")
    only = {int(k) for k in args.criteria.split(",")} if args.criteria else set(RUNNERS)
    results = []
    for k in sorted(only):
        if k not in RUNNERS:
            raise InputError(f"no criterion {k}; choose from {sorted(RUNNERS)}")
        c = RUNNERS[k](args.seed)
        r.check(c.passed)
        r.say(c.line())
        results.append(c.as_dict())
    r.data.update(seed=args.seed, criteria=results)
    return r


COMMANDS = {
    "integrate": (cmd_integrate, "closed-form and threshold integral of an integrand", ["valuation", "integrand"]),
    "compare": (cmd_compare, "stochastic order between two valuations", ["v1", "v2"]),
    "fubini": (cmd_fubini, "both iterated integrals of a bi-integrand", ["nu", "mu", "h"]),
    "laws": (cmd_laws, "monad laws on random instances", []),
    "pushforward": (cmd_pushforward, "push a CDF forward along a step map", ["cdf", "stepmap"]),
    "eval": (cmd_eval, "evaluate a program", ["program"]),
    "equiv": (cmd_equiv, "compare the denotations of two programs", ["p1", "p2"]),
    "central": (cmd_central, "search for a centrality counterexample", ["valuation"]),
    "suite": (cmd_suite, "run the randomised acceptance suites", []),
}

NEEDS_WORKSPACE = {"integrate", "compare", "fubini", "pushforward", "eval", "equiv", "central"}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="emit a machine-readable report")
    common.add_argument("--seed", type=int, default=1)
    common.add_argument("--trials", type=int, default=200)
    common.add_argument("--max-elems", type=int, default=DEFAULT_MAX_ELEMS, help="upper-set enumeration bound")
    common.add_argument("--poset-size", type=int, default=6, help="largest random poset for laws/central")

    parser = argparse.ArgumentParser(prog="valuations", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, help_text, positionals) in COMMANDS.items():
        p = sub.add_parser(name, parents=[common], help=help_text)
        if name in NEEDS_WORKSPACE:
            p.add_argument("workspace", help="directory of .poset/.val/.fn/.cdf/.step/.prob files")
        for arg in positionals:
            p.add_argument(arg)
        if name == "equiv":
            p.add_argument("--expect", choices=["equal", "different"], default="equal")
        if name == "suite":
            p.add_argument("--criteria", help="comma-separated criterion numbers (default: all)")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    fn = COMMANDS[args.command][0]
    try:
        ws = load_workspace(args.workspace) if args.command in NEEDS_WORKSPACE else None
        report = fn(ws, args)
    except (InputError, ValuationError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    if args.json:
        report.data["ok"] = report.ok
        print(json.dumps(report.data, indent=2, sort_keys=True))
    else:
        for line in report.lines:
            print(line)
    return 0 if report.ok else 1


if __name__ == "__main__":
    sys.exit(main())
