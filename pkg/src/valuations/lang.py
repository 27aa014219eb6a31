"""A first-order probabilistic expression language.

Surface syntax::

    poset C2 = {a, b; a < b};
    def f(x: C2) = case var x { a -> const C2.a ; b -> fail C2 };
    main = let x = choice 1/3 (const C2.a) (const C2.b) in f(var x);

Expressions denote simple valuations on a finite poset.  ``let`` and
``case`` are interpreted by Kleisli extension, ``choice`` by a convex
combination, ``fail`` by the zero valuation and ``sample F f`` by the
push-forward of the CDF ``F`` along the step map ``f``.  Variables range
over poset elements only, and definitions may not recurse.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

from .errors import (
    ContinuityViolation,
    InputError,
    PosetMismatch,
    ProgramRecursionError,
    ProgramSyntaxError,
    ResolutionError,
)
from .interval import Cdf, StepMap, pushforward
from .monad import kleisli_ext, kleisli_map
from .poset import FinitePoset, build_poset
from .valuation import SimpleValuation, dirac, mix, zero

KEYWORDS = {"poset", "def", "main", "const", "var", "fail", "choice", "sample", "let", "in", "case"}


# -- syntax ----------------------------------------------------------------


@dataclass(frozen=True)
class Expr:
    pass


@dataclass(frozen=True)
class Const(Expr):
    poset: str
    element: str
    pos: tuple[int, int] = field(default=(0, 0), compare=False, repr=False)


@dataclass(frozen=True)
class Var(Expr):
    name: str
    pos: tuple[int, int] = field(default=(0, 0), compare=False, repr=False)


@dataclass(frozen=True)
class Fail(Expr):
    poset: str
    pos: tuple[int, int] = field(default=(0, 0), compare=False, repr=False)


@dataclass(frozen=True)
class Choice(Expr):
    p: Fraction
    left: Expr
    right: Expr
    pos: tuple[int, int] = field(default=(0, 0), compare=False, repr=False)


@dataclass(frozen=True)
class SampleStep(Expr):
    cdf: str
    stepmap: str
    pos: tuple[int, int] = field(default=(0, 0), compare=False, repr=False)


@dataclass(frozen=True)
class Let(Expr):
    name: str
    bound: Expr
    body: Expr
    pos: tuple[int, int] = field(default=(0, 0), compare=False, repr=False)


@dataclass(frozen=True)
class Call(Expr):
    fn: str
    args: tuple[Expr, ...]
    pos: tuple[int, int] = field(default=(0, 0), compare=False, repr=False)


@dataclass(frozen=True)
class Case(Expr):
    scrutinee: Expr
    arms: tuple[tuple[str, Expr], ...]
    pos: tuple[int, int] = field(default=(0, 0), compare=False, repr=False)


@dataclass(frozen=True)
class FunDef:
    name: str
    params: tuple[tuple[str, str], ...]
    body: Expr
    pos: tuple[int, int] = field(default=(0, 0), compare=False, repr=False)


def unparse(e: Expr) -> str:
    if isinstance(e, Const):
        return f"const {e.poset}.{e.element}"
    if isinstance(e, Var):
        return f"var {e.name}"
    if isinstance(e, Fail):
        return f"fail {e.poset}"
    if isinstance(e, Choice):
        return f"choice {e.p.numerator}/{e.p.denominator} ({unparse(e.left)}) ({unparse(e.right)})"
    if isinstance(e, SampleStep):
        return f"sample {e.cdf} {e.stepmap}"
    if isinstance(e, Let):
        return f"let {e.name} = {unparse(e.bound)} in {unparse(e.body)}"
    if isinstance(e, Call):
        return f"{e.fn}({', '.join(unparse(a) for a in e.args)})"
    if isinstance(e, Case):
        arms = " ; ".join(f"{x} -> {unparse(a)}" for x, a in e.arms)
        return f"case {unparse(e.scrutinee)} {{ {arms} }}"
    raise TypeError(e)


def free_vars(e: Expr) -> frozenset[str]:
    if isinstance(e, Var):
        return frozenset({e.name})
    if isinstance(e, (Const, Fail, SampleStep)):
        return frozenset()
    if isinstance(e, Choice):
        return free_vars(e.left) | free_vars(e.right)
    if isinstance(e, Let):
        return free_vars(e.bound) | (free_vars(e.body) - {e.name})
    if isinstance(e, Call):
        return frozenset().union(*(free_vars(a) for a in e.args))
    if isinstance(e, Case):
        return free_vars(e.scrutinee).union(*(free_vars(a) for _, a in e.arms))
    raise TypeError(e)


def substitute(e: Expr, name: str, value: Expr) -> Expr:
    """``e[name := value]`` for a closed ``value``."""
    if isinstance(e, Var):
        return value if e.name == name else e
    if isinstance(e, (Const, Fail, SampleStep)):
        return e
    if isinstance(e, Choice):
        return Choice(e.p, substitute(e.left, name, value), substitute(e.right, name, value), e.pos)
    if isinstance(e, Let):
        body = e.body if e.name == name else substitute(e.body, name, value)
        return Let(e.name, substitute(e.bound, name, value), body, e.pos)
    if isinstance(e, Call):
        return Call(e.fn, tuple(substitute(a, name, value) for a in e.args), e.pos)
    if isinstance(e, Case):
        return Case(
            substitute(e.scrutinee, name, value),
            tuple((x, substitute(a, name, value)) for x, a in e.arms),
            e.pos,
        )
    raise TypeError(e)


# -- tokenizer and parser ----------------------------------------------------

_TOKEN = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+|\#[^\n]*)
  | (?P<rat>\d+/\d+)
  | (?P<num>\d+)
  | (?P<arrow>->)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_']*)
  | (?P<punct>[{}();,:=.<])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    col: int


def tokenize(source: str) -> list[Token]:
    out = []
    i, line, col = 0, 1, 1
    while i < len(source):
        m = _TOKEN.match(source, i)
        if not m:
            raise ProgramSyntaxError(f"unexpected character {source[i]!r}", line, col)
        kind = m.lastgroup
        text = m.group()
        if kind != "ws":
            if kind == "ident" and text in KEYWORDS:
                kind = "kw"
            out.append(Token(kind, text, line, col))
        newlines = text.count("\n")
        if newlines:
            line += newlines
            col = len(text) - text.rfind("\n")
        else:
            col += len(text)
        i = m.end()
    out.append(Token("eof", "", line, col))
    return out


class _Parser:
    def __init__(self, source: str):
        self.toks = tokenize(source)
        self.k = 0

    @property
    def tok(self) -> Token:
        return self.toks[self.k]

    def error(self, message, tok=None):
        tok = tok or self.tok
        raise ProgramSyntaxError(message, tok.line, tok.col)

    def advance(self) -> Token:
        t = self.tok
        self.k += 1
        return t

    def at(self, text, kind=None) -> bool:
        t = self.tok
        return t.text == text and (kind is None or t.kind == kind)

    def expect(self, text) -> Token:
        if self.tok.text != text or self.tok.kind == "eof":
            self.error(f"expected {text!r}, found {self.tok.text or 'end of input'!r}")
        return self.advance()

    def name(self, what="a name") -> Token:
        if self.tok.kind != "ident":
            self.error(f"expected {what}, found {self.tok.text or 'end of input'!r}")
        return self.advance()

    def element(self) -> Token:
        if self.tok.kind not in ("ident", "num"):
            self.error(f"expected an element name, found {self.tok.text or 'end of input'!r}")
        return self.advance()

    def program(self):
        posets: list[tuple[Token, list[str], list[tuple[str, str]]]] = []
        defs: list[FunDef] = []
        main = None
        while self.tok.kind != "eof":
            if self.at("poset", "kw"):
                posets.append(self.poset_decl())
            elif self.at("def", "kw"):
                defs.append(self.def_decl())
            elif self.at("main", "kw"):
                if main is not None:
                    self.error("main is defined twice")
                self.advance()
                self.expect("=")
                main = self.expr()
                if not self.at(";") and self.tok.kind != "eof":
                    self.error(f"expected ';', found {self.tok.text!r}")
                if self.at(";"):
                    self.advance()
            else:
                self.error(f"expected 'poset', 'def' or 'main', found {self.tok.text!r}")
        if main is None:
            self.error("program has no main expression")
        return posets, defs, main

    def poset_decl(self):
        self.advance()
        name = self.name("a poset name")
        self.expect("=")
        self.expect("{")
        elems = [self.element().text]
        while self.at(","):
            self.advance()
            elems.append(self.element().text)
        covers = []
        if self.at(";"):
            self.advance()
            while not self.at("}"):
                lo = self.element().text
                self.expect("<")
                hi = self.element().text
                covers.append((lo, hi))
                while self.at("<"):
                    self.advance()
                    lo, hi = hi, self.element().text
                    covers.append((lo, hi))
                if self.at(","):
                    self.advance()
                elif not self.at("}"):
                    self.error(f"expected ',' or '}}', found {self.tok.text!r}")
        self.expect("}")
        self.expect(";")
        return name, elems, covers

    def def_decl(self):
        start = self.advance()
        name = self.name("a function name").text
        self.expect("(")
        params = []
        if not self.at(")"):
            while True:
                p = self.name("a parameter name").text
                self.expect(":")
                ty = self.name("a poset name").text
                params.append((p, ty))
                if not self.at(","):
                    break
                self.advance()
        self.expect(")")
        self.expect("=")
        body = self.expr()
        self.expect(";")
        return FunDef(name, tuple(params), body, (start.line, start.col))

    def expr(self) -> Expr:
        t = self.tok
        pos = (t.line, t.col)
        if t.kind == "kw":
            if t.text == "const":
                self.advance()
                p = self.name("a poset name").text
                self.expect(".")
                return Const(p, self.element().text, pos)
            if t.text == "var":
                self.advance()
                return Var(self.name("a variable").text, pos)
            if t.text == "fail":
                self.advance()
                return Fail(self.name("a poset name").text, pos)
            if t.text == "choice":
                self.advance()
                if self.tok.kind == "rat":
                    p = Fraction(self.advance().text)
                elif self.tok.kind == "num":
                    p = Fraction(int(self.advance().text))
                else:
                    self.error(f"expected a probability p/q, found {self.tok.text!r}")
                if self.at("."):
                    self.error("decimal probabilities are not allowed; write p/q")
                if not 0 <= p <= 1:
                    self.error(f"choice probability {p} is outside [0, 1]", t)
                left = self.expr()
                right = self.expr()
                return Choice(p, left, right, pos)
            if t.text == "sample":
                self.advance()
                cdf = self.name("a CDF name").text
                step = self.name("a step map name").text
                return SampleStep(cdf, step, pos)
            if t.text == "let":
                self.advance()
                x = self.name("a variable").text
                self.expect("=")
                bound = self.expr()
                self.expect("in")
                return Let(x, bound, self.expr(), pos)
            if t.text == "case":
                self.advance()
                scrutinee = self.expr()
                self.expect("{")
                arms = []
                while not self.at("}"):
                    x = self.element().text
                    self.expect("->")
                    arms.append((x, self.expr()))
                    if self.at(";"):
                        self.advance()
                    elif not self.at("}"):
                        self.error(f"expected ';' or '}}', found {self.tok.text!r}")
                self.expect("}")
                return Case(scrutinee, tuple(arms), pos)
            self.error(f"unexpected keyword {t.text!r}")
        if t.text == "(" and t.kind == "punct":
            self.advance()
            e = self.expr()
            self.expect(")")
            return e
        if t.kind == "ident":
            self.advance()
            self.expect("(")
            args = []
            if not self.at(")"):
                args.append(self.expr())
                while self.at(","):
                    self.advance()
                    args.append(self.expr())
            self.expect(")")
            return Call(t.text, tuple(args), pos)
        self.error(f"expected an expression, found {t.text or 'end of input'!r}")


# -- programs and resolution ---------------------------------------------------


@dataclass(frozen=True, eq=False)
class Program:
    posets: Mapping[str, FinitePoset]
    defs: Mapping[str, FunDef]
    main: Expr
    cdfs: Mapping[str, Cdf]
    stepmaps: Mapping[str, StepMap]
    result: str
    returns: Mapping[str, str]

    @property
    def result_poset(self) -> FinitePoset:
        return self.posets[self.result]

    def with_main(self, main: Expr) -> "Program":
        return build_program(self.posets, list(self.defs.values()), main, self.cdfs, self.stepmaps)


def _where(e) -> str:
    line, col = e.pos
    return f"line {line}, column {col}: " if line else ""


class _Resolver:
    def __init__(self, posets, defs, cdfs, stepmaps):
        self.posets = posets
        self.defs = defs
        self.cdfs = cdfs
        self.stepmaps = stepmaps
        self.returns: dict[str, str] = {}
        self.stepmap_poset = {}
        for name, f in stepmaps.items():
            for pname, p in posets.items():
                if p == f.target:
                    self.stepmap_poset[name] = pname
                    break

    def poset(self, name, e) -> FinitePoset:
        if name not in self.posets:
            raise ResolutionError(f"{_where(e)}unknown poset {name!r}")
        return self.posets[name]

    def element(self, pname, x, e):
        if x not in self.poset(pname, e):
            raise ResolutionError(f"{_where(e)}{x!r} is not an element of {pname}")

    def check(self, e: Expr, scope: dict[str, str]) -> str:
        if isinstance(e, Const):
            self.element(e.poset, e.element, e)
            return e.poset
        if isinstance(e, Var):
            if e.name not in scope:
                raise ResolutionError(f"{_where(e)}unbound variable {e.name!r}")
            return scope[e.name]
        if isinstance(e, Fail):
            self.poset(e.poset, e)
            return e.poset
        if isinstance(e, Choice):
            a = self.check(e.left, scope)
            b = self.check(e.right, scope)
            if a != b:
                raise ResolutionError(f"{_where(e)}choice branches have different posets {a} and {b}")
            return a
        if isinstance(e, SampleStep):
            if e.cdf not in self.cdfs:
                raise ResolutionError(f"{_where(e)}unknown CDF {e.cdf!r}")
            if e.stepmap not in self.stepmaps:
                raise ResolutionError(f"{_where(e)}unknown step map {e.stepmap!r}")
            if e.stepmap not in self.stepmap_poset:
                raise ResolutionError(f"{_where(e)}step map {e.stepmap!r} targets an undeclared poset")
            return self.stepmap_poset[e.stepmap]
        if isinstance(e, Let):
            bound = self.check(e.bound, scope)
            return self.check(e.body, {**scope, e.name: bound})
        if isinstance(e, Call):
            if e.fn not in self.defs:
                raise ResolutionError(f"{_where(e)}unknown function {e.fn!r}")
            fn = self.defs[e.fn]
            if len(e.args) != len(fn.params):
                raise ResolutionError(f"{_where(e)}{e.fn} takes {len(fn.params)} arguments, got {len(e.args)}")
            for a, (pname, ty) in zip(e.args, fn.params):
                got = self.check(a, scope)
                if got != ty:
                    raise ResolutionError(f"{_where(a)}argument {pname} of {e.fn} expects {ty}, got {got}")
            return self.returns[e.fn]
        if isinstance(e, Case):
            sp = self.check(e.scrutinee, scope)
            p = self.posets[sp]
            seen = set()
            for x, _ in e.arms:
                self.element(sp, x, e)
                if x in seen:
                    raise ResolutionError(f"{_where(e)}duplicate case arm {x!r}")
                seen.add(x)
            missing = [x for x in p.elements if x not in seen]
            if missing:
                raise ResolutionError(f"{_where(e)}case is missing arms for {missing}")
            types = {self.check(a, scope) for _, a in e.arms}
            if len(types) != 1:
                raise ResolutionError(f"{_where(e)}case arms have different posets {sorted(types)}")
            return types.pop()
        raise TypeError(e)


def _calls(e: Expr) -> set[str]:
    if isinstance(e, Call):
        return {e.fn}.union(*(_calls(a) for a in e.args))
    if isinstance(e, Choice):
        return _calls(e.left) | _calls(e.right)
    if isinstance(e, Let):
        return _calls(e.bound) | _calls(e.body)
    if isinstance(e, Case):
        return _calls(e.scrutinee).union(*(_calls(a) for _, a in e.arms))
    return set()


def _definition_order(defs: Mapping[str, FunDef]) -> list[str]:
    """Callees before callers; any cycle (self-calls included) is rejected."""
    order, state = [], {}

    def visit(name, trail):
        if state.get(name) == "done":
            return
        if state.get(name) == "active":
            cycle = trail[trail.index(name):] + [name]
            raise ProgramRecursionError(f"recursive definitions: {' -> '.join(cycle)}")
        state[name] = "active"
        for callee in sorted(_calls(defs[name].body)):
            if callee in defs:
                visit(callee, trail + [name])
        state[name] = "done"
        order.append(name)

    for name in defs:
        visit(name, [])
    return order


def build_program(posets, defs, main, cdfs=None, stepmaps=None) -> Program:
    cdfs = dict(cdfs or {})
    stepmaps = dict(stepmaps or {})
    table: dict[str, FunDef] = {}
    for d in defs:
        if d.name in table:
            raise ResolutionError(f"{_where(d)}function {d.name!r} is defined twice")
        table[d.name] = d
    r = _Resolver(dict(posets), table, cdfs, stepmaps)
    for name in _definition_order(table):
        fn = table[name]
        scope = {}
        for p, ty in fn.params:
            r.poset(ty, fn)
            if p in scope:
                raise ResolutionError(f"{_where(fn)}parameter {p!r} repeated in {name}")
            scope[p] = ty
        r.returns[name] = r.check(fn.body, scope)
    result = r.check(main, {})
    return Program(r.posets, table, main, cdfs, stepmaps, result, dict(r.returns))


def parse(source: str, posets=None, cdfs=None, stepmaps=None) -> Program:
    """Parse and resolve a program.

    ``posets``, ``cdfs`` and ``stepmaps`` supply names declared outside the
    source (a workspace); posets declared in the source are added to them.
    """
    ps = _Parser(source)
    poset_decls, defs, main = ps.program()
    env = dict(posets or {})
    for tok, elems, covers in poset_decls:
        if tok.text in env:
            raise ResolutionError(f"line {tok.line}, column {tok.col}: poset {tok.text!r} is declared twice")
        try:
            env[tok.text] = build_poset(elems, covers, name=tok.text)
        except InputError as exc:
            raise ResolutionError(f"line {tok.line}, column {tok.col}: {exc}") from None
    return build_program(env, defs, main, cdfs, stepmaps)


# -- semantics -----------------------------------------------------------------


class _Evaluator:
    def __init__(self, program: Program):
        self.prog = program
        self.memo: dict = {}
        self.fv: dict[int, tuple[str, ...]] = {}

    def free(self, e: Expr) -> tuple[str, ...]:
        key = id(e)
        if key not in self.fv:
            self.fv[key] = tuple(sorted(free_vars(e)))
        return self.fv[key]

    def eval(self, e: Expr, env: dict[str, tuple[FinitePoset, int]], target: FinitePoset) -> SimpleValuation:
        key = (id(e), tuple(env[v][1] for v in self.free(e)))
        hit = self.memo.get(key)
        if hit is not None:
            return hit
        out = self._eval(e, env, target)
        self.memo[key] = out
        return out

    def bind(self, nu: SimpleValuation, body, target: FinitePoset, what: str) -> SimpleValuation:
        """``(v |-> body(v))^dagger (nu)``.

        Over an ordered poset the whole map is built and must be monotone in
        the stochastic order; over an antichain only the support matters.
        """
        p = nu.poset
        if p.is_antichain:
            points = [i for i, _ in nu.atoms]
        else:
            points = range(len(p))
        table = [zero(target)] * len(p)
        for i in points:
            table[i] = body(i)
        try:
            f = kleisli_map(p, target, table, check=not p.is_antichain)
        except ContinuityViolation as exc:
            raise ContinuityViolation(f"{what} is not monotone in its argument: {exc}") from None
        return kleisli_ext(f, nu)

    def _eval(self, e, env, target):
        prog = self.prog
        if isinstance(e, Const):
            return dirac(prog.posets[e.poset], e.element)
        if isinstance(e, Var):
            p, i = env[e.name]
            return dirac(p, p.elements[i])
        if isinstance(e, Fail):
            return zero(prog.posets[e.poset])
        if isinstance(e, Choice):
            a = self.eval(e.left, env, target)
            b = self.eval(e.right, env, target)
            return mix(target, [(e.p, a), (1 - e.p, b)])
        if isinstance(e, SampleStep):
            return pushforward(prog.cdfs[e.cdf], prog.stepmaps[e.stepmap])
        if isinstance(e, Let):
            bp = self.types[id(e.bound)]
            nu = self.eval(e.bound, env, bp)
            return self.bind(
                nu,
                lambda i: self.eval(e.body, {**env, e.name: (bp, i)}, target),
                target,
                f"{_where(e)}the body of let {e.name}",
            )
        if isinstance(e, Case):
            sp = self.types[id(e.scrutinee)]
            nu = self.eval(e.scrutinee, env, sp)
            arms = dict(e.arms)
            return self.bind(
                nu,
                lambda i: self.eval(arms[sp.elements[i]], env, target),
                target,
                f"{_where(e)}the case arm assignment",
            )
        if isinstance(e, Call):
            fn = prog.defs[e.fn]
            params = [(x, prog.posets[ty]) for x, ty in fn.params]

            def go(k, inner):
                if k == len(params):
                    return self.eval(fn.body, inner, target)
                x, p = params[k]
                nu = self.eval(e.args[k], env, p)
                return self.bind(nu, lambda i: go(k + 1, {**inner, x: (p, i)}), target, f"{_where(e)}{e.fn}")

            return go(0, {})
        raise TypeError(e)


class _Typer(_Resolver):
    """Resolver that records the poset of every subexpression it visits."""

    def __init__(self, program: Program):
        super().__init__(program.posets, program.defs, program.cdfs, program.stepmaps)
        self.returns = dict(program.returns)
        self.types: dict[int, FinitePoset] = {}

    def check(self, e, scope):
        name = super().check(e, scope)
        self.types[id(e)] = self.posets[name]
        return name


def evaluate(program: Program) -> SimpleValuation:
    """Denotation of ``program.main``."""
    typer = _Typer(program)
    typer.check(program.main, {})
    for fn in program.defs.values():
        typer.check(fn.body, dict(fn.params))
    ev = _Evaluator(program)
    ev.types = typer.types
    return ev.eval(program.main, {}, program.result_poset)


def check_equiv(p1: Program, p2: Program) -> bool:
    if p1.result_poset != p2.result_poset:
        raise PosetMismatch(f"programs produce valuations on {p1.result} and {p2.result}")
    return evaluate(p1) == evaluate(p2)
