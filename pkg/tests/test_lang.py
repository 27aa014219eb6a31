from fractions import Fraction as Q

import pytest

from valuations import ContinuityViolation, PosetMismatch, ProgramRecursionError, ProgramSyntaxError, ResolutionError
from valuations.interval import StepMap, lebesgue
from valuations.lang import (
    Case,
    Choice,
    Const,
    Let,
    Var,
    check_equiv,
    evaluate,
    free_vars,
    parse,
    substitute,
    tokenize,
    unparse,
)

DECLS = """
poset C2 = {a, b; a < b};
poset A2 = {a, b};
poset T = {c, d};
"""


def run(main: str, decls: str = DECLS, **kw):
    return evaluate(parse(decls + main, **kw))


def test_let_parses_to_ast():
    prog = parse(DECLS + "main = let x = const C2.a in var x;")
    assert prog.main == Let("x", Const("C2", "a"), Var("x"))
    assert prog.result == "C2"


def test_parse_choice_and_case():
    prog = parse(DECLS + "main = case choice 1/3 (const A2.a) (const A2.b) { a -> const T.c ; b -> fail T };")
    assert isinstance(prog.main, Case)
    assert isinstance(prog.main.scrutinee, Choice) and prog.main.scrutinee.p == Q(1, 3)


def test_unparse_round_trip():
    src = "let x = choice 1/3 (const A2.a) (const A2.b) in case var x { a -> const T.c ; b -> fail T }"
    prog = parse(DECLS + f"main = {src};")
    assert parse(DECLS + f"main = {unparse(prog.main)};").main == prog.main


def test_free_vars_and_substitution():
    e = Let("x", Var("y"), Choice(Q(1, 2), Var("x"), Var("z")))
    assert free_vars(e) == {"y", "z"}
    assert free_vars(substitute(e, "y", Const("C2", "a"))) == {"z"}
    # the bound x shadows the substitution
    assert substitute(e, "x", Const("C2", "a")) == e


def test_tokenize_positions():
    toks = tokenize("main =\n  const C2.a;")
    const = next(t for t in toks if t.text == "const")
    assert (const.line, const.col) == (2, 3)


def test_syntax_errors():
    with pytest.raises(ProgramSyntaxError) as info:
        parse(DECLS + "main = choice 0.5 (const C2.a) (const C2.b);")
    assert info.value.line == 5
    with pytest.raises(ProgramSyntaxError):
        parse(DECLS + "main = let x = const C2.a var x;")
    with pytest.raises(ProgramSyntaxError):
        parse(DECLS)
    # the trailing semicolon after main is optional
    assert parse(DECLS + "main = const C2.a").result == "C2"
    with pytest.raises(ProgramSyntaxError):
        parse(DECLS + "main = const C2.a; main = const C2.b;")
    with pytest.raises(ProgramSyntaxError):
        parse(DECLS + "main = const C2.a; $")


def test_resolution_errors():
    with pytest.raises(ResolutionError):
        parse(DECLS + "main = var x;")
    with pytest.raises(ResolutionError):
        parse(DECLS + "main = const C2.z;")
    with pytest.raises(ResolutionError):
        parse(DECLS + "main = choice 1/2 (const C2.a) (const T.c);")
    with pytest.raises(ResolutionError):
        parse(DECLS + "main = case const A2.a { a -> const T.c };")
    with pytest.raises(ResolutionError):
        parse(DECLS + "main = sample lebesgue nowhere;")
    with pytest.raises(ResolutionError):
        parse(DECLS + "def f(u: A2) = var u;\nmain = f(const C2.a);")


def test_recursion_rejected():
    src = DECLS + "def f(u: A2) = g(var u);\ndef g(u: A2) = f(var u);\nmain = f(const A2.a);"
    with pytest.raises(ProgramRecursionError):
        parse(src)
    with pytest.raises(ProgramRecursionError):
        parse(DECLS + "def f(u: A2) = f(var u);\nmain = const A2.a;")


def test_eval_choice():
    nu = run("main = choice 1/2 (const C2.a) (const C2.b);")
    assert nu.weights == {"a": Q(1, 2), "b": Q(1, 2)}


def test_eval_fail_is_strict():
    assert run("main = let x = fail C2 in var x;").atoms == ()
    assert run("main = let x = fail C2 in const T.c;").atoms == ()


def test_eval_case_over_antichain():
    nu = run("main = let x = choice 1/3 (const A2.a) (const A2.b) in case var x { a -> const T.c ; b -> fail T };")
    assert nu.weights == {"c": Q(1, 3)}


def test_case_over_chain_must_be_monotone():
    with pytest.raises(ContinuityViolation):
        run("main = let x = choice 1/3 (const C2.a) (const C2.b) in case var x { a -> const T.c ; b -> fail T };")
    # a <= b, and a -> fail, b -> anything is monotone
    nu = run("main = let x = choice 1/3 (const C2.a) (const C2.b) in case var x { a -> fail T ; b -> const T.d };")
    assert nu.weights == {"d": Q(2, 3)}


def test_eval_functions_and_sampling(a2):
    steps = {"ab": StepMap.from_ids(a2, 1, ["a", "b"])}
    nu = run(
        "def flip(u: A2) = case var u { a -> const A2.b ; b -> const A2.a };\nmain = flip(sample leb ab);",
        decls="",
        posets={"A2": a2},
        cdfs={"leb": lebesgue()},
        stepmaps=steps,
    )
    assert nu.weights == {"a": Q(1, 2), "b": Q(1, 2)}


def test_equiv():
    swap1 = parse(DECLS + "main = let x = choice 1/3 (const A2.a) (const A2.b) in "
                  "let y = choice 1/4 (const C2.a) (const C2.b) in case var x { a -> var y ; b -> const C2.a };")
    swap2 = parse(DECLS + "main = let y = choice 1/4 (const C2.a) (const C2.b) in "
                  "let x = choice 1/3 (const A2.a) (const A2.b) in case var x { a -> var y ; b -> const C2.a };")
    assert check_equiv(swap1, swap2)
    assert check_equiv(swap1, swap1)
    half = parse(DECLS + "main = choice 1/2 (const A2.a) (const A2.b);")
    third = parse(DECLS + "main = choice 1/3 (const A2.a) (const A2.b);")
    assert not check_equiv(half, third)
    with pytest.raises(PosetMismatch):
        check_equiv(half, parse(DECLS + "main = const T.c;"))
