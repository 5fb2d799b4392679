import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

import gen
import oracles
from conftest import theory_file
from grail.errors import ParseError, SortError, UnsupportedFragment
from grail.syntax import (App, Var, check_formula, formula_depth, grade_formula, grade_term,
                          infer_ctx, parse_formula_text, parse_term_text, parse_theory, substitute,
                          term_vars, theory_sexpr, to_sexpr)

FO = """
(theory FO
  (semiring nonneg-real)
  (fragment first-order)
  (sort S)
  (fn f ((2 S)) S)
  (fn c () S)
  (pred p ((3 S)))
  (pred r ((1 S) (1 S))))
"""


@pytest.fixture(scope="module")
def fo():
    return parse_theory(FO).sig


def g(sig, text):
    return sig.ring.grade(Fraction(text))


def test_term_grade_examples(fo):
    assert grade_term(fo, Var("x"), "x") == fo.ring.one
    assert grade_term(fo, Var("y"), "x") == fo.ring.zero
    assert grade_term(fo, App("c", ()), "x") == fo.ring.zero
    assert grade_term(fo, parse_term_text(fo, "(f (f x))"), "x") == g(fo, 4)


def test_formula_grade_examples(fo):
    def gr(text):
        return grade_formula(fo, parse_formula_text(fo, text), "x")
    assert gr("(tensor (p x) (p y))") == g(fo, 3)
    assert gr("(tensor (p x) (p x))") == g(fo, 6)
    assert gr("(forall (x S) (p x))") == fo.ring.zero
    assert gr("(exists (y S) (r x y))") == g(fo, 1)
    assert gr("(bang 1/2 (p (f x)))") == g(fo, 3)
    assert gr("(with (p x) (r x x))") == g(fo, 3)
    assert gr("(lolli (eq S x y) (r x c))") == g(fo, 2)
    assert gr("(plus top zero)") == fo.ring.zero


def test_grade_example_from_qs0(qs0):
    phi = parse_formula_text(qs0.sig, "(tensor (eq M x y) (eq M x y))")
    assert grade_formula(qs0.sig, phi, "x") == qs0.sig.ring.grade(2)


def test_additive_grades_need_joins():
    with pytest.raises(ParseError):
        parse_theory("(theory N (semiring nat) (fragment additive) (sort S))")


def test_fragment_is_enforced(qs0):
    phi = parse_formula_text(qs0.sig, "(lolli one one)")
    with pytest.raises(UnsupportedFragment):
        check_formula(qs0.sig, (), phi)


def test_sort_errors(qs0):
    with pytest.raises(SortError):
        check_formula(qs0.sig, (("x", "M"),), parse_formula_text(qs0.sig, "(eq M x (plus x))"))
    phi = parse_formula_text(qs0.sig, "(eq Q x x)")
    with pytest.raises(SortError):
        check_formula(qs0.sig, infer_ctx(qs0.sig, phi), phi)


@pytest.mark.parametrize("name", ["qs0.glt", "iba_p1.glt", "ba.glt", "rmvs.glt", "rgc.glt", "unary.glt"])
def test_theories_roundtrip(theories, name):
    th = theories[name]
    again = parse_theory(theory_sexpr(th))
    assert again.sig.functions == th.sig.functions
    assert again.sig.predicates == th.sig.predicates
    assert again.axioms == th.axioms


@pytest.mark.parametrize("name", ["qs0.glt", "iba_p1.glt", "rgc.glt", "unary.glt"])
def test_grades_match_oracle_on_random_syntax(theories, name):
    th = theories[name]
    text = theory_file(name).read_text()
    ar = oracles.arities(text)
    ctx = (("x", th.sig.sorts[0]), ("y", th.sig.sorts[0]))
    grades = [th.sig.ring.one] + th.sig.grades()
    for phi in gen.sample(th.sig, ctx, 4, 300, seed=1, grades=grades):
        node = oracles.read(to_sexpr(phi))
        for x in ("x", "y"):
            assert grade_formula(th.sig, phi, x).value == oracles.grade_formula(node, x, ar)


def test_printing_roundtrip(fo):
    rng = random.Random(0)
    ctx = (("x", "S"), ("y", "S"))
    grades = [fo.ring.grade(v) for v in (0, Fraction(1, 2), 1, 3)]
    for _ in range(300):
        phi = gen.formula(fo, ctx, rng.randint(1, 4), rng, grades)
        assert parse_formula_text(fo, to_sexpr(phi)) == phi
        check_formula(fo, infer_ctx(fo, phi, ctx), phi)


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_substitution_grade_composes(seed):
    # gr(phi[t/x], y) = gr(phi, y) + gr(phi, x) * gr(t, y) when x is not y
    sig = parse_theory(FO).sig
    rng = random.Random(seed)
    ctx = (("x", "S"), ("y", "S"), ("z", "S"))
    grades = [sig.ring.grade(v) for v in (0, Fraction(1, 2), 2)]
    phi = gen.formula(sig, ctx, rng.randint(1, 4), rng, grades)
    t = gen.term(sig, (("y", "S"), ("z", "S")), "S", rng.randint(1, 3), rng)
    lhs = grade_formula(sig, substitute(phi, t, "x"), "y")
    rhs = grade_formula(sig, phi, "y") + grade_formula(sig, phi, "x") * grade_term(sig, t, "y")
    assert lhs == rhs


def test_substitution_avoids_capture(fo):
    phi = parse_formula_text(fo, "(forall (y S) (r x y))")
    out = substitute(phi, Var("y"), "x")
    assert out.var != "y"
    assert term_vars(out.body.args[0]) == {"y"}


def test_depth_convention(fo):
    assert formula_depth(parse_formula_text(fo, "one")) == 1
    assert formula_depth(parse_formula_text(fo, "(eq S x c)")) == 2
    assert formula_depth(parse_formula_text(fo, "(bang 1 (p (f x)))")) == 4


def test_parse_errors(fo):
    for bad in ("(eq S x)", "(bang x one)", "(tensor one)", "(nosuch x)", "(forall x one)"):
        with pytest.raises((ParseError, SortError)):
            phi = parse_formula_text(fo, bad)
            check_formula(fo, infer_ctx(fo, phi), phi)
