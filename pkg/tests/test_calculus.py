import random

import pytest

from conftest import DATA
from grail.calculus import (RULES, check_derivation, derivation_file, derive_congruence, leaf,
                            node, parse_derivation, peek_theory_name, random_derivations,
                            search_bounded)
from grail.syntax import Bang, Eq, One, Sequent, Var, parse_formula_text, parse_sequent
from grail import sexpr


def load(theories, name):
    text = (DATA / "derivations" / name).read_text()
    files = {"QS0": "qs0.glt", "UNARY": "unary.glt", "BA": "ba.glt"}
    th = theories[files[peek_theory_name(text)]]
    return th, parse_derivation(th.sig, text)


@pytest.mark.parametrize("name", ["congruence_plus.gld", "congruence_f_unary.gld",
                                  "congruence_p_binary.gld", "congruence_q_unary.gld", "ba_li.gld"])
def test_bundled_derivations_accepted(theories, name):
    th, df = load(theories, name)
    assert check_derivation(th.sig, th.axioms, df.derivation) == []


def test_replicable_attempt_rejected_at_root(theories):
    th, df = load(theories, "replicable_attempt.gld")
    bad = check_derivation(th.sig, th.axioms, df.derivation)
    assert [(v.path, v.kind) for v in bad] == [("root", "rule-mismatch")]
    assert bad[0].expected == "(bang 2 (eq M a b))"


def eq(a, b, s="M"):
    return Eq(s, Var(a), Var(b))


def test_reflexivity_leaf(qs0):
    d = leaf("r", (("x", "M"),), (), eq("x", "x"))
    assert check_derivation(qs0.sig, {}, d) == []
    d = leaf("r", (("x", "M"), ("y", "M")), (), eq("x", "y"))
    assert check_derivation(qs0.sig, {}, d)


def test_contraction(qs0):
    R = qs0.sig.ring
    ctx = (("x", "M"), ("y", "M"))
    psi = eq("x", "y")
    b1, b2 = Bang(R.grade(1), psi), Bang(R.grade(2), psi)
    top = leaf("ax", ctx, (b1,), b1)
    w = node("w", [top], (b1, Bang(R.zero, psi)), b1)
    assert check_derivation(qs0.sig, {}, w) == []
    # Gamma, !1 psi, !2 psi |- phi  gives  Gamma, !3 psi |- phi
    prem = node("w", [top], (b1, b2), b1)
    assert check_derivation(qs0.sig, {}, prem)  # weakening needs grade 0
    ok = node("c", [leaf("ax", ctx, (b1, b2), b1)], (Bang(R.grade(3), psi),), b1)
    bad = node("c", [leaf("ax", ctx, (b1, b2), b1)], (Bang(R.grade(2), psi),), b1)
    assert [v.path for v in check_derivation(qs0.sig, {}, ok)] == ["root.0"]
    assert any(v.path == "root" for v in check_derivation(qs0.sig, {}, bad))


def test_subst_requires_exact_grade(theories):
    th = theories["unary.glt"]
    sig = th.sig
    R = sig.ring
    ctx = (("x", "S"), ("y", "S"))
    phi = parse_formula_text(sig, "(eq S (f x) (f z))")
    refl = leaf("r", ctx, (), parse_formula_text(sig, "(eq S (f x) (f x))"))
    params = {"formula": phi, "var": ("z", "S"), "from": Var("x"), "to": Var("y")}
    for grade, kinds in ((2, []), (1, ["grade-mismatch"])):
        h = Bang(R.grade(grade), Eq("S", Var("x"), Var("y")))
        d = node("subst", [refl, leaf("ax", ctx, (h,), h)], (h,),
                 parse_formula_text(sig, "(eq S (f x) (f y))"), **params)
        assert [v.kind for v in check_derivation(sig, {}, d)] == kinds


def test_decr_side_condition(qs0):
    R = qs0.sig.ring
    ctx = (("x", "M"), ("y", "M"))
    b2 = Bang(R.grade(2), eq("x", "y"))
    top = leaf("ax", ctx, (b2,), b2)
    down = node("decr", [top], (b2,), Bang(R.grade(1), eq("x", "y")))
    up = node("decr", [top], (b2,), Bang(R.grade(3), eq("x", "y")))
    assert check_derivation(qs0.sig, {}, down) == []
    assert [v.kind for v in check_derivation(qs0.sig, {}, up)] == ["side-condition"]


@pytest.mark.parametrize("theory,symbol", [("qs0.glt", "plus"), ("unary.glt", "f"), ("unary.glt", "p"),
                                           ("unary.glt", "q"), ("rmvs.glt", "add"), ("rgc.glt", "app"),
                                           ("iba_p1.glt", "mix1/3"), ("rmvs.glt", "scale1/2")])
def test_congruence_derivations(theories, theory, symbol):
    th = theories[theory]
    d = derive_congruence(th.sig, symbol)
    assert check_derivation(th.sig, th.axioms, d) == []
    sym = th.sig.functions.get(symbol) or th.sig.predicates[symbol]
    grades = sorted(str(h.grade) for h in d.conclusion.hyps if isinstance(h, Bang))
    assert grades == sorted(str(g) for g, _ in sym.slots)


def test_derivation_files_roundtrip(theories):
    th = theories["unary.glt"]
    d = derive_congruence(th.sig, "p")
    text = derivation_file(d, "p-congruence", "UNARY")
    again = parse_derivation(th.sig, text)
    assert again.name == "p-congruence" and again.theory_name == "UNARY"
    assert again.derivation.conclusion == d.conclusion
    assert check_derivation(th.sig, th.axioms, again.derivation) == []


def test_search_finds_axiom_instance(qs0):
    goal = parse_sequent(qs0.sig, sexpr.read_one("(seq (one) (eq M (plus x zero) x))"), (("x", "M"),))
    d = search_bounded(qs0, goal, 3)
    assert d is not None
    assert d.conclusion == goal
    assert check_derivation(qs0.sig, qs0.axioms, d) == []


def test_search_respects_cap(qs0):
    goal = Sequent((), (), One())
    with pytest.raises(ValueError):
        search_bounded(qs0, goal, 9, cap=8)


@pytest.mark.parametrize("theory", ["qs0.glt", "unary.glt", "rmvs.glt", "ba.glt"])
def test_random_derivations_check(theories, theory):
    th = theories[theory]
    s = th.sig.sorts[0]
    ds = random_derivations(th, (("x", s), ("y", s), ("z", s)), 60, seed=3)
    assert len(ds) == 60
    for d in ds:
        assert check_derivation(th.sig, th.axioms, d) == []


def test_random_derivations_are_seeded(qs0):
    ctx = (("x", "M"), ("y", "M"))
    a = [str(d.conclusion) for d in random_derivations(qs0, ctx, 10, seed=5)]
    b = [str(d.conclusion) for d in random_derivations(qs0, ctx, 10, seed=5)]
    assert a == b


def test_rule_table_covers_core_rules():
    for r in ("ax", "cut", "r", "s", "t", "subst", "pro", "decr", "der", "w", "c", "tensor-r", "axiom"):
        assert r in RULES
