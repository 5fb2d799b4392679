import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import gen
from conftest import model_file, theory_file
from grail import sexpr
from grail.errors import ModelError, ParseError
from grail.semantics import (EPS, EPS_WASSERSTEIN, check_sequent_semantics, check_theory_model,
                             eval_formula, eval_term, lemma_sound_suite, load_model, parse_model,
                             soundness_property_harness, substitution_commutes,
                             validate_interpretation)
from grail.syntax import (One, load_theory, parse_formula_text, parse_sequent, parse_term_text,
                          parse_theory)


def seq(sig, text, ctx):
    return parse_sequent(sig, sexpr.read_one(text), ctx)


XY = (("x", "M"), ("y", "M"))


def test_unit_and_reflexivity(hausdorff_model, qs0):
    assert np.all(eval_formula(hausdorff_model, XY, One()).values == 0)
    refl = parse_formula_text(qs0.sig, "(eq M x x)")
    assert np.all(eval_formula(hausdorff_model, XY, refl).values == 0)


def test_bang_scales_distance(hausdorff_model, qs0):
    d = eval_formula(hausdorff_model, XY, parse_formula_text(qs0.sig, "(eq M x y)"))
    d2 = eval_formula(hausdorff_model, XY, parse_formula_text(qs0.sig, "(bang 2 (eq M x y))"))
    assert np.array_equal(d2.values, 2 * d.values)
    zero = eval_formula(hausdorff_model, XY, parse_formula_text(qs0.sig, "(bang 0 (eq M x y))"))
    assert np.all(zero.values == 0)  # 0 * inf = 0


def test_terms_evaluate_to_unions(hausdorff_model, qs0):
    ev = eval_term(hausdorff_model, XY, parse_term_text(qs0.sig, "(plus x (plus y zero))"))
    for k in range(len(ev.values)):
        i, j = ev.point(k)
        assert ev.values[k] == (hausdorff_model.space("M").points[i] | hausdorff_model.space("M").points[j])


def test_hausdorff_model_validates(hausdorff_model, qs0):
    report = check_theory_model(hausdorff_model, qs0)
    assert report.ok
    assert set(report.axioms) == {"S0", "S1", "S2", "S3"}
    for a in report.axioms.values():
        assert a.slack >= -1e-9


def test_half_grades_rejected_with_witness(qs0):
    m = load_model(model_file("qs0_hausdorff_half.glm"), qs0)
    checks = {c.symbol: c for c in validate_interpretation(qs0.sig, m)}
    assert not checks["plus"].ok and checks["plus"].witness is not None
    assert checks["zero"].ok and checks["zero"].note
    # the witness really violates the half-Lipschitz bound
    w = checks["plus"].witness
    assert float(w["slack"]) < 0


def test_grades_above_arity_rejected(qs0):
    text = model_file("qs0_hausdorff.glm").read_text().replace("(grades 1 1)", "(grades 2 1)")
    m = parse_model(text, qs0)
    checks = {c.symbol: c for c in validate_interpretation(qs0.sig, m)}
    assert not checks["plus"].ok and "not below" in checks["plus"].note


def test_false_sequent(hausdorff_model, qs0):
    res = check_sequent_semantics(hausdorff_model, seq(qs0.sig, "(seq () (eq M x y))", XY))
    assert not res.ok and res.slack < 0
    assert set(res.worst) == {"x", "y"}


def test_congruence_sequent_for_plus(hausdorff_model, qs0):
    ctx = tuple((v, "M") for v in ("x1", "x2", "y1", "y2"))
    s = seq(qs0.sig, "(seq ((bang 1 (eq M x1 y1)) (bang 1 (eq M x2 y2))) (eq M (plus x1 x2) (plus y1 y2)))", ctx)
    assert check_sequent_semantics(hausdorff_model, s).ok


def test_wasserstein_models_use_looser_eps(w1_model, tv_model):
    assert w1_model.eps == EPS_WASSERSTEIN
    assert tv_model.eps == EPS
    assert w1_model.space("D").size == 22


def test_eps_override(theories):
    text = model_file("unary_finite.glm").read_text().replace("(theory UNARY)", "(theory UNARY) (eps 1/1000)")
    m = parse_model(text, theories["unary.glt"])
    assert m.eps == pytest.approx(1e-3)


def test_unary_tables(theories):
    th = theories["unary.glt"]
    m = load_model(model_file("unary_finite.glm"), th)
    assert check_theory_model(m, th).ok


@pytest.mark.parametrize("e", ["0", "1/4", "1/2", "1"])
def test_iba_congruence(w1_model, theories, e):
    sig = theories["iba_p1.glt"].sig
    f = f"mix{e}"
    grades = {"0": ("0", "1"), "1/4": ("1/4", "3/4"), "1/2": ("1/2", "1/2"), "1": ("1", "0")}[e]
    ctx = tuple((v, "D") for v in ("x1", "x2", "y1", "y2"))
    s = seq(sig, f"(seq ((bang {grades[0]} (eq D x1 y1)) (bang {grades[1]} (eq D x2 y2))) "
                 f"(eq D ({f} x1 x2) ({f} y1 y2)))", ctx)
    assert check_sequent_semantics(w1_model, s).ok


@pytest.mark.parametrize("eps,ok", [("1/2", True), ("3/4", True), ("1", True), ("1/4", False)])
def test_ba_li_shape(tv_model, theories, eps, ok):
    sig = theories["ba.glt"].sig
    ctx = (("x", "D"), ("y", "D"), ("z", "D"))
    s = seq(sig, f"(seq ((bang {eps} (one-pred))) (eq D (mix1/2 x z) (mix1/2 y z)))", ctx)
    assert check_sequent_semantics(tv_model, s).ok is ok


def test_parse_model_errors(qs0):
    good = model_file("qs0_hausdorff.glm").read_text()
    for bad in (good.replace("(theory QS0)", "(theory OTHER)"),
                good.replace("union", "intersection"),
                good.replace("(interp-fn zero emptyset)", "")):
        with pytest.raises((ModelError, ParseError)):
            m = parse_model(bad, qs0)
            if all(c.ok for c in validate_interpretation(qs0.sig, m)):
                raise ModelError("accepted")


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_substitution_commutes(seed):
    th = load_theory(theory_file("qs0.glt"))
    m = load_model(model_file("qs0_hausdorff.glm"), th)
    rng = random.Random(seed)
    phi = gen.formula(th.sig, XY, rng.randint(1, 4), rng, [th.sig.ring.grade(v) for v in (0, 1, 2)])
    t = gen.term(th.sig, XY, "M", rng.randint(1, 3), rng)
    assert substitution_commutes(m, XY, phi, "x", t)


def test_lemma_suite_small_models(theories):
    th = theories["unary.glt"]
    m = load_model(model_file("unary_finite.glm"), th)
    rep = lemma_sound_suite(m, depth=3)
    assert rep.violation_count == 0 and rep.formulas > 0
    th = theories["rmvs.glt"]
    m = load_model(model_file("rmvs_vectors.glm"), th)
    rep = lemma_sound_suite(m, depth=2)
    assert rep.violation_count == 0


def test_lemma_suite_finds_broken_grades():
    # a signature that claims union is 1/2-Lipschitz in each argument
    th = parse_theory(theory_file("qs0.glt").read_text().replace("((1 M) (1 M))", "((1/2 M) (1/2 M))"))
    text = model_file("qs0_hausdorff.glm").read_text().replace("(grades 1 1)", "(grades 1/2 1/2)")
    rep = lemma_sound_suite(parse_model(text, th), depth=2)
    assert rep.violation_count > 0
    assert rep.violations[0]["kind"] == "term"


def test_harness_on_vectors(theories):
    th = theories["rmvs.glt"]
    m = load_model(model_file("rmvs_vectors.glm"), th)
    rep = soundness_property_harness(m, th, n=50, seed=2)
    assert rep.ok and rep.generated == 50
