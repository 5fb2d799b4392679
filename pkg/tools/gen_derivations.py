"""Regenerate the bundled derivation files.

Run from the repository root: python3 tools/gen_derivations.py
"""
from fractions import Fraction
from pathlib import Path

from grail.calculus import check_derivation, derivation_file, derive_congruence, leaf, node
from grail.syntax import App, Atom, Bang, Eq, Tensor, Var, load_theory, substitute

DATA = Path(__file__).resolve().parent.parent / "src" / "grail" / "data"
OUT = DATA / "derivations"


def theory(name):
    return load_theory(DATA / "theories" / name)


def write(fname, d, name, th, header):
    OUT.joinpath(fname).write_text(derivation_file(d, name, th.name, header))


def congruences():
    qs0, un = theory("qs0.glt"), theory("unary.glt")
    for th, sym, fname, what in [(qs0, "plus", "congruence_plus.gld", "binary function plus"),
                                 (un, "f", "congruence_f_unary.gld", "unary function f of grade 2"),
                                 (un, "p", "congruence_p_binary.gld", "binary predicate p"),
                                 (un, "q", "congruence_q_unary.gld", "unary predicate q of grade 3")]:
        d = derive_congruence(th.sig, sym)
        assert not check_derivation(th.sig, th.axioms, d)
        write(fname, d, f"congruence-{sym}", th,
              f"Congruence of the {what}: one graded substitution per argument.\nexpect: ok")


def replicable_attempt():
    """Duplicating an equation with an ungraded substitution step; the checker must refuse it."""
    th = theory("qs0.glt")
    ctx = (("a", "M"), ("b", "M"))
    t, u = Var("a"), Var("b")
    refl = leaf("r", ctx, (), Eq("M", t, t))
    both = node("tensor-r", [refl, refl], (), Tensor(Eq("M", t, t), Eq("M", t, t)))
    hyp = Eq("M", t, u)
    assume = leaf("ax", ctx, (hyp,), hyp)
    phi = Tensor(Eq("M", t, Var("x")), Eq("M", t, Var("x")))
    root = node("subst", [both, assume], (hyp,), substitute(phi, u, "x"),
                formula=phi, var=("x", "M"), **{"from": t, "to": u})
    bad = check_derivation(th.sig, th.axioms, root)
    assert [(v.path, v.kind) for v in bad] == [("root", "rule-mismatch")], bad
    write("replicable_attempt.gld", root, "replicable-attempt", th,
          "Tries to prove a = b |- (a = b) (x) (a = b) by substitution without a graded premise.\n"
          "Substitution into a formula using x twice needs (bang 2 (eq M a b)); the plain\n"
          "equation is refused at the root.\n"
          "expect: rejected rule-mismatch root")


def ba_li(e=Fraction(1, 2), eps=Fraction(3, 4)):
    th = theory("ba.glt")
    ring = th.sig.ring
    ctx = (("x", "D"), ("y", "D"), ("z", "D"))
    one = Atom("one-pred", ())
    mix = f"mix{e}"
    x, y, z = Var("x"), Var("y"), Var("z")
    bound = leaf("axiom", ctx, (one,), Eq("D", x, y), axiom="ONE", inst={})
    der = node("der", [bound], (Bang(ring.one, one),), Eq("D", x, y))
    ge, geps = ring.grade(e), ring.grade(eps)
    pro = node("pro", [der], (Bang(ge, one),), Bang(ge, Eq("D", x, y)))
    start = leaf("r", ctx, (), Eq("D", App(mix, (x, z)), App(mix, (x, z))))
    phi = Eq("D", App(mix, (x, z)), App(mix, (Var("w"), z)))
    sub = node("subst", [start, pro], (Bang(ge, one),), substitute(phi, y, "w"),
               formula=phi, var=("w", "D"), **{"from": x, "to": y})
    weaker = node("decr", [leaf("ax", ctx, (Bang(geps, one),), Bang(geps, one))],
                  (Bang(geps, one),), Bang(ge, one))
    root = node("cut", [weaker, sub], (Bang(geps, one),), sub.conclusion.concl)
    assert not check_derivation(th.sig, th.axioms, root), check_derivation(th.sig, th.axioms, root)
    write("ba_li.gld", root, "ba-left-invariance", th,
          f"From the bound one-pred |- x = y: (bang {eps} one-pred) |- mix{e}(x, z) = mix{e}(y, z),\n"
          f"the left-invariance law for a weight {e} below {eps}.\nexpect: ok")


if __name__ == "__main__":
    OUT.mkdir(parents=True, exist_ok=True)
    congruences()
    replicable_attempt()
    ba_li()
