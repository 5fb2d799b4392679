"""Regenerate the instance-heavy bundled theories (barycentric, vector space, combinators).

Run from the repository root: python3 tools/gen_theories.py
"""
from fractions import Fraction as F
from pathlib import Path

OUT = Path(__file__).resolve().parent.parent / "src" / "grail" / "data" / "theories"
WEIGHTS = [F(0), F(1, 4), F(1, 3), F(1, 2), F(2, 3), F(3, 4), F(1)]


def mix(e):
    return f"mix{e}"


def barycentric(name, comment, extra_decls=(), extra_axioms=()):
    lines = [f"; {c}" for c in comment] + ["; expect: ok", f"(theory {name}", "  (semiring nonneg-real)",
                                            "  (fragment core)", "  (sort D)"]
    for e in WEIGHTS:
        lines.append(f"  (fn {mix(e)} (({e} D) ({1 - e} D)) D)")
    lines += [f"  {d}" for d in extra_decls]
    ax = []
    ax.append(("B1", "(x D) (y D)", f"(eq D ({mix(F(1))} x y) x)"))
    for e in WEIGHTS:
        ax.append((f"B2-{e}", "(x D)", f"(eq D ({mix(e)} x x) x)"))
    for e in WEIGHTS:
        ax.append((f"SC-{e}", "(x D) (y D)", f"(eq D ({mix(e)} x y) ({mix(1 - e)} y x))"))
    for e in WEIGHTS:
        for e2 in WEIGHTS:
            if e * e2 == 1:
                continue
            a, b = e * e2, (e2 - e * e2) / (1 - e * e2)
            if a in WEIGHTS and b in WEIGHTS:
                ax.append((f"SA-{e}-{e2}", "(x D) (y D) (z D)",
                           f"(eq D ({mix(e2)} ({mix(e)} x y) z) ({mix(a)} x ({mix(b)} y z)))"))
    for n, ctx, concl in ax:
        lines.append(f"  (axiom {n} (ctx {ctx})")
        lines.append(f"    (seq () {concl}))")
    for n, ctx, hyps, concl in extra_axioms:
        lines.append(f"  (axiom {n} (ctx {ctx})")
        lines.append(f"    (seq ({hyps}) {concl}))")
    lines[-1] += ")"
    return "\n".join(lines) + "\n"


SCALARS = [F(-1), F(0), F(1, 2), F(1), F(2)]


def vector_space():
    sc = lambda a: f"scale{a}"
    lines = ["; Real vector spaces with a norm-induced distance; scalars restricted to a finite set.",
             "; Scalar multiplication by a has grade |a|, so it need not be non-expansive.",
             "; expect: ok", "(theory RMVS", "  (semiring nonneg-real)", "  (fragment core)", "  (sort V)",
             "  (fn add ((1 V) (1 V)) V)", "  (fn neg ((1 V)) V)", "  (fn vzero () V)"]
    for a in SCALARS:
        lines.append(f"  (fn {sc(a)} (({abs(a)} V)) V)")
    ax = [("G1", "(x V) (y V) (z V)", "(eq V (add (add x y) z) (add x (add y z)))"),
          ("G2", "(x V) (y V)", "(eq V (add x y) (add y x))"),
          ("G3", "(x V)", "(eq V (add x vzero) x)"),
          ("G4", "(x V)", "(eq V (add x (neg x)) vzero)")]
    for a in SCALARS:
        ax.append((f"L1-{a}", "(x V) (y V)", f"(eq V ({sc(a)} (add x y)) (add ({sc(a)} x) ({sc(a)} y)))"))
    for a in SCALARS:
        for b in SCALARS:
            if a + b in SCALARS and a <= b:
                ax.append((f"L2-{a}-{b}", "(x V)", f"(eq V ({sc(a + b)} x) (add ({sc(a)} x) ({sc(b)} x)))"))
    for a in SCALARS:
        for b in SCALARS:
            if a * b in SCALARS:
                ax.append((f"L3-{a}-{b}", "(x V)", f"(eq V ({sc(a * b)} x) ({sc(a)} ({sc(b)} x)))"))
    ax.append(("L4", "(x V)", f"(eq V ({sc(F(1))} x) x)"))
    for n, ctx, concl in ax:
        lines.append(f"  (axiom {n} (ctx {ctx})")
        lines.append(f"    (seq () {concl}))")
    lines[-1] += ")"
    return "\n".join(lines) + "\n"


GRADES = [0, 1, 2]


def combinators():
    lines = ["; Graded combinators over the natural numbers, grades limited to 0, 1 and 2.",
             "; (box r t) stands for r copies of t; app is application.",
             "; No finite model ships with this theory.",
             "; expect: ok", "(theory RGC", "  (semiring nat)", "  (fragment core)", "  (sort G)",
             "  (fn app ((1 G) (1 G)) G)"]
    for r in GRADES:
        lines.append(f"  (fn box{r} (({r} G)) G)")
    consts = ["B", "C", "I", "K", "D"]
    consts += [f"W{r}-{s}" for r in GRADES for s in GRADES if r + s in GRADES]
    consts += [f"d{r}-{s}" for r in GRADES for s in GRADES if r * s in GRADES]
    consts += [f"F{r}" for r in GRADES]
    consts += [f"O{r}-{r}" for r in GRADES]
    for c in consts:
        lines.append(f"  (fn {c} () G)")
    ap = lambda a, b: f"(app {a} {b})"
    ax = [("GC1", "(x G) (y G) (z G)", f"(eq G {ap(ap(ap('B', 'x'), 'y'), 'z')} {ap('x', ap('y', 'z'))})"),
          ("GC2", "(x G) (y G) (z G)", f"(eq G {ap(ap(ap('C', 'x'), 'y'), 'z')} {ap(ap('x', 'z'), 'y')})"),
          ("GC3", "(x G)", f"(eq G {ap('I', 'x')} x)"),
          ("GC4", "(x G) (y G)", f"(eq G {ap(ap('K', 'x'), '(box0 y)')} x)")]
    for r in GRADES:
        for s in GRADES:
            if r + s in GRADES:
                ax.append((f"GC5-{r}-{s}", "(x G) (y G)",
                           f"(eq G {ap(ap(f'W{r}-{s}', 'x'), f'(box{r + s} y)')} "
                           f"{ap(ap('x', f'(box{r} y)'), f'(box{s} y)')})"))
    ax.append(("GC6", "(x G)", f"(eq G {ap('D', '(box1 x)')} x)"))
    for r in GRADES:
        for s in GRADES:
            if r * s in GRADES:
                ax.append((f"GC7-{r}-{s}", "(x G)",
                           f"(eq G {ap(f'd{r}-{s}', f'(box{r * s} x)')} (box{r} (box{s} x)))"))
    for r in GRADES:
        ax.append((f"GC8-{r}", "(x G) (y G)",
                   f"(eq G {ap(ap(f'F{r}', f'(box{r} x)'), f'(box{r} y)')} (box{r} {ap('x', 'y')}))"))
    for r in GRADES:
        ax.append((f"GC9-{r}-{r}", "(x G)", f"(eq G {ap(f'O{r}-{r}', f'(box{r} x)')} (box{r} x))"))
    for n, ctx, concl in ax:
        lines.append(f"  (axiom {n} (ctx {ctx})")
        lines.append(f"    (seq () {concl}))")
    lines[-1] += ")"
    return "\n".join(lines) + "\n"


if __name__ == "__main__":
    (OUT / "iba_p1.glt").write_text(barycentric(
        "IBA1", ["Interpolative barycentric algebras at p = 1: mixE(x, y) takes x with probability E.",
                 "Weights range over 0, 1/4, 1/3, 1/2, 2/3, 3/4, 1; associativity instances are",
                 "those whose rebalanced weights stay in that set."]))
    (OUT / "ba.glt").write_text(barycentric(
        "BA", ["Barycentric algebras with distances bounded by the constant predicate one-pred.",
               "one-pred denotes the truth value 1, so the last axiom bounds every distance by 1."],
        extra_decls=["(pred one-pred ())"],
        extra_axioms=[("ONE", "(x D) (y D)", "one-pred", "(eq D x y)")]))
    (OUT / "rmvs.glt").write_text(vector_space())
    (OUT / "rgc.glt").write_text(combinators())
