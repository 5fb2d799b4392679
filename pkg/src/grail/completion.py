"""Distances, grade-tracked arrows and descent data over a finite doctrine.

A ``DistanceSpace`` pairs a carrier A with an element rho over A x A.  The
completion has these spaces as objects and, over each, the elements alpha
that admit a descent certificate: a grade r with
pi1* alpha * !_r rho <= pi2* alpha.
"""
from __future__ import annotations

import functools
import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import kernels
from .doctrine import (TERMINAL, FinMap, FinSet, LawReport, QuantaleDoctrine, all_maps,
                       graded_laws, GRADED)
from .errors import UnsupportedJoin
from .metrics import pseudometrics
from .semiring import INF, Grade

DISCRETE_CAP = 16


@dataclass
class DistanceSpace:
    A: FinSet
    rho: np.ndarray
    name: str = ""

    def __hash__(self):
        return id(self)


@dataclass
class Witness:
    r: Grade | None
    attained: bool = True
    method: str = "analytic"

    @property
    def found(self) -> bool:
        return self.r is not None

    def to_json(self):
        return {"r": None if self.r is None else str(self.r), "attained": self.attained,
                "method": self.method}


# maps out of A x A and A x A x A

def _pr(A, k, picks):
    return _pr_cached(A, k, tuple(picks))


@functools.lru_cache(maxsize=None)
def _pr_cached(A, k, picks):
    return FinMap.blocks([A] * k, picks)


def diagonal(A):
    return _pr(A, 1, [0, 0])


def distance_violations(doc, A: FinSet, rho) -> list:
    out = []
    if not bool(np.all(doc.leq(doc.unit(A), doc.reindex(diagonal(A), rho)))):
        out.append("reflexivity")
    if not bool(np.all(doc.leq(rho, doc.reindex(_pr(A, 2, [1, 0]), rho)))):
        out.append("symmetry")
    lhs = doc.tensor(doc.reindex(_pr(A, 3, [0, 1]), rho), doc.reindex(_pr(A, 3, [1, 2]), rho))
    if not bool(np.all(doc.leq(lhs, doc.reindex(_pr(A, 3, [0, 2]), rho)))):
        out.append("transitivity")
    return out


def is_distance(doc, A, rho) -> bool:
    return not distance_violations(doc, A, rho)


def is_affine(doc, A, rho) -> bool:
    return bool(np.all(doc.leq(rho, doc.unit(A * A))))


def distance_product(doc, A: FinSet, rho, B: FinSet, sigma):
    """<pi1,pi3>* rho * <pi2,pi4>* sigma over (A x B) x (A x B)."""
    left = doc.reindex(FinMap.blocks([A, B, A, B], [0, 2]), rho)
    right = doc.reindex(FinMap.blocks([A, B, A, B], [1, 3]), sigma)
    return doc.tensor(left, right)


def product_space(doc, S: DistanceSpace, T: DistanceSpace) -> DistanceSpace:
    return DistanceSpace(S.A * T.A, distance_product(doc, S.A, S.rho, T.A, T.rho),
                         f"{S.name}x{T.name}")


def terminal_space(doc) -> DistanceSpace:
    return DistanceSpace(TERMINAL, doc.unit(TERMINAL * TERMINAL), "1")


def kronecker(doc, A: FinSet):
    """E_Delta(kappa): the left adjoint to reindexing along the diagonal, applied to kappa."""
    return doc.exists(diagonal(A), doc.unit(A))


def grid_spaces(doc, max_size=3, grid=None) -> list:
    """Every affine distance on carriers of size <= max_size with values on the grid."""
    grid = doc.grid if grid is None else grid
    out = []
    for n in range(1, max_size + 1):
        A = FinSet.of_size(n)
        for i, D in enumerate(pseudometrics(n, grid)):
            out.append(DistanceSpace(A, D.reshape(-1), f"m{n}.{i}"))
    return out


def element_spaces(doc, max_size=2, grid=None) -> list:
    """Affine distances found by filtering every fiber element over A x A (small carriers)."""
    out = []
    for n in range(1, max_size + 1):
        A = FinSet.of_size(n)
        for i, rho in enumerate(doc.elements(A * A, grid)):
            if is_distance(doc, A, rho) and is_affine(doc, A, rho):
                out.append(DistanceSpace(A, rho, f"d{n}.{len(out)}"))
    return out


# grade search

def _has(doc, r) -> bool:
    return doc.has_grade(r) if hasattr(doc, "has_grade") else True


def grade_candidates(doc, cap=DISCRETE_CAP) -> list:
    ring = doc.ring
    if hasattr(doc, "grades"):
        return list(doc.grades)
    if ring.kind == "trivial":
        return [ring.grade(INF)]
    if ring.kind == "nonneg-real":
        return [ring.grade(v) for v in range(cap + 1)]
    out = [ring.grade(v) for v in range(cap + 1)]
    if ring.kind == "nat-inf":
        out.append(ring.grade(INF))
    return out


def _to_grade(ring, x: float, eps: float) -> Grade:
    q = Fraction(x).limit_denominator(10 ** 6)
    if q < x - eps:
        q = Fraction(x)
    return ring.grade(q)


def least_grade(doc, holds, need=None, rho=None, cap=DISCRETE_CAP) -> Witness:
    """Least grade satisfying ``holds``.

    For the quantale over nonneg-real the constraint r * rho >= need is solved
    analytically, then re-verified with ``holds``.  Elsewhere the candidates
    are scanned in increasing order.
    """
    ring = doc.ring
    if isinstance(doc, QuantaleDoctrine) and ring.kind == "nonneg-real" and need is not None:
        lower, strict, feasible = kernels.min_scale(need, rho)
        if not feasible:
            return Witness(None, method="analytic")
        if strict:
            # any positive grade works and the infimum 0 is not attained
            r = ring.grade(Fraction(1, 10 ** 6))
            return Witness(r if holds(r) else None, attained=False, method="analytic")
        r = _to_grade(ring, lower, doc.eps)
        if holds(r):
            return Witness(r, method="analytic")
        bumped = ring.grade(r.value + Fraction(1, 10 ** 6))
        return Witness(bumped if holds(bumped) else None, method="analytic")
    for r in grade_candidates(doc, cap):
        if holds(r):
            return Witness(r, method="scan")
    return Witness(None, method="scan")


def _tracks_arrow(doc, f: FinMap, S, T, r) -> bool:
    return bool(np.all(doc.leq(doc.modality(r, S.rho), doc.reindex(f.times(f), T.rho))))


def tracks(doc, f: FinMap, S: DistanceSpace, T: DistanceSpace, r) -> bool:
    """r tracks f : S -> T."""
    return _tracks_arrow(doc, f, S, T, r)


def find_arrow_witness(doc, f: FinMap, S: DistanceSpace, T: DistanceSpace, cap=DISCRETE_CAP) -> Witness:
    need = doc.reindex(f.times(f), T.rho) if isinstance(doc, QuantaleDoctrine) else None
    return least_grade(doc, lambda r: _tracks_arrow(doc, f, S, T, r), need, S.rho, cap)


def certifies(doc, S: DistanceSpace, alpha, r) -> bool:
    """r is a descent certificate for alpha over S."""
    return bool(np.all(certifies_many(doc, S, alpha, r)))


def certifies_many(doc, S: DistanceSpace, alphas, r) -> np.ndarray:
    """Batched certifies: one verdict per leading entry of ``alphas``."""
    A = S.A
    lhs = doc.tensor(doc.reindex(_pr(A, 2, [0]), alphas), doc.modality(r, S.rho))
    return np.asarray(doc.leq(lhs, doc.reindex(_pr(A, 2, [1]), alphas)))


def slack_need(lhs, rhs) -> np.ndarray:
    """(rhs - lhs)+ pointwise, with inf on the left giving 0 and inf on the right giving inf."""
    lhs = np.asarray(lhs, dtype=float)
    rhs = np.asarray(rhs, dtype=float)
    with np.errstate(invalid="ignore"):
        need = np.maximum(rhs - lhs, 0.0)
    return np.where(np.isinf(lhs), 0.0, np.where(np.isinf(rhs), math.inf, need)).reshape(-1)


def descent_need(alpha) -> np.ndarray:
    a = np.asarray(alpha, dtype=float)
    return slack_need(a[:, None], a[None, :])


def in_descent(doc, S: DistanceSpace, alpha, cap=DISCRETE_CAP) -> Witness:
    need = descent_need(alpha) if isinstance(doc, QuantaleDoctrine) else None
    return least_grade(doc, lambda r: certifies(doc, S, alpha, r), need, S.rho, cap)


def descent_fiber(doc, S: DistanceSpace, grid=None, cap=DISCRETE_CAP):
    """Grid elements over S.A with a certificate: (elements array, witnesses)."""
    elems = doc.elements(S.A, grid)
    keep, wit = [], []
    for a in elems:
        w = in_descent(doc, S, a, cap)
        if w.found:
            keep.append(a)
            wit.append(w)
    shape = (0,) + elems.shape[1:]
    return (np.array(keep) if keep else np.zeros(shape, dtype=elems.dtype)), wit


# Lipschitz doctrine axioms for the completion

LIP_LAWS = ("distance", "affine", "substitution", "product-distance", "product-projection",
            "terminal-distance", "identity-tracked", "composition-tracked", "projections-tracked",
            "cone-tracked", "terminal-map-tracked", "des-unit", "des-tensor", "des-modality",
            "des-reindex", "delta-in-des")


def _note(rep: LawReport, ok: bool, context: dict):
    rep.cases += 1
    if not ok:
        rep.violation_count += 1
        if len(rep.violations) < 5:
            rep.violations.append(context)


def _note_many(rep: LawReport, ok, context: dict, a, b, doc):
    ok = np.asarray(ok).reshape(-1)
    rep.cases += int(ok.size)
    bad = np.nonzero(~ok)[0]
    rep.violation_count += int(bad.size)
    for k in bad[: max(0, 5 - len(rep.violations))]:
        rep.violations.append(dict(context, elements=[doc.describe(a[k]), doc.describe(b[k])]))


def verify_lip_axioms(doc, spaces, *, samples: int = 24, seed: int = 0, grid=None,
                      cap=DISCRETE_CAP, partners: int = 4) -> list:
    """Check the completion axioms on the given spaces; returns LawReports.

    Every grid element over each space is tested for a descent certificate;
    axioms that quantify over pairs of spaces, elements or maps use seeded
    samples of size ``samples`` (or ``partners`` partner spaces).
    """
    rng = np.random.default_rng(seed)
    reps = {n: LawReport(n) for n in LIP_LAWS}
    ring = doc.ring
    one, zero = ring.one, ring.zero
    term = terminal_space(doc)
    _note(reps["terminal-distance"], bool(np.all(doc.equal(term.rho, doc.unit(TERMINAL * TERMINAL)))),
          {"space": "1"})
    fibers = {}
    for S in spaces:
        ctx = {"space": S.name}
        _note(reps["distance"], is_distance(doc, S.A, S.rho), ctx)
        _note(reps["affine"], is_affine(doc, S.A, S.rho), ctx)
        elems, wits = descent_fiber(doc, S, grid, cap)
        fibers[id(S)] = (elems, wits)
        # identity tracked by 1
        idm = FinMap.identity(S.A)
        _note(reps["identity-tracked"], tracks(doc, idm, S, S, one), ctx)
        _note(reps["terminal-map-tracked"],
              tracks(doc, FinMap.constant(S.A, TERMINAL, 0), S, term, zero), ctx)
        _note(reps["des-unit"], certifies(doc, S, doc.unit(S.A), zero), ctx)
        # delta itself is descent data over the product space, certified by 1
        SS = product_space(doc, S, S)
        _note(reps["delta-in-des"], certifies(doc, SS, S.rho, one), ctx)
        # closure of descent data under tensor and the modality
        if len(elems):
            for _ in range(samples):
                i, j = rng.integers(0, len(elems), 2)
                a, b = elems[i], elems[j]
                r, s = wits[i].r, wits[j].r
                c = dict(ctx, r=str(r), s=str(s), elements=[doc.describe(a), doc.describe(b)])
                if _has(doc, r + s):
                    _note(reps["des-tensor"], certifies(doc, S, doc.tensor(a, b), r + s), c)
                for t in grade_candidates(doc, 2)[:4]:
                    if not (_has(doc, t) and _has(doc, t * r)):
                        continue
                    _note(reps["des-modality"], certifies(doc, S, doc.modality(t, a), t * r), dict(c, t=str(t)))
    # pairs of spaces
    for S in spaces:
        others = [term] + [spaces[k] for k in rng.choice(len(spaces), size=min(partners, len(spaces)),
                                                           replace=False)]
        for T in others:
            ctx = {"spaces": [S.name, T.name]}
            P = product_space(doc, S, T)
            # (b) the product distance is the pointwise tensor of the reindexed factors
            explicit = _explicit_product(doc, S, T)
            _note(reps["product-distance"], bool(np.all(doc.equal(P.rho, explicit))), ctx)
            # (c) projections
            pA = FinMap.blocks([S.A, T.A, S.A, T.A], [0, 2])
            pX = FinMap.blocks([S.A, T.A, S.A, T.A], [1, 3])
            ok = bool(np.all(doc.leq(P.rho, doc.reindex(pA, S.rho)))) and \
                bool(np.all(doc.leq(P.rho, doc.reindex(pX, T.rho))))
            _note(reps["product-projection"], ok, ctx)
            _note(reps["projections-tracked"],
                  tracks(doc, FinMap.blocks([S.A, T.A], [0]), P, S, one)
                  and tracks(doc, FinMap.blocks([S.A, T.A], [1]), P, T, one), ctx)
            # (a): alpha over X x A (X = T) with a certificate over the product
            _substitution(doc, T, S, P, reps["substitution"], rng, samples, grid, cap)
            # reindexing descent data along a tracked arrow (certificate s * r)
            elemsT, witsT = fibers.get(id(T), (None, None))
            maps = list(all_maps(S.A, T.A, limit=samples, rng=rng))
            for f in maps[:samples]:
                w = find_arrow_witness(doc, f, S, T, cap)
                if not w.found:
                    continue
                if elemsT is not None and len(elemsT):
                    k = int(rng.integers(0, len(elemsT)))
                    s = witsT[k].r
                    if _has(doc, s * w.r):
                        _note(reps["des-reindex"], certifies(doc, S, doc.reindex(f, elemsT[k]), s * w.r),
                              dict(ctx, map=f.table.tolist(), r=str(w.r), s=str(s)))
                # composition with a second tracked arrow g : T -> S
                for g in list(all_maps(T.A, S.A, limit=2, rng=rng)):
                    wg = find_arrow_witness(doc, g, T, S, cap)
                    if wg.found and _has(doc, (wg.r * w.r)):
                        _note(reps["composition-tracked"], tracks(doc, f.then(g), S, S, wg.r * w.r),
                              dict(ctx, f=f.table.tolist(), g=g.table.tolist()))
            # cones: f : C -> S, g : C -> T with witnesses r, s; <f, g> tracked by r + s
            C = spaces[int(rng.integers(0, len(spaces)))]
            for f, g in zip(all_maps(C.A, S.A, limit=samples, rng=rng), all_maps(C.A, T.A, limit=samples, rng=rng)):
                wf, wg = find_arrow_witness(doc, f, C, S, cap), find_arrow_witness(doc, g, C, T, cap)
                if wf.found and wg.found and _has(doc, (wf.r + wg.r)):
                    _note(reps["cone-tracked"], tracks(doc, f.pair(g), C, P, wf.r + wg.r),
                          dict(ctx, cone=C.name, f=f.table.tolist(), g=g.table.tolist()))
    return [reps[n] for n in LIP_LAWS]


def _explicit_product(doc, S, T):
    """The product distance written pointwise, independently of distance_product."""
    nA, nB = S.A.size, T.A.size
    if isinstance(doc, QuantaleDoctrine):
        rho = np.asarray(S.rho).reshape(nA, nA)
        sig = np.asarray(T.rho).reshape(nB, nB)
        out = rho[:, None, :, None] + sig[None, :, None, :]
        if doc.cap is not None:
            out = np.minimum(out, doc.cap)
        return out.reshape(-1)
    idx = np.indices((nA, nB, nA, nB)).reshape(4, -1)
    left = S.rho[idx[0] * nA + idx[2]]
    right = T.rho[idx[1] * nB + idx[3]]
    return doc.tensor(left, right)


def _substitution(doc, X: DistanceSpace, S: DistanceSpace, P: DistanceSpace, rep, rng, samples, grid, cap):
    """Axiom (a) over X x A: <pi1,pi2>* alpha * !_r <pi2,pi3>* rho <= <pi1,pi3>* alpha."""
    XA = X.A * S.A
    elems = doc.elements(XA, grid) if XA.size <= 3 else None
    picks = range(len(elems)) if elems is not None and len(elems) <= samples else None
    cands = []
    if elems is not None:
        idx = picks if picks is not None else rng.choice(len(elems), size=samples, replace=False)
        cands = [elems[i] for i in idx]
    else:
        shape = doc.elements(FinSet.of_size(1), grid)
        for _ in range(samples):
            cands.append(shape[rng.integers(0, len(shape), XA.size), 0])
    m12 = FinMap.blocks([X.A, S.A, S.A], [0, 1])
    m23 = FinMap.blocks([X.A, S.A, S.A], [1, 2])
    m13 = FinMap.blocks([X.A, S.A, S.A], [0, 2])
    rho23 = doc.reindex(m23, S.rho)
    for alpha in cands:
        if not in_descent(doc, P_space(doc, XA, X, S), alpha, cap).found:
            continue
        lhs_base = doc.reindex(m12, alpha)
        rhs = doc.reindex(m13, alpha)

        def holds(r):
            return bool(np.all(doc.leq(doc.tensor(lhs_base, doc.modality(r, rho23)), rhs)))

        if isinstance(doc, QuantaleDoctrine):
            w = least_grade(doc, holds, slack_need(lhs_base, rhs), rho23, cap)
        else:
            w = least_grade(doc, holds, cap=cap)
        _note(rep, w.found, {"spaces": [X.name, S.name], "alpha": doc.describe(alpha)})


def P_space(doc, XA, X, S):
    return DistanceSpace(XA, distance_product(doc, X.A, X.rho, S.A, S.rho), f"{X.name}x{S.name}")


# completed structure: graded laws on descent data and fragment certificates

def des_law_suite(doc, spaces, grades, grid=None, cap=DISCRETE_CAP, law_cap=10 ** 5, seed=0) -> list:
    """The graded-modality axioms restricted to certified elements of each fiber."""
    reps = {n: LawReport(n) for n in GRADED}
    rng = np.random.default_rng(seed)
    for S in spaces:
        elems, _ = descent_fiber(doc, S, grid, cap)
        if len(elems):
            graded_laws(doc, S.A, elems, grades, law_cap, rng, reps)
    return [reps[n] for n in GRADED]


FRAGMENT_CERTS = ("residual", "meet", "join", "top", "bottom", "bot", "exists", "forall")


def fragment_certificates(doc, spaces, *, samples=32, seed=0, grid=None, cap=DISCRETE_CAP,
                          partners: int | None = 2) -> list:
    """Certificates built as in the closure arguments, then re-checked.

    alpha -o beta gets r + s, meets and joins get r v s, the lattice bounds
    get 0, and quantifiers along a projection keep the certificate of the
    element over the product space.
    """
    rng = np.random.default_rng(seed)
    reps = {n: LawReport(n) for n in FRAGMENT_CERTS}
    ring = doc.ring
    zero = ring.zero
    for S in spaces:
        elems, wits = descent_fiber(doc, S, grid, cap)
        ctx = {"space": S.name}
        _note(reps["top"], certifies(doc, S, doc.top(S.A), zero), ctx)
        _note(reps["bottom"], certifies(doc, S, doc.bottom(S.A), zero), ctx)
        if getattr(doc, "cap", None) is not None:
            _note(reps["bot"], certifies(doc, S, doc.bot(S.A), zero), ctx)
        if not len(elems):
            continue
        n = len(elems)
        total = n * n
        if total > samples:
            flat = np.sort(rng.choice(total, size=samples, replace=False))
        else:
            flat = np.arange(total)
        I, J = flat // n, flat % n
        # group pairs by their witnesses so each group is one batched check
        keys = [str(w.r) for w in wits]
        groups = {}
        for i, j in zip(I.tolist(), J.tolist()):
            groups.setdefault((keys[i], keys[j]), []).append((i, j))
        for idx in groups.values():
            ii = np.array([p[0] for p in idx])
            jj = np.array([p[1] for p in idx])
            a, b, r, s = elems[ii], elems[jj], wits[ii[0]].r, wits[jj[0]].r
            c = dict(ctx, r=str(r), s=str(s))
            if _has(doc, r + s):
                _note_many(reps["residual"], certifies_many(doc, S, doc.residual(a, b), r + s), c, a, b, doc)
            try:
                rs = r.join(s)
            except UnsupportedJoin:
                reps["meet"].skipped += len(idx)
                reps["join"].skipped += len(idx)
                continue
            _note_many(reps["meet"], certifies_many(doc, S, doc.meet(a, b), rs), c, a, b, doc)
            _note_many(reps["join"], certifies_many(doc, S, doc.join(a, b), rs), c, a, b, doc)
    # quantifiers along pi : A x B -> A
    for S in spaces:
        if partners is None:
            others = spaces
        else:
            others = [spaces[k] for k in rng.choice(len(spaces), size=min(partners, len(spaces)), replace=False)]
        for T in others:
            P = product_space(doc, S, T)
            if P.A.size > 4:
                continue
            elems, wits = descent_fiber(doc, P, grid, cap)
            if not len(elems):
                continue
            pi = FinMap.blocks([S.A, T.A], [0])
            for k in rng.choice(len(elems), size=min(samples, len(elems)), replace=False):
                c = {"spaces": [S.name, T.name], "r": str(wits[k].r)}
                _note(reps["exists"], certifies(doc, S, doc.exists(pi, elems[k]), wits[k].r), c)
                _note(reps["forall"], certifies(doc, S, doc.forall(pi, elems[k]), wits[k].r), c)
    return [reps[n] for n in FRAGMENT_CERTS]


def classical_closure(doc, spaces, grid=None, cap=DISCRETE_CAP) -> LawReport:
    """In a classical instance, double negation is the identity on certified elements."""
    rep = LawReport("double-negation")
    for S in spaces:
        elems, _ = descent_fiber(doc, S, grid, cap)
        bot = doc.bot(S.A)
        for a in elems:
            back = doc.residual(doc.residual(a, bot), bot)
            _note(rep, bool(np.all(doc.equal(back, a))), {"space": S.name, "alpha": doc.describe(a)})
    return rep


# intuitionistic elements and the elementary restriction

def probe_grades(doc, cap=DISCRETE_CAP) -> list:
    ring = doc.ring
    if hasattr(doc, "grades"):
        return list(doc.grades)
    if ring.kind == "trivial":
        return [ring.grade(INF)]
    out = [ring.grade(v) for v in (0, 1, 2, cap)]
    if ring.kind == "nat-inf":
        out.append(ring.grade(INF))
    return out


def is_intuitionistic(doc, alpha, grades) -> bool:
    return all(bool(np.all(doc.leq(alpha, doc.modality(r, alpha)))) for r in grades
               if _has(doc, r))


def classify(doc, alpha, A: FinSet, cap=DISCRETE_CAP) -> dict:
    probes = probe_grades(doc, cap)
    out = {
        "affine": bool(np.all(doc.leq(alpha, doc.unit(A)))),
        "replicable": bool(np.all(doc.leq(alpha, doc.tensor(alpha, alpha)))),
        "intuitionistic": is_intuitionistic(doc, alpha, probes),
        "method": "probe-verified",
    }
    if isinstance(doc, QuantaleDoctrine) and doc.cap is None:
        a = np.asarray(alpha, dtype=float)
        exact = bool(np.all((a == 0) | np.isinf(a)))
        out["exact"] = exact
        out["method"] = "exact"
        out["agrees"] = exact == out["intuitionistic"]
    return out


def intuitionistic_analysis(doc, spaces, grid=None, cap=DISCRETE_CAP) -> dict:
    """Classify each space's distance and re-run the elementary axioms on the intuitionistic ones."""
    rows = []
    inside = []
    for S in spaces:
        c = classify(doc, S.rho, S.A * S.A, cap)
        rows.append(dict(c, space=S.name))
        if c["intuitionistic"]:
            inside.append(S)
    elementary = LawReport("elementary")
    closed = LawReport("product-closed")
    term = terminal_space(doc)
    for S in inside:
        # reflexivity
        _note(elementary, bool(np.all(doc.leq(doc.unit(S.A), doc.reindex(diagonal(S.A), S.rho)))),
              {"space": S.name, "axiom": "reflexive"})
        for X in [term] + inside[:3]:
            XA = X.A * S.A
            if XA.size > 3:
                continue
            m12 = FinMap.blocks([X.A, S.A, S.A], [0, 1])
            m23 = FinMap.blocks([X.A, S.A, S.A], [1, 2])
            m13 = FinMap.blocks([X.A, S.A, S.A], [0, 2])
            P = P_space(doc, XA, X, S)
            for alpha in doc.elements(XA, grid):
                if not in_descent(doc, P, alpha, cap).found:
                    continue
                lhs = doc.tensor(doc.reindex(m12, alpha), doc.reindex(m23, S.rho))
                _note(elementary, bool(np.all(doc.leq(lhs, doc.reindex(m13, alpha)))),
                      {"space": S.name, "over": X.name, "axiom": "substitutive"})
        for T in inside[:3]:
            prod = distance_product(doc, S.A, S.rho, T.A, T.rho)
            _note(closed, is_intuitionistic(doc, prod, probe_grades(doc, cap)),
                  {"spaces": [S.name, T.name]})
    return {"classification": rows, "intuitionistic_spaces": [S.name for S in inside],
            "elementary": elementary, "product_closed": closed}


def left_adjoint_check(doc, maps, cap=DISCRETE_CAP) -> LawReport:
    """E_f(kappa) is intuitionistic for every f with a left adjoint."""
    rep = LawReport("left-adjoint-intuitionistic")
    probes = probe_grades(doc, cap)
    for f in maps:
        e = doc.exists(f, doc.unit(f.dom))
        _note(rep, is_intuitionistic(doc, e, probes), {"map": f.table.tolist()})
    return rep


def tortellini_check(doc, sizes=(1, 2, 3), cap=DISCRETE_CAP) -> LawReport:
    """The Kronecker distance is an affine, replicable, intuitionistic distance."""
    rep = LawReport("kronecker")
    for n in sizes:
        A = FinSet.of_size(n)
        k = kronecker(doc, A)
        c = classify(doc, k, A * A, cap)
        ok = is_distance(doc, A, k) and c["affine"] and c["replicable"] and c["intuitionistic"]
        _note(rep, ok, dict(c, size=n))
    return rep


def kz_check(doc, spaces, grid=None, cap=DISCRETE_CAP, samples=8, seed=0) -> list:
    """Instance-level checks of the coalgebra structure of the completion.

    unit: forgetting the distance after E is the identity on objects, and the
    fiber of descent data over <S, delta_S> inside the completion equals the
    completion's own fiber.  counit: the identity is tracked from <A, delta_A>
    to <A, rho> for every certified distance rho.
    """
    rng = np.random.default_rng(seed)
    unit = LawReport("E-then-U")
    counit = LawReport("identity-to-any-distance")
    for S in spaces:
        elems, _ = descent_fiber(doc, S, grid, cap)
        E = DistanceSpace(S.A, S.rho, S.name)
        again, _ = descent_fiber(doc, E, grid, cap)
        same = E.A == S.A and np.array_equal(E.rho, S.rho) and elems.shape == again.shape and \
            bool(np.all(elems == again))
        _note(unit, same, {"space": S.name})
        others = [T for T in spaces if T.A == S.A]
        for k in rng.choice(len(others), size=min(samples, len(others)), replace=False):
            T = others[k]
            SS = product_space(doc, S, S)
            if not in_descent(doc, SS, T.rho, cap).found:
                continue
            w = find_arrow_witness(doc, FinMap.identity(S.A), S, T, cap)
            _note(counit, w.found, {"from": S.name, "to": T.name})
    return [unit, counit]


def completion_report(doc, spaces, *, grid=None, samples=24, seed=0, cap=DISCRETE_CAP) -> dict:
    lip = verify_lip_axioms(doc, spaces, samples=samples, seed=seed, grid=grid, cap=cap)
    frag = fragment_certificates(doc, spaces, samples=samples, seed=seed, grid=grid, cap=cap)
    intu = intuitionistic_analysis(doc, spaces[: min(len(spaces), 40)], grid, cap)
    fibers = []
    for S in spaces:
        elems, wits = descent_fiber(doc, S, grid, cap)
        fibers.append({"space": S.name, "size": S.A.size, "des": int(len(elems)),
                       "fiber": int(len(doc.elements(S.A, grid))),
                       "max_certificate": max((str(w.r) for w in wits), key=lambda t: _gkey(t), default=None)})
    laws = lip + frag + [intu["elementary"], intu["product_closed"], tortellini_check(doc, cap=cap)] + \
        kz_check(doc, spaces, grid, cap, seed=seed)
    return {
        "spaces": len(spaces),
        "fibers": fibers,
        "axioms": [r.to_json() for r in laws],
        "intuitionistic_spaces": intu["intuitionistic_spaces"],
        "ok": all(r.ok for r in laws),
    }


def _gkey(text):
    return math.inf if text == "inf" else float(Fraction(text))
