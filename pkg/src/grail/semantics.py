"""Graded interpretations of signatures in the [0,inf] doctrine, evaluation and soundness checks.

A sort is interpreted by a ``Space``.  Terms evaluate to ambient values
(subset bitmasks, float rows for distributions and vectors, point indices for
finite spaces), so a composite term may leave the finite carrier while
quantifiers still range over carrier points only.  A formula evaluates to one
distance per context point, context points enumerated in row-major order over
the context variables left to right.
"""
from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import metrics, sexpr
from .calculus import check_derivation, random_derivations
from .doctrine import QuantaleDoctrine
from .errors import ModelError, UnsupportedFragment
from .sexpr import SList, Sym
from .syntax import (App, Atom, Bang, Bot, Eq, Exists, Forall, Lolli, One, Plus, Sequent, Signature,
                     Tensor, Theory, Top, Var, With, Zero, grade_formula, grade_term, substitute,
                     term_depth, to_sexpr)

EPS = 1e-9
EPS_WASSERSTEIN = 1e-7
KINDS = ("finite", "subsets", "distributions-w1", "distributions-tv", "vectors")


def _num(node) -> float:
    text = str(sexpr.expect_sym(node, "number"))
    if text in ("inf", "+inf"):
        return math.inf
    try:
        return float(Fraction(text))
    except (ValueError, ZeroDivisionError):
        sexpr.fail(node, f"malformed number {text!r}")


def _frac(node) -> Fraction:
    text = str(sexpr.expect_sym(node, "number"))
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        sexpr.fail(node, f"malformed number {text!r}")


# spaces

@dataclass
class Space:
    name: str
    kind: str
    points: np.ndarray
    labels: tuple
    base: metrics.FiniteMetricSpace | None = None
    norm: str = "l2"
    _table: np.ndarray | None = field(default=None, repr=False)
    _hausdorff: np.ndarray | None = field(default=None, repr=False)

    @property
    def size(self) -> int:
        return len(self.points)

    @property
    def indexed(self) -> bool:
        """Ambient values are integers (point indices or bitmasks)."""
        return self.kind in ("finite", "subsets")

    def _H(self):
        if self._hausdorff is None:
            self._hausdorff = metrics.hausdorff_table(self.base.dist)
        return self._hausdorff

    def dist(self, u, v) -> np.ndarray:
        """Row-wise distance between two arrays of ambient values."""
        if self.kind == "finite":
            return self.base.dist[u, v]
        if self.kind == "subsets":
            return self._H()[u, v]
        u = np.asarray(u, float)
        v = np.asarray(v, float)
        if self.kind == "distributions-w1":
            return metrics.w1_rows(u, v, self.base.dist)
        if self.kind == "distributions-tv":
            return 0.5 * np.abs(u - v).sum(axis=-1)
        return _norm(u - v, self.norm)

    def pair_table(self, vals) -> np.ndarray:
        """All-pairs distances between the entries of one ambient array."""
        if self.kind == "finite":
            return self.base.dist[np.ix_(vals, vals)]
        if self.kind == "subsets":
            return self._H()[np.ix_(vals, vals)]
        vals = np.asarray(vals, float)
        if self.kind == "distributions-w1":
            return metrics.w1_table(vals, self.base.dist)
        if self.kind == "distributions-tv":
            return metrics.tv_table(vals)
        return _norm(vals[:, None, :] - vals[None, :, :], self.norm)

    def table(self) -> np.ndarray:
        """Distances between carrier points."""
        if self._table is None:
            self._table = self.pair_table(self.points)
        return self._table

    def label(self, value) -> str:
        if self.kind == "finite":
            return self.labels[int(value)]
        if self.kind == "subsets":
            names = self.base.points
            return "{" + ",".join(names[i] for i in metrics.mask_members(int(value), len(names))) + "}"
        return "(" + " ".join(f"{float(x):g}" for x in np.ravel(value)) + ")"


def _norm(diff, norm):
    if norm == "l1":
        return np.abs(diff).sum(axis=-1)
    if norm == "linf":
        return np.abs(diff).max(axis=-1)
    return np.sqrt((diff ** 2).sum(axis=-1))


def finite_space(name, points, pairs, missing=math.inf) -> Space:
    base = metrics.FiniteMetricSpace.from_pairs(points, pairs, missing)
    return Space(name, "finite", np.arange(len(points)), tuple(points), base)


def subsets_space(name, base: metrics.FiniteMetricSpace) -> Space:
    n = base.size
    masks = np.arange(2 ** n, dtype=np.int64)
    sp = Space(name, "subsets", masks, (), base)
    sp.labels = tuple(sp.label(m) for m in masks)
    return sp


def distributions_space(name, base: metrics.FiniteMetricSpace, denominator: int, metric="w1") -> Space:
    """Distributions on the base whose probabilities have denominator at most ``denominator``."""
    seen = {}
    for d in range(1, denominator + 1):
        for mu in metrics.distributions(base.size, d):
            seen.setdefault(mu, None)
    rows = sorted(seen)
    pts = np.array([[float(x) for x in mu] for mu in rows])
    sp = Space(name, "distributions-" + metric, pts, (), base)
    sp.labels = tuple("(" + " ".join(str(x) for x in mu) + ")" for mu in rows)
    return sp


def vectors_space(name, dim: int, samples, norm="l2") -> Space:
    pts = np.array(samples, dtype=float).reshape(-1, dim)
    sp = Space(name, "vectors", pts, (), None, norm)
    sp.labels = tuple(sp.label(p) for p in pts)
    return sp


# interpretations of symbols

@dataclass
class Interp:
    """A symbol's meaning: ``fn(args, n)`` maps ambient arrays with n rows to the result."""
    name: str
    fn: object
    grades: tuple
    source: str


def _builtin_fn(name, args, arg_spaces, res_space, node):
    kinds = {s.kind for s in arg_spaces} | {res_space.kind}
    n = len(arg_spaces)

    def need(k, allowed):
        if n != k:
            sexpr.fail(node, f"builtin {name} takes {k} arguments, the symbol has {n}")
        if not kinds <= set(allowed):
            sexpr.fail(node, f"builtin {name} does not fit spaces of kind {sorted(kinds)}")

    if name == "union":
        need(2, ("subsets",))
        return lambda xs, N: xs[0] | xs[1]
    if name == "emptyset":
        need(0, ("subsets",))
        return lambda xs, N: np.zeros(N, dtype=np.int64)
    if name == "convex":
        need(2, ("distributions-w1", "distributions-tv"))
        if len(args) != 1:
            sexpr.fail(node, "convex takes one weight")
        e = _frac(args[0])
        if not 0 <= e <= 1:
            sexpr.fail(node, "convex weight must lie in [0,1]")
        w = float(e)
        return lambda xs, N: w * xs[0] + (1 - w) * xs[1]
    if name == "vec-add":
        need(2, ("vectors",))
        return lambda xs, N: xs[0] + xs[1]
    if name == "vec-neg":
        need(1, ("vectors",))
        return lambda xs, N: -xs[0]
    if name == "vec-zero":
        need(0, ("vectors",))
        dim = res_space.points.shape[1]
        return lambda xs, N: np.zeros((N, dim))
    if name == "scale":
        need(1, ("vectors",))
        if len(args) != 1:
            sexpr.fail(node, "scale takes one factor")
        a = float(_frac(args[0]))
        return lambda xs, N: a * xs[0]
    sexpr.fail(node, f"unknown builtin {name}")


def _table_fn(entries, arg_spaces, res_space, node):
    if not all(s.kind == "finite" for s in arg_spaces + [res_space]):
        sexpr.fail(node, "function tables need finite spaces")
    shape = tuple(s.size for s in arg_spaces)
    tab = np.full(shape, -1, dtype=np.int64)
    for e in entries:
        sexpr.expect_list(e, what="((ARGS) RESULT)")
        if len(e) != 2:
            sexpr.fail(e, "table entries are ((ARGS) RESULT)")
        key = tuple(_point_index(s, a) for s, a in zip(arg_spaces, sexpr.expect_list(e[0], what="arguments")))
        if len(key) != len(arg_spaces):
            sexpr.fail(e, "wrong number of arguments in table entry")
        tab[key] = _point_index(res_space, e[1])
    if (tab < 0).any():
        sexpr.fail(node, "function table is not total")
    return lambda xs, N: tab[tuple(xs)] if xs else np.full(N, tab[()], dtype=np.int64)


def _point_index(space, node):
    lab = str(sexpr.expect_sym(node, "point"))
    if lab not in space.labels:
        sexpr.fail(node, f"{lab} is not a point of {space.name}")
    return space.labels.index(lab)


def _builtin_pred(name, args, arg_spaces, node):
    if name == "const-one-pred":
        if arg_spaces:
            sexpr.fail(node, "const-one-pred interprets a nullary predicate")
        return lambda xs, N: np.ones(N)
    sexpr.fail(node, f"unknown predicate builtin {name}")


def _table_pred(entries, default, arg_spaces, node):
    if not all(s.kind == "finite" for s in arg_spaces):
        sexpr.fail(node, "predicate tables need finite spaces")
    tab = np.full(tuple(s.size for s in arg_spaces), np.nan)
    for e in entries:
        sexpr.expect_list(e, what="((ARGS) VALUE)")
        if len(e) != 2:
            sexpr.fail(e, "table entries are ((ARGS) VALUE)")
        key = tuple(_point_index(s, a) for s, a in zip(arg_spaces, sexpr.expect_list(e[0], what="arguments")))
        v = _num(e[1])
        if v < 0:
            sexpr.fail(e, "predicate values are distances in [0,inf]")
        tab[key] = v
    if default is not None:
        tab = np.where(np.isnan(tab), default, tab)
    if np.isnan(tab).any():
        sexpr.fail(node, "predicate table is not total; add (default V)")
    return lambda xs, N: tab[tuple(xs)] if xs else np.full(N, tab[()])


# models

@dataclass
class Model:
    name: str
    theory_name: str
    sig: Signature
    spaces: dict
    functions: dict
    predicates: dict
    eps: float = EPS
    doc: QuantaleDoctrine = None

    def __post_init__(self):
        if self.doc is None:
            self.doc = QuantaleDoctrine(self.sig.ring, eps=self.eps)

    def with_eps(self, eps: float) -> "Model":
        return Model(self.name, self.theory_name, self.sig, self.spaces, self.functions,
                     self.predicates, eps)

    def space(self, sort) -> Space:
        try:
            return self.spaces[sort]
        except KeyError:
            raise ModelError(f"model {self.name} does not interpret sort {sort}") from None


def _build_space(name, node):
    sexpr.expect_list(node, what="space builder")
    head = node.head
    if head == "finite":
        points, pairs, missing = None, [], math.inf
        for part in node.items[1:]:
            sexpr.expect_list(part, what="finite clause")
            if part.head == "points":
                points = [str(sexpr.expect_sym(p, "point")) for p in part.items[1:]]
            elif part.head == "dist":
                for tr in part.items[1:]:
                    sexpr.expect_list(tr, what="(a b d)")
                    if len(tr) != 3:
                        sexpr.fail(tr, "distance entries are (a b d)")
                    pairs.append((str(tr[0]), str(tr[1]), _num(tr[2])))
            elif part.head == "missing":
                missing = _num(part[1])
            else:
                sexpr.fail(part, f"unknown finite clause {part.head}")
        if not points:
            sexpr.fail(node, "finite space needs (points ...)")
        for a, b, _ in pairs:
            for p in (a, b):
                if p not in points:
                    sexpr.fail(node, f"distance mentions unknown point {p}")
        sp = finite_space(name, points, pairs, missing)
        bad = sp.base.violations()
        if bad:
            sexpr.fail(node, f"not a distance: {bad[0]}")
        return sp
    if head == "subsets-hausdorff":
        base = _build_space(name + ".base", node[1])
        if base.kind != "finite":
            sexpr.fail(node, "the base of subsets-hausdorff must be finite")
        return subsets_space(name, base.base)
    if head in ("distributions-w1", "distributions-tv"):
        base = _build_space(name + ".base", node[1])
        if base.kind != "finite":
            sexpr.fail(node, f"the base of {head} must be finite")
        den = None
        for part in node.items[2:]:
            sexpr.expect_list(part, "denominator", "(denominator D)")
            den = int(_frac(part[1]))
        if not den or den < 1:
            sexpr.fail(node, f"{head} needs (denominator D) with D >= 1")
        return distributions_space(name, base.base, den, head.split("-")[1])
    if head == "vectors-norm":
        dim = int(_frac(node[1]))
        samples, norm = None, "l2"
        for part in node.items[2:]:
            sexpr.expect_list(part, what="vectors clause")
            if part.head == "samples":
                samples = []
                for v in part.items[1:]:
                    sexpr.expect_list(v, what="vector")
                    if len(v) != dim:
                        sexpr.fail(v, f"sample vectors have {dim} coordinates")
                    samples.append([float(_frac(c)) for c in v])
            elif part.head == "norm":
                norm = str(part[1])
                if norm not in ("l1", "l2", "linf"):
                    sexpr.fail(part, "norm is l1, l2 or linf")
            else:
                sexpr.fail(part, f"unknown vectors clause {part.head}")
        if not samples:
            sexpr.fail(node, "vectors-norm needs (samples ...)")
        return vectors_space(name, dim, samples, norm)
    sexpr.fail(node, f"unknown space builder {head}")


def peek_model_theory(text: str) -> str:
    node = sexpr.read_one(text)
    sexpr.expect_list(node, "model", "model")
    for d in node.items[2:]:
        if isinstance(d, SList) and d.head == "theory":
            return str(d[1])
    sexpr.fail(node, "model must name its (theory T)")


def parse_model(text: str, theory: Theory) -> Model:
    node = sexpr.read_one(text)
    sexpr.expect_list(node, "model", "model")
    if len(node) < 2:
        sexpr.fail(node, "model needs a name")
    name = str(sexpr.expect_sym(node[1], "model name"))
    sig = theory.sig
    th_name, spaces, fns, preds, eps = None, {}, {}, {}, None
    decls = node.items[2:]
    for d in decls:
        sexpr.expect_list(d, what="model declaration")
        if d.head == "theory":
            th_name = str(d[1])
            if th_name != theory.name:
                sexpr.fail(d, f"model is for theory {th_name}, given {theory.name}")
        elif d.head == "space":
            sort = str(sexpr.expect_sym(d[1], "sort"))
            if sort not in sig.sorts:
                sexpr.fail(d, f"unknown sort {sort}")
            if sort in spaces:
                sexpr.fail(d, f"sort {sort} interpreted twice")
            spaces[sort] = _build_space(sort, d[2])
        elif d.head == "eps":
            eps = _num(d[1])
    for sort in sig.sorts:
        if sort not in spaces:
            sexpr.fail(node, f"no space for sort {sort}")
    for d in decls:
        if d.head not in ("interp-fn", "interp-pred"):
            if d.head not in ("theory", "space", "eps"):
                sexpr.fail(d, f"unknown model declaration {d.head}")
            continue
        sym = str(sexpr.expect_sym(d[1], "symbol"))
        is_fn = d.head == "interp-fn"
        decl = (sig.functions if is_fn else sig.predicates).get(sym)
        if decl is None:
            sexpr.fail(d, f"unknown {'function' if is_fn else 'predicate'} symbol {sym}")
        if sym in (fns if is_fn else preds):
            sexpr.fail(d, f"{sym} interpreted twice")
        arg_spaces = [spaces[s] for _, s in decl.slots]
        grades = decl.grades
        how = d[2] if len(d) > 2 else None
        default = None
        for extra in d.items[3:]:
            sexpr.expect_list(extra, what="clause")
            if extra.head == "grades":
                grades = tuple(sig.ring.parse(str(g), g.line, g.col) for g in extra.items[1:])
                if len(grades) != len(decl.slots):
                    sexpr.fail(extra, f"{sym} has {len(decl.slots)} slots, {len(grades)} grades given")
            elif extra.head == "default" and not is_fn:
                default = _num(extra[1])
            else:
                sexpr.fail(extra, f"unknown clause {extra.head}")
        if how is None:
            sexpr.fail(d, f"{sym} needs a builtin or a table")
        if isinstance(how, Sym):
            bname, bargs = str(how), []
        else:
            bname, bargs = how.head, how.items[1:]
        if bname == "table":
            fn = (_table_fn(bargs, arg_spaces, spaces[decl.result], how) if is_fn
                  else _table_pred(bargs, default, arg_spaces, how))
        else:
            fn = (_builtin_fn(bname, bargs, arg_spaces, spaces[decl.result], how) if is_fn
                  else _builtin_pred(bname, bargs, arg_spaces, how))
        (fns if is_fn else preds)[sym] = Interp(sym, fn, grades, sexpr.dump(how))
    missing = [f for f in sig.functions if f not in fns] + [p for p in sig.predicates if p not in preds]
    if missing:
        sexpr.fail(node, "uninterpreted symbols: " + ", ".join(missing))
    if th_name is None:
        sexpr.fail(node, "model must name its (theory T)")
    if eps is None:
        eps = EPS_WASSERSTEIN if any(s.kind == "distributions-w1" for s in spaces.values()) else EPS
    return Model(name, th_name, sig, spaces, fns, preds, eps)


def load_model(path, theory: Theory) -> Model:
    with open(path, encoding="utf-8") as fh:
        return parse_model(fh.read(), theory)


# evaluation

@dataclass
class Evaluation:
    """Values over the context product; ``values[k]`` belongs to context point k."""
    ctx: tuple
    shape: tuple
    values: np.ndarray

    def grid(self) -> np.ndarray:
        return self.values.reshape(self.shape + self.values.shape[1:])

    def point(self, k: int) -> tuple:
        return tuple(int(i) for i in np.unravel_index(k, self.shape)) if self.shape else ()


def context_env(model: Model, ctx):
    """Ambient values of every context variable at every context point."""
    shape = tuple(model.space(s).size for _, s in ctx)
    n = int(np.prod(shape)) if shape else 1
    idx = np.indices(shape).reshape(len(shape), -1) if shape else np.zeros((0, 1), dtype=int)
    env = {x: model.space(s).points[idx[i]] for i, (x, s) in enumerate(ctx)}
    return env, n, shape, idx


def term_value(model: Model, env: dict, n: int, t):
    if isinstance(t, Var):
        try:
            return env[t.name]
        except KeyError:
            raise ModelError(f"variable {t.name} is not in the context") from None
    f = model.functions.get(t.fn)
    if f is None:
        raise ModelError(f"function symbol {t.fn} is not interpreted")
    return f.fn([term_value(model, env, n, a) for a in t.args], n)


def formula_value(model: Model, env: dict, n: int, phi, sorts: dict | None = None) -> np.ndarray:
    """Distances of phi at each of the n points described by env."""
    doc = model.doc
    if isinstance(phi, (One, Top)):
        return np.zeros(n)
    if isinstance(phi, Zero):
        return np.full(n, doc.top_value)
    if isinstance(phi, Bot):
        if doc.cap is None:
            raise UnsupportedFragment("bot needs a classical (capped) quantale")
        return np.full(n, float(doc.cap))
    if isinstance(phi, Eq):
        sp = model.space(phi.sort)
        return np.asarray(sp.dist(term_value(model, env, n, phi.lhs), term_value(model, env, n, phi.rhs)),
                          dtype=float)
    if isinstance(phi, Atom):
        p = model.predicates.get(phi.pred)
        if p is None:
            raise ModelError(f"predicate {phi.pred} is not interpreted")
        return np.asarray(p.fn([term_value(model, env, n, a) for a in phi.args], n), dtype=float)
    if isinstance(phi, Tensor):
        return doc.tensor(formula_value(model, env, n, phi.left, sorts),
                          formula_value(model, env, n, phi.right, sorts))
    if isinstance(phi, Bang):
        return doc.modality(phi.grade, formula_value(model, env, n, phi.body, sorts))
    if isinstance(phi, Lolli):
        return doc.residual(formula_value(model, env, n, phi.left, sorts),
                            formula_value(model, env, n, phi.right, sorts))
    if isinstance(phi, With):
        return doc.meet(formula_value(model, env, n, phi.left, sorts),
                        formula_value(model, env, n, phi.right, sorts))
    if isinstance(phi, Plus):
        return doc.join(formula_value(model, env, n, phi.left, sorts),
                        formula_value(model, env, n, phi.right, sorts))
    if isinstance(phi, (Forall, Exists)):
        sp = model.space(phi.sort)
        m = sp.size
        inner = {k: np.repeat(v, m, axis=0) for k, v in env.items()}
        inner[phi.var] = sp.points[np.tile(np.arange(m), n)]
        body = formula_value(model, inner, n * m, phi.body, sorts).reshape(n, m)
        if m == 0:
            return np.full(n, 0.0 if isinstance(phi, Forall) else doc.top_value)
        # forall is the fiber meet (numeric sup), exists the fiber join (numeric inf)
        return body.max(axis=1) if isinstance(phi, Forall) else body.min(axis=1)
    raise UnsupportedFragment(f"cannot evaluate {type(phi).__name__}")


def eval_term(model: Model, ctx, t) -> Evaluation:
    env, n, shape, _ = context_env(model, ctx)
    return Evaluation(tuple(ctx), shape, term_value(model, env, n, t))


def eval_formula(model: Model, ctx, phi) -> Evaluation:
    env, n, shape, _ = context_env(model, ctx)
    return Evaluation(tuple(ctx), shape, formula_value(model, env, n, phi))


# checking inequalities pointwise

def _slack(lhs, rhs) -> np.ndarray:
    """lhs - rhs per point with the conventions inf - inf = 0 and x - inf = -inf."""
    lhs = np.asarray(lhs, float)
    rhs = np.asarray(rhs, float)
    if not np.isinf(rhs).any():
        return lhs - rhs
    with np.errstate(invalid="ignore"):
        s = lhs - rhs
    return np.where(np.isinf(rhs), np.where(np.isinf(lhs), 0.0, -math.inf), s)


def _fold_tensor(doc, parts, n):
    out = np.zeros(n)
    for p in parts:
        out = doc.tensor(out, p)
    return out


def _fmt(x: float):
    return "inf" if math.isinf(x) and x > 0 else ("-inf" if math.isinf(x) else round(float(x), 12))


@dataclass
class SequentCheck:
    ok: bool
    slack: float
    worst: dict
    lhs: float
    rhs: float
    points: int

    def to_json(self) -> dict:
        return {"ok": self.ok, "slack": _fmt(self.slack), "worst": self.worst,
                "lhs": _fmt(self.lhs), "rhs": _fmt(self.rhs), "points": self.points}


def check_sequent_semantics(model: Model, seq: Sequent, eps: float | None = None) -> SequentCheck:
    """Valid iff the sum of the hypotheses is at least the conclusion, minus eps, at every point."""
    eps = model.eps if eps is None else eps
    env, n, shape, idx = context_env(model, seq.ctx)
    lhs = _fold_tensor(model.doc, [formula_value(model, env, n, h) for h in seq.hyps], n)
    rhs = formula_value(model, env, n, seq.concl)
    s = _slack(lhs, rhs)
    k = int(np.argmin(s)) if n else 0
    worst = {}
    if n:
        for i, (x, sort) in enumerate(seq.ctx):
            worst[x] = model.space(sort).labels[int(idx[i, k])]
    slack = float(s[k]) if n else math.inf
    return SequentCheck(bool(slack >= -eps), slack, worst, float(lhs[k]) if n else 0.0,
                        float(rhs[k]) if n else 0.0, n)


# interpretations

@dataclass
class SymbolCheck:
    symbol: str
    kind: str
    grades: tuple
    ok: bool
    cases: int
    violations: int
    witness: dict | None = None
    note: str = ""

    def to_json(self) -> dict:
        out = {"symbol": self.symbol, "kind": self.kind, "grades": [str(g) for g in self.grades],
               "ok": self.ok, "cases": self.cases, "violations": self.violations}
        if self.witness is not None:
            out["witness"] = self.witness
        if self.note:
            out["note"] = self.note
        return out


def _arg_grid(spaces):
    shape = tuple(s.size for s in spaces)
    m = int(np.prod(shape)) if shape else 1
    idx = np.indices(shape).reshape(len(shape), -1) if shape else np.zeros((0, 1), dtype=int)
    return m, idx


def _graded_distance(doc, grades, tables, I, J):
    """sum_i r_i * d_i(a_i, b_i) over the pairs (I, J) of argument tuples."""
    out = np.zeros(len(I))
    for r, (T, ix) in zip(grades, tables):
        out = doc.tensor(out, doc.modality(r, T[ix[I], ix[J]]))
    return out


def _symbol_check(model: Model, name: str, is_fn: bool) -> SymbolCheck:
    sig, doc, eps = model.sig, model.doc, model.eps
    decl = sig.functions[name] if is_fn else sig.predicates[name]
    interp = (model.functions if is_fn else model.predicates)[name]
    grades = interp.grades
    kind = "function" if is_fn else "predicate"
    for g, arity in zip(grades, decl.grades):
        if not sig.ring.leq(g, arity):
            return SymbolCheck(name, kind, grades, False, 0, 1,
                               note=f"declared grade {g} is not below the arity grade {arity}")
    spaces = [model.space(s) for _, s in decl.slots]
    m, idx = _arg_grid(spaces)
    if not spaces:
        return SymbolCheck(name, kind, grades, True, 1, 0, note="nullary: holds vacuously")
    args = [sp.points[idx[i]] for i, sp in enumerate(spaces)]
    value = interp.fn(args, m)
    I, J = np.meshgrid(np.arange(m), np.arange(m), indexing="ij")
    I, J = I.ravel(), J.ravel()
    tables = [(sp.table(), idx[i]) for i, sp in enumerate(spaces)]
    cost = _graded_distance(doc, grades, tables, I, J)
    if is_fn:
        res = model.space(decl.result)
        s = _slack(cost, res.pair_table(value).ravel())
    else:
        value = np.asarray(value, float)
        s = _slack(doc.tensor(value[I], cost), value[J])
    bad = s < -eps
    count = int(bad.sum())
    witness = None
    if count:
        k = int(np.argmin(s))
        a = [sp.labels[int(idx[i, I[k]])] for i, sp in enumerate(spaces)]
        b = [sp.labels[int(idx[i, J[k]])] for i, sp in enumerate(spaces)]
        witness = {"from": a, "to": b, "slack": _fmt(float(s[k]))}
    return SymbolCheck(name, kind, grades, count == 0, int(m * m), count, witness)


def validate_interpretation(sig: Signature, model: Model) -> list:
    """Exhaustive check that each symbol is Lipschitz with its declared grades."""
    out = []
    for name in sig.functions:
        if name not in model.functions:
            out.append(SymbolCheck(name, "function", (), False, 0, 1, note="not interpreted"))
        else:
            out.append(_symbol_check(model, name, True))
    for name in sig.predicates:
        if name not in model.predicates:
            out.append(SymbolCheck(name, "predicate", (), False, 0, 1, note="not interpreted"))
        else:
            out.append(_symbol_check(model, name, False))
    return out


# the two substitution inequalities over small syntax

def enumerate_terms(sig: Signature, ctx, depth: int) -> dict:
    """sort -> list of terms of depth at most ``depth`` (variables and constants have depth 1)."""
    layers = {s: [] for s in sig.sorts}
    for x, s in ctx:
        layers[s].append(Var(x))
    for f in sig.functions.values():
        if not f.slots:
            layers[f.result].append(App(f.name, ()))
    seen = {s: list(v) for s, v in layers.items()}
    frontier = {s: set(v) for s, v in layers.items()}
    for _ in range(depth - 1):
        new = {s: [] for s in sig.sorts}
        for f in sig.functions.values():
            if not f.slots:
                continue
            pools = [seen[s] for _, s in f.slots]
            for args in itertools.product(*pools):
                # at least one argument from the previous layer, so every term is new
                if not any(a in frontier[s] for a, (_, s) in zip(args, f.slots)):
                    continue
                new[f.result].append(App(f.name, tuple(args)))
        for s in sig.sorts:
            seen[s].extend(new[s])
        frontier = {s: set(v) for s, v in new.items()}
    return seen


def _lemma_grades(sig: Signature):
    ring = sig.ring
    base = [ring.zero, ring.one] + list(sig.grades())
    if ring.kind == "nonneg-real":
        base += [ring.grade(Fraction(1, 2)), ring.grade(2)]
    elif ring.kind in ("nat", "nat-inf"):
        base += [ring.grade(2)]
    return list(dict.fromkeys(base))


def enumerate_formulas(sig: Signature, ctx, depth: int, terms: dict | None = None, grades=None) -> list:
    """Formulas of depth at most ``depth`` in the fragment of the signature."""
    if terms is None:
        terms = enumerate_terms(sig, ctx, max(depth - 1, 1))
    grades = _lemma_grades(sig) if grades is None else grades
    by_depth = {1: [One()]}
    if sig.allows("additive"):
        by_depth[1] += [Top(), Zero()]
    if sig.classical:
        by_depth[1].append(Bot())
    by_depth[1] += [Atom(p.name, ()) for p in sig.predicates.values() if not p.slots]
    for d in range(2, depth + 1):
        layer = []
        small = {s: [t for t in ts if term_depth(t) <= d - 1] for s, ts in terms.items()}
        top = {s: {t for t in ts if term_depth(t) == d - 1} for s, ts in terms.items()}
        for s in sig.sorts:
            for t, u in itertools.product(small[s], repeat=2):
                if t in top[s] or u in top[s]:
                    layer.append(Eq(s, t, u))
        for p in sig.predicates.values():
            if not p.slots:
                continue
            for args in itertools.product(*[small[s] for _, s in p.slots]):
                if any(a in top[s] for a, (_, s) in zip(args, p.slots)):
                    layer.append(Atom(p.name, tuple(args)))
        lower = [f for k in range(1, d) for f in by_depth[k]]
        prev = by_depth[d - 1]
        prev_set = set(prev)
        for r in grades:
            layer += [Bang(r, f) for f in prev]
        binary = [Tensor]
        if sig.allows("multiplicative"):
            binary.append(Lolli)
        if sig.allows("additive"):
            binary += [With, Plus]
        for cls in binary:
            for a, b in itertools.product(lower, repeat=2):
                if a in prev_set or b in prev_set:
                    layer.append(cls(a, b))
        if sig.allows("first-order"):
            for x, s in ctx:
                layer += [Forall(x, s, f) for f in prev] + [Exists(x, s, f) for f in prev]
        by_depth[d] = layer
    return [f for d in sorted(by_depth) for f in by_depth[d]]


@dataclass
class LemmaReport:
    model: str
    depth: int
    terms: int = 0
    formulas: int = 0
    pairs: int = 0
    violation_count: int = 0
    violations: list = field(default_factory=list)
    seconds: float = 0.0

    @property
    def ok(self) -> bool:
        return self.violation_count == 0

    def to_json(self, timing=False) -> dict:
        out = {"model": self.model, "depth": self.depth, "terms": self.terms, "formulas": self.formulas,
               "pairs": self.pairs, "violation_count": self.violation_count,
               "violations": self.violations, "ok": self.ok}
        if timing:
            out["seconds"] = round(self.seconds, 3)
        return out


def default_context(sig: Signature, nvars: int = 2) -> tuple:
    names = ["x", "y", "z", "w", "v", "u"]
    ctx = []
    for k, s in enumerate(sig.sorts):
        for i in range(nvars):
            base = names[i % len(names)] + ("" if i < len(names) else str(i))
            ctx.append((base if k == 0 else f"{base}{k}", s))
    return tuple(ctx)


def lemma_sound_suite(model: Model, sig: Signature | None = None, depth: int = 3, nvars: int = 2,
                      ctx=None, keep: int = 5) -> LemmaReport:
    """Check both substitution inequalities for every term and formula up to ``depth``.

    Terms:    sum_i gr(t, x_i) * d(a_i, b_i) >= d(t(a), t(b)).
    Formulas: phi(a) + sum_i gr(phi, x_i) * d(a_i, b_i) >= phi(b).
    Every pair (a, b) of context points is visited.
    """
    sig = model.sig if sig is None else sig
    ctx = default_context(sig, nvars) if ctx is None else tuple(ctx)
    doc, eps = model.doc, model.eps
    started = time.perf_counter()
    rep = LemmaReport(model.name, depth)
    env, n, shape, idx = context_env(model, ctx)
    I, J = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    I, J = I.ravel(), J.ravel()
    rep.pairs = int(n * n)
    tables = [(model.space(s).table(), idx[i]) for i, (_, s) in enumerate(ctx)]
    cache = {}

    def cost(grades):
        key = tuple(grades)
        if key not in cache:
            cache[key] = _graded_distance(doc, grades, tables, I, J)
        return cache[key]

    def record(kind, obj, s):
        bad = s < -eps
        c = int(bad.sum())
        if c:
            rep.violation_count += c
            if len(rep.violations) < keep:
                k = int(np.argmin(s))
                rep.violations.append({"kind": kind, "syntax": to_sexpr(obj), "slack": _fmt(float(s[k])),
                                       "from": list(np.unravel_index(int(I[k]), shape)),
                                       "to": list(np.unravel_index(int(J[k]), shape))})

    terms = enumerate_terms(sig, ctx, depth)
    for sort, ts in terms.items():
        sp = model.space(sort)
        done = set()
        for t in ts:
            grades = tuple(grade_term(sig, t, x) for x, _ in ctx)
            vals = np.ascontiguousarray(term_value(model, env, n, t))
            rep.terms += 1
            # terms with the same denotation and grades give the same inequality
            key = (vals.tobytes(), grades)
            if key in done:
                continue
            done.add(key)
            record("term", t, _slack(cost(grades), sp.pair_table(vals).ravel()))
    for phi in enumerate_formulas(sig, ctx, depth, terms):
        grades = [grade_formula(sig, phi, x) for x, _ in ctx]
        v = formula_value(model, env, n, phi)
        record("formula", phi, _slack(doc.tensor(v[I], cost(grades)), v[J]))
        rep.formulas += 1
    rep.seconds = time.perf_counter() - started
    return rep


# theories and the soundness harness

@dataclass
class ModelReport:
    model: str
    theory: str
    symbols: list
    axioms: dict
    ok: bool

    def to_json(self) -> dict:
        return {"model": self.model, "theory": self.theory,
                "symbols": [s.to_json() for s in self.symbols],
                "axioms": {k: v.to_json() for k, v in self.axioms.items()}, "ok": self.ok}


def check_theory_model(model: Model, theory: Theory, eps: float | None = None) -> ModelReport:
    symbols = validate_interpretation(theory.sig, model)
    axioms = {name: check_sequent_semantics(model, seq, eps) for name, seq in theory.axioms.items()}
    ok = all(s.ok for s in symbols) and all(a.ok for a in axioms.values())
    return ModelReport(model.name, theory.name, symbols, axioms, ok)


@dataclass
class HarnessReport:
    generated: int
    rejected_by_checker: int
    invalid: int
    failures: list
    seed: int

    @property
    def ok(self) -> bool:
        return self.rejected_by_checker == 0 and self.invalid == 0

    def to_json(self) -> dict:
        return {"generated": self.generated, "rejected_by_checker": self.rejected_by_checker,
                "invalid": self.invalid, "failures": self.failures, "seed": self.seed, "ok": self.ok}


def soundness_property_harness(model: Model, theory: Theory, n: int = 200, seed: int = 0, steps: int = 4,
                               ctx=None, keep: int = 5) -> HarnessReport:
    """Generate n random checked derivations and validate every root sequent in the model."""
    ctx = default_context(theory.sig, 2) if ctx is None else tuple(ctx)
    ds = random_derivations(theory, ctx, n, seed=seed, steps=steps)
    rejected = invalid = 0
    failures = []
    for d in ds:
        if check_derivation(theory.sig, theory.axioms, d):
            rejected += 1
            continue
        res = check_sequent_semantics(model, d.conclusion)
        if not res.ok:
            invalid += 1
            if len(failures) < keep:
                failures.append({"sequent": str(d.conclusion), **res.to_json()})
    return HarnessReport(len(ds), rejected, invalid, failures, seed)


def substitution_commutes(model: Model, ctx, phi, x: str, t) -> bool:
    """phi[t/x] evaluates to phi evaluated with x sent to the value of t."""
    env, n, _, _ = context_env(model, ctx)
    direct = formula_value(model, env, n, substitute(phi, t, x))
    moved = dict(env)
    moved[x] = term_value(model, env, n, t)
    via = formula_value(model, moved, n, phi)
    return bool(np.all(np.isclose(direct, via, rtol=0, atol=model.eps) | (direct == via)))


__all__ = [
    "Space", "Interp", "Model", "Evaluation", "SequentCheck", "SymbolCheck", "LemmaReport", "ModelReport",
    "HarnessReport", "parse_model", "load_model", "peek_model_theory", "eval_term", "eval_formula",
    "context_env", "term_value", "formula_value", "check_sequent_semantics", "validate_interpretation",
    "enumerate_terms", "enumerate_formulas", "lemma_sound_suite", "check_theory_model",
    "soundness_property_harness", "substitution_commutes", "default_context", "finite_space",
    "subsets_space", "distributions_space", "vectors_space"
]
