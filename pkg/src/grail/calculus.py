"""Derivation trees for graded linear logic with equality, and their checker.

Every node states its conclusion; the checker recomputes that the
conclusion follows from the premises' stated conclusions by exactly one
rule application.  Hypotheses are multisets, formulas are compared up to
renaming of bound variables.
"""
from __future__ import annotations

import itertools
import random
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction

from . import sexpr
from .errors import GrailError, SortError, UnsupportedFragment
from .syntax import (
    App, Atom, Bang, Bot, Eq, Exists, Forall, Lolli, One, Plus, Sequent, Signature,
    Tensor, Theory, Top, Var, With, Zero, alpha_eq, alpha_key, check_sequent, check_term,
    ctx_sexpr, free_vars, grade_formula, parse_ctx, parse_formula, parse_grade,
    parse_sequent, parse_term, sequent_sexpr, subst_many, substitute, to_sexpr,
)

HALF = Fraction(1, 2)


@dataclass
class Derivation:
    rule: str
    conclusion: Sequent
    premises: list = field(default_factory=list)
    params: dict = field(default_factory=dict)

    def size(self) -> int:
        return 1 + sum(p.size() for p in self.premises)

    def height(self) -> int:
        return 1 + max((p.height() for p in self.premises), default=0)


@dataclass(frozen=True)
class Violation:
    path: str
    rule: str
    kind: str
    expected: str
    found: str

    def to_json(self) -> dict:
        return {"path": self.path, "rule": self.rule, "kind": self.kind,
                "expected": self.expected, "found": self.found}

    def __str__(self):
        return f"{self.path} [{self.rule}] {self.kind}: expected {self.expected}, found {self.found}"


class Mismatch(Exception):
    def __init__(self, kind, expected, found):
        super().__init__(f"{kind}: expected {expected}, found {found}")
        self.kind = kind
        self.expected = str(expected)
        self.found = str(found)


# multiset helpers

def _ms(hyps) -> Counter:
    return Counter(alpha_key(h) for h in hyps)


def _show(hyps) -> str:
    return "(" + " ".join(to_sexpr(h) for h in hyps) + ")"


def _need_hyps(got, want, kind="rule-mismatch"):
    if _ms(got) != _ms(want):
        raise Mismatch(kind, _show(want), _show(got))


def _need_same(found, expected, what="formula"):
    if not alpha_eq(found, expected):
        raise Mismatch("rule-mismatch", to_sexpr(expected), to_sexpr(found))


def _minus(hyps, phi):
    """hyps with one copy of phi removed, or None."""
    out = list(hyps)
    key = alpha_key(phi)
    for i, h in enumerate(out):
        if alpha_key(h) == key:
            del out[i]
            return out
    return None


def _distinct(hyps, pred):
    seen, out = set(), []
    for h in hyps:
        k = alpha_key(h)
        if pred(h) and k not in seen:
            seen.add(k)
            out.append(h)
    return out


def _is(phi, cls):
    if not isinstance(phi, cls):
        raise Mismatch("rule-mismatch", f"a {cls.__name__.lower()} formula", to_sexpr(phi))
    return phi


def _principal(node, hyps, pred, what):
    """Candidate principal hypotheses, narrowed by a ``principal`` parameter."""
    given = node.params.get("principal")
    if given is not None:
        if _minus(hyps, given) is None:
            raise Mismatch("rule-mismatch", f"principal {to_sexpr(given)} among hypotheses", _show(hyps))
        if not pred(given):
            raise Mismatch("rule-mismatch", what, to_sexpr(given))
        return [given]
    cands = _distinct(hyps, pred)
    if not cands:
        raise Mismatch("rule-mismatch", what + " among hypotheses", _show(hyps))
    return cands


def _try_candidates(cands, attempt, expected):
    last = None
    for c in cands:
        try:
            attempt(c)
            return
        except Mismatch as exc:
            last = exc
    if len(cands) == 1 and last is not None:
        raise last
    raise Mismatch("rule-mismatch", expected, "no principal formula fits the premise")


# rule checkers: each gets (checker, node, premise sequents) and raises Mismatch

RULES = {}


def rule(name, arity, fragment="core", classical=False):
    def deco(fn):
        RULES[name] = (arity, fragment, classical, fn)
        return fn
    return deco


@rule("ax", 0)
def _ax(ck, node, ps):
    c = node.conclusion
    if len(c.hyps) != 1:
        raise Mismatch("rule-mismatch", "exactly one hypothesis", _show(c.hyps))
    _need_same(c.hyps[0], c.concl)


@rule("cut", 2)
def _cut(ck, node, ps):
    c, (p1, p2) = node.conclusion, ps
    _need_same(p2.concl, c.concl)
    psi = p1.concl
    if "cut-formula" in node.params:
        _need_same(node.params["cut-formula"], psi)
    rest = _minus(p2.hyps, psi)
    if rest is None:
        raise Mismatch("rule-mismatch", f"cut formula {to_sexpr(psi)} in second premise", _show(p2.hyps))
    _check_split(node, p1.hyps)
    _need_hyps(c.hyps, list(p1.hyps) + rest, "split-mismatch")


def _check_split(node, first):
    split = node.params.get("split")
    if split is not None and _ms(split) != _ms(first):
        raise Mismatch("split-mismatch", _show(split), _show(first))


@rule("tensor-l", 1)
def _tensor_l(ck, node, ps):
    c, p = node.conclusion, ps[0]
    _need_same(p.concl, c.concl)

    def attempt(t):
        _need_hyps(p.hyps, _minus(c.hyps, t) + [t.left, t.right])
    _try_candidates(_principal(node, c.hyps, lambda h: isinstance(h, Tensor), "a tensor"),
                    attempt, "premise splitting a tensor hypothesis")


@rule("tensor-r", 2)
def _tensor_r(ck, node, ps):
    c, (p1, p2) = node.conclusion, ps
    t = _is(c.concl, Tensor)
    _need_same(p1.concl, t.left)
    _need_same(p2.concl, t.right)
    _check_split(node, p1.hyps)
    _need_hyps(c.hyps, list(p1.hyps) + list(p2.hyps), "split-mismatch")


@rule("one-l", 1)
def _one_l(ck, node, ps):
    c, p = node.conclusion, ps[0]
    _need_same(p.concl, c.concl)
    rest = _minus(c.hyps, One())
    if rest is None:
        raise Mismatch("rule-mismatch", "hypothesis one", _show(c.hyps))
    _need_hyps(p.hyps, rest)


@rule("one-r", 0)
def _one_r(ck, node, ps):
    c = node.conclusion
    _is(c.concl, One)
    _need_hyps(c.hyps, [])


@rule("lolli-l", 2, "multiplicative")
def _lolli_l(ck, node, ps):
    c, (p1, p2) = node.conclusion, ps
    _need_same(p2.concl, c.concl)

    def attempt(l):
        _need_same(p1.concl, l.left)
        rest2 = _minus(p2.hyps, l.right)
        if rest2 is None:
            raise Mismatch("rule-mismatch", f"{to_sexpr(l.right)} in second premise", _show(p2.hyps))
        _need_hyps(_minus(c.hyps, l), list(p1.hyps) + rest2, "split-mismatch")
    _try_candidates(_principal(node, c.hyps, lambda h: isinstance(h, Lolli), "a linear implication"),
                    attempt, "premises matching a lolli hypothesis")


@rule("lolli-r", 1, "multiplicative")
def _lolli_r(ck, node, ps):
    c, p = node.conclusion, ps[0]
    l = _is(c.concl, Lolli)
    _need_same(p.concl, l.right)
    _need_hyps(p.hyps, list(c.hyps) + [l.left])


@rule("with-r", 2, "additive")
def _with_r(ck, node, ps):
    c, (p1, p2) = node.conclusion, ps
    w = _is(c.concl, With)
    _need_same(p1.concl, w.left)
    _need_same(p2.concl, w.right)
    _need_hyps(p1.hyps, c.hyps)
    _need_hyps(p2.hyps, c.hyps)


def _with_l(side):
    def check(ck, node, ps):
        c, p = node.conclusion, ps[0]
        _need_same(p.concl, c.concl)

        def attempt(w):
            _need_hyps(p.hyps, _minus(c.hyps, w) + [getattr(w, side)])
        _try_candidates(_principal(node, c.hyps, lambda h: isinstance(h, With), "a with"),
                        attempt, "premise projecting a with hypothesis")
    return check


rule("with-l1", 1, "additive")(_with_l("left"))
rule("with-l2", 1, "additive")(_with_l("right"))


@rule("plus-l", 2, "additive")
def _plus_l(ck, node, ps):
    c, (p1, p2) = node.conclusion, ps
    _need_same(p1.concl, c.concl)
    _need_same(p2.concl, c.concl)

    def attempt(pl):
        rest = _minus(c.hyps, pl)
        _need_hyps(p1.hyps, rest + [pl.left])
        _need_hyps(p2.hyps, rest + [pl.right])
    _try_candidates(_principal(node, c.hyps, lambda h: isinstance(h, Plus), "a plus"),
                    attempt, "premises splitting a plus hypothesis")


def _plus_r(side):
    def check(ck, node, ps):
        c, p = node.conclusion, ps[0]
        pl = _is(c.concl, Plus)
        _need_same(p.concl, getattr(pl, side))
        _need_hyps(p.hyps, c.hyps)
    return check


rule("plus-r1", 1, "additive")(_plus_r("left"))
rule("plus-r2", 1, "additive")(_plus_r("right"))


@rule("top-r", 0, "additive")
def _top_r(ck, node, ps):
    _is(node.conclusion.concl, Top)


@rule("zero-l", 0, "additive")
def _zero_l(ck, node, ps):
    if _minus(node.conclusion.hyps, Zero()) is None:
        raise Mismatch("rule-mismatch", "hypothesis zero", _show(node.conclusion.hyps))


def _eigen(node, p, c):
    y, sort = node.params.get("eigen", (None, None))
    if y is None:
        if len(p.ctx) != len(c.ctx) + 1:
            raise Mismatch("rule-mismatch", "premise context with one eigenvariable", ctx_sexpr(p.ctx))
        y, sort = p.ctx[-1]
    if tuple(p.ctx) != tuple(c.ctx) + ((y, sort),):
        raise Mismatch("rule-mismatch", ctx_sexpr(tuple(c.ctx) + ((y, sort),)), ctx_sexpr(p.ctx))
    if y in dict(c.ctx):
        raise Mismatch("side-condition", f"eigenvariable {y} fresh", "already in context")
    return y, sort


@rule("forall-r", 1, "first-order")
def _forall_r(ck, node, ps):
    c, p = node.conclusion, ps[0]
    q = _is(c.concl, Forall)
    y, sort = _eigen(node, p, c)
    if sort != q.sort:
        raise Mismatch("rule-mismatch", f"eigenvariable of sort {q.sort}", sort)
    _need_same(p.concl, substitute(q.body, Var(y), q.var))
    _need_hyps(p.hyps, c.hyps)


@rule("exists-l", 1, "first-order")
def _exists_l(ck, node, ps):
    c, p = node.conclusion, ps[0]
    _need_same(p.concl, c.concl)
    y, sort = _eigen(node, p, c)

    def attempt(q):
        if q.sort != sort:
            raise Mismatch("rule-mismatch", f"eigenvariable of sort {q.sort}", sort)
        _need_hyps(p.hyps, _minus(c.hyps, q) + [substitute(q.body, Var(y), q.var)])
    _try_candidates(_principal(node, c.hyps, lambda h: isinstance(h, Exists), "an existential"),
                    attempt, "premise opening an existential hypothesis")


def _witness(ck, node, c, sort):
    t = node.params.get("term")
    if t is None:
        raise Mismatch("rule-mismatch", "a (term T) parameter", "none")
    try:
        got = check_term(ck.sig, c.ctx, t)
    except SortError as exc:
        raise Mismatch("ill-formed", f"term of sort {sort}", str(exc))
    if got != sort:
        raise Mismatch("rule-mismatch", f"term of sort {sort}", got)
    return t


@rule("forall-l", 1, "first-order")
def _forall_l(ck, node, ps):
    c, p = node.conclusion, ps[0]
    _need_same(p.concl, c.concl)

    def attempt(q):
        t = _witness(ck, node, c, q.sort)
        _need_hyps(p.hyps, _minus(c.hyps, q) + [substitute(q.body, t, q.var)])
    _try_candidates(_principal(node, c.hyps, lambda h: isinstance(h, Forall), "a universal"),
                    attempt, "premise instantiating a universal hypothesis")


@rule("exists-r", 1, "first-order")
def _exists_r(ck, node, ps):
    c, p = node.conclusion, ps[0]
    q = _is(c.concl, Exists)
    t = _witness(ck, node, c, q.sort)
    _need_same(p.concl, substitute(q.body, t, q.var))
    _need_hyps(p.hyps, c.hyps)


@rule("dne", 0, "multiplicative", classical=True)
def _dne(ck, node, ps):
    c = node.conclusion
    want = [Lolli(Lolli(c.concl, Bot()), Bot())]
    _need_hyps(c.hyps, want)


# graded bang

@rule("w", 1)
def _w(ck, node, ps):
    c, p = node.conclusion, ps[0]
    _need_same(p.concl, c.concl)
    zero = ck.sig.ring.zero

    def attempt(b):
        _need_hyps(p.hyps, _minus(c.hyps, b))
    _try_candidates(_principal(node, c.hyps, lambda h: isinstance(h, Bang) and h.grade == zero,
                               "a bang of grade 0"), attempt, "premise without the weakened hypothesis")


@rule("c", 1)
def _c(ck, node, ps):
    c, p = node.conclusion, ps[0]
    _need_same(p.concl, c.concl)
    want_r, want_s = node.params.get("r"), node.params.get("s")
    p_bangs = [h for h in p.hyps if isinstance(h, Bang)]

    def attempt(b):
        rest = _minus(c.hyps, b)
        for i, j in itertools.combinations(range(len(p_bangs)), 2):
            b1, b2 = p_bangs[i], p_bangs[j]
            for r_, s_ in ((b1, b2), (b2, b1)):
                if want_r is not None and r_.grade != want_r:
                    continue
                if want_s is not None and s_.grade != want_s:
                    continue
                if not (alpha_eq(r_.body, b.body) and alpha_eq(s_.body, b.body)):
                    continue
                if r_.grade + s_.grade != b.grade:
                    continue
                if _ms(p.hyps) == _ms(rest + [r_, s_]):
                    return
        raise Mismatch("rule-mismatch", f"premise with two bangs of {to_sexpr(b.body)} summing to {b.grade}",
                       _show(p.hyps))
    _try_candidates(_principal(node, c.hyps, lambda h: isinstance(h, Bang), "a bang"),
                    attempt, "premise with two bangs whose grades sum to the contracted one")


@rule("der", 1)
def _der(ck, node, ps):
    c, p = node.conclusion, ps[0]
    _need_same(p.concl, c.concl)
    one = ck.sig.ring.one

    def attempt(b):
        _need_hyps(p.hyps, _minus(c.hyps, b) + [b.body])
    _try_candidates(_principal(node, c.hyps, lambda h: isinstance(h, Bang) and h.grade == one,
                               "a bang of grade 1"), attempt, "premise with the dereliction undone")


@rule("pro", 1)
def _pro(ck, node, ps):
    c, p = node.conclusion, ps[0]
    b = _is(c.concl, Bang)
    r = b.grade
    if "r" in node.params and node.params["r"] != r:
        raise Mismatch("grade-mismatch", str(node.params["r"]), str(r))
    _need_same(p.concl, b.body)
    for h in p.hyps:
        if not isinstance(h, Bang):
            raise Mismatch("rule-mismatch", "every premise hypothesis banged", to_sexpr(h))
    want = [Bang(r * h.grade, h.body) for h in p.hyps]
    if _ms(c.hyps) != _ms(want):
        kind = "grade-mismatch" if len(c.hyps) == len(want) else "rule-mismatch"
        raise Mismatch(kind, _show(want), _show(c.hyps))


@rule("decr", 1)
def _decr(ck, node, ps):
    c, p = node.conclusion, ps[0]
    br = _is(c.concl, Bang)
    bs = _is(p.concl, Bang)
    _need_same(bs.body, br.body)
    _need_hyps(p.hyps, c.hyps)
    if not br.grade <= bs.grade:
        raise Mismatch("side-condition", f"{br.grade} below {bs.grade}", "not below")


# equality

@rule("r", 0)
def _refl(ck, node, ps):
    c = node.conclusion
    e = _is(c.concl, Eq)
    _need_hyps(c.hyps, [])
    if e.lhs != e.rhs:
        raise Mismatch("rule-mismatch", f"(eq {e.sort} {e.lhs} {e.lhs})", to_sexpr(e))


@rule("s", 1)
def _sym(ck, node, ps):
    c, p = node.conclusion, ps[0]
    e = _is(c.concl, Eq)
    _need_same(p.concl, Eq(e.sort, e.rhs, e.lhs))
    _need_hyps(p.hyps, c.hyps)


@rule("t", 2)
def _trans(ck, node, ps):
    c, (p1, p2) = node.conclusion, ps
    e = _is(c.concl, Eq)
    e1 = _is(p1.concl, Eq)
    e2 = _is(p2.concl, Eq)
    _need_same(e1, Eq(e.sort, e.lhs, e1.rhs))
    _need_same(e2, Eq(e.sort, e1.rhs, e.rhs))
    _check_split(node, p1.hyps)
    _need_hyps(c.hyps, list(p1.hyps) + list(p2.hyps), "split-mismatch")


@rule("w-eq", 1)
def _w_eq(ck, node, ps):
    c, p = node.conclusion, ps[0]
    _need_same(p.concl, c.concl)

    def attempt(e):
        _need_hyps(p.hyps, _minus(c.hyps, e))
    _try_candidates(_principal(node, c.hyps, lambda h: isinstance(h, Eq), "an equation"),
                    attempt, "premise without the weakened equation")


@rule("subst", 2)
def _subst(ck, node, ps):
    c, (p1, p2) = node.conclusion, ps
    try:
        phi = node.params["formula"]
        x, sort = node.params["var"]
        t, u = node.params["from"], node.params["to"]
    except KeyError as exc:
        raise Mismatch("rule-mismatch", "parameters formula/var/from/to", f"missing {exc}")
    if x in dict(c.ctx):
        raise Mismatch("side-condition", f"substitution variable {x} not in context", "in context")
    try:
        check_sequent(ck.sig, Sequent(tuple(c.ctx) + ((x, sort),), (), phi))
        for side in (t, u):
            got = check_term(ck.sig, c.ctx, side)
            if got != sort:
                raise SortError(f"{to_sexpr(side)} has sort {got}, not {sort}")
    except (SortError, UnsupportedFragment) as exc:
        raise Mismatch("ill-formed", "well-sorted substitution data", str(exc))
    g = grade_formula(ck.sig, phi, x)
    want2 = Bang(g, Eq(sort, t, u))
    _need_same(p1.concl, substitute(phi, t, x))
    found = p2.concl
    if not (isinstance(found, Bang) and alpha_eq(found.body, want2.body)):
        raise Mismatch("rule-mismatch", to_sexpr(want2), to_sexpr(found))
    if found.grade != g:
        raise Mismatch("grade-mismatch", str(g), str(found.grade))
    _need_same(c.concl, substitute(phi, u, x))
    _check_split(node, p1.hyps)
    _need_hyps(c.hyps, list(p1.hyps) + list(p2.hyps), "split-mismatch")


@rule("axiom", 0)
def _axiom(ck, node, ps):
    c = node.conclusion
    name = node.params.get("axiom")
    ax = ck.axioms.get(name)
    if ax is None:
        raise Mismatch("unknown-axiom", "an axiom of the theory", str(name))
    inst = dict(node.params.get("inst", {}))
    ctx = dict(c.ctx)
    mapping = {}
    for v, sort in ax.ctx:
        t = inst.pop(v, None)
        if t is None:
            if ctx.get(v) != sort:
                raise Mismatch("rule-mismatch", f"an instance for {v}", "none")
            t = Var(v)
        try:
            got = check_term(ck.sig, c.ctx, t)
        except SortError as exc:
            raise Mismatch("ill-formed", f"term of sort {sort} for {v}", str(exc))
        if got != sort:
            raise Mismatch("rule-mismatch", f"term of sort {sort} for {v}", got)
        mapping[v] = t
    if inst:
        raise Mismatch("rule-mismatch", "instances only for axiom variables", ", ".join(sorted(inst)))
    _need_same(c.concl, subst_many(ax.concl, mapping))
    _need_hyps(c.hyps, [subst_many(h, mapping) for h in ax.hyps])


# driver

@dataclass
class Checker:
    sig: Signature
    axioms: dict

    def check_node(self, node: Derivation) -> Mismatch | None:
        entry = RULES.get(node.rule)
        if entry is None:
            return Mismatch("unknown-rule", "a rule of the calculus", node.rule)
        arity, fragment, classical, fn = entry
        if len(node.premises) != arity:
            return Mismatch("arity-mismatch", f"{arity} premises", f"{len(node.premises)}")
        if not self.sig.allows(fragment):
            return Mismatch("side-condition", f"theory with the {fragment} fragment", self.sig.fragment)
        if classical and not self.sig.classical:
            return Mismatch("side-condition", "a classical theory", "intuitionistic theory")
        try:
            check_sequent(self.sig, node.conclusion)
        except (SortError, UnsupportedFragment) as exc:
            return Mismatch("ill-formed", "a well-formed sequent", str(exc))
        if node.rule not in ("forall-r", "exists-l"):
            for p in node.premises:
                if tuple(p.conclusion.ctx) != tuple(node.conclusion.ctx):
                    return Mismatch("rule-mismatch", ctx_sexpr(node.conclusion.ctx), ctx_sexpr(p.conclusion.ctx))
        try:
            fn(self, node, [p.conclusion for p in node.premises])
        except Mismatch as exc:
            return exc
        except GrailError as exc:
            return Mismatch("ill-formed", "a well-formed rule instance", str(exc))
        return None


def check_rule_instance(sig: Signature, node: Derivation, axioms=None) -> Violation | None:
    """Check one node against its premises' stated conclusions."""
    m = Checker(sig, axioms or {}).check_node(node)
    if m is None:
        return None
    return Violation("root", node.rule, m.kind, m.expected, m.found)


def check_derivation(sig: Signature, axioms: dict, d: Derivation) -> list:
    """All node violations, leaves first; empty means the root is provable."""
    ck = Checker(sig, axioms)
    out = []

    def walk(node, path):
        for i, p in enumerate(node.premises):
            walk(p, f"{path}.{i}")
        m = ck.check_node(node)
        if m is not None:
            out.append(Violation(path, node.rule, m.kind, m.expected, m.found))

    walk(d, "root")
    return out


# construction helpers

def leaf(rule_name, ctx, hyps, concl, **params) -> Derivation:
    return Derivation(rule_name, Sequent(tuple(ctx), tuple(hyps), concl), [], params)


def node(rule_name, premises, hyps, concl, ctx=None, **params) -> Derivation:
    ctx = premises[0].conclusion.ctx if ctx is None else ctx
    return Derivation(rule_name, Sequent(tuple(ctx), tuple(hyps), concl), list(premises), params)


def _fresh_name(base, avoid):
    if base not in avoid:
        return base
    k = 1
    while f"{base}{k}" in avoid:
        k += 1
    return f"{base}{k}"


def derive_congruence(sig: Signature, symbol: str) -> Derivation:
    """Congruence of a function or predicate symbol, by iterated substitution.

    Function f: !_{<f>_i}(x_i = y_i), ... |- f(xs) = f(ys).
    Predicate p: p(xs), !_{<p>_i}(x_i = y_i), ... |- p(ys).
    """
    if symbol in sig.functions:
        sym, is_fn = sig.functions[symbol], True
    elif symbol in sig.predicates:
        sym, is_fn = sig.predicates[symbol], False
    else:
        raise SortError(f"unknown symbol {symbol}")
    n = len(sym.slots)
    taken = set(sig.functions) | set(sig.predicates)
    xs = [_fresh_name(f"x{i + 1}", taken) for i in range(n)]
    ys = [_fresh_name(f"y{i + 1}", taken | set(xs)) for i in range(n)]
    z = _fresh_name("z", taken | set(xs) | set(ys))
    ctx = tuple((v, s) for v, (_, s) in zip(xs, sym.slots)) + \
        tuple((v, s) for v, (_, s) in zip(ys, sym.slots))

    def build(args):
        args = tuple(Var(a) if isinstance(a, str) else a for a in args)
        return App(symbol, args) if is_fn else Atom(symbol, args)

    if is_fn:
        base = build(xs)
        cur = leaf("r", ctx, (), Eq(sym.result, base, base))
        hyps = []
    else:
        base = build(xs)
        cur = leaf("ax", ctx, (base,), base)
        hyps = [base]
    for i in range(n):
        g, sort = sym.slots[i]
        args = ys[:i] + [z] + xs[i + 1:]
        phi = Eq(sym.result, base, build(args)) if is_fn else build(args)
        premise_eq = Bang(g, Eq(sort, Var(xs[i]), Var(ys[i])))
        d2 = leaf("ax", ctx, (premise_eq,), premise_eq)
        hyps = hyps + [premise_eq]
        cur = node("subst", [cur, d2], hyps, substitute(phi, Var(ys[i]), z),
                   formula=phi, var=(z, sort), **{"from": Var(xs[i]), "to": Var(ys[i])})
    return cur


# bounded backward search

def _match_term(pat, term, binding, pvars):
    if isinstance(pat, Var) and pat.name in pvars:
        got = binding.get(pat.name)
        if got is None:
            binding[pat.name] = term
            return True
        return got == term
    if isinstance(pat, Var):
        return term == pat
    if not isinstance(term, App) or term.fn != pat.fn or len(term.args) != len(pat.args):
        return False
    return all(_match_term(p, t, binding, pvars) for p, t in zip(pat.args, term.args))


def _match_formula(pat, phi, binding, pvars):
    if type(pat) is not type(phi):
        return False
    if isinstance(pat, Eq):
        return pat.sort == phi.sort and _match_term(pat.lhs, phi.lhs, binding, pvars) \
            and _match_term(pat.rhs, phi.rhs, binding, pvars)
    if isinstance(pat, Atom):
        return pat.pred == phi.pred and len(pat.args) == len(phi.args) and \
            all(_match_term(p, t, binding, pvars) for p, t in zip(pat.args, phi.args))
    if isinstance(pat, (Tensor, Lolli, With, Plus)):
        return _match_formula(pat.left, phi.left, binding, pvars) and \
            _match_formula(pat.right, phi.right, binding, pvars)
    if isinstance(pat, Bang):
        return pat.grade == phi.grade and _match_formula(pat.body, phi.body, binding, pvars)
    if isinstance(pat, (Forall, Exists)):
        return alpha_eq(pat, phi) if not (free_vars(pat) & pvars) else False
    return True


def _axiom_instances(theory: Theory, goal: Sequent):
    for name, ax in theory.axioms.items():
        pvars = {v for v, _ in ax.ctx}
        binding = {}
        if not _match_formula(ax.concl, goal.concl, binding, pvars):
            continue
        if len(ax.hyps) != len(goal.hyps):
            continue
        for perm in itertools.permutations(goal.hyps):
            b = dict(binding)
            if all(_match_formula(h, g, b, pvars) for h, g in zip(ax.hyps, perm)):
                ctx = dict(goal.ctx)
                ok = True
                for v, sort in ax.ctx:
                    if v not in b:
                        pick = next((n for n, s in goal.ctx if s == sort), None)
                        if pick is None:
                            ok = False
                            break
                        b[v] = Var(pick)
                if ok:
                    yield name, b
                break


def search_bounded(theory: Theory, goal: Sequent, depth: int, cap: int = 8):
    """Depth-bounded backward proof search.  None is not a refutation."""
    if depth > cap:
        raise ValueError(f"depth {depth} exceeds the configured cap {cap}")
    sig = theory.sig
    ring = sig.ring
    failed = set()

    def key(seq, d):
        return (tuple(sorted(map(repr, _ms(seq.hyps).elements()))), alpha_key(seq.concl), d)

    def leaves(seq):
        c, hs = seq.concl, seq.hyps
        if not hs and isinstance(c, One):
            yield Derivation("one-r", seq)
        if not hs and isinstance(c, Eq) and c.lhs == c.rhs:
            yield Derivation("r", seq)
        if len(hs) == 1 and alpha_eq(hs[0], c):
            yield Derivation("ax", seq)
        if isinstance(c, Top) and sig.allows("additive"):
            yield Derivation("top-r", seq)
        if sig.allows("additive") and _minus(hs, Zero()) is not None:
            yield Derivation("zero-l", seq)
        for name, b in _axiom_instances(theory, seq):
            inst = {v: t for v, t in b.items() if t != Var(v)}
            yield Derivation("axiom", seq, [], {"axiom": name, "inst": inst})

    def sub(seq, hyps=None, concl=None):
        return Sequent(seq.ctx, tuple(seq.hyps if hyps is None else hyps),
                       seq.concl if concl is None else concl)

    def steps(seq):
        hs, c = list(seq.hyps), seq.concl
        for h in _distinct(hs, lambda h: True):
            rest = _minus(hs, h)
            if isinstance(h, One):
                yield "one-l", [sub(seq, rest)], {}
            elif isinstance(h, Tensor):
                yield "tensor-l", [sub(seq, rest + [h.left, h.right])], {"principal": h}
            elif isinstance(h, Bang) and h.grade == ring.one:
                yield "der", [sub(seq, rest + [h.body])], {"principal": h}
            elif isinstance(h, Bang) and h.grade == ring.zero:
                yield "w", [sub(seq, rest)], {"principal": h}
            elif isinstance(h, Eq):
                yield "w-eq", [sub(seq, rest)], {"principal": h}
        if isinstance(c, Eq) and c.lhs != c.rhs:
            yield "s", [sub(seq, concl=Eq(c.sort, c.rhs, c.lhs))], {}
        if isinstance(c, Lolli) and sig.allows("multiplicative"):
            yield "lolli-r", [sub(seq, hs + [c.left], c.right)], {}
        if isinstance(c, With) and sig.allows("additive"):
            yield "with-r", [sub(seq, concl=c.left), sub(seq, concl=c.right)], {}
        if isinstance(c, Plus) and sig.allows("additive"):
            yield "plus-r1", [sub(seq, concl=c.left)], {}
            yield "plus-r2", [sub(seq, concl=c.right)], {}
        if isinstance(c, Bang) and ring.kind == "nonneg-real" and c.grade.value != 0 \
                and all(isinstance(h, Bang) for h in hs):
            pre = [Bang(ring.grade(h.grade.value / c.grade.value), h.body) for h in hs]
            yield "pro", [sub(seq, pre, c.body)], {}
        if isinstance(c, Tensor) and len(hs) <= 8:
            seen = set()
            for mask in range(1 << len(hs)):
                left = [h for i, h in enumerate(hs) if mask >> i & 1]
                right = [h for i, h in enumerate(hs) if not mask >> i & 1]
                k = tuple(sorted(map(repr, _ms(left).elements())))
                if k in seen:
                    continue
                seen.add(k)
                yield "tensor-r", [sub(seq, left, c.left), sub(seq, right, c.right)], {}

    def prove(seq, d):
        if d <= 0:
            return None
        k = key(seq, d)
        if k in failed:
            return None
        for cand in leaves(seq):
            if Checker(sig, theory.axioms).check_node(cand) is None:
                return cand
        if d > 1:
            for name, prems, params in steps(seq):
                subs = []
                for p in prems:
                    got = prove(p, d - 1)
                    if got is None:
                        break
                    subs.append(got)
                else:
                    cand = Derivation(name, seq, subs, params)
                    if Checker(sig, theory.axioms).check_node(cand) is None:
                        return cand
        failed.add(k)
        return None

    for d in range(1, depth + 1):
        got = prove(goal, d)
        if got is not None:
            return got
    return None


# random derivations, for soundness and cut tests

class RandomDerivations:
    """Forward random rule application over a pool of checked derivations."""

    def __init__(self, theory: Theory, ctx, seed: int = 0, grades=None, term_depth: int = 2):
        self.th = theory
        self.sig = theory.sig
        self.ctx = tuple(ctx)
        self.rng = random.Random(seed)
        ring = self.sig.ring
        if grades is None:
            grades = [ring.zero, ring.one] + list(self.sig.grades())
            if ring.kind == "nonneg-real":
                grades += [ring.grade(2), ring.grade(HALF)]
            elif ring.kind in ("nat", "nat-inf"):
                grades += [ring.grade(2)]
        self.grades = list(dict.fromkeys(grades))
        self.term_depth = term_depth
        self.pool = []
        self.checker = Checker(self.sig, theory.axioms)

    # syntax

    def term(self, sort, depth=None):
        depth = self.term_depth if depth is None else depth
        vars_ = [Var(n) for n, s in self.ctx if s == sort]
        fns = [f for f in self.sig.functions.values() if f.result == sort]
        consts = [f for f in fns if not f.slots]
        choices = vars_ + [App(f.name) for f in consts]
        if depth > 1 and fns and self.rng.random() < 0.4:
            f = self.rng.choice(fns)
            return App(f.name, tuple(self.term(s, depth - 1) for _, s in f.slots))
        if not choices:
            f = self.rng.choice(fns)
            return App(f.name, tuple(self.term(s, depth - 1) for _, s in f.slots))
        return self.rng.choice(choices)

    def atom(self):
        sorts = sorted({s for _, s in self.ctx})
        preds = list(self.sig.predicates.values())
        if preds and self.rng.random() < 0.3:
            p = self.rng.choice(preds)
            return Atom(p.name, tuple(self.term(s) for _, s in p.slots))
        sort = self.rng.choice(sorts)
        return Eq(sort, self.term(sort), self.term(sort))

    def formula(self, depth=2):
        r = self.rng.random()
        if depth <= 1 or r < 0.5:
            return One() if r < 0.05 else self.atom()
        if r < 0.75:
            return Tensor(self.formula(depth - 1), self.formula(depth - 1))
        return Bang(self.rng.choice(self.grades), self.formula(depth - 1))

    # leaves

    def _ok(self, d):
        m = self.checker.check_node(d)
        if m is not None:
            raise AssertionError(f"generator built a bad {d.rule} node: {m}")
        return d

    def leaf(self):
        r = self.rng.random()
        if r < 0.35 and self.th.axioms:
            name = self.rng.choice(sorted(self.th.axioms))
            ax = self.th.axioms[name]
            inst = {v: self.term(s) for v, s in ax.ctx}
            seq = Sequent(self.ctx, tuple(subst_many(h, inst) for h in ax.hyps), subst_many(ax.concl, inst))
            return self._ok(Derivation("axiom", seq, [], {"axiom": name, "inst": inst}))
        if r < 0.55:
            sort = self.rng.choice(sorted({s for _, s in self.ctx}))
            t = self.term(sort)
            return self._ok(leaf("r", self.ctx, (), Eq(sort, t, t)))
        if r < 0.6:
            return self._ok(leaf("one-r", self.ctx, (), One()))
        phi = self.formula()
        return self._ok(leaf("ax", self.ctx, (phi,), phi))

    # steps

    def _pick(self, pred=lambda d: True):
        cands = [d for d in self.pool if pred(d)]
        return self.rng.choice(cands) if cands else None

    def step(self):
        rng = self.rng
        ring = self.sig.ring
        kind = rng.choice(["tensor-r", "one-l", "w-eq", "w", "der", "tensor-l", "pro", "decr",
                           "s", "t", "cut", "subst", "subst", "c"])
        d = self._pick()
        if d is None:
            return None
        seq = d.conclusion
        hs, c = list(seq.hyps), seq.concl
        if kind == "tensor-r":
            e = self._pick()
            return node("tensor-r", [d, e], hs + list(e.conclusion.hyps), Tensor(c, e.conclusion.concl))
        if kind == "one-l":
            return node("one-l", [d], hs + [One()], c)
        if kind == "w-eq":
            return node("w-eq", [d], hs + [self.atom() if not self.sig.predicates else
                                          Eq(self.ctx[0][1], self.term(self.ctx[0][1]), self.term(self.ctx[0][1]))], c)
        if kind == "w":
            return node("w", [d], hs + [Bang(ring.zero, self.formula())], c)
        if kind == "der" and hs:
            i = rng.randrange(len(hs))
            return node("der", [d], hs[:i] + [Bang(ring.one, hs[i])] + hs[i + 1:], c)
        if kind == "tensor-l" and len(hs) >= 2:
            i, j = rng.sample(range(len(hs)), 2)
            rest = [h for k, h in enumerate(hs) if k not in (i, j)]
            return node("tensor-l", [d], rest + [Tensor(hs[i], hs[j])], c)
        if kind == "pro" and all(isinstance(h, Bang) for h in hs):
            r = rng.choice(self.grades)
            return node("pro", [d], [Bang(r * h.grade, h.body) for h in hs], Bang(r, c))
        if kind == "decr" and isinstance(c, Bang) and ring.kind == "nonneg-real":
            r = ring.grade(c.grade.value * rng.choice([0, HALF, 1]))
            return node("decr", [d], hs, Bang(r, c.body))
        if kind == "s" and isinstance(c, Eq):
            return node("s", [d], hs, Eq(c.sort, c.rhs, c.lhs))
        if kind == "t" and isinstance(c, Eq):
            e = self._pick(lambda x: isinstance(x.conclusion.concl, Eq) and
                           x.conclusion.concl.sort == c.sort and x.conclusion.concl.lhs == c.rhs)
            if e is None:
                e = self._ok(leaf("r", self.ctx, (), Eq(c.sort, c.rhs, c.rhs)))
            e2 = e.conclusion.concl
            return node("t", [d, e], hs + list(e.conclusion.hyps), Eq(c.sort, c.lhs, e2.rhs))
        if kind == "cut":
            e = self._pick(lambda x: _minus(x.conclusion.hyps, c) is not None)
            if e is None:
                return None
            rest = _minus(e.conclusion.hyps, c)
            return node("cut", [d, e], hs + rest, e.conclusion.concl)
        if kind == "c":
            bangs = [h for h in hs if isinstance(h, Bang)]
            for i, j in itertools.combinations(range(len(bangs)), 2):
                if alpha_eq(bangs[i].body, bangs[j].body):
                    rest = _minus(_minus(hs, bangs[i]), bangs[j])
                    merged = Bang(bangs[i].grade + bangs[j].grade, bangs[i].body)
                    return node("c", [d], rest + [merged], c)
            return None
        if kind == "subst":
            return self._subst(d)
        return None

    def _subst(self, d):
        rng = self.rng
        seq = d.conclusion
        eqs = self._pick(lambda x: isinstance(x.conclusion.concl, Eq) and not x.conclusion.hyps)
        z = _fresh_name("z", {n for n, _ in self.ctx} | set(self.sig.functions))
        if eqs is not None and rng.random() < 0.5:
            e = eqs.conclusion.concl
            t, u, sort = e.lhs, e.rhs, e.sort
        else:
            sort = self.rng.choice(sorted({s for _, s in self.ctx}))
            t, u = self.term(sort, 1), self.term(sort)
            eqs = None
        phi = _abstract(seq.concl, t, z, rng)
        g = grade_formula(self.sig, phi, z)
        prem = Bang(g, Eq(sort, t, u))
        if eqs is not None:
            d2 = node("pro", [eqs], [], prem)
        else:
            d2 = self._ok(leaf("ax", self.ctx, (prem,), prem))
        return node("subst", [d, d2], list(seq.hyps) + list(d2.conclusion.hyps),
                    substitute(phi, u, z), formula=phi, var=(z, sort), **{"from": t, "to": u})

    def generate(self, n: int, steps: int = 4, max_hyps: int = 4):
        out = []
        while len(out) < n:
            self.pool = [self.leaf() for _ in range(4)]
            d = None
            for _ in range(steps * 3):
                if len([x for x in self.pool if x.premises]) >= steps:
                    break
                cand = self.step()
                if cand is None or len(cand.conclusion.hyps) > max_hyps:
                    continue
                self._ok(cand)
                self.pool.append(cand)
                d = cand
            if d is None:
                d = self.pool[-1]
            out.append(d)
        return out


def _abstract(phi, t, z, rng):
    """phi with a random subset of the occurrences of term t replaced by z."""
    def term(s):
        if s == t and rng.random() < 0.7:
            return Var(z)
        if isinstance(s, App):
            return App(s.fn, tuple(term(a) for a in s.args))
        return s

    def walk(f):
        if isinstance(f, Eq):
            return Eq(f.sort, term(f.lhs), term(f.rhs))
        if isinstance(f, Atom):
            return Atom(f.pred, tuple(term(a) for a in f.args))
        if isinstance(f, (Tensor, Lolli, With, Plus)):
            return type(f)(walk(f.left), walk(f.right))
        if isinstance(f, Bang):
            return Bang(f.grade, walk(f.body))
        return f
    return walk(phi)


def random_derivations(theory: Theory, ctx, n: int, seed: int = 0, steps: int = 4):
    return RandomDerivations(theory, ctx, seed).generate(n, steps)


# derivation files

def _param_sexpr(key, val) -> str:
    if key == "var":
        return f"(var {val[0]} {val[1]})"
    if key == "eigen":
        return f"(eigen {val[0]} {val[1]})"
    if key == "inst":
        return "(inst" + "".join(f" ({v} {to_sexpr(t)})" for v, t in sorted(val.items())) + ")"
    if key == "split":
        return "(split (" + " ".join(to_sexpr(h) for h in val) + "))"
    if key in ("r", "s"):
        return f"({key} {val})"
    if key == "axiom":
        return f"(axiom {val})"
    return f"({key} {to_sexpr(val)})"


_PARAM_ORDER = ("axiom", "inst", "principal", "formula", "var", "from", "to", "term", "eigen",
                "r", "s", "cut-formula", "split")


def derivation_sexpr(d: Derivation, indent: int = 0) -> str:
    pad = "  " * indent
    parts = [pad + "(" + d.rule]
    for k in _PARAM_ORDER:
        if k in d.params:
            parts.append(pad + "  " + _param_sexpr(k, d.params[k]))
    for p in d.premises:
        parts.append(pad + "  (premise\n" + derivation_sexpr(p, indent + 2) + ")")
    parts.append(pad + "  (conclusion " + sequent_sexpr(d.conclusion) + "))")
    return "\n".join(parts)


def derivation_file(d: Derivation, name: str, theory_name: str, header: str = "") -> str:
    lines = [f"; {ln}" if ln else ";" for ln in header.splitlines()]
    lines.append(f"(derivation {name}")
    lines.append(f"  (theory {theory_name})")
    lines.append(f"  {ctx_sexpr(d.conclusion.ctx)}")
    lines.append(derivation_sexpr(d, 1) + ")")
    return "\n".join(lines) + "\n"


def _parse_node(sig, node, ctx):
    sexpr.expect_list(node, what="derivation node")
    rule_name = node.head
    if rule_name is None:
        sexpr.fail(node, "derivation node must start with a rule name")
    params, premises_src, concl = {}, [], None
    for item in node.items[1:]:
        sexpr.expect_list(item, what="node field")
        h = item.head
        args = item.items[1:]
        if h == "premise":
            if len(args) != 1:
                sexpr.fail(item, "premise holds one node")
            premises_src.append(args[0])
        elif h == "conclusion":
            concl = parse_sequent(sig, args[0], ctx)
        elif h in ("principal", "formula", "cut-formula"):
            params[h] = parse_formula(sig, args[0])
        elif h in ("from", "to", "term"):
            params[h] = parse_term(sig, args[0])
        elif h in ("var", "eigen"):
            if len(args) != 2:
                sexpr.fail(item, f"{h} is ({h} x S)")
            params[h] = (str(sexpr.expect_sym(args[0])), str(sexpr.expect_sym(args[1])))
        elif h in ("r", "s"):
            params[h] = parse_grade(sig, args[0])
        elif h == "axiom":
            params[h] = str(sexpr.expect_sym(args[0]))
        elif h == "inst":
            inst = {}
            for pair in args:
                sexpr.expect_list(pair, what="(x T)")
                inst[str(sexpr.expect_sym(pair[0]))] = parse_term(sig, pair[1])
            params[h] = inst
        elif h == "split":
            params[h] = tuple(parse_formula(sig, f) for f in sexpr.expect_list(args[0]))
        else:
            sexpr.fail(item, f"unknown node field {h}")
    if concl is None:
        sexpr.fail(node, "node lacks (conclusion ...)")
    pctx = ctx
    if rule_name in ("forall-r", "exists-l") and "eigen" in params:
        pctx = tuple(ctx) + (params["eigen"],)
    premises = [_parse_node(sig, p, pctx) for p in premises_src]
    return Derivation(str(rule_name), concl, premises, params)


@dataclass
class DerivationFile:
    name: str
    theory_name: str
    derivation: Derivation


def parse_derivation(sig: Signature, text: str) -> DerivationFile:
    top = sexpr.read_one(text)
    sexpr.expect_list(top, "derivation", "derivation")
    if len(top) != 5:
        sexpr.fail(top, "derivation is (derivation NAME (theory T) (ctx ...) NODE)")
    name = str(sexpr.expect_sym(top[1]))
    th = sexpr.expect_list(top[2], "theory")
    ctx = parse_ctx(top[3])
    d = _parse_node(sig, top[4], ctx)
    return DerivationFile(name, str(sexpr.expect_sym(th[1])), d)


def peek_theory_name(text: str) -> str:
    top = sexpr.read_one(text)
    sexpr.expect_list(top, "derivation", "derivation")
    return str(sexpr.expect_sym(sexpr.expect_list(top[2], "theory")[1]))
