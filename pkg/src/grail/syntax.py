"""Graded signatures, terms, formulas, sequents and the grade function gr.

Formulas are immutable dataclasses.  Equality used by the checker is
structural up to renaming of bound variables (see ``alpha_key``).
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

from . import sexpr
from .errors import ParseError, SortError, UnsupportedFragment
from .semiring import Grade, Semiring
from .sexpr import SList, Sym

FRAGMENTS = ("core", "multiplicative", "additive", "first-order")
KEYWORDS = {"one", "top", "zero", "bot", "tensor", "bang", "eq", "lolli",
            "with", "plus", "forall", "exists"}


# terms

@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class App:
    fn: str
    args: tuple = ()

    def __str__(self):
        return to_sexpr(self)


Term = Var | App


# formulas

@dataclass(frozen=True)
class One:
    def __str__(self):
        return "one"


@dataclass(frozen=True)
class Top:
    def __str__(self):
        return "top"


@dataclass(frozen=True)
class Zero:
    def __str__(self):
        return "zero"


@dataclass(frozen=True)
class Bot:
    def __str__(self):
        return "bot"


@dataclass(frozen=True)
class Tensor:
    left: object
    right: object


@dataclass(frozen=True)
class Lolli:
    left: object
    right: object


@dataclass(frozen=True)
class With:
    left: object
    right: object


@dataclass(frozen=True)
class Plus:
    left: object
    right: object


@dataclass(frozen=True)
class Bang:
    grade: Grade
    body: object


@dataclass(frozen=True)
class Eq:
    sort: str
    lhs: object
    rhs: object


@dataclass(frozen=True)
class Atom:
    pred: str
    args: tuple = ()


@dataclass(frozen=True)
class Forall:
    var: str
    sort: str
    body: object


@dataclass(frozen=True)
class Exists:
    var: str
    sort: str
    body: object


BINARY = {Tensor: "tensor", Lolli: "lolli", With: "with", Plus: "plus"}
CONSTANTS = {One: "one", Top: "top", Zero: "zero", Bot: "bot"}
QUANTIFIERS = {Forall: "forall", Exists: "exists"}

for _cls in (Tensor, Lolli, With, Plus, Bang, Eq, Atom, Forall, Exists):
    _cls.__str__ = lambda self: to_sexpr(self)


def fragment_of(phi) -> str:
    """Smallest fragment containing every connective of phi."""
    need = 0
    stack = [phi]
    while stack:
        f = stack.pop()
        if isinstance(f, Lolli):
            need = max(need, 1)
        elif isinstance(f, (With, Plus, Top, Zero)):
            need = max(need, 2)
        elif isinstance(f, (Forall, Exists)):
            need = max(need, 3)
        elif isinstance(f, Bot):
            need = max(need, 1)
        if isinstance(f, tuple(BINARY)):
            stack += [f.left, f.right]
        elif isinstance(f, (Bang, Forall, Exists)):
            stack.append(f.body)
    return FRAGMENTS[need]


def uses_bot(phi) -> bool:
    if isinstance(phi, Bot):
        return True
    if isinstance(phi, tuple(BINARY)):
        return uses_bot(phi.left) or uses_bot(phi.right)
    if isinstance(phi, (Bang, Forall, Exists)):
        return uses_bot(phi.body)
    return False


# signatures

@dataclass(frozen=True)
class FnSym:
    name: str
    slots: tuple  # ((Grade, sort), ...)
    result: str

    @property
    def grades(self):
        return tuple(g for g, _ in self.slots)


@dataclass(frozen=True)
class PredSym:
    name: str
    slots: tuple

    @property
    def grades(self):
        return tuple(g for g, _ in self.slots)


@dataclass
class Signature:
    ring: Semiring
    sorts: tuple = ()
    functions: dict = field(default_factory=dict)
    predicates: dict = field(default_factory=dict)
    fragment: str = "core"
    classical: bool = False
    name: str = "anonymous"

    def allows(self, fragment: str) -> bool:
        return FRAGMENTS.index(fragment) <= FRAGMENTS.index(self.fragment)

    def is_constant(self, name: str) -> bool:
        f = self.functions.get(name)
        return f is not None and not f.slots

    def grades(self):
        """Every grade mentioned in an arity."""
        out = []
        for sym in list(self.functions.values()) + list(self.predicates.values()):
            for g, _ in sym.slots:
                if g not in out:
                    out.append(g)
        return out


@dataclass(frozen=True)
class Sequent:
    ctx: tuple  # ((name, sort), ...)
    hyps: tuple
    concl: object

    def __str__(self):
        return sequent_sexpr(self)


@dataclass
class Theory:
    sig: Signature
    axioms: dict  # name -> Sequent
    name: str = "anonymous"


# free variables and substitution

def term_vars(t) -> set:
    if isinstance(t, Var):
        return {t.name}
    out = set()
    for a in t.args:
        out |= term_vars(a)
    return out


def free_vars(phi) -> set:
    if isinstance(phi, Eq):
        return term_vars(phi.lhs) | term_vars(phi.rhs)
    if isinstance(phi, Atom):
        out = set()
        for a in phi.args:
            out |= term_vars(a)
        return out
    if isinstance(phi, tuple(BINARY)):
        return free_vars(phi.left) | free_vars(phi.right)
    if isinstance(phi, Bang):
        return free_vars(phi.body)
    if isinstance(phi, (Forall, Exists)):
        return free_vars(phi.body) - {phi.var}
    return set()


def subst_term(t, mapping: dict):
    if isinstance(t, Var):
        return mapping.get(t.name, t)
    return App(t.fn, tuple(subst_term(a, mapping) for a in t.args))


def _fresh(base: str, avoid: set) -> str:
    k = 1
    while f"{base}_{k}" in avoid:
        k += 1
    return f"{base}_{k}"


def subst_many(phi, mapping: dict):
    """Simultaneous capture-avoiding substitution of terms for variables."""
    mapping = {k: v for k, v in mapping.items() if not (isinstance(v, Var) and v.name == k)}
    if not mapping:
        return phi
    if isinstance(phi, Eq):
        return Eq(phi.sort, subst_term(phi.lhs, mapping), subst_term(phi.rhs, mapping))
    if isinstance(phi, Atom):
        return Atom(phi.pred, tuple(subst_term(a, mapping) for a in phi.args))
    if isinstance(phi, tuple(BINARY)):
        return type(phi)(subst_many(phi.left, mapping), subst_many(phi.right, mapping))
    if isinstance(phi, Bang):
        return Bang(phi.grade, subst_many(phi.body, mapping))
    if isinstance(phi, (Forall, Exists)):
        inner = {k: v for k, v in mapping.items() if k != phi.var}
        fv_body = free_vars(phi.body)
        inner = {k: v for k, v in inner.items() if k in fv_body}
        if not inner:
            return phi
        incoming = set()
        for v in inner.values():
            incoming |= term_vars(v)
        var, body = phi.var, phi.body
        if var in incoming:
            new = _fresh(var, incoming | fv_body | set(inner))
            body = subst_many(body, {var: Var(new)})
            var = new
        return type(phi)(var, phi.sort, subst_many(body, inner))
    return phi


def substitute(phi, t, x: str):
    """phi[t/x]."""
    return subst_many(phi, {x: t})


# alpha equivalence

def _term_key(t, env):
    if isinstance(t, Var):
        return ("b", env[t.name]) if t.name in env else ("v", t.name)
    return ("f", t.fn, tuple(_term_key(a, env) for a in t.args))


def alpha_key(phi, env=None, depth=0):
    """A hashable key equal for exactly the alpha-equivalent formulas."""
    env = env or {}
    if isinstance(phi, Eq):
        return ("eq", phi.sort, _term_key(phi.lhs, env), _term_key(phi.rhs, env))
    if isinstance(phi, Atom):
        return ("p", phi.pred, tuple(_term_key(a, env) for a in phi.args))
    if isinstance(phi, tuple(BINARY)):
        return (BINARY[type(phi)], alpha_key(phi.left, env, depth), alpha_key(phi.right, env, depth))
    if isinstance(phi, Bang):
        return ("bang", phi.grade, alpha_key(phi.body, env, depth))
    if isinstance(phi, (Forall, Exists)):
        inner = dict(env)
        inner[phi.var] = depth
        return (QUANTIFIERS[type(phi)], phi.sort, alpha_key(phi.body, inner, depth + 1))
    return (CONSTANTS[type(phi)],)


def alpha_eq(a, b) -> bool:
    return alpha_key(a) == alpha_key(b)


def hyp_counter(hyps) -> Counter:
    return Counter(alpha_key(h) for h in hyps)


# well-sortedness

def _ctx_dict(ctx) -> dict:
    out = {}
    for name, sort in ctx:
        if name in out:
            raise SortError(f"variable {name} declared twice in context")
        out[name] = sort
    return out


def check_ctx(sig: Signature, ctx):
    d = _ctx_dict(ctx)
    for name, sort in d.items():
        if sort not in sig.sorts:
            raise SortError(f"unknown sort {sort} for variable {name}")
        if name in sig.functions:
            raise SortError(f"variable {name} clashes with a function symbol")
    return d


def _sort_of(sig, env: dict, t) -> str:
    if isinstance(t, Var):
        if t.name not in env:
            raise SortError(f"unbound variable {t.name}")
        return env[t.name]
    f = sig.functions.get(t.fn)
    if f is None:
        raise SortError(f"unknown function symbol {t.fn}")
    if len(t.args) != len(f.slots):
        raise SortError(f"arity mismatch: {t.fn} takes {len(f.slots)} arguments, given {len(t.args)}")
    for i, (a, (_, sort)) in enumerate(zip(t.args, f.slots)):
        got = _sort_of(sig, env, a)
        if got != sort:
            raise SortError(f"sort mismatch in argument {i + 1} of {t.fn}: expected {sort}, found {got}")
    return f.result


def check_term(sig: Signature, ctx, t) -> str:
    """Sort of t in ctx, or SortError."""
    return _sort_of(sig, _ctx_dict(ctx), t)


def _check_formula(sig, env, phi):
    if isinstance(phi, (One,)):
        return
    if isinstance(phi, (Top, Zero)):
        if not sig.allows("additive"):
            raise UnsupportedFragment(f"{phi} needs the additive fragment")
        return
    if isinstance(phi, Bot):
        if not sig.classical:
            raise UnsupportedFragment("bot is only available in classical theories")
        return
    if isinstance(phi, Eq):
        if phi.sort not in sig.sorts:
            raise SortError(f"unknown sort {phi.sort}")
        for side in (phi.lhs, phi.rhs):
            got = _sort_of(sig, env, side)
            if got != phi.sort:
                raise SortError(f"equality at sort {phi.sort} relates a term of sort {got}")
        return
    if isinstance(phi, Atom):
        p = sig.predicates.get(phi.pred)
        if p is None:
            raise SortError(f"unknown predicate {phi.pred}")
        if len(phi.args) != len(p.slots):
            raise SortError(f"arity mismatch: {phi.pred} takes {len(p.slots)} arguments, given {len(phi.args)}")
        for i, (a, (_, sort)) in enumerate(zip(phi.args, p.slots)):
            got = _sort_of(sig, env, a)
            if got != sort:
                raise SortError(f"sort mismatch in argument {i + 1} of {phi.pred}: expected {sort}, found {got}")
        return
    if isinstance(phi, Bang):
        if phi.grade.ring != sig.ring:
            raise SortError(f"grade {phi.grade} is not in {sig.ring}")
        _check_formula(sig, env, phi.body)
        return
    if isinstance(phi, tuple(BINARY)):
        need = {Tensor: "core", Lolli: "multiplicative", With: "additive", Plus: "additive"}[type(phi)]
        if not sig.allows(need):
            raise UnsupportedFragment(f"{BINARY[type(phi)]} needs the {need} fragment")
        _check_formula(sig, env, phi.left)
        _check_formula(sig, env, phi.right)
        return
    if isinstance(phi, (Forall, Exists)):
        if not sig.allows("first-order"):
            raise UnsupportedFragment("quantifiers need the first-order fragment")
        if phi.sort not in sig.sorts:
            raise SortError(f"unknown sort {phi.sort}")
        if phi.var in sig.functions:
            raise SortError(f"bound variable {phi.var} clashes with a function symbol")
        inner = dict(env)
        inner[phi.var] = phi.sort
        _check_formula(sig, inner, phi.body)
        return
    raise SortError(f"not a formula: {phi!r}")


def check_formula(sig: Signature, ctx, phi):
    _check_formula(sig, _ctx_dict(ctx), phi)


def check_sequent(sig: Signature, seq: Sequent):
    env = check_ctx(sig, seq.ctx)
    for h in seq.hyps:
        _check_formula(sig, env, h)
    _check_formula(sig, env, seq.concl)


# grades

def grade_term(sig: Signature, t, x: str) -> Grade:
    """gr(t, x): the cost of substituting for x in t."""
    ring = sig.ring
    if isinstance(t, Var):
        return ring.one if t.name == x else ring.zero
    f = sig.functions[t.fn]
    acc = ring.zero
    for (g, _), a in zip(f.slots, t.args):
        acc = acc + g * grade_term(sig, a, x)
    return acc


def grade_formula(sig: Signature, phi, x: str) -> Grade:
    """gr(phi, x); the additive connectives need a semiring with joins."""
    ring = sig.ring
    if isinstance(phi, (One, Top, Zero, Bot)):
        return ring.zero
    if isinstance(phi, Eq):
        return grade_term(sig, phi.lhs, x) + grade_term(sig, phi.rhs, x)
    if isinstance(phi, Atom):
        p = sig.predicates[phi.pred]
        acc = ring.zero
        for (g, _), a in zip(p.slots, phi.args):
            acc = acc + g * grade_term(sig, a, x)
        return acc
    if isinstance(phi, (Tensor, Lolli)):
        return grade_formula(sig, phi.left, x) + grade_formula(sig, phi.right, x)
    if isinstance(phi, (With, Plus)):
        return ring.join(grade_formula(sig, phi.left, x), grade_formula(sig, phi.right, x))
    if isinstance(phi, Bang):
        return phi.grade * grade_formula(sig, phi.body, x)
    if isinstance(phi, (Forall, Exists)):
        return ring.zero if phi.var == x else grade_formula(sig, phi.body, x)
    raise SortError(f"not a formula: {phi!r}")


# printing

def to_sexpr(obj) -> str:
    if isinstance(obj, Var):
        return obj.name
    if isinstance(obj, App):
        if not obj.args:
            return obj.fn
        return "(" + obj.fn + " " + " ".join(to_sexpr(a) for a in obj.args) + ")"
    if type(obj) in CONSTANTS:
        return CONSTANTS[type(obj)]
    if isinstance(obj, tuple(BINARY)):
        return f"({BINARY[type(obj)]} {to_sexpr(obj.left)} {to_sexpr(obj.right)})"
    if isinstance(obj, Bang):
        return f"(bang {obj.grade} {to_sexpr(obj.body)})"
    if isinstance(obj, Eq):
        return f"(eq {obj.sort} {to_sexpr(obj.lhs)} {to_sexpr(obj.rhs)})"
    if isinstance(obj, Atom):
        if not obj.args:
            return f"({obj.pred})"
        return "(" + obj.pred + " " + " ".join(to_sexpr(a) for a in obj.args) + ")"
    if isinstance(obj, (Forall, Exists)):
        return f"({QUANTIFIERS[type(obj)]} ({obj.var} {obj.sort}) {to_sexpr(obj.body)})"
    raise TypeError(f"cannot print {obj!r}")


def ctx_sexpr(ctx) -> str:
    return "(ctx" + "".join(f" ({n} {s})" for n, s in ctx) + ")"


def sequent_sexpr(seq: Sequent) -> str:
    return "(seq (" + " ".join(to_sexpr(h) for h in seq.hyps) + ") " + to_sexpr(seq.concl) + ")"


def theory_sexpr(th: Theory) -> str:
    sig = th.sig
    lines = [f"(theory {th.name}",
             f"  (semiring {sig.ring.kind})",
             f"  (fragment {sig.fragment})"]
    if sig.classical:
        lines.append("  (classical)")
    for s in sig.sorts:
        lines.append(f"  (sort {s})")
    for f in sig.functions.values():
        slots = " ".join(f"({g} {s})" for g, s in f.slots)
        lines.append(f"  (fn {f.name} ({slots}) {f.result})")
    for p in sig.predicates.values():
        slots = " ".join(f"({g} {s})" for g, s in p.slots)
        lines.append(f"  (pred {p.name} ({slots}))")
    for name, ax in th.axioms.items():
        lines.append(f"  (axiom {name} {ctx_sexpr(ax.ctx)}")
        lines.append(f"    {sequent_sexpr(ax)})")
    lines[-1] += ")"
    return "\n".join(lines) + "\n"


# parsing

def parse_term(sig: Signature, node):
    if isinstance(node, Sym):
        if sig.is_constant(node):
            return App(str(node), ())
        if node in sig.functions:
            sexpr.fail(node, f"function {node} needs arguments")
        return Var(str(node))
    sexpr.expect_list(node, what="term")
    if not node.items or node.head is None:
        sexpr.fail(node, "malformed term")
    name = node.head
    if name not in sig.functions:
        sexpr.fail(node, f"unknown function symbol {name}")
    return App(name, tuple(parse_term(sig, a) for a in node.items[1:]))


def parse_grade(sig: Signature, node) -> Grade:
    sym = sexpr.expect_sym(node, "grade literal")
    return sig.ring.parse(str(sym), sym.line, sym.col)


def parse_formula(sig: Signature, node):
    if isinstance(node, Sym):
        word = str(node)
        if word == "one":
            return One()
        if word == "top":
            return Top()
        if word == "zero":
            return Zero()
        if word == "bot":
            return Bot()
        if word in sig.predicates and not sig.predicates[word].slots:
            return Atom(word, ())
        sexpr.fail(node, f"expected a formula, found {word}")
    sexpr.expect_list(node, what="formula")
    head = node.head
    args = node.items[1:]

    def arity(n):
        if len(args) != n:
            sexpr.fail(node, f"{head} takes {n} arguments, given {len(args)}")

    if head in ("tensor", "lolli", "with", "plus"):
        arity(2)
        cls = {"tensor": Tensor, "lolli": Lolli, "with": With, "plus": Plus}[head]
        return cls(parse_formula(sig, args[0]), parse_formula(sig, args[1]))
    if head == "bang":
        arity(2)
        return Bang(parse_grade(sig, args[0]), parse_formula(sig, args[1]))
    if head == "eq":
        arity(3)
        sort = sexpr.expect_sym(args[0], "sort")
        return Eq(str(sort), parse_term(sig, args[1]), parse_term(sig, args[2]))
    if head in ("forall", "exists"):
        arity(2)
        binder = sexpr.expect_list(args[0], what="binder (x S)")
        if len(binder) != 2:
            sexpr.fail(binder, "binder must be (x S)")
        var = sexpr.expect_sym(binder[0], "variable")
        sort = sexpr.expect_sym(binder[1], "sort")
        cls = Forall if head == "forall" else Exists
        return cls(str(var), str(sort), parse_formula(sig, args[1]))
    if head in sig.predicates:
        return Atom(head, tuple(parse_term(sig, a) for a in args))
    sexpr.fail(node, f"unknown connective or predicate {head}")


def parse_ctx(node) -> tuple:
    sexpr.expect_list(node, "ctx", "context")
    out = []
    for item in node.items[1:]:
        sexpr.expect_list(item, what="(x S)")
        if len(item) != 2:
            sexpr.fail(item, "context entries are (x S)")
        out.append((str(sexpr.expect_sym(item[0])), str(sexpr.expect_sym(item[1]))))
    return tuple(out)


def parse_sequent(sig: Signature, node, ctx=()) -> Sequent:
    sexpr.expect_list(node, "seq", "sequent")
    if len(node) != 3:
        sexpr.fail(node, "sequent is (seq (HYP ...) CONCL)")
    hyps = sexpr.expect_list(node[1], what="hypothesis list")
    return Sequent(tuple(ctx), tuple(parse_formula(sig, h) for h in hyps),
                   parse_formula(sig, node[2]))


def _slots(sig, node):
    sexpr.expect_list(node, what="slot list")
    out = []
    for slot in node:
        sexpr.expect_list(slot, what="(grade sort)")
        if len(slot) != 2:
            sexpr.fail(slot, "slots are (grade sort)")
        g = parse_grade(sig, slot[0])
        sort = str(sexpr.expect_sym(slot[1], "sort"))
        if sort not in sig.sorts:
            sexpr.fail(slot[1], f"unknown sort {sort}")
        out.append((g, sort))
    return tuple(out)


def parse_theory(text: str) -> Theory:
    """Parse and validate a theory file."""
    node = sexpr.read_one(text)
    sexpr.expect_list(node, "theory", "theory")
    if len(node) < 2:
        sexpr.fail(node, "theory needs a name")
    name = str(sexpr.expect_sym(node[1], "theory name"))
    ring, fragment, classical = None, "core", False
    decls = node.items[2:]
    for d in decls:
        sexpr.expect_list(d, what="declaration")
        if d.head == "semiring":
            try:
                ring = Semiring(str(sexpr.expect_sym(d[1])))
            except Exception as exc:
                sexpr.fail(d, str(exc))
        elif d.head == "fragment":
            fragment = str(sexpr.expect_sym(d[1]))
            if fragment not in FRAGMENTS:
                sexpr.fail(d, f"unknown fragment {fragment}")
        elif d.head == "classical":
            classical = True
    if ring is None:
        sexpr.fail(node, "theory must declare (semiring ...)")
    if FRAGMENTS.index(fragment) >= 2 and not ring.joins:
        sexpr.fail(node, f"the {fragment} fragment needs binary joins, which {ring.kind} lacks")
    sig = Signature(ring=ring, fragment=fragment, classical=classical, name=name)
    sorts, axioms = [], {}
    for d in decls:
        head = d.head
        if head in ("semiring", "fragment", "classical"):
            continue
        if head == "sort":
            s = str(sexpr.expect_sym(d[1], "sort"))
            if s in sorts:
                sexpr.fail(d, f"sort {s} declared twice")
            sorts.append(s)
            sig.sorts = tuple(sorts)
        elif head == "fn":
            if len(d) != 4:
                sexpr.fail(d, "fn is (fn NAME (SLOTS) SORT)")
            fname = str(sexpr.expect_sym(d[1]))
            if fname in sig.functions:
                sexpr.fail(d, f"function {fname} declared twice")
            result = str(sexpr.expect_sym(d[3], "sort"))
            if result not in sig.sorts:
                sexpr.fail(d[3], f"unknown sort {result}")
            sig.functions[fname] = FnSym(fname, _slots(sig, d[2]), result)
        elif head == "pred":
            if len(d) != 3:
                sexpr.fail(d, "pred is (pred NAME (SLOTS))")
            pname = str(sexpr.expect_sym(d[1]))
            if pname in KEYWORDS:
                sexpr.fail(d[1], f"{pname} is reserved")
            if pname in sig.predicates:
                sexpr.fail(d, f"predicate {pname} declared twice")
            sig.predicates[pname] = PredSym(pname, _slots(sig, d[2]))
        elif head == "axiom":
            if len(d) != 4:
                sexpr.fail(d, "axiom is (axiom NAME (ctx ...) (seq ...))")
            aname = str(sexpr.expect_sym(d[1]))
            if aname in axioms:
                sexpr.fail(d, f"axiom {aname} declared twice")
            ctx = parse_ctx(d[2])
            seq = parse_sequent(sig, d[3], ctx)
            try:
                check_sequent(sig, seq)
            except (SortError, UnsupportedFragment) as exc:
                sexpr.fail(d, f"axiom {aname}: {exc}")
            axioms[aname] = seq
        else:
            sexpr.fail(d, f"unknown declaration {head}")
    return Theory(sig, axioms, name)


def load_theory(path) -> Theory:
    with open(path, encoding="utf-8") as fh:
        return parse_theory(fh.read())


def parse_formula_text(sig: Signature, text: str):
    return parse_formula(sig, sexpr.read_one(text))


def parse_term_text(sig: Signature, text: str):
    return parse_term(sig, sexpr.read_one(text))


def infer_ctx(sig: Signature, phi, declared=()) -> tuple:
    """Guess a context for the free variables of phi from where they occur."""
    sorts = dict(declared)

    def see_term(t, sort):
        if isinstance(t, Var):
            if t.name in bound:
                return
            old = sorts.get(t.name)
            if old is not None and old != sort:
                raise SortError(f"variable {t.name} used at sorts {old} and {sort}")
            sorts[t.name] = sort
            return
        f = sig.functions.get(t.fn)
        if f is None:
            raise SortError(f"unknown function symbol {t.fn}")
        for a, (_, s) in zip(t.args, f.slots):
            see_term(a, s)

    bound: set = set()

    def see(f):
        if isinstance(f, Eq):
            see_term(f.lhs, f.sort)
            see_term(f.rhs, f.sort)
        elif isinstance(f, Atom):
            p = sig.predicates.get(f.pred)
            if p is None:
                raise SortError(f"unknown predicate {f.pred}")
            for a, (_, s) in zip(f.args, p.slots):
                see_term(a, s)
        elif isinstance(f, tuple(BINARY)):
            see(f.left)
            see(f.right)
        elif isinstance(f, Bang):
            see(f.body)
        elif isinstance(f, (Forall, Exists)):
            was = f.var in bound
            bound.add(f.var)
            see(f.body)
            if not was:
                bound.discard(f.var)

    see(phi)
    order = [n for n, _ in declared] + sorted(n for n in sorts if n not in dict(declared))
    return tuple((n, sorts[n]) for n in order)


def term_depth(t) -> int:
    if isinstance(t, Var) or not t.args:
        return 1
    return 1 + max(term_depth(a) for a in t.args)


def formula_depth(phi) -> int:
    if type(phi) in CONSTANTS:
        return 1
    if isinstance(phi, Eq):
        return 1 + max(term_depth(phi.lhs), term_depth(phi.rhs))
    if isinstance(phi, Atom):
        return 1 + max((term_depth(a) for a in phi.args), default=0)
    if isinstance(phi, tuple(BINARY)):
        return 1 + max(formula_depth(phi.left), formula_depth(phi.right))
    return 1 + formula_depth(phi.body)
