"""Finite graded doctrines and their law suites.

Two families are provided.  ``QuantaleDoctrine`` has fibers [0,inf]^A ordered
by reverse numeric order, with pointwise addition as tensor and scaling as the
graded modality.  ``KripkeDoctrine`` has fibers the up-closed subsets of
A x W for a finite ordered monoid W, with a lax action of the grades on W.

Fiber elements are numpy arrays whose trailing axes index the carrier (and W),
so every operation also works on a batch of elements at once.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import kernels
from .errors import GrailError, UnsupportedFragment
from .semiring import INF, Grade, Semiring

GRID = (0.0, 0.25, 0.5, 1.0, 2.0, math.inf)
DEFAULT_CAP = 10 ** 6


# finite sets and maps

@dataclass(frozen=True)
class FinSet:
    """A finite set presented as a product of labelled factors."""
    factors: tuple = ()

    @classmethod
    def named(cls, labels) -> "FinSet":
        labels = tuple(str(x) for x in labels)
        if len(set(labels)) != len(labels):
            raise GrailError("finite set labels must be distinct")
        return cls((labels,))

    @classmethod
    def of_size(cls, n: int, prefix: str = "a") -> "FinSet":
        return cls.named(f"{prefix}{i}" for i in range(n))

    @property
    def shape(self):
        return tuple(len(f) for f in self.factors)

    @property
    def size(self) -> int:
        return int(np.prod(self.shape, dtype=np.int64)) if self.factors else 1

    def __mul__(self, other: "FinSet") -> "FinSet":
        return FinSet(self.factors + other.factors)

    def power(self, n: int) -> "FinSet":
        return FinSet(self.factors * n)

    def elements(self):
        return list(itertools.product(*self.factors))

    def label(self, i: int):
        idx = np.unravel_index(i, self.shape) if self.factors else ()
        return tuple(f[j] for f, j in zip(self.factors, idx))


TERMINAL = FinSet(())


@dataclass(frozen=True, eq=False)
class FinMap:
    dom: FinSet
    cod: FinSet
    table: np.ndarray  # flat index in cod for each flat index in dom

    def __post_init__(self):
        t = np.asarray(self.table, dtype=np.int64).reshape(-1)
        if t.shape[0] != self.dom.size or (t.size and (t.min() < 0 or t.max() >= self.cod.size)):
            raise GrailError("map table does not fit its domain/codomain")
        object.__setattr__(self, "table", t)

    def __eq__(self, other):
        return isinstance(other, FinMap) and self.dom == other.dom and \
            self.cod == other.cod and np.array_equal(self.table, other.table)

    def __hash__(self):
        return hash((self.dom, self.cod, self.table.tobytes()))

    def __call__(self, i: int) -> int:
        return int(self.table[i])

    @classmethod
    def identity(cls, A: FinSet) -> "FinMap":
        return cls(A, A, np.arange(A.size))

    @classmethod
    def project(cls, dom: FinSet, idx) -> "FinMap":
        """Tupling of factor projections: dom -> product of dom.factors[idx]."""
        idx = list(idx)
        cod = FinSet(tuple(dom.factors[i] for i in idx))
        if not dom.factors:
            return cls(dom, cod, np.zeros(1, dtype=np.int64))
        grid = np.indices(dom.shape).reshape(len(dom.shape), -1)
        if not idx:
            return cls(dom, cod, np.zeros(dom.size, dtype=np.int64))
        table = np.ravel_multi_index(tuple(grid[i] for i in idx), cod.shape)
        return cls(dom, cod, table)

    @classmethod
    def blocks(cls, objs, picks) -> "FinMap":
        """Map from the product of objs to the product of objs[picks]."""
        offsets, k = [], 0
        for o in objs:
            offsets.append(list(range(k, k + len(o.factors))))
            k += len(o.factors)
        dom = FinSet(tuple(f for o in objs for f in o.factors))
        return cls.project(dom, [i for p in picks for i in offsets[p]])

    @classmethod
    def constant(cls, dom: FinSet, cod: FinSet, value: int) -> "FinMap":
        return cls(dom, cod, np.full(dom.size, value, dtype=np.int64))

    def then(self, g: "FinMap") -> "FinMap":
        """g after self."""
        if g.dom != self.cod:
            raise GrailError("maps do not compose")
        return FinMap(self.dom, g.cod, g.table[self.table])

    def times(self, g: "FinMap") -> "FinMap":
        """self x g."""
        dom, cod = self.dom * g.dom, self.cod * g.cod
        a = np.repeat(self.table, g.dom.size)
        b = np.tile(g.table, self.dom.size)
        return FinMap(dom, cod, a * g.cod.size + b)

    def pair(self, g: "FinMap") -> "FinMap":
        """<self, g>."""
        if self.dom != g.dom:
            raise GrailError("tupling needs a common domain")
        return FinMap(self.dom, self.cod * g.cod, self.table * g.cod.size + g.table)


def all_maps(A: FinSet, B: FinSet, limit=None, rng=None):
    total = B.size ** A.size
    if limit is None or total <= limit:
        for tab in itertools.product(range(B.size), repeat=A.size):
            yield FinMap(A, B, np.array(tab, dtype=np.int64))
        return
    rng = rng or np.random.default_rng(0)
    for _ in range(limit):
        yield FinMap(A, B, rng.integers(0, B.size, A.size))


def diagonal(A: FinSet) -> FinMap:
    return FinMap.blocks([A], [0, 0])


def swap(A: FinSet, B: FinSet) -> FinMap:
    return FinMap.blocks([A, B], [1, 0])


# grades at the semantic boundary

def grade_float(r) -> float:
    if isinstance(r, Grade):
        return r.to_float()
    if r is INF:
        return math.inf
    return float(r)


def scale(r: float, a: np.ndarray, cap=None) -> np.ndarray:
    """r * a with 0 * inf = 0."""
    if r == 0:
        return np.zeros_like(a, dtype=float)
    with np.errstate(invalid="ignore"):
        out = np.where(a == 0, 0.0, a * r)
    if cap is not None:
        out = np.minimum(out, cap)
    return out


# the [0,inf] doctrine

class QuantaleDoctrine:
    """Fibers are maps A -> [0,inf]; alpha <= beta iff alpha >= beta pointwise.

    ``cap`` truncates every value at a bound (cap=1 gives the Lukasiewicz
    quantale, which is classical with bot the constant cap).  ``modality``
    replaces the scaling action, for building deliberately broken instances.
    """

    kind = "quantale"

    def __init__(self, ring: Semiring | None = None, eps: float = 1e-9, cap=None, modality=None,
                 grid=None, name=None):
        self.ring = ring or Semiring("nonneg-real")
        self.eps = eps
        self.cap = cap
        self._modality = modality
        self.grid = tuple(grid) if grid is not None else (
            GRID if cap is None else tuple(v for v in (0.0, 0.25, 0.5, 0.75, 1.0) if v <= cap))
        self.name = name or ("quantale" if cap is None else f"quantale-cap{cap:g}")

    @property
    def top_value(self):
        return math.inf if self.cap is None else float(self.cap)

    # structure

    def unit(self, A: FinSet) -> np.ndarray:
        return np.zeros(A.size)

    def top(self, A: FinSet) -> np.ndarray:
        return np.zeros(A.size)

    def bottom(self, A: FinSet) -> np.ndarray:
        return np.full(A.size, self.top_value)

    def bot(self, A: FinSet) -> np.ndarray:
        """Dualising element; only the capped quantale is classical."""
        if self.cap is None:
            raise UnsupportedFragment("the [0,inf] quantale has no dualising bot")
        return np.full(A.size, float(self.cap))

    def tensor(self, a, b):
        out = a + b
        return out if self.cap is None else np.minimum(out, self.cap)

    def modality(self, r, a):
        if self._modality is not None:
            return self._modality(r, a)
        return scale(grade_float(r), a, self.cap)

    def reindex(self, f: FinMap, a):
        return a[..., f.table]

    def residual(self, a, b):
        with np.errstate(invalid="ignore"):
            diff = np.maximum(b - a, 0.0)
        out = np.where(np.isinf(a), 0.0, np.where(np.isinf(b), math.inf, diff))
        return out

    def meet(self, a, b):
        return np.maximum(a, b)

    def join(self, a, b):
        return np.minimum(a, b)

    def exists(self, f: FinMap, a):
        """Left adjoint to reindexing along f: minimum over each fiber of f."""
        out = np.full(a.shape[:-1] + (f.cod.size,), self.top_value)
        for y in range(f.cod.size):
            pre = np.nonzero(f.table == y)[0]
            if pre.size:
                out[..., y] = a[..., pre].min(axis=-1)
        return out

    def forall(self, f: FinMap, a):
        """Right adjoint to reindexing along f: maximum over each fiber of f."""
        out = np.zeros(a.shape[:-1] + (f.cod.size,))
        for y in range(f.cod.size):
            pre = np.nonzero(f.table == y)[0]
            if pre.size:
                out[..., y] = a[..., pre].max(axis=-1)
        return out

    # order

    def leq(self, a, b):
        """alpha <= beta in the fiber, per batch entry."""
        with np.errstate(invalid="ignore"):
            ok = np.where(np.isinf(b), np.isinf(a), a >= b - self.eps)
        return ok.all(axis=-1)

    def slack(self, a, b) -> float:
        """min over points of a - b (inf - inf counts as 0); >= -eps means a <= b."""
        return kernels.leq_slack(np.asarray(a, float).ravel(), np.asarray(b, float).ravel())

    def equal(self, a, b):
        return self.leq(a, b) & self.leq(b, a)

    # enumeration

    def elements(self, A: FinSet, grid=None) -> np.ndarray:
        grid = self.grid if grid is None else tuple(grid)
        if A.size == 0:
            return np.zeros((1, 0))
        return np.array(list(itertools.product(grid, repeat=A.size)), dtype=float).reshape(-1, A.size)

    def is_element(self, a) -> bool:
        a = np.asarray(a, float)
        return bool(np.all(a >= 0) and (self.cap is None or np.all(a <= self.cap)))

    def describe(self, a):
        return [("inf" if math.isinf(v) else float(v)) for v in np.asarray(a).ravel()]


# finite ordered monoids and Kripke doctrines

@dataclass
class OrderedMonoid:
    labels: tuple
    le: np.ndarray       # le[i, j] iff i <= j
    comp: np.ndarray     # comp[i, j] = i o j
    unit: int

    @property
    def size(self):
        return len(self.labels)

    def violations(self):
        out = []
        n = self.size
        for i, j, k in itertools.product(range(n), repeat=3):
            if not self.le[i, i]:
                out.append(f"reflexivity at {self.labels[i]}")
            if self.le[i, j] and self.le[j, k] and not self.le[i, k]:
                out.append(f"transitivity at {self.labels[i]},{self.labels[j]},{self.labels[k]}")
            if self.comp[self.comp[i, j], k] != self.comp[i, self.comp[j, k]]:
                out.append(f"associativity at {self.labels[i]},{self.labels[j]},{self.labels[k]}")
            if self.le[i, j] and not self.le[self.comp[i, k], self.comp[j, k]]:
                out.append(f"monotonicity at {self.labels[i]},{self.labels[j]},{self.labels[k]}")
        for i, j in itertools.product(range(n), repeat=2):
            if i != j and self.le[i, j] and self.le[j, i]:
                out.append(f"antisymmetry at {self.labels[i]},{self.labels[j]}")
            if self.comp[i, j] != self.comp[j, i]:
                out.append(f"commutativity at {self.labels[i]},{self.labels[j]}")
        for i in range(n):
            if self.comp[self.unit, i] != i:
                out.append(f"unit at {self.labels[i]}")
        return sorted(set(out))

    def upsets(self) -> np.ndarray:
        """All up-closed subsets of W as boolean rows."""
        rows = []
        for bits in itertools.product((False, True), repeat=self.size):
            u = np.array(bits)
            if all(not u[i] or u[j] for i in range(self.size) for j in range(self.size) if self.le[i, j]):
                rows.append(u)
        return np.array(rows, dtype=bool)


def chain_monoid(n: int = 3) -> OrderedMonoid:
    """{0 < 1 < ... < n-1} with truncated addition."""
    idx = np.arange(n)
    return OrderedMonoid(tuple(str(i) for i in range(n)), idx[:, None] <= idx[None, :],
                         np.minimum(idx[:, None] + idx[None, :], n - 1), 0)


def truncated_action(W: OrderedMonoid, grades) -> dict:
    """a(r, w) = min(r * w, top) on a chain with truncated addition."""
    top = W.size - 1
    table = {}
    for r in grades:
        for w in range(W.size):
            if r.value is INF:
                v = 0 if w == 0 else top
            else:
                prod = Fraction(r.value) * w
                v = min(int(math.floor(prod)), top)
            table[(r, w)] = v
    return table


class KripkeDoctrine:
    """Fibers are up-closed subsets of A x W."""

    kind = "kripke"

    def __init__(self, W: OrderedMonoid, ring: Semiring, action: dict, name="kripke"):
        self.W = W
        self.ring = ring
        self.action = dict(action)
        self.grades = sorted({r for r, _ in self.action}, key=lambda g: (g.is_inf, g.to_float()))
        for r in self.grades:
            for w in range(W.size):
                if (r, w) not in self.action:
                    raise GrailError(f"action table has no entry for ({r}, {W.labels[w]})")
        n = W.size
        self._tensor_triples = [(w1, w2, w) for w1, w2, w in itertools.product(range(n), repeat=3)
                                if W.le[W.comp[w1, w2], w]]
        self.name = name
        self.eps = 0.0

    def has_grade(self, r) -> bool:
        return (r, 0) in self.action

    def act(self, r, w) -> int:
        return self.action[(r, w)]

    def action_violations(self, grades=None):
        """The six lax-action inequalities and monotonicity, on the table domain."""
        W, ring = self.W, self.ring
        grades = self.grades if grades is None else grades
        le, comp, e = W.le, W.comp, W.unit
        out = []
        zero, one = ring.zero, ring.one
        rng_w = range(W.size)
        for r in grades:
            if not le[self.act(r, e), e]:
                out.append({"law": "unit", "r": str(r)})
            for w1, w2 in itertools.product(rng_w, repeat=2):
                if not le[self.act(r, comp[w1, w2]), comp[self.act(r, w1), self.act(r, w2)]]:
                    out.append({"law": "multiplicativity", "r": str(r), "w": [W.labels[w1], W.labels[w2]]})
                if le[w1, w2] and not le[self.act(r, w1), self.act(r, w2)]:
                    out.append({"law": "monotone-in-w", "r": str(r), "w": [W.labels[w1], W.labels[w2]]})
        for w in rng_w:
            if self.has_grade(zero) and not le[e, self.act(zero, w)]:
                out.append({"law": "zero", "w": W.labels[w]})
            if self.has_grade(one) and not le[w, self.act(one, w)]:
                out.append({"law": "one", "w": W.labels[w]})
        for r, s in itertools.product(grades, repeat=2):
            rs_sum, rs_prod = r + s, r * s
            for w in rng_w:
                if self.has_grade(rs_sum) and not le[comp[self.act(r, w), self.act(s, w)], self.act(rs_sum, w)]:
                    out.append({"law": "additivity", "r": str(r), "s": str(s), "w": W.labels[w]})
                if self.has_grade(rs_prod) and not le[self.act(r, self.act(s, w)), self.act(rs_prod, w)]:
                    out.append({"law": "multiplication", "r": str(r), "s": str(s), "w": W.labels[w]})
                if ring.leq(s, r) and not le[self.act(s, w), self.act(r, w)]:
                    out.append({"law": "monotone-in-r", "r": str(r), "s": str(s), "w": W.labels[w]})
        return out

    # structure

    def unit(self, A: FinSet):
        row = self.W.le[self.W.unit]
        return np.broadcast_to(row, (A.size, self.W.size)).copy()

    def top(self, A: FinSet):
        return np.ones((A.size, self.W.size), dtype=bool)

    def bottom(self, A: FinSet):
        return np.zeros((A.size, self.W.size), dtype=bool)

    def tensor(self, U, V):
        out = np.zeros(np.broadcast_shapes(U.shape, V.shape), dtype=bool)
        for w1, w2, w in self._tensor_triples:
            out[..., w] |= U[..., w1] & V[..., w2]
        return out

    def modality(self, r, U):
        if not self.has_grade(r):
            raise GrailError(f"grade {r} is outside the action table")
        out = np.zeros_like(U, dtype=bool)
        le = self.W.le
        for v in range(self.W.size):
            a = self.act(r, v)
            for w in range(self.W.size):
                if le[a, w]:
                    out[..., w] |= U[..., v]
        return out

    def reindex(self, f: FinMap, U):
        return U[..., f.table, :]

    def residual(self, U, V):
        n = self.W.size
        out = np.ones(np.broadcast_shapes(U.shape, V.shape), dtype=bool)
        for w in range(n):
            for w2 in range(n):
                out[..., w] &= ~U[..., w2] | V[..., self.W.comp[w, w2]]
        return out

    def meet(self, U, V):
        return U & V

    def join(self, U, V):
        return U | V

    def exists(self, f: FinMap, U):
        out = np.zeros(U.shape[:-2] + (f.cod.size, self.W.size), dtype=bool)
        for y in range(f.cod.size):
            pre = np.nonzero(f.table == y)[0]
            if pre.size:
                out[..., y, :] = U[..., pre, :].any(axis=-2)
        return out

    def forall(self, f: FinMap, U):
        out = np.ones(U.shape[:-2] + (f.cod.size, self.W.size), dtype=bool)
        for y in range(f.cod.size):
            pre = np.nonzero(f.table == y)[0]
            if pre.size:
                out[..., y, :] = U[..., pre, :].all(axis=-2)
        return out

    # order

    def leq(self, U, V):
        return (~U | V).all(axis=(-1, -2))

    def slack(self, U, V) -> float:
        return 0.0 if bool(np.all(self.leq(U, V))) else -1.0

    def equal(self, U, V):
        return (U == V).all(axis=(-1, -2))

    def elements(self, A: FinSet, grid=None) -> np.ndarray:
        ups = self.W.upsets()
        rows = [np.stack([ups[i] for i in combo]) for combo in
                itertools.product(range(len(ups)), repeat=A.size)]
        return np.array(rows, dtype=bool).reshape(-1, A.size, self.W.size)

    def is_element(self, U) -> bool:
        le = self.W.le
        n = self.W.size
        for i in range(n):
            for j in range(n):
                if le[i, j] and np.any(U[..., i] & ~U[..., j]):
                    return False
        return True

    def describe(self, U):
        U = np.asarray(U)
        return [[self.W.labels[w] for w in range(self.W.size) if row[w]] for row in U.reshape(-1, self.W.size)]


def kripke_chain(n: int = 3, ring: Semiring | None = None, grades=None) -> KripkeDoctrine:
    """The chain doctrine used by the law suites: truncated addition, a(r,w) = min(rw, top)."""
    ring = ring or Semiring("nat-inf")
    if grades is None:
        grades = [ring.grade(v) for v in (0, 1, 2)] + ([ring.grade(INF)] if ring.kind == "nat-inf" else [])
    W = chain_monoid(n)
    return KripkeDoctrine(W, ring, truncated_action(W, grades), name=f"kripke-chain{n}")


def broken_kripke(n: int = 3) -> KripkeDoctrine:
    """The chain doctrine with a(1, top) lowered to top - 1, which breaks the counit law."""
    good = kripke_chain(n)
    table = dict(good.action)
    table[(good.ring.one, n - 1)] = n - 2
    return KripkeDoctrine(good.W, good.ring, table, name=f"kripke-chain{n}-broken")


def _halving(r, a):
    return scale(grade_float(r), a) * 0.5


def broken_quantale() -> QuantaleDoctrine:
    """!_r a = r * a / 2: lax-monoidal and natural, but !_1 a <= a fails."""
    return QuantaleDoctrine(Semiring("nonneg-real"), modality=_halving, name="quantale-broken")


INSTANCES = ("quantale", "capped", "kripke", "broken-quantale", "broken-kripke")
EXPECTED_BREAKAGE = {"broken-quantale": "counit", "broken-kripke": "counit"}


def instance(name: str):
    """A named doctrine instance with its default law-suite objects and grades."""
    R = Semiring("nonneg-real")
    qgrades = [R.grade(v) for v in (0, Fraction(1, 2), 1, 2)]
    if name == "quantale":
        return QuantaleDoctrine(R), [FinSet.of_size(n) for n in (1, 2, 3, 4)], qgrades
    if name == "capped":
        return QuantaleDoctrine(R, cap=1.0), [FinSet.of_size(n) for n in (1, 2, 3)], qgrades
    if name == "broken-quantale":
        return broken_quantale(), [FinSet.of_size(n) for n in (1, 2)], qgrades
    if name in ("kripke", "broken-kripke"):
        k = kripke_chain() if name == "kripke" else broken_kripke()
        return k, [FinSet.of_size(n) for n in (1, 2, 3)], k.grades
    raise GrailError(f"unknown doctrine instance {name}; choose from {', '.join(INSTANCES)}")


# law suites

@dataclass
class LawReport:
    law: str
    cases: int = 0
    violations: list = field(default_factory=list)
    violation_count: int = 0
    exhaustive: bool = True
    skipped: int = 0

    def to_json(self) -> dict:
        return {"law": self.law, "cases": self.cases, "violation_count": self.violation_count,
                "exhaustive": self.exhaustive, "skipped": self.skipped, "violations": self.violations}

    @property
    def ok(self) -> bool:
        return self.violation_count == 0


def _index_tuples(m: int, k: int, cap: int, rng):
    total = m ** k
    if total <= cap:
        grids = np.indices((m,) * k).reshape(k, -1).T
        return grids, True
    return rng.integers(0, m, size=(cap, k)), False


def _run(report: LawReport, doc, elems, k, fn, cap, rng, context, chunk=20000, keep=5):
    idx, exhaustive = _index_tuples(len(elems), k, cap, rng)
    report.exhaustive &= exhaustive
    for start in range(0, len(idx), chunk):
        part = idx[start:start + chunk]
        args = [elems[part[:, j]] for j in range(k)]
        ok = np.asarray(fn(*args))
        report.cases += len(part)
        bad = np.nonzero(~ok)[0]
        report.violation_count += len(bad)
        for b in bad[: max(0, keep - len(report.violations))]:
            report.violations.append(dict(context, elements=[doc.describe(a[b]) for a in args]))


def monoid_laws(doc, A: FinSet, elems, cap, rng, reports):
    L = doc.leq
    k = doc.unit(A)
    ctx = {"object": list(A.shape)}
    _run(reports["tensor-assoc"], doc, elems, 3,
         lambda a, b, c: doc.equal(doc.tensor(doc.tensor(a, b), c), doc.tensor(a, doc.tensor(b, c))),
         cap, rng, ctx)
    _run(reports["tensor-comm"], doc, elems, 2,
         lambda a, b: doc.equal(doc.tensor(a, b), doc.tensor(b, a)), cap, rng, ctx)
    _run(reports["tensor-unit"], doc, elems, 1,
         lambda a: doc.equal(doc.tensor(a, k), a), cap, rng, ctx)
    _run(reports["tensor-monotone"], doc, elems, 3,
         lambda a, a2, b: ~L(a, a2) | L(doc.tensor(a, b), doc.tensor(a2, b)), cap, rng, ctx)


def graded_laws(doc, A: FinSet, elems, grades, cap, rng, reports):
    """The seven graded-modality axioms on one object."""
    L, T, M = doc.leq, doc.tensor, doc.modality
    ring = doc.ring
    k = doc.unit(A)
    usable = [r for r in grades if _has(doc, r)]
    for r in usable:
        ctx = {"object": list(A.shape), "r": str(r)}
        _run(reports["lax-unit"], doc, k[None], 1, lambda a: L(a, M(r, a)), cap, rng, ctx)
        _run(reports["lax-tensor"], doc, elems, 2,
             lambda a, b: L(T(M(r, a), M(r, b)), M(r, T(a, b))), cap, rng, ctx)
    if _has(doc, ring.one):
        _run(reports["counit"], doc, elems, 1, lambda a: L(M(ring.one, a), a), cap, rng,
             {"object": list(A.shape)})
    if _has(doc, ring.zero):
        _run(reports["weakening"], doc, elems, 1, lambda a: L(M(ring.zero, a), k), cap, rng,
             {"object": list(A.shape)})
    for r, s in itertools.product(usable, repeat=2):
        ctx = {"object": list(A.shape), "r": str(r), "s": str(s)}
        if _has(doc, r + s):
            _run(reports["contraction"], doc, elems, 1,
                 lambda a: L(M(r + s, a), T(M(r, a), M(s, a))), cap, rng, ctx)
        else:
            reports["contraction"].skipped += 1
        if _has(doc, r * s):
            _run(reports["comultiplication"], doc, elems, 1,
                 lambda a: L(M(r * s, a), M(r, M(s, a))), cap, rng, ctx)
        else:
            reports["comultiplication"].skipped += 1
        if ring.leq(s, r):
            _run(reports["contravariance"], doc, elems, 2,
                 lambda a, b: ~L(a, b) | L(M(r, a), M(s, b)), cap, rng, ctx)


def _has(doc, r) -> bool:
    return doc.has_grade(r) if hasattr(doc, "has_grade") else True


def naturality_laws(doc, A: FinSet, B: FinSet, maps, elems_B, grades, cap, rng, reports,
                    fragments=False):
    for f in maps:
        ctx = {"map": f.table.tolist(), "from": list(A.shape), "to": list(B.shape)}
        R = lambda x: doc.reindex(f, x)  # noqa: E731
        _run(reports["natural-tensor"], doc, elems_B, 2,
             lambda a, b: doc.equal(R(doc.tensor(a, b)), doc.tensor(R(a), R(b))), cap, rng, ctx)
        _run(reports["natural-unit"], doc, doc.unit(B)[None], 1,
             lambda a: doc.equal(R(a), doc.unit(A)[None]), cap, rng, ctx)
        for r in grades:
            if _has(doc, r):
                _run(reports["natural-modality"], doc, elems_B, 1,
                     lambda a: doc.equal(R(doc.modality(r, a)), doc.modality(r, R(a))), cap, rng,
                     dict(ctx, r=str(r)))
        if fragments:
            _run(reports["natural-residual"], doc, elems_B, 2,
                 lambda a, b: doc.equal(R(doc.residual(a, b)), doc.residual(R(a), R(b))), cap, rng, ctx)
            _run(reports["natural-lattice"], doc, elems_B, 2,
                 lambda a, b: doc.equal(R(doc.meet(a, b)), doc.meet(R(a), R(b)))
                 & doc.equal(R(doc.join(a, b)), doc.join(R(a), R(b))), cap, rng, ctx)


def fragment_laws(doc, A: FinSet, elems, cap, rng, reports):
    L, T = doc.leq, doc.tensor
    ctx = {"object": list(A.shape)}
    _run(reports["residual-adjunction"], doc, elems, 3,
         lambda a, b, c: L(c, doc.residual(a, b)) == L(T(c, a), b), cap, rng, ctx)
    _run(reports["meet"], doc, elems, 3,
         lambda a, b, c: L(c, doc.meet(a, b)) == (L(c, a) & L(c, b)), cap, rng, ctx)
    _run(reports["join"], doc, elems, 3,
         lambda a, b, c: L(doc.join(a, b), c) == (L(a, c) & L(b, c)), cap, rng, ctx)
    top, bot = doc.top(A), doc.bottom(A)
    _run(reports["top-bottom"], doc, elems, 1, lambda a: L(a, top) & L(bot, a), cap, rng, ctx)


def quantifier_laws(doc, A: FinSet, B: FinSet, elems_AB, elems_B, maps_into_B, cap, rng, reports):
    """Adjunctions along the projection A x B -> B and Beck-Chevalley squares."""
    pi = FinMap.blocks([A, B], [1])
    L = doc.leq
    ctx = {"projection": [list(A.shape), list(B.shape)]}
    # pairs (alpha over AxB, beta over B)
    grid = _pairs(len(elems_AB), len(elems_B), cap, rng)
    for rep, holds in (
        ("exists-adjunction", lambda a, b: L(doc.exists(pi, a), b) == L(a, doc.reindex(pi, b))),
        ("forall-adjunction", lambda a, b: L(doc.reindex(pi, b), a) == L(b, doc.forall(pi, a))),
    ):
        r = reports[rep]
        r.exhaustive &= grid[1]
        for start in range(0, len(grid[0]), 20000):
            part = grid[0][start:start + 20000]
            a, b = elems_AB[part[:, 0]], elems_B[part[:, 1]]
            ok = holds(a, b)
            r.cases += len(part)
            bad = np.nonzero(~ok)[0]
            r.violation_count += len(bad)
            for i in bad[: max(0, 5 - len(r.violations))]:
                r.violations.append(dict(ctx, elements=[doc.describe(a[i]), doc.describe(b[i])]))
    for g in maps_into_B:
        Bp = g.dom
        pi2 = FinMap.blocks([A, Bp], [1])
        idg = FinMap.identity(A).times(g)
        sctx = dict(ctx, map=g.table.tolist())
        _run(reports["beck-chevalley"], doc, elems_AB, 1,
             lambda a: doc.equal(doc.reindex(g, doc.exists(pi, a)), doc.exists(pi2, doc.reindex(idg, a)))
             & doc.equal(doc.reindex(g, doc.forall(pi, a)), doc.forall(pi2, doc.reindex(idg, a))),
             cap, rng, sctx)


def _pairs(m, n, cap, rng):
    if m * n <= cap:
        g = np.indices((m, n)).reshape(2, -1).T
        return g, True
    return np.stack([rng.integers(0, m, cap), rng.integers(0, n, cap)], axis=1), False


MONOID = ("tensor-assoc", "tensor-comm", "tensor-unit", "tensor-monotone")
GRADED = ("lax-unit", "lax-tensor", "weakening", "contraction", "counit", "comultiplication",
          "contravariance")
NATURAL = ("natural-tensor", "natural-unit", "natural-modality")
FRAGMENT = ("residual-adjunction", "natural-residual", "meet", "join", "top-bottom",
            "natural-lattice", "exists-adjunction",
            "forall-adjunction", "beck-chevalley")


def law_suite(doc, objects, grades, *, fragments=False, cap: int = DEFAULT_CAP, seed: int = 0,
              maps_per_pair: int = 8, grid=None) -> list:
    """Exhaustive (capped) verification of the doctrine laws; returns LawReports."""
    rng = np.random.default_rng(seed)
    names = MONOID + GRADED + NATURAL + (FRAGMENT if fragments else ())
    reports = {n: LawReport(n) for n in names}
    elems = {A: doc.elements(A, grid) for A in objects}
    for A in objects:
        monoid_laws(doc, A, elems[A], cap, rng, reports)
        graded_laws(doc, A, elems[A], grades, cap, rng, reports)
        if fragments:
            fragment_laws(doc, A, elems[A], cap, rng, reports)
    for A, B in itertools.product(objects, repeat=2):
        if A.size * B.size == 0:
            continue
        maps = list(all_maps(A, B, limit=maps_per_pair, rng=rng))
        naturality_laws(doc, A, B, maps, elems[B], grades, cap, rng, reports, fragments)
    if fragments:
        small = [A for A in objects if A.size <= 2]
        for A, B in itertools.product(small, repeat=2):
            AB = A * B
            eAB = doc.elements(AB, grid)
            into_B = [g for C in small for g in all_maps(C, B, limit=maps_per_pair, rng=rng)]
            quantifier_laws(doc, A, B, eAB, elems[B], into_B, cap, rng, reports)
    return [reports[n] for n in names]


def primary_check(doc, objects, grades, grid=None, cap=DEFAULT_CAP) -> dict:
    """Identity modality is graded exactly when kappa is top and tensor is the meet.

    Returns both sides of the biconditional, evaluated on the given grid.
    """
    ident = _IdentityModality(doc)
    reports = {n: LawReport(n) for n in GRADED}
    rng = np.random.default_rng(0)
    kappa_top, tensor_meet = True, True
    for A in objects:
        elems = doc.elements(A, grid)
        graded_laws(ident, A, elems, grades, cap, rng, reports)
        kappa_top &= bool(np.all(doc.leq(doc.top(A)[None], doc.unit(A)[None])))
        tensor_meet &= bool(np.all(doc.leq(elems, doc.tensor(elems, elems))))
    graded = all(r.ok for r in reports.values())
    return {"graded": graded, "kappa_top": kappa_top, "tensor_is_meet": tensor_meet,
            "agrees": graded == (kappa_top and tensor_meet)}


class _IdentityModality:
    """A doctrine wrapper whose graded modality is the identity."""

    def __init__(self, doc):
        self._doc = doc
        self.ring = doc.ring

    def __getattr__(self, name):
        return getattr(self._doc, name)

    def modality(self, r, a):
        return a

    def has_grade(self, r):
        return True
