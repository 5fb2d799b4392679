"""Metric oracles on finite spaces: Hausdorff, Wasserstein and total variation.

Distances are floats with math.inf allowed.  Distributions are tuples of
Fractions summing to exactly 1.  W1 is computed three ways: an exact primal
over basic couplings, a grid-discretised dual, and a fast dual that maximises
over the vertices of the 1-Lipschitz polytope (the one used by models).
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from . import kernels
from .errors import ModelError


@dataclass
class FiniteMetricSpace:
    points: tuple
    dist: np.ndarray
    index: dict = field(init=False, repr=False)

    def __post_init__(self):
        self.points = tuple(self.points)
        self.dist = np.asarray(self.dist, dtype=float)
        n = len(self.points)
        if self.dist.shape != (n, n):
            raise ModelError("distance table does not match the points")
        self.index = {p: i for i, p in enumerate(self.points)}

    @classmethod
    def from_pairs(cls, points, pairs, missing=math.inf):
        points = tuple(points)
        idx = {p: i for i, p in enumerate(points)}
        D = np.full((len(points), len(points)), missing, dtype=float)
        np.fill_diagonal(D, 0.0)
        for a, b, d in pairs:
            if a not in idx or b not in idx:
                raise ModelError(f"unknown point in distance entry ({a} {b})")
            D[idx[a], idx[b]] = D[idx[b], idx[a]] = float(d)
        return cls(points, D)

    @property
    def size(self):
        return len(self.points)

    def violations(self, eps=1e-9):
        return metric_violations(self.dist, eps)

    def d(self, a, b) -> float:
        return float(self.dist[self.index[a], self.index[b]])


def metric_violations(D, eps=1e-9):
    D = np.asarray(D, dtype=float)
    out = []
    n = D.shape[0]
    for i in range(n):
        if D[i, i] != 0:
            out.append(("reflexivity", i))
    for i, j in itertools.product(range(n), repeat=2):
        if D[i, j] < 0 or D[i, j] != D[j, i]:
            out.append(("symmetry", i, j))
    for i, j, k in itertools.product(range(n), repeat=3):
        if D[i, k] > D[i, j] + D[j, k] + eps:
            out.append(("triangle", i, j, k))
    return out


def pseudometrics(n: int, grid) -> list:
    """All symmetric tables with zero diagonal and off-diagonal values in grid satisfying the triangle law."""
    pairs = list(itertools.combinations(range(n), 2))
    out = []
    for vals in itertools.product(grid, repeat=len(pairs)):
        D = np.zeros((n, n))
        for (i, j), v in zip(pairs, vals):
            D[i, j] = D[j, i] = v
        if not metric_violations(D):
            out.append(D)
    return out


# Hausdorff

def hausdorff(A, B, D) -> float:
    """H(A,B) = max(sup_a d(a,B), sup_b d(b,A)); d(x, empty) = inf, sup over empty = 0."""
    D = np.asarray(D, dtype=float)
    A, B = list(A), list(B)

    def directed(X, Y):
        worst = 0.0
        for x in X:
            near = min((D[x, y] for y in Y), default=math.inf)
            worst = max(worst, near)
        return worst

    return max(directed(A, B), directed(B, A))


def mask_members(mask: int, n: int) -> tuple:
    return tuple(i for i in range(n) if (mask >> i) & 1)


def hausdorff_table(D, masks=None):
    D = np.asarray(D, dtype=float)
    if masks is None:
        masks = np.arange(2 ** D.shape[0])
    return kernels.hausdorff_table(D, np.asarray(masks, dtype=np.int64))


# distributions

def distributions(n: int, denominator: int) -> list:
    """All distributions on n points with probabilities k/denominator."""
    out = []
    for ks in itertools.product(range(denominator + 1), repeat=n):
        if sum(ks) == denominator:
            out.append(tuple(Fraction(k, denominator) for k in ks))
    return out


def point_mass(n: int, i: int) -> tuple:
    return tuple(Fraction(int(j == i)) for j in range(n))


def convex(e, mu, nu) -> tuple:
    e = Fraction(e)
    return tuple(e * a + (1 - e) * b for a, b in zip(mu, nu))


def _components(D) -> list:
    """Classes of points at finite distance from each other."""
    n = D.shape[0]
    seen, comps = set(), []
    for i in range(n):
        if i in seen:
            continue
        comp = [j for j in range(n) if math.isfinite(D[i, j])]
        seen.update(comp)
        comps.append(comp)
    return comps


def _trees(nodes, edges, size):
    """Edge subsets of the given size that form a forest (acyclic)."""
    for sub in itertools.combinations(edges, size):
        parent = {v: v for v in nodes}

        def find(v):
            while parent[v] != v:
                parent[v] = parent[parent[v]]
                v = parent[v]
            return v

        ok = True
        for a, b in sub:
            ra, rb = find(a), find(b)
            if ra == rb:
                ok = False
                break
            parent[ra] = rb
        if ok:
            yield sub


def w1_primal(mu, nu, D):
    """Exact W1 as the least cost over basic feasible couplings (Fractions, or inf)."""
    D = np.asarray(D, dtype=float)
    mu = [Fraction(x) for x in mu]
    nu = [Fraction(x) for x in nu]
    if sum(mu) != sum(nu):
        raise ModelError("distributions must have equal mass")
    src = [i for i, m in enumerate(mu) if m]
    dst = [j for j, m in enumerate(nu) if m]
    if not src:
        return Fraction(0)
    nodes = [("s", i) for i in src] + [("t", j) for j in dst]
    edges = [(("s", i), ("t", j)) for i in src for j in dst]
    best = None
    for tree in _trees(nodes, edges, len(nodes) - 1):
        flow = _tree_flow(tree, {("s", i): mu[i] for i in src} | {("t", j): nu[j] for j in dst})
        if flow is None:
            continue
        cost = Fraction(0)
        for ((_, i), (_, j)), f in flow.items():
            if f == 0:
                continue
            d = D[i, j]
            if math.isinf(d):
                cost = math.inf
                break
            cost += f * Fraction(d)
        if best is None or cost < best:
            best = cost
    return best


def _tree_flow(tree, supply):
    """Unique flow on a spanning tree meeting the supplies, or None if some edge is negative."""
    adj = {v: [] for v in supply}
    for e in tree:
        adj[e[0]].append(e)
        adj[e[1]].append(e)
    left = dict(supply)
    degree = {v: len(adj[v]) for v in supply}
    flow = {}
    leaves = [v for v in supply if degree[v] == 1]
    while leaves:
        v = leaves.pop()
        live = [e for e in adj[v] if e not in flow]
        if not live:
            continue
        e = live[0]
        f = left[v]
        if f < 0:
            return None
        flow[e] = f
        u = e[1] if e[0] == v else e[0]
        left[v] = Fraction(0)
        left[u] -= f
        degree[u] -= 1
        if degree[u] == 1:
            leaves.append(u)
    if len(flow) != len(tree) or any(x != 0 for x in left.values()):
        return None
    return flow


def w1_dual_grid(mu, nu, D, step=Fraction(1, 8)):
    """sup of sum f (mu - nu) over f with f(0)=0, values on a grid, |f(i) - f(j)| <= d(i,j).

    Separate finite-distance classes are handled independently; a class with unequal
    mass gives inf.
    """
    D = np.asarray(D, dtype=float)
    mu = [Fraction(x) for x in mu]
    nu = [Fraction(x) for x in nu]
    total = Fraction(0)
    step = Fraction(step)
    for comp in _components(D):
        diff = [mu[i] - nu[i] for i in comp]
        if sum(diff) != 0:
            return math.inf
        if len(comp) == 1:
            continue
        top = max(Fraction(D[comp[0], j]) for j in comp)
        k = int(top / step)
        values = [step * i for i in range(-k, k + 1)]
        best = Fraction(0)
        for rest in itertools.product(values, repeat=len(comp) - 1):
            f = (Fraction(0),) + rest
            if all(abs(f[a] - f[b]) <= Fraction(D[comp[a], comp[b]]) for a in range(len(comp))
                   for b in range(a + 1, len(comp))):
                val = sum(fa * da for fa, da in zip(f, diff))
                if val > best:
                    best = val
        total += best
    return total


@lru_cache(maxsize=64)
def _potentials_cached(key, n):
    D = np.frombuffer(key, dtype=float).reshape(n, n)
    return lipschitz_vertices(D)


def lipschitz_vertices(D) -> np.ndarray:
    """Vertices of {f : f(0) = 0, |f(i) - f(j)| <= d(i,j)} for a finite metric D."""
    D = np.asarray(D, dtype=float)
    n = D.shape[0]
    if n == 1:
        return np.zeros((1, 1))
    edges = list(itertools.combinations(range(n), 2))
    found = set()
    out = []
    for tree in _trees(range(n), edges, n - 1):
        for signs in itertools.product((1.0, -1.0), repeat=n - 1):
            f = np.full(n, np.nan)
            f[0] = 0.0
            pending = list(zip(tree, signs))
            while pending:
                rest = []
                for (a, b), sg in pending:
                    if not np.isnan(f[a]) and np.isnan(f[b]):
                        f[b] = f[a] + sg * D[a, b]
                    elif not np.isnan(f[b]) and np.isnan(f[a]):
                        f[a] = f[b] - sg * D[a, b]
                    elif np.isnan(f[a]) and np.isnan(f[b]):
                        rest.append(((a, b), sg))
                if len(rest) == len(pending):
                    break
                pending = rest
            if np.isnan(f).any():
                continue
            if np.all(np.abs(f[:, None] - f[None, :]) <= D + 1e-12):
                key = tuple(np.round(f, 12))
                if key not in found:
                    found.add(key)
                    out.append(f)
    return np.array(out)


def potentials(D) -> list:
    """Per finite class: (indices, vertex potentials)."""
    D = np.ascontiguousarray(D, dtype=float)
    out = []
    for comp in _components(D):
        sub = np.ascontiguousarray(D[np.ix_(comp, comp)])
        out.append((np.array(comp), _potentials_cached(sub.tobytes(), len(comp))))
    return out


def wasserstein1(mu, nu, D) -> float:
    """W1 via the fast dual (floats)."""
    return float(w1_table(np.array([[float(x) for x in mu], [float(x) for x in nu]]), D)[0, 1])


def w1_table(X, D, tol=1e-12) -> np.ndarray:
    """All-pairs W1 between the rows of X (distributions as float rows)."""
    X = np.asarray(X, dtype=float)
    m = X.shape[0]
    out = np.zeros((m, m))
    for comp, F in potentials(D):
        sub = np.ascontiguousarray(X[:, comp])
        mass = sub.sum(axis=1)
        out += np.where(np.abs(mass[:, None] - mass[None, :]) > tol, math.inf, 0.0)
        if len(comp) > 1:
            out += kernels.w1_dual_table(F, sub)
    return np.maximum(out, 0.0)


def w1_rows(P, Q, D, tol=1e-12) -> np.ndarray:
    """W1 between corresponding rows of P and Q."""
    P = np.asarray(P, dtype=float)
    Q = np.asarray(Q, dtype=float)
    out = np.zeros(P.shape[0])
    for comp, F in potentials(D):
        p, q = np.ascontiguousarray(P[:, comp]), np.ascontiguousarray(Q[:, comp])
        out += np.where(np.abs(p.sum(axis=1) - q.sum(axis=1)) > tol, math.inf, 0.0)
        if len(comp) > 1:
            out += kernels.w1_dual_rows(F, p, q)
    return np.maximum(out, 0.0)


def wasserstein_p_grid(mu, nu, D, p, bound=None, step=Fraction(1, 8)) -> float:
    """The sup of |int f^p dmu - int f^p dnu|^(1/p) over non-expansive f into [0, bound] on a grid.

    For p > 1 the unbounded sup diverges whenever mu != nu, so a bound is
    required; it defaults to the largest finite distance.
    """
    D = np.asarray(D, dtype=float)
    n = D.shape[0]
    finite = D[np.isfinite(D)]
    if bound is None:
        bound = Fraction(float(finite.max())) if finite.size else Fraction(0)
    step = Fraction(step)
    values = [step * i for i in range(int(Fraction(bound) / step) + 1)]
    mu = [Fraction(x) for x in mu]
    nu = [Fraction(x) for x in nu]
    best = 0.0
    for f in itertools.product(values, repeat=n):
        if all(abs(f[a] - f[b]) <= Fraction(D[a, b]) for a in range(n) for b in range(a + 1, n)
               if math.isfinite(D[a, b])):
            val = abs(sum(float(fa) ** p * float(ma - na) for fa, ma, na in zip(f, mu, nu)))
            best = max(best, val ** (1.0 / p))
    return best


# total variation

def tv_subsets(mu, nu) -> Fraction:
    n = len(mu)
    best = Fraction(0)
    for mask in range(2 ** n):
        s = sum(Fraction(mu[i]) - Fraction(nu[i]) for i in range(n) if (mask >> i) & 1)
        best = max(best, abs(s))
    return best


def tv_half_l1(mu, nu) -> Fraction:
    return sum(abs(Fraction(a) - Fraction(b)) for a, b in zip(mu, nu)) / 2


def total_variation(mu, nu) -> Fraction:
    a, b = tv_subsets(mu, nu), tv_half_l1(mu, nu)
    if a != b:
        raise AssertionError(f"total variation formulas disagree: {a} vs {b}")
    return a


def tv_table(X) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    return 0.5 * np.abs(X[:, None, :] - X[None, :, :]).sum(axis=2)


# Lipschitz constants

def lipschitz_constant(f, dom, cod) -> float:
    """Least r with r * d_dom(x, y) >= d_cod(f x, f y), using 0 * inf = 0.

    f maps point indices of dom to point indices of cod.  Returns inf when no
    r works.  When pairs at infinite distance force r > 0 but nothing else
    constrains r, the infimum 0 is returned (it is not attained).
    """
    D1 = np.asarray(dom.dist if hasattr(dom, "dist") else dom, dtype=float)
    D2 = np.asarray(cod.dist if hasattr(cod, "dist") else cod, dtype=float)
    idx = np.array([f(i) for i in range(D1.shape[0])])
    need = D2[np.ix_(idx, idx)]
    lower, _strict, feasible = kernels.min_scale(need, D1)
    return lower if feasible else math.inf
