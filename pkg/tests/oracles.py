"""Independent reference implementations used by the tests.

Nothing here calls into grail beyond reading plain values; each oracle
recomputes its answer from first principles on plain Python data.
"""
import itertools
import math
import re
from fractions import Fraction

INF = math.inf


# a tiny s-expression reader, separate from the package's own

TOKEN = re.compile(r"\(|\)|[^\s()]+")


def read(text):
    """Nested tuples of strings."""
    text = re.sub(r";[^\n]*", "", text)
    stack = [[]]
    for tok in TOKEN.findall(text):
        if tok == "(":
            stack.append([])
        elif tok == ")":
            done = tuple(stack.pop())
            stack[-1].append(done)
        else:
            stack[-1].append(tok)
    return stack[0][0]


def num(tok):
    return INF if tok == "inf" else Fraction(tok)


def mul(a, b):
    if a == 0 or b == 0:
        return Fraction(0)
    return a * b


def arities(theory_text):
    """name -> list of slot grades, for functions and predicates alike."""
    out = {}
    for decl in read(theory_text)[2:]:
        if decl[0] in ("fn", "pred"):
            out[decl[1]] = [num(slot[0]) for slot in decl[2]]
    return out


def ring_of(theory_text):
    for decl in read(theory_text)[2:]:
        if decl[0] == "semiring":
            return decl[1]


CONSTS = {"one", "top", "zero", "bot"}


def grade_term(node, x, ar):
    if isinstance(node, str):
        return Fraction(1) if node == x else Fraction(0)
    total = Fraction(0)
    for g, arg in zip(ar[node[0]], node[1:]):
        total += mul(g, grade_term(arg, x, ar))
    return total


def grade_formula(node, x, ar):
    if isinstance(node, str):
        assert node in CONSTS, node
        return Fraction(0)
    head = node[0]
    if head == "eq":
        return grade_term(node[2], x, ar) + grade_term(node[3], x, ar)
    if head in ("tensor", "lolli"):
        return grade_formula(node[1], x, ar) + grade_formula(node[2], x, ar)
    if head in ("with", "plus"):
        return max(grade_formula(node[1], x, ar), grade_formula(node[2], x, ar))
    if head == "bang":
        return mul(num(node[1]), grade_formula(node[2], x, ar))
    if head in ("forall", "exists"):
        return Fraction(0) if node[1][0] == x else grade_formula(node[2], x, ar)
    # predicate atom
    total = Fraction(0)
    for g, arg in zip(ar[head], node[1:]):
        total += mul(g, grade_term(arg, x, ar))
    return total


def grades_formula(node, xs, ar, memo=None):
    """Grades of every variable in xs at once; term grades are memoized."""
    memo = {} if memo is None else memo

    def term(t):
        got = memo.get(t)
        if got is None:
            got = tuple(grade_term(t, x, ar) for x in xs)
            memo[t] = got
        return got

    def add(a, b):
        return tuple(p + q for p, q in zip(a, b))

    zero = tuple(Fraction(0) for _ in xs)

    def walk(n):
        if isinstance(n, str):
            return zero
        head = n[0]
        if head == "eq":
            return add(term(n[2]), term(n[3]))
        if head in ("tensor", "lolli"):
            return add(walk(n[1]), walk(n[2]))
        if head in ("with", "plus"):
            return tuple(max(p, q) for p, q in zip(walk(n[1]), walk(n[2])))
        if head == "bang":
            r = num(n[1])
            return tuple(mul(r, g) for g in walk(n[2]))
        if head in ("forall", "exists"):
            inner = walk(n[2])
            return tuple(Fraction(0) if x == n[1][0] else g for x, g in zip(xs, inner))
        out = zero
        for g, arg in zip(ar[head], n[1:]):
            out = add(out, tuple(mul(g, v) for v in term(arg)))
        return out

    return walk(node)


# metrics

def hausdorff(A, B, D):
    """Straight from the sup/inf definition with the empty-set conventions."""
    def dist_to(p, S):
        return min([D[p][q] for q in S], default=INF)

    left = max([dist_to(a, B) for a in A], default=0.0)
    right = max([dist_to(b, A) for b in B], default=0.0)
    return max(left, right)


def w1_couplings(mu, nu, D):
    """W1 by enumerating every coupling with entries on the common denominator grid.

    With integer supplies the transport polytope has integral vertices, so the
    optimum is attained on this grid and the scan is exact.
    """
    den = 1
    for x in list(mu) + list(nu):
        den = den * Fraction(x).denominator // math.gcd(den, Fraction(x).denominator)
    a = [int(Fraction(x) * den) for x in mu]
    b = [int(Fraction(x) * den) for x in nu]
    n = len(a)
    best = INF

    def rows(i, remaining, cost):
        nonlocal best
        if i == n:
            if all(r == 0 for r in remaining):
                best = min(best, cost)
            return
        for row in compositions(a[i], n):
            if any(row[j] > remaining[j] for j in range(n)):
                continue
            c = cost
            for j in range(n):
                if row[j]:
                    c += row[j] * D[i][j]
            rows(i + 1, [remaining[j] - row[j] for j in range(n)], c)

    rows(0, b, 0.0)
    return best / den


def compositions(total, parts):
    if parts == 1:
        yield (total,)
        return
    for k in range(total + 1):
        for rest in compositions(total - k, parts - 1):
            yield (k,) + rest


def tv(mu, nu):
    return sum(abs(Fraction(p) - Fraction(q)) for p, q in zip(mu, nu)) / 2


def is_metric(D, eps=1e-9):
    n = len(D)
    for i, j, k in itertools.product(range(n), repeat=3):
        if D[i][k] > D[i][j] + D[j][k] + eps:
            return False
    return all(D[i][i] == 0 and D[i][j] == D[j][i] for i in range(n) for j in range(n))
