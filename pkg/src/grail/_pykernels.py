"""Reference implementations of the numeric kernels (numpy)."""
from __future__ import annotations

import math

import numpy as np

BACKEND = "python"


def leq_slack(a, b) -> float:
    """min_i (a_i - b_i), with a_i = inf giving +inf and finite a_i < b_i = inf giving -inf."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.size == 0:
        return math.inf
    with np.errstate(invalid="ignore"):
        d = a - b
    d = np.where(np.isinf(a), math.inf, np.where(np.isinf(b), -math.inf, d))
    return float(d.min())


def hausdorff_table(D, masks):
    """Hausdorff distances between the subsets given as bitmasks, over the distance matrix D."""
    D = np.asarray(D, dtype=float)
    masks = np.asarray(masks, dtype=np.int64)
    n = D.shape[0]
    bits = ((masks[:, None] >> np.arange(n)[None, :]) & 1).astype(bool)
    m = len(masks)
    # dist from each point to each subset
    big = np.where(bits[None, :, :], D[:, None, :], math.inf)
    to_set = big.min(axis=2)  # (n, m)
    out = np.zeros((m, m))
    for i in range(m):
        # sup over points of set i of distance to set j
        if bits[i].any():
            left = to_set[bits[i]].max(axis=0)
        else:
            left = np.zeros(m)
        out[i] = np.maximum(out[i], left)
        out[:, i] = np.maximum(out[:, i], left)
    return out


def w1_dual_rows(F, P, Q):
    """max_k F_k . (p - q) for each row pair (p, q)."""
    F = np.asarray(F, dtype=float)
    diff = np.asarray(P, dtype=float) - np.asarray(Q, dtype=float)
    if F.shape[0] == 0:
        return np.zeros(diff.shape[0])
    return (diff @ F.T).max(axis=1)


def w1_dual_table(F, X):
    """All-pairs table: out[i, j] = max_k F_k . (x_i - x_j)."""
    F = np.asarray(F, dtype=float)
    X = np.asarray(X, dtype=float)
    if F.shape[0] == 0:
        return np.zeros((X.shape[0], X.shape[0]))
    S = X @ F.T  # (m, k)
    out = np.empty((X.shape[0], X.shape[0]))
    for i in range(X.shape[0]):
        out[i] = (S[i][None, :] - S).max(axis=1)
    return out


def min_scale(need, rho):
    """Least r with r * rho_i >= need_i for all i.

    Returns (lower, strict, feasible): the constraint set is r >= lower, or
    r > lower when strict.  0 * inf = 0 throughout.
    """
    need = np.asarray(need, dtype=float).ravel()
    rho = np.asarray(rho, dtype=float).ravel()
    lower, strict = 0.0, False
    for n_, p in zip(need, rho):
        if n_ <= 0:
            continue
        if p == 0:
            return 0.0, False, False
        if math.isinf(p):
            strict = True
            continue
        if math.isinf(n_):
            return 0.0, False, False
        q = n_ / p
        if q > lower:
            lower = q
    if lower > 0:
        strict = False
    return lower, strict, True
