# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the numeric kernels; same signatures as _pykernels."""
import numpy as np
from libc.math cimport INFINITY, isinf

BACKEND = "cython"


def leq_slack(a, b):
    cdef double[::1] av = np.ascontiguousarray(a, dtype=np.float64).ravel()
    cdef double[::1] bv = np.ascontiguousarray(b, dtype=np.float64).ravel()
    cdef Py_ssize_t i, n = av.shape[0]
    cdef double best = INFINITY, d
    for i in range(n):
        if isinf(av[i]):
            continue
        if isinf(bv[i]):
            return -INFINITY
        d = av[i] - bv[i]
        if d < best:
            best = d
    return best


def hausdorff_table(D, masks):
    cdef double[:, ::1] dv = np.ascontiguousarray(D, dtype=np.float64)
    cdef long long[::1] mv = np.ascontiguousarray(masks, dtype=np.int64)
    cdef Py_ssize_t n = dv.shape[0], m = mv.shape[0]
    cdef Py_ssize_t i, j, x, y
    cdef double best, worst
    to_set_np = np.empty((n, m), dtype=np.float64)
    cdef double[:, ::1] ts = to_set_np
    for x in range(n):
        for j in range(m):
            best = INFINITY
            for y in range(n):
                if (mv[j] >> y) & 1 and dv[x, y] < best:
                    best = dv[x, y]
            ts[x, j] = best
    out_np = np.zeros((m, m), dtype=np.float64)
    cdef double[:, ::1] out = out_np
    for i in range(m):
        for j in range(m):
            worst = 0.0
            for x in range(n):
                if (mv[i] >> x) & 1 and ts[x, j] > worst:
                    worst = ts[x, j]
            if worst > out[i, j]:
                out[i, j] = worst
            if worst > out[j, i]:
                out[j, i] = worst
    return out_np


def w1_dual_rows(F, P, Q):
    cdef double[:, ::1] fv = np.ascontiguousarray(F, dtype=np.float64)
    cdef double[:, ::1] pv = np.ascontiguousarray(P, dtype=np.float64)
    cdef double[:, ::1] qv = np.ascontiguousarray(Q, dtype=np.float64)
    cdef Py_ssize_t r, k, i, rows = pv.shape[0], nk = fv.shape[0], n = pv.shape[1]
    cdef double best, s
    out_np = np.zeros(rows, dtype=np.float64)
    cdef double[::1] out = out_np
    if nk == 0:
        return out_np
    for r in range(rows):
        best = -INFINITY
        for k in range(nk):
            s = 0.0
            for i in range(n):
                s += fv[k, i] * (pv[r, i] - qv[r, i])
            if s > best:
                best = s
        out[r] = best
    return out_np


def w1_dual_table(F, X):
    cdef double[:, ::1] fv = np.ascontiguousarray(F, dtype=np.float64)
    cdef double[:, ::1] xv = np.ascontiguousarray(X, dtype=np.float64)
    cdef Py_ssize_t m = xv.shape[0], nk = fv.shape[0], n = xv.shape[1]
    cdef Py_ssize_t a, b, k, i
    cdef double best, s
    S_np = np.zeros((m, nk), dtype=np.float64)
    cdef double[:, ::1] S = S_np
    for a in range(m):
        for k in range(nk):
            s = 0.0
            for i in range(n):
                s += fv[k, i] * xv[a, i]
            S[a, k] = s
    out_np = np.zeros((m, m), dtype=np.float64)
    cdef double[:, ::1] out = out_np
    if nk == 0:
        return out_np
    for a in range(m):
        for b in range(m):
            best = -INFINITY
            for k in range(nk):
                s = S[a, k] - S[b, k]
                if s > best:
                    best = s
            out[a, b] = best
    return out_np


def min_scale(need, rho):
    cdef double[::1] nv = np.ascontiguousarray(need, dtype=np.float64).ravel()
    cdef double[::1] pv = np.ascontiguousarray(rho, dtype=np.float64).ravel()
    cdef Py_ssize_t i, n = nv.shape[0]
    cdef double lower = 0.0, q
    cdef bint strict = False
    for i in range(n):
        if nv[i] <= 0:
            continue
        if pv[i] == 0:
            return 0.0, False, False
        if isinf(pv[i]):
            strict = True
            continue
        if isinf(nv[i]):
            return 0.0, False, False
        q = nv[i] / pv[i]
        if q > lower:
            lower = q
    if lower > 0:
        strict = False
    return lower, strict, True
