import math
import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from grail import kernels

BACKENDS = kernels.backends()
VALUES = st.sampled_from([0.0, 0.25, 0.5, 1.0, 2.0, 3.0, math.inf])


def test_backends_listed():
    # the numpy fallback is always present and serves as the reference
    assert "python" in BACKENDS
    assert set(BACKENDS) <= {"python", "cython"}


def test_pure_python_switch():
    env = dict(os.environ, GRAIL_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", "from grail import kernels; print(kernels.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"


def slack_brute(a, b):
    best = math.inf
    for x, y in zip(a, b):
        if math.isinf(x):
            d = math.inf
        elif math.isinf(y):
            d = -math.inf
        else:
            d = x - y
        best = min(best, d)
    return best


@settings(max_examples=200, deadline=None)
@given(arrays(float, st.integers(0, 12), elements=VALUES), st.data())
def test_leq_slack(a, data):
    b = data.draw(arrays(float, a.shape, elements=VALUES))
    want = slack_brute(a, b)
    for impl in BACKENDS.values():
        assert impl.leq_slack(a, b) == want


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 4), st.data())
def test_hausdorff_table_backends_agree(n, data):
    vals = data.draw(st.lists(st.sampled_from([0.5, 1.0, 2.0, 3.0, math.inf]), min_size=n * n, max_size=n * n))
    D = np.array(vals).reshape(n, n)
    D = np.minimum(D, D.T)
    np.fill_diagonal(D, 0)
    masks = np.arange(2 ** n, dtype=np.int64)
    tables = [impl.hausdorff_table(D, masks) for impl in BACKENDS.values()]
    for t in tables[1:]:
        assert np.array_equal(t, tables[0])


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 6), st.integers(1, 8), st.integers(0, 2 ** 31 - 1))
def test_w1_dual_backends_agree(k, m, seed):
    rng = np.random.default_rng(seed)
    F = rng.normal(size=(k, 3))
    X = rng.dirichlet(np.ones(3), size=m)
    Y = rng.dirichlet(np.ones(3), size=m)
    want_rows = np.array([max(F[j] @ (X[i] - Y[i]) for j in range(k)) for i in range(m)])
    for impl in BACKENDS.values():
        assert np.allclose(impl.w1_dual_rows(F, X, Y), want_rows)
        table = impl.w1_dual_table(F, X)
        for i in range(m):
            for j in range(m):
                assert table[i, j] == pytest.approx(max(F[q] @ (X[i] - X[j]) for q in range(k)))


@pytest.mark.parametrize("impl", list(BACKENDS.values()), ids=list(BACKENDS))
def test_min_scale_edges(impl):
    inf = math.inf
    assert impl.min_scale([0, 0], [1, 0]) == (0.0, False, True)
    assert impl.min_scale([2, 1], [1, 1]) == (2.0, False, True)
    assert impl.min_scale([1], [0])[2] is False  # need with zero distance
    assert impl.min_scale([inf], [1])[2] is False
    assert impl.min_scale([inf], [inf]) == (0.0, True, True)  # any r > 0, since 0 * inf = 0
    assert impl.min_scale([1, 3], [inf, 2]) == (1.5, False, True)


@settings(max_examples=200, deadline=None)
@given(arrays(float, st.integers(1, 8), elements=VALUES), st.data())
def test_min_scale_backends_agree(need, data):
    rho = data.draw(arrays(float, need.shape, elements=VALUES))
    results = {name: impl.min_scale(need, rho) for name, impl in BACKENDS.items()}
    assert len(set(results.values())) == 1
