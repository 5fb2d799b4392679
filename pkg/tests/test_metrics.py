import itertools
import math
import random
from fractions import Fraction

import numpy as np
import pytest

import oracles
from grail.errors import ModelError
from grail.metrics import (FiniteMetricSpace, convex, distributions, hausdorff, hausdorff_table,
                           lipschitz_constant, mask_members, metric_violations, point_mass,
                           pseudometrics, total_variation, tv_half_l1, tv_subsets, tv_table,
                           w1_dual_grid, w1_primal, w1_rows, w1_table, wasserstein1,
                           wasserstein_p_grid)

GRID = (0, 0.5, 1, 2, math.inf)


def test_hausdorff_two_points():
    D = np.array([[0, 1], [1, 0]], dtype=float)
    assert hausdorff([0], [0, 1], D) == 1
    assert hausdorff([], [], D) == 0
    assert hausdorff([], [0], D) == math.inf


@pytest.mark.parametrize("n", [1, 2, 3])
def test_hausdorff_table_matches_definition(n):
    for D in pseudometrics(n, GRID):
        table = hausdorff_table(D)
        for i, j in itertools.product(range(2 ** n), repeat=2):
            A, B = mask_members(i, n), mask_members(j, n)
            assert table[i, j] == oracles.hausdorff(A, B, D.tolist())


def test_hausdorff_is_an_extended_metric_on_three_points():
    for D in pseudometrics(3, GRID):
        assert metric_violations(hausdorff_table(D)) == []


def test_union_is_nonexpansive_in_each_slot():
    D = FiniteMetricSpace.from_pairs("abc", [("a", "b", 1), ("b", "c", 2), ("a", "c", 2)]).dist
    H = hausdorff_table(D)
    for a, b, c in itertools.product(range(8), repeat=3):
        assert H[a | c, b | c] <= H[a, b]


def test_half_grades_fail_for_union():
    D = FiniteMetricSpace.from_pairs("abc", [("a", "b", 1), ("b", "c", 2), ("a", "c", 2)]).dist
    H = hausdorff_table(D)
    worst = max(H[a | c, b | d] - 0.5 * H[a, b] - 0.5 * H[c, d]
                for a, b, c, d in itertools.product(range(8), repeat=4)
                if math.isfinite(H[a, b] + H[c, d]))
    assert worst > 0


def test_missing_distances_are_infinite():
    X = FiniteMetricSpace.from_pairs("ab", [])
    assert X.d("a", "b") == math.inf
    with pytest.raises(ModelError):
        FiniteMetricSpace.from_pairs("ab", [("a", "z", 1)])


def test_distribution_counts():
    assert len(distributions(3, 4)) == 15
    assert all(sum(m) == 1 for m in distributions(3, 4))


def test_w1_point_masses():
    D = np.array([[0, 1, 2], [1, 0, 2], [2, 2, 0]], dtype=float)
    for i, j in itertools.product(range(3), repeat=2):
        assert w1_primal(point_mass(3, i), point_mass(3, j), D) == D[i, j]


W1_METRICS = [np.array(m, dtype=float) for m in (
    [[0, 1, 2], [1, 0, 2], [2, 2, 0]],
    [[0, 1, 1], [1, 0, 1], [1, 1, 0]],
    [[0, 0.5, 1], [0.5, 0, 0.5], [1, 0.5, 0]],
    [[0, 1, math.inf], [1, 0, math.inf], [math.inf, math.inf, 0]],
)]


@pytest.mark.parametrize("k", range(len(W1_METRICS)))
def test_w1_routes_agree(k):
    D = W1_METRICS[k]
    X = distributions(3, 4)
    fast = w1_table(np.array(X, dtype=float), D)
    Dl = D.tolist()
    for i, j in itertools.product(range(len(X)), repeat=2):
        exact = oracles.w1_couplings(X[i], X[j], Dl)
        primal = w1_primal(X[i], X[j], D)
        assert float(primal) == exact
        assert float(w1_dual_grid(X[i], X[j], D)) == exact
        assert fast[i, j] == pytest.approx(exact, abs=1e-9)


def test_w1_rows_match_table():
    D = W1_METRICS[0]
    X = np.array(distributions(3, 3), dtype=float)
    T = w1_table(X, D)
    idx = np.array(list(itertools.product(range(len(X)), repeat=2)))
    assert np.allclose(w1_rows(X[idx[:, 0]], X[idx[:, 1]], D), T[idx[:, 0], idx[:, 1]])


def test_w1_frozen_value():
    D = W1_METRICS[0]
    mu = (Fraction(1, 2), Fraction(1, 2), 0)
    nu = (0, Fraction(1, 4), Fraction(3, 4))
    # 3/4 must reach c at cost 2 per unit; a->c 1/2 and b->c 1/4 achieves it
    assert w1_primal(mu, nu, D) == Fraction(3, 2)
    assert wasserstein1(mu, nu, D) == pytest.approx(1.5)


def test_convex_combination_is_e_lipschitz():
    D = W1_METRICS[0]
    X = distributions(3, 2)
    for e in (0, Fraction(1, 4), Fraction(1, 2), 1):
        for mu, nu, s in itertools.product(X, repeat=3):
            lhs = w1_primal(convex(e, mu, s), convex(e, nu, s), D)
            assert lhs <= e * w1_primal(mu, nu, D)


def test_wasserstein_p_reduces_to_w1_for_p1():
    D = W1_METRICS[2]
    X = distributions(3, 2)
    for mu, nu in itertools.product(X, repeat=2):
        assert wasserstein_p_grid(mu, nu, D, 1) == pytest.approx(float(w1_primal(mu, nu, D)))


def test_total_variation_formulas_agree():
    X = distributions(4, 4)
    for mu, nu in itertools.product(X, repeat=2):
        assert tv_subsets(mu, nu) == tv_half_l1(mu, nu) == oracles.tv(mu, nu)
    rng = random.Random(0)
    for _ in range(50):
        a = [rng.randint(0, 9) for _ in range(5)]
        b = [rng.randint(0, 9) for _ in range(5)]
        mu = [Fraction(x, sum(a) or 1) for x in a] if sum(a) else [Fraction(1, 5)] * 5
        nu = [Fraction(x, sum(b) or 1) for x in b] if sum(b) else [Fraction(1, 5)] * 5
        assert total_variation(mu, nu) == oracles.tv(mu, nu)


def test_tv_table():
    X = distributions(3, 4)
    T = tv_table(np.array(X, dtype=float))
    for i, j in itertools.product(range(len(X)), repeat=2):
        assert T[i, j] == pytest.approx(float(oracles.tv(X[i], X[j])))


def test_lipschitz_constant_of_doubling():
    line = np.abs(np.subtract.outer([0.0, 1.0, 2.0], [0.0, 1.0, 2.0]))
    wide = np.abs(np.subtract.outer([0.0, 2.0, 4.0], [0.0, 2.0, 4.0]))
    assert lipschitz_constant(lambda i: i, line, wide) == 2.0
    assert lipschitz_constant(lambda i: 0, line, wide) == 0.0


def test_pseudometrics_are_metrics():
    for D in pseudometrics(3, GRID):
        assert oracles.is_metric(D.tolist())
