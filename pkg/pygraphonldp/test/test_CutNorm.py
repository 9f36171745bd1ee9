import numpy as np
import pytest

from pygraphonldp.General import ResolutionTooLargeError, ResolutionMismatchError
from pygraphonldp.Graphon import Graphon, GridPermutation, apply_permutation
from pygraphonldp.CutNorm import (
    cut_norm_exact,
    cut_norm_heuristic,
    cut_norm,
    cut_distance,
    cut_metric_search,
    cut_metric_estimate,
)


def test_cut_norm_exact_examples():
    assert cut_norm_exact(np.zeros((3, 3))).value == 0.0
    res = cut_norm_exact(np.ones((2, 2)))
    assert res.value == 1.0
    assert res.argmax_S == (0, 1) and res.argmax_T == (0, 1)
    assert res.exact
    res = cut_norm_exact([[1.0, -1.0], [-1.0, 1.0]])
    assert res.value == 0.25
    assert res.argmax_S == (0,) and res.argmax_T == (0,)
    assert res.toInfo()["S"] == [1]


def test_cut_norm_exact_reports_consistent_sets(rng):
    D = rng.uniform(-1, 1, (6, 6))
    res = cut_norm_exact(D)
    S, T = list(res.argmax_S), list(res.argmax_T)
    assert res.value == pytest.approx(abs(D[np.ix_(S, T)].sum()) / 36.0, abs=1e-15)


def test_cut_norm_exact_matches_brute_force(rng):
    D = rng.uniform(-1, 1, (4, 4))
    best = 0.0
    for s in range(16):
        for t in range(16):
            S = [i for i in range(4) if s >> i & 1]
            T = [j for j in range(4) if t >> j & 1]
            if S and T:
                best = max(best, abs(D[np.ix_(S, T)].sum()) / 16.0)
    assert cut_norm_exact(D).value == pytest.approx(best, abs=1e-15)


def test_cut_norm_exact_size_limit():
    with pytest.raises(ResolutionTooLargeError):
        cut_norm_exact(np.zeros((17, 17)))


def test_cut_norm_heuristic_examples():
    assert cut_norm_heuristic(np.zeros((4, 4)), restarts=3).value == 0.0
    res = cut_norm_heuristic([[1.0, -1.0], [-1.0, 1.0]], restarts=8)
    assert res.value == pytest.approx(0.25)
    assert not res.exact


def test_cut_norm_heuristic_never_exceeds_exact(rng):
    for m in range(2, 13):
        D = rng.uniform(-1, 1, (m, m))
        assert cut_norm_heuristic(D, restarts=8, seed=m).value <= cut_norm_exact(D).value + 1e-12


def test_cut_norm_heuristic_matches_exact_on_random_m12(rng):
    hits = 0
    for i in range(100):
        D = rng.uniform(-1, 1, (12, 12))
        exact = cut_norm_exact(D).value
        heuristic = cut_norm_heuristic(D, restarts=32, seed=i).value
        assert heuristic <= exact + 1e-12
        if abs(heuristic - exact) <= 1e-12:
            hits += 1
    assert hits >= 90


def test_cut_norm_uses_heuristic_above_limit(rng):
    D = rng.uniform(-1, 1, (20, 20))
    res = cut_norm(D, restarts=4)
    assert not res.exact
    assert 0.0 < res.value <= np.abs(D).mean()


def test_cut_distance_examples(random_graphon):
    h = random_graphon(5)
    assert cut_distance(h, h) == 0.0
    assert cut_distance(Graphon.constant(3, 1.0), Graphon.constant(3, 0.0)) == 1.0
    a = Graphon([[1.0, 0.0], [0.0, 1.0]])
    b = Graphon([[0.0, 1.0], [1.0, 0.0]])
    assert cut_distance(a, b) == 0.25
    with pytest.raises(ResolutionMismatchError):
        cut_distance(a, Graphon.constant(3, 0.5))


def test_cut_distance_triangle_inequality(random_graphon):
    for _ in range(30):
        f, g, h = random_graphon(6), random_graphon(6), random_graphon(6)
        assert cut_distance(f, h) <= cut_distance(f, g) + cut_distance(g, h) + 1e-12


def test_cut_distance_permutation_invariance(random_graphon, rng):
    for _ in range(20):
        h1, h2 = random_graphon(7), random_graphon(7)
        phi = GridPermutation(rng.permutation(7))
        d = cut_distance(h1, h2)
        assert cut_distance(apply_permutation(h1, phi), apply_permutation(h2, phi)) == pytest.approx(d, abs=1e-12)


def test_cut_metric_estimate_examples(random_graphon, rng):
    h = random_graphon(5)
    phi = GridPermutation(rng.permutation(5))
    value, found = cut_metric_search(h, apply_permutation(h, phi))
    assert value == 0.0
    assert np.array_equal(apply_permutation(h, found).values, apply_permutation(h, phi).values)
    assert cut_metric_estimate(Graphon.constant(4, 0.2), Graphon.constant(4, 0.7)) == pytest.approx(0.5)
    a = Graphon([[1.0, 0.0], [0.0, 1.0]])
    b = Graphon([[0.0, 1.0], [1.0, 0.0]])
    assert cut_metric_estimate(a, b) == 0.25


def test_cut_metric_estimate_local_search_is_an_upper_bound(random_graphon):
    h1, h2 = random_graphon(10), random_graphon(10)
    estimate = cut_metric_estimate(h1, h2, restarts=2, seed=3)
    assert estimate <= cut_distance(h1, h2) + 1e-15
