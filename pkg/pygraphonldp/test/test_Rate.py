import math
import itertools

import numpy as np
import pytest

from pygraphonldp.General import DomainError, InvalidReferenceError, ResolutionMismatchError, lp_norm
from pygraphonldp.Graph import Graph
from pygraphonldp.Graphon import Graphon, GridPermutation, apply_permutation, level_k_approximant, sample_grid
from pygraphonldp.Rate import (
    rel_entropy,
    rate_I,
    rate_J_estimate,
    uniform_rate_bound,
    log_likelihood_ratio,
    reference_check,
    block_approx_budget,
    domination_bound,
    entropy_decomposition,
    rate_gradient,
)
from pygraphonldp.Reference import rank1_reference
from pygraphonldp.Sampler import SampleSpec, sample


def test_rel_entropy_examples():
    assert rel_entropy(0.37, 0.37) == 0.0
    assert rel_entropy(1.0, 0.5) == pytest.approx(math.log(2.0), abs=1e-15)
    assert rel_entropy(0.0, 0.5) == pytest.approx(math.log(2.0), abs=1e-15)
    assert rel_entropy(0.5, 0.25) == pytest.approx(0.1438410, abs=1e-7)


def test_rel_entropy_domain():
    for a, b in [(0.5, 0.0), (0.5, 1.0), (-0.1, 0.5), (1.1, 0.5)]:
        with pytest.raises(DomainError):
            rel_entropy(a, b)


def test_rate_I_examples():
    r = Graphon.constant(4, 0.5)
    assert rate_I(r, r).value == 0.0
    assert rate_I(Graphon.constant(4, 1.0), r).value == pytest.approx(math.log(2.0), abs=1e-15)
    expected = 0.75 * math.log(1.5) + 0.25 * math.log(0.5)
    for m in (1, 3, 8):
        res = rate_I(Graphon.constant(m, 0.75), Graphon.constant(m, 0.5))
        assert res.value == pytest.approx(expected, abs=1e-14)
        assert res.value == pytest.approx(0.1308120, abs=1e-7)


def test_rate_I_result_invariants(random_graphon):
    r = random_graphon(9, 0.05, 0.95)
    h = random_graphon(9)
    res = rate_I(h, r)
    assert res.per_cell.shape == (9, 9)
    assert (res.per_cell >= 0.0).all()
    assert res.value == pytest.approx(res.per_cell.sum() / 81.0, abs=1e-12)
    assert "per_cell" not in res.toInfo()
    assert len(res.toInfo(verbose=True)["per_cell"]) == 9


def test_rate_I_errors():
    with pytest.raises(InvalidReferenceError):
        rate_I(Graphon.constant(2, 0.5), Graphon([[0.0, 0.5], [0.5, 0.5]]))
    with pytest.raises(ResolutionMismatchError):
        rate_I(Graphon.constant(2, 0.5), Graphon.constant(3, 0.5))


def test_rate_I_vanishes_only_at_reference(random_graphon):
    r = random_graphon(6, 0.1, 0.9)
    assert rate_I(r, r).value == 0.0
    for _ in range(20):
        assert rate_I(random_graphon(6), r).value > 0.0


def test_reference_check_examples(xy):
    check = reference_check(Graphon.constant(3, 0.5))
    assert check.ok
    assert check.l1_log_r == pytest.approx(math.log(2.0), abs=1e-15)
    assert not reference_check(Graphon([[0.0, 0.5], [0.5, 0.5]])).ok
    assert reference_check(xy(8)).ok
    assert reference_check(Graphon([[1.0, 0.5], [0.5, 0.5]])).toInfo()["l1_log_r"] == "inf"


def test_rate_J_examples(random_graphon, rng):
    r = Graphon.constant(5, 0.3)
    h = random_graphon(5)
    assert rate_J_estimate(h, r) == pytest.approx(rate_I(h, r).value, abs=1e-15)
    r = random_graphon(5, 0.1, 0.9)
    phi = GridPermutation(rng.permutation(5))
    assert rate_J_estimate(apply_permutation(r, phi), r) == 0.0
    r2 = Graphon([[0.2, 0.4], [0.4, 0.8]])
    swapped = Graphon([[0.8, 0.4], [0.4, 0.2]])
    assert rate_J_estimate(swapped, r2) == 0.0


def test_rate_J_is_permutation_invariant_and_below_I(random_graphon):
    for m in (3, 5, 6):
        r = random_graphon(m, 0.1, 0.9)
        h = random_graphon(m)
        J = rate_J_estimate(h, r)
        assert J <= rate_I(h, r).value
        for perm in itertools.permutations(range(m)):
            phi = GridPermutation(np.array(perm))
            assert rate_J_estimate(apply_permutation(h, phi), r) == J


def test_rate_J_local_search_below_I(random_graphon):
    r = random_graphon(10, 0.1, 0.9)
    h = random_graphon(10)
    assert rate_J_estimate(h, r, restarts=3, seed=1) <= rate_I(h, r).value


def test_rate_J_lower_semicontinuous_along_sequence(random_graphon, random_symmetric):
    r = random_graphon(4, 0.1, 0.9)
    h = random_graphon(4, 0.1, 0.9)
    direction = random_symmetric(4, -0.1, 0.1)
    limit = rate_J_estimate(h, r)
    diffs = [rate_J_estimate(Graphon(h.values + direction / 10.0**k), r) - limit for k in range(1, 10)]
    assert diffs[-1] >= -1e-9
    assert abs(diffs[-1]) < abs(diffs[0])


def test_uniform_rate_bound_examples():
    assert uniform_rate_bound(Graphon.constant(3, 0.4), Graphon.constant(3, 0.4)) == 0.0
    assert uniform_rate_bound(Graphon.constant(3, 0.5), Graphon.constant(3, 0.25)) == pytest.approx(
        math.log(2.0) + math.log(1.5), abs=1e-14
    )
    assert uniform_rate_bound(Graphon.constant(3, 0.5), Graphon.constant(3, 0.25)) == pytest.approx(1.0986123, abs=1e-7)


def test_uniform_rate_bound_holds_on_random_triples(random_graphon):
    violations = 0
    for _ in range(1000):
        f = random_graphon(16)
        r1 = random_graphon(16, 0.01, 0.99)
        r2 = random_graphon(16, 0.01, 0.99)
        if abs(rate_I(f, r1).value - rate_I(f, r2).value) > uniform_rate_bound(r1, r2):
            violations += 1
    assert violations == 0


def test_rate_I_is_l2_continuous(random_graphon, random_symmetric):
    r = random_graphon(16, 0.1, 0.9)
    h = random_graphon(16)
    base = rate_I(h, r).value
    for _ in range(20):
        delta = random_symmetric(16)
        delta *= 1e-4 / lp_norm(delta, 2)
        moved = Graphon(np.clip(h.values + delta, 0.0, 1.0))
        assert lp_norm(moved.values - h.values, 2) <= 1e-4 + 1e-15
        assert abs(rate_I(moved, r).value - base) <= 1e-2
    delta = random_symmetric(16, -0.5, 0.5)
    diffs = []
    for n in (1, 2, 4, 8, 16, 32, 64):
        hn = Graphon(np.clip(h.values + delta / n, 0.0, 1.0))
        diffs.append(abs(rate_I(hn, r).value - base))
    assert diffs[-1] < 1e-2
    assert diffs[-1] < diffs[0]


def test_domination_bound_dominates(random_graphon):
    r = random_graphon(8, 0.05, 0.95)
    bound = domination_bound(r)
    for _ in range(50):
        assert 0.0 <= rate_I(random_graphon(8), r).value <= bound


def test_entropy_decomposition_identity(random_graphon, random_symmetric):
    for p in (0.2, 0.5, 0.7):
        f = random_graphon(6, 0.2, 0.8)
        r = random_graphon(6, 0.05, 0.95)
        delta = random_symmetric(6, -0.15, 0.15)
        terms = entropy_decomposition(f, delta, r, p)
        assert terms["I_r(g)"] == pytest.approx(terms["rhs"], abs=1e-12)


def test_rate_gradient_matches_central_differences(rng):
    m = 8
    t = 1e-6
    for _ in range(100):
        R = np.triu(rng.uniform(0.1, 0.9, (m, m)))
        r = Graphon(R + np.triu(R, 1).T)
        H = np.triu(rng.uniform(0.1, 0.9, (m, m)))
        H = H + np.triu(H, 1).T
        i, j = rng.integers(0, m, 2)
        E = np.zeros((m, m))
        E[i, j] = E[j, i] = 1.0
        grad = rate_gradient(Graphon(H), r)
        analytic = grad[i, j] + (grad[j, i] if i != j else 0.0)
        numeric = (rate_I(Graphon(H + t * E), r).value - rate_I(Graphon(H - t * E), r).value) / (2 * t)
        assert numeric == pytest.approx(analytic, rel=1e-4, abs=1e-9)


def test_log_likelihood_ratio_examples(rng):
    g = Graph.complete(2)
    half = Graphon.constant(2, 0.5)
    assert log_likelihood_ratio(g, half, half) == 0.0
    assert log_likelihood_ratio(g, half, Graphon.constant(2, 0.25)) == pytest.approx(0.25 * math.log(2.0), abs=1e-15)
    assert log_likelihood_ratio(g, half, Graphon.constant(2, 0.25)) == pytest.approx(0.1732868, abs=1e-7)
    with pytest.raises(ResolutionMismatchError):
        log_likelihood_ratio(Graph.empty(3), half, half)
    with pytest.raises(DomainError):
        log_likelihood_ratio(g, half, Graphon.constant(2, 1.0))


def test_block_approx_budget_bounds_likelihood_ratio(xy):
    r = xy(32)
    r8 = level_k_approximant(r, 8)
    budget = block_approx_budget(r, r8)
    assert budget.overcount_cells == 0
    assert budget.overcount_log_r == 0.0
    rB = sample_grid(r8, 32)
    violations = 0
    for seed in range(50):
        g = sample(SampleSpec(32, r, seed=seed))
        if abs(log_likelihood_ratio(g, r, rB)) > budget.total:
            violations += 1
    assert violations == 0


def test_block_approx_budget_with_overcount():
    n, k = 30, 8
    r_n = rank1_reference(n, [0.0, 1.0])
    r_k = rank1_reference(k, [0.0, 1.0])
    budget = block_approx_budget(r_n, r_k)
    assert budget.overcount_cells > 0
    assert budget.overcount_log_r > 0.0
    assert budget.total == pytest.approx(
        budget.l1_log_r + budget.l1_log_1mr + budget.overcount_log_r + budget.overcount_log_1mr
    )
    rB = sample_grid(r_k, n)
    # the plain sum over all vertex pairs is dominated by the budget
    a, b = r_n.values, rB.values
    plain = (np.abs(np.log(a) - np.log(b)) + np.abs(np.log1p(-a) - np.log1p(-b))).sum() / n**2
    assert plain <= budget.total + 1e-12
    for seed in range(50):
        g = sample(SampleSpec(n, r_n, seed=seed))
        assert abs(log_likelihood_ratio(g, r_n, rB)) <= budget.total
