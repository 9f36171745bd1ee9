from __future__ import annotations
import math
import logging

import numpy as np
from scipy.special import rel_entr, logit

from .General import (
    DomainError,
    InvalidReferenceError,
    ResolutionMismatchError,
    check_same_resolution,
    grid_point_cells,
)
from .Graphon import Graphon
from .Permutation import minimize_over_permutations, DEFAULT_RESTARTS


class RateResult:
    def __init__(self, per_cell):
        per_cell = np.asarray(per_cell, dtype=float)
        per_cell.setflags(write=False)
        self.per_cell = per_cell
        self.value = float(per_cell.mean())

    @property
    def m(self) -> int:
        return self.per_cell.shape[0]

    def toInfo(self, verbose=False):
        info = {"value": self.value, "m": self.m}
        if verbose:
            info["per_cell"] = self.per_cell.tolist()
        return info

    def __repr__(self):
        return "RateResult({},m={})".format(self.value, self.m)


class ReferenceCheck:
    def __init__(self, ok, l1_log_r, l1_log_1mr, min_value, max_value):
        self.ok = bool(ok)
        self.l1_log_r = float(l1_log_r)
        self.l1_log_1mr = float(l1_log_1mr)
        self.min_value = float(min_value)
        self.max_value = float(max_value)

    def toInfo(self):
        return {
            "ok": self.ok,
            "l1_log_r": self.l1_log_r if self.ok else "inf",
            "l1_log_1mr": self.l1_log_1mr if self.ok else "inf",
            "min_value": self.min_value,
            "max_value": self.max_value,
        }


class BlockApproxBudget:
    """Bound on (1/n^2)|log LR| split into the exactly counted L1 part and the over-count part."""

    def __init__(self, l1_log_r, l1_log_1mr, overcount_log_r, overcount_log_1mr, overcount_cells):
        self.l1_log_r = float(l1_log_r)
        self.l1_log_1mr = float(l1_log_1mr)
        self.overcount_log_r = float(overcount_log_r)
        self.overcount_log_1mr = float(overcount_log_1mr)
        self.overcount_cells = int(overcount_cells)

    @property
    def total(self) -> float:
        return self.l1_log_r + self.l1_log_1mr + self.overcount_log_r + self.overcount_log_1mr

    def toInfo(self):
        return {
            "l1_log_r": self.l1_log_r,
            "l1_log_1mr": self.l1_log_1mr,
            "overcount_log_r": self.overcount_log_r,
            "overcount_log_1mr": self.overcount_log_1mr,
            "overcount_cells": self.overcount_cells,
            "total": self.total,
        }


def rel_entropy(a, b) -> float:
    """Bernoulli relative entropy R(a|b) in nats, with 0 log 0 = 0."""
    if not (0.0 <= a <= 1.0):
        raise DomainError("rel_entropy needs a in [0,1], got {} error @rel_entropy".format(a))
    if not (0.0 < b < 1.0):
        raise DomainError("rel_entropy needs b in (0,1), got {} error @rel_entropy".format(b))
    return float(rel_entr(a, b) + rel_entr(1.0 - a, 1.0 - b))


def rel_entropy_field(h, r) -> np.ndarray:
    # cellwise R(h|r); rel_entr is exactly 0 at h in {0,1} and never forms log(0)
    h = np.asarray(h, dtype=float)
    r = np.asarray(r, dtype=float)
    return rel_entr(h, r) + rel_entr(1.0 - h, 1.0 - r)


def reference_check(r: Graphon) -> ReferenceCheck:
    v = r.values
    ok = bool(np.all(v > 0.0) and np.all(v < 1.0))
    if ok:
        l1_r = float(np.mean(-np.log(v)))
        l1_1mr = float(np.mean(-np.log1p(-v)))
    else:
        l1_r = l1_1mr = math.inf
    return ReferenceCheck(ok, l1_r, l1_1mr, v.min(), v.max())


def require_reference(r: Graphon, where):
    check = reference_check(r)
    if not check.ok:
        raise InvalidReferenceError(
            "reference {} has cell values in {{0,1}} (range [{}, {}]) error @{}".format(
                r.getName(), check.min_value, check.max_value, where
            )
        )
    return check


def rate_I(h: Graphon, r: Graphon) -> RateResult:
    check_same_resolution(h, r, "rate_I")
    require_reference(r, "rate_I")
    return RateResult(rel_entropy_field(h.values, r.values))


def rate_gradient(h: Graphon, r: Graphon) -> np.ndarray:
    """d I_r / d h[i, j] with every cell treated as an independent variable."""
    check_same_resolution(h, r, "rate_gradient")
    require_reference(r, "rate_gradient")
    return (logit(h.values) - logit(r.values)) / float(h.m * h.m)


def rate_J_estimate(h: Graphon, r: Graphon, restarts=DEFAULT_RESTARTS, seed=0) -> float:
    """min over grid permutations of I_r(h^phi); exhaustive for m <= 8, local search beyond."""
    check_same_resolution(h, r, "rate_J_estimate")
    require_reference(r, "rate_J_estimate")
    H, R = h.values, r.values

    def cost(p):
        return float(rel_entropy_field(H[np.ix_(p, p)], R).mean())

    value, perm = minimize_over_permutations(h.m, cost, restarts=restarts, seed=seed)
    logging.debug("J estimate {} for {} at {}".format(value, h.getName(), perm))
    return value


def uniform_rate_bound(r1: Graphon, r2: Graphon) -> float:
    """||log r1 - log r2||_1 + ||log(1-r1) - log(1-r2)||_1, a bound on |I_r1(f) - I_r2(f)| for every f."""
    check_same_resolution(r1, r2, "uniform_rate_bound")
    require_reference(r1, "uniform_rate_bound")
    require_reference(r2, "uniform_rate_bound")
    a, b = r1.values, r2.values
    return float(np.mean(np.abs(np.log(a) - np.log(b))) + np.mean(np.abs(np.log1p(-a) - np.log1p(-b))))


def domination_bound(r: Graphon) -> float:
    # |R(h|r)| <= 2/e + |log r| + |log(1-r)| pointwise, for every h
    check = require_reference(r, "domination_bound")
    return 2.0 / math.e + check.l1_log_r + check.l1_log_1mr


def entropy_decomposition(f: Graphon, delta, r: Graphon, p: float) -> dict:
    """Terms of I_r(f+delta) = I_p(f+delta) + I_r(f) - I_p(f) + int delta log(((1-r)/r) (p/(1-p)))."""
    check_same_resolution(f, r, "entropy_decomposition")
    require_reference(r, "entropy_decomposition")
    if not (0.0 < p < 1.0):
        raise DomainError("entropy_decomposition needs p in (0,1) error @entropy_decomposition")
    delta = np.asarray(delta, dtype=float)
    if delta.shape != f.values.shape:
        raise ResolutionMismatchError("delta shape {} vs m={} error @entropy_decomposition".format(delta.shape, f.m))
    g = Graphon(f.values + delta)
    rp = Graphon.constant(f.m, p)
    weight = np.log1p(-r.values) - np.log(r.values) + math.log(p) - math.log1p(-p)
    terms = {
        "I_r(g)": rate_I(g, r).value,
        "I_p(g)": rate_I(g, rp).value,
        "I_r(f)": rate_I(f, r).value,
        "I_p(f)": rate_I(f, rp).value,
        "linear": float(np.mean(delta * weight)),
    }
    terms["rhs"] = terms["I_p(g)"] + terms["I_r(f)"] - terms["I_p(f)"] + terms["linear"]
    return terms


def _check_open_interval(h: Graphon, where):
    if not (np.all(h.values > 0.0) and np.all(h.values < 1.0)):
        raise DomainError("{} has cell values in {{0,1}} error @{}".format(h.getName(), where))


def log_likelihood_ratio(g, rA: Graphon, rB: Graphon) -> float:
    """(1/n^2) log dP_{n,rA}/dP_{n,rB}(g), summed over vertex pairs u < v."""
    if rA.m != g.n or rB.m != g.n:
        raise ResolutionMismatchError(
            "edge-probability graphons must have resolution n={}, got {} and {} error @log_likelihood_ratio".format(
                g.n, rA.m, rB.m
            )
        )
    _check_open_interval(rA, "log_likelihood_ratio")
    _check_open_interval(rB, "log_likelihood_ratio")
    iu = np.triu_indices(g.n, k=1)
    a, b = rA.values[iu], rB.values[iu]
    e = g.adjacency[iu]
    terms = np.where(e, np.log(a) - np.log(b), np.log1p(-a) - np.log1p(-b))
    return float(terms.sum()) / float(g.n * g.n)


def block_approx_budget(r_n: Graphon, r_k: Graphon) -> BlockApproxBudget:
    """Exact bookkeeping of the likelihood-ratio bound against a level-k block graphon.

    Vertex u sits at the grid point u/n and reads r_k from the k-cell containing that
    point. Where the n-cell B(u,v,n) lies inside that k-cell, (1/n^2)|log r_n - log r_k|
    is exactly an L1 contribution; otherwise the term is over-counted and bounded by k^2
    times the L1 norm on the intersection B(u,v,n) n B(i,j,k).
    """
    require_reference(r_n, "block_approx_budget")
    require_reference(r_k, "block_approx_budget")
    n, k = r_n.m, r_k.m
    u = np.arange(n)
    cell = grid_point_cells(n, k)
    contained = (u + 1) * k <= (cell + 1) * n
    length = (np.minimum((u + 1) * k, (cell + 1) * n) - u * k) / float(n * k)
    a = r_n.values
    b = r_k.values[np.ix_(cell, cell)]
    d_r = np.abs(np.log(a) - np.log(b))
    d_1mr = np.abs(np.log1p(-a) - np.log1p(-b))
    inside = contained[:, None] & contained[None, :]
    area = np.outer(length, length)
    scale = 1.0 / float(n * n)
    return BlockApproxBudget(
        l1_log_r=scale * d_r[inside].sum(),
        l1_log_1mr=scale * d_1mr[inside].sum(),
        overcount_log_r=k * k * (d_r * area)[~inside].sum(),
        overcount_log_1mr=k * k * (d_1mr * area)[~inside].sum(),
        overcount_cells=int((~inside).sum()),
    )
