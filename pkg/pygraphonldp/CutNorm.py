from __future__ import annotations
import logging

import numpy as np

from .General import (
    ValidationError,
    ResolutionTooLargeError,
    check_same_resolution,
    philox_generator,
)
from .Graphon import Graphon, GridPermutation
from .Permutation import minimize_over_permutations, DEFAULT_RESTARTS


EXACT_LIMIT = 16
DEFAULT_CUT_RESTARTS = 32
TIE_TOL = 1e-12


class CutNormResult:
    """Cut norm of a signed m x m step kernel and the maximizing S, T (0-based)."""

    def __init__(self, value, argmax_S, argmax_T, exact):
        self.value = float(value)
        self.argmax_S = tuple(int(i) for i in argmax_S)
        self.argmax_T = tuple(int(j) for j in argmax_T)
        self.exact = bool(exact)

    def toInfo(self):
        return {
            "value": self.value,
            "S": [i + 1 for i in self.argmax_S],
            "T": [j + 1 for j in self.argmax_T],
            "exact": self.exact,
        }

    def __repr__(self):
        return "CutNormResult({},exact={})".format(self.value, self.exact)


def _as_square(D, where):
    D = np.asarray(D, dtype=float)
    if D.ndim != 2 or D.shape[0] != D.shape[1] or D.shape[0] < 1:
        raise ValidationError("expected a nonempty square matrix error @{}".format(where))
    return D


def _set_value(D, S, T):
    m = D.shape[0]
    if len(S) == 0 or len(T) == 0:
        return 0.0
    return abs(float(D[np.ix_(list(S), list(T))].sum())) / (m * m)


def _best_response(c):
    # optimal T for fixed column sums c: positive part or negative part, whichever is larger
    pos = float(np.clip(c, 0.0, None).sum())
    neg = float(np.clip(-c, 0.0, None).sum())
    if pos >= neg:
        return pos, np.flatnonzero(c > 0)
    return neg, np.flatnonzero(c < 0)


def cut_norm_exact(D) -> CutNormResult:
    """Exact cut norm by exhaustion over the 2^m row sets with the sign-optimal column set.

    Ties prefer the lexicographically smallest S.
    """
    D = _as_square(D, "cut_norm_exact")
    m = D.shape[0]
    if m > EXACT_LIMIT:
        raise ResolutionTooLargeError(
            "exact cut norm limited to m <= {}, got m={} error @cut_norm_exact".format(EXACT_LIMIT, m), m=m
        )
    codes = np.arange(2**m)
    masks = ((codes[:, None] >> np.arange(m)[None, :]) & 1).astype(float)
    C = masks @ D
    scores = np.maximum(np.clip(C, 0.0, None).sum(axis=1), np.clip(-C, 0.0, None).sum(axis=1))
    best = scores.max()
    ties = np.flatnonzero(scores >= best - TIE_TOL * max(1.0, abs(best)))
    S = min((tuple(np.flatnonzero(masks[t])) for t in ties))
    _, T = _best_response(D[list(S)].sum(axis=0) if len(S) > 0 else np.zeros(m))
    return CutNormResult(_set_value(D, S, T), S, T, exact=True)


def _ascend(D, S):
    """Alternating maximization from the row set S, polished by single-row flips."""
    m = D.shape[0]

    def score(mask):
        return _best_response(D[mask].sum(axis=0))[0]

    S = S.copy()
    value = score(S)
    for _ in range(10 * m + 10):
        changed = False
        # alternate: best T for S, then best S for T (same sign)
        c = D[S].sum(axis=0)
        _, T = _best_response(c)
        sign = 1.0 if float(np.clip(c, 0.0, None).sum()) >= float(np.clip(-c, 0.0, None).sum()) else -1.0
        rows = sign * D[:, T].sum(axis=1) if len(T) > 0 else np.zeros(m)
        S_alt = rows > 0
        v_alt = score(S_alt)
        if v_alt > value + TIE_TOL:
            S, value, changed = S_alt, v_alt, True
        for i in range(m):
            S_flip = S.copy()
            S_flip[i] = not S_flip[i]
            v_flip = score(S_flip)
            if v_flip > value + TIE_TOL:
                S, value, changed = S_flip, v_flip, True
        if not changed:
            break
    return S


def cut_norm_heuristic(D, restarts=DEFAULT_CUT_RESTARTS, seed=0) -> CutNormResult:
    """Best local optimum of the alternating S/T maximization over seeded random starts."""
    D = _as_square(D, "cut_norm_heuristic")
    if restarts < 1:
        raise ValidationError("restarts must be >= 1 error @cut_norm_heuristic")
    m = D.shape[0]
    best = None
    for restart in range(restarts):
        S0 = philox_generator(seed, restart).random(m) < 0.5
        S = _ascend(D, S0)
        S_idx = np.flatnonzero(S)
        _, T = _best_response(D[S].sum(axis=0)) if len(S_idx) > 0 else (0.0, np.array([], dtype=int))
        value = _set_value(D, S_idx, T)
        if best is None or value > best.value:
            best = CutNormResult(value, S_idx, T, exact=False)
    return best


def cut_norm(D, restarts=DEFAULT_CUT_RESTARTS, seed=0) -> CutNormResult:
    D = _as_square(D, "cut_norm")
    if D.shape[0] <= EXACT_LIMIT:
        return cut_norm_exact(D)
    logging.debug("m={} > {}: heuristic cut norm (lower bound), {} restarts".format(D.shape[0], EXACT_LIMIT, restarts))
    return cut_norm_heuristic(D, restarts=restarts, seed=seed)


def cut_distance_result(h1: Graphon, h2: Graphon, restarts=DEFAULT_CUT_RESTARTS, seed=0) -> CutNormResult:
    check_same_resolution(h1, h2, "cut_distance")
    return cut_norm(h1.values - h2.values, restarts=restarts, seed=seed)


def cut_distance(h1: Graphon, h2: Graphon, restarts=DEFAULT_CUT_RESTARTS, seed=0) -> float:
    return cut_distance_result(h1, h2, restarts=restarts, seed=seed).value


def cut_metric_search(
    h1: Graphon, h2: Graphon, restarts=DEFAULT_RESTARTS, seed=0, cut_restarts=DEFAULT_CUT_RESTARTS
):
    """min over grid-block permutations phi of d(h1^phi, h2); returns (value, phi)."""
    check_same_resolution(h1, h2, "cut_metric_estimate")
    D2 = h2.values

    def cost(p):
        return cut_norm(h1.values[np.ix_(p, p)] - D2, restarts=cut_restarts, seed=seed).value

    value, perm = minimize_over_permutations(h1.m, cost, restarts=restarts, seed=seed)
    logging.debug("cut metric estimate {} at permutation {}".format(value, perm))
    return value, GridPermutation(perm)


def cut_metric_estimate(
    h1: Graphon, h2: Graphon, restarts=DEFAULT_RESTARTS, seed=0, cut_restarts=DEFAULT_CUT_RESTARTS
) -> float:
    # upper bound on the cut metric: only block permutations are searched
    return cut_metric_search(h1, h2, restarts=restarts, seed=seed, cut_restarts=cut_restarts)[0]
