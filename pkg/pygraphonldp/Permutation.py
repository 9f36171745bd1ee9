import math
import logging
import itertools

import numpy as np

from .General import philox_generator


EXHAUSTIVE_LIMIT = 8
DEFAULT_RESTARTS = 20
IMPROVEMENT_TOL = 1e-15


def exhaustive_minimum(m, cost):
    # all m! permutations in lexicographic order; strict improvement keeps the first minimizer
    best_value, best_perm = math.inf, None
    for perm in itertools.permutations(range(m)):
        p = np.array(perm)
        value = cost(p)
        if value < best_value:
            best_value, best_perm = value, p
    return best_value, best_perm


def local_search_minimum(m, cost, restarts=DEFAULT_RESTARTS, seed=0):
    """First-improvement descent over transpositions.

    Restart 0 starts at the identity, restart i >= 1 at a random permutation drawn from
    the (seed, i) stream, so the result never exceeds cost(identity).
    """
    best_value, best_perm = math.inf, None
    pairs = list(itertools.combinations(range(m), 2))
    for restart in range(max(restarts, 1)):
        if restart == 0:
            p = np.arange(m)
        else:
            p = philox_generator(seed, restart).permutation(m)
        value = cost(p)
        improved = True
        sweeps = 0
        while improved:
            improved = False
            sweeps += 1
            for i, j in pairs:
                q = p.copy()
                q[i], q[j] = q[j], q[i]
                v = cost(q)
                if v < value - IMPROVEMENT_TOL:
                    p, value = q, v
                    improved = True
                    break
        logging.debug("local search restart {} finished after {} sweeps at {}".format(restart, sweeps, value))
        if value < best_value:
            best_value, best_perm = value, p
    return best_value, best_perm


def minimize_over_permutations(m, cost, restarts=DEFAULT_RESTARTS, seed=0, exhaustive_limit=EXHAUSTIVE_LIMIT):
    if m <= exhaustive_limit:
        return exhaustive_minimum(m, cost)
    logging.debug("m={} > {}: local search over transpositions with {} restarts".format(m, exhaustive_limit, restarts))
    return local_search_minimum(m, cost, restarts=restarts, seed=seed)
