from __future__ import annotations
import math
import logging
import threading
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .General import (
    ValidationError,
    ConvergenceError,
    philox_generator,
    symmetric_power_iteration,
)
from .Graph import Graph
from .Graphon import Graphon, sample_grid


LAMBDA_TOL = 1e-10
LAMBDA_MAX_ITER = 10000
FALLBACK_FACTOR = 10


class SampleSpec:
    def __init__(self, n, r: Graphon, seed=0, count=1):
        if int(n) < 1:
            raise ValidationError("n must be >= 1, got {} error @SampleSpec".format(n))
        if int(count) < 1:
            raise ValidationError("count must be >= 1, got {} error @SampleSpec".format(count))
        if int(seed) < 0:
            raise ValidationError("seed must be nonnegative error @SampleSpec")
        self.n = int(n)
        self.r = r
        self.seed = int(seed)
        self.count = int(count)

    def withSeed(self, seed):
        return SampleSpec(self.n, self.r, seed=seed, count=1)

    def __repr__(self):
        return "SampleSpec(n={},r={},seed={},count={})".format(self.n, self.r.getName(), self.seed, self.count)


def sample(spec: SampleSpec) -> Graph:
    """Inhomogeneous random graph: pair {u, v}, u < v, is an edge with probability r(u/n, v/n).

    One uniform draw per pair, consumed in lexicographic (u, v) order from the Philox
    stream of spec.seed; the diagonal is never sampled.
    """
    n = spec.n
    probs = sample_grid(spec.r, n).values
    iu, ju = np.triu_indices(n, k=1)
    draws = philox_generator(spec.seed).random(iu.shape[0])
    hit = draws < probs[iu, ju]
    A = np.zeros((n, n), dtype=bool)
    A[iu[hit], ju[hit]] = True
    A[ju[hit], iu[hit]] = True
    return Graph(A)


def lambda_over_n(g: Graph, tol=LAMBDA_TOL, max_iter=LAMBDA_MAX_ITER) -> float:
    """Largest adjacency eigenvalue divided by n, i.e. the operator norm of the empirical graphon."""
    A = g.adjacency.astype(float)
    if not A.any():
        return 0.0
    try:
        lam, _, it = symmetric_power_iteration(A, tol=tol, max_iter=max_iter)
    except ConvergenceError as e:
        logging.warning(
            "power iteration on n={} did not converge in {} iterations (residual {}), retrying with {}".format(
                g.n, max_iter, e.details.get("residual"), FALLBACK_FACTOR * max_iter
            )
        )
        lam, _, it = symmetric_power_iteration(A, tol=tol, max_iter=FALLBACK_FACTOR * max_iter)
    logging.debug("lambda_1={} for n={} after {} iterations".format(lam, g.n, it))
    return lam / g.n


class EnsembleStats:
    def __init__(self, n, seeds, samples, thresholds):
        samples = np.asarray(samples, dtype=float)
        self.n = int(n)
        self.seeds = [int(s) for s in seeds]
        self.samples = samples.tolist()
        self.mean = float(samples.mean())
        self.std = float(samples.std())
        self.min = float(samples.min())
        self.max = float(samples.max())
        self.thresholds = [float(b) for b in thresholds]
        self.tail_counts = {b: int(np.count_nonzero(samples >= b)) for b in self.thresholds}

    @property
    def count(self) -> int:
        return len(self.samples)

    def tail_fraction(self, beta) -> float:
        return self.tail_counts[beta] / float(self.count)

    def log_frequency(self, beta) -> float:
        # -(2/n^2) log(fraction): Monte Carlo proxy of the rate at speed n^2/2
        fraction = self.tail_fraction(beta)
        if fraction == 0.0:
            return math.nan
        return -2.0 * math.log(fraction) / float(self.n * self.n)

    def toCsv(self) -> str:
        lines = ["sample_index,seed,lambda_over_n"]
        for i, (seed, value) in enumerate(zip(self.seeds, self.samples)):
            lines.append("{},{},{}".format(i, seed, repr(value)))
        return "\n".join(lines) + "\n"

    def toInfo(self):
        tails = []
        for b in self.thresholds:
            lf = self.log_frequency(b)
            tails.append(
                {
                    "beta": b,
                    "count": self.tail_counts[b],
                    "fraction": self.tail_fraction(b),
                    "log_frequency": None if math.isnan(lf) else lf,
                }
            )
        return {
            "n": self.n,
            "count": self.count,
            "mean": self.mean,
            "stddev": self.std,
            "min": self.min,
            "max": self.max,
            "tails": tails,
        }

    def __repr__(self):
        return "EnsembleStats(n={},count={},mean={})".format(self.n, self.count, self.mean)


def run_ensemble(spec: SampleSpec, thresholds=(), threads=1, progress_callback=None) -> EnsembleStats:
    """spec.count independent samples with seeds spec.seed + i; results are ordered by i."""
    thresholds = [float(b) for b in thresholds]
    if thresholds != sorted(thresholds):
        raise ValidationError("thresholds must be sorted, got {} error @run_ensemble".format(thresholds))
    seeds = [spec.seed + i for i in range(spec.count)]
    values = [None] * spec.count
    lock = threading.Lock()
    done = 0

    def process(i):
        nonlocal done
        values[i] = lambda_over_n(sample(spec.withSeed(seeds[i])))
        with lock:
            done += 1
            if progress_callback:
                progress_callback(done, spec.count)

    if threads <= 1:
        for i in range(spec.count):
            process(i)
    else:
        logging.debug("running {} samples on {} threads".format(spec.count, threads))
        with ThreadPoolExecutor(max_workers=threads) as executor:
            list(executor.map(process, range(spec.count)))
    return EnsembleStats(spec.n, seeds, values, thresholds)
