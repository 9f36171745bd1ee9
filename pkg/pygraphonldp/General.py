from __future__ import annotations
import os
import math
import logging
import tempfile

import numpy as np


"""

General 是各模块共用的工具集合：错误类型、幂迭代、可复现的随机数流、网格辅助函数、原子写文件。
(shared helpers: error types, power iteration, seeded streams, grid helpers, atomic writes)

"""


SEED_MASK = (1 << 64) - 1


class GraphonLDPError(Exception):
    kind = "internal"

    def __init__(self, message, **details):
        super().__init__(message)
        self.details = details

    def toInfo(self):
        info = {"error": self.kind, "message": str(self)}
        for key, value in self.details.items():
            if isinstance(value, (int, float, str, bool)) or value is None:
                info[key] = value
        return info


class ValidationError(GraphonLDPError):
    kind = "validation"


class ResolutionMismatchError(GraphonLDPError):
    kind = "resolution-mismatch"


class ResolutionTooLargeError(GraphonLDPError):
    kind = "resolution-too-large"


class DomainError(GraphonLDPError):
    kind = "domain"


class InvalidReferenceError(GraphonLDPError):
    kind = "invalid-reference"


class DegenerateReferenceError(GraphonLDPError):
    kind = "degenerate-reference"


class ConvergenceError(GraphonLDPError):
    kind = "non-convergence"


class ConfigError(GraphonLDPError):
    kind = "config"


def check_same_resolution(a, b, where):
    if a.m != b.m:
        raise ResolutionMismatchError(
            "resolution mismatch m={} vs m={} error @{}".format(a.m, b.m, where),
            m1=a.m,
            m2=b.m,
        )


def philox_generator(seed, stream=0) -> np.random.Generator:
    # key = (stream << 64) | seed, so (seed, stream) pairs never share a counter sequence
    if seed < 0 or stream < 0:
        raise ValidationError("seed and stream must be nonnegative error @philox_generator")
    key = ((int(stream) & SEED_MASK) << 64) | (int(seed) & SEED_MASK)
    return np.random.Generator(np.random.Philox(key=key))


def symmetric_power_iteration(M, tol=1e-12, max_iter=10000, seed=0):
    """Top eigenpair of a symmetric matrix with nonnegative entries.

    Iterates on M + s*I with s = half the largest absolute row sum, which keeps the
    Perron eigenvalue dominant for bipartite spectra (eigenvalues +-lambda). Starts from
    the all-ones vector and uses the Rayleigh quotient x.Mx / x.x, so constant matrices
    come out exact; stops when ||Mx - lambda x|| <= tol * lambda * ||x||.

    Returns (value, unit vector, iterations). Raises ConvergenceError on budget exhaustion.
    """
    M = np.asarray(M, dtype=float)
    m = M.shape[0]
    shift = 0.5 * float(np.abs(M).sum(axis=1).max()) if m > 0 else 0.0
    x = np.ones(m)
    floor = float(x @ (M @ x)) / float(x @ x)
    restarted = False
    it = 0
    while True:
        for it in range(it + 1, max_iter + 1):
            y = M @ x
            xx = float(x @ x)
            lam = float(x @ y) / xx
            res = float(np.linalg.norm(y - lam * x))
            if res <= tol * max(abs(lam), 1e-300) * math.sqrt(xx):
                break
            z = y + shift * x
            x = z / np.linalg.norm(z)
        else:
            raise ConvergenceError(
                "power iteration did not converge in {} iterations error @symmetric_power_iteration".format(
                    max_iter
                ),
                iterations=max_iter,
                residual=res,
            )
        # the Rayleigh quotient of the start vector is a lower bound for the top eigenvalue
        if lam < floor - 1e-12 * max(abs(floor), 1.0) and not restarted:
            logging.warning(
                "power iteration stalled at {} below start bound {}, restarting from a random vector".format(
                    lam, floor
                )
            )
            x = philox_generator(seed).random(m)
            x /= np.linalg.norm(x)
            restarted = True
            continue
        if lam < 0:
            x = -x
            lam = -lam
        if x.sum() < 0:
            x = -x
        x = x / np.linalg.norm(x)
        return lam, x, it


def overlap_weights(k, m) -> np.ndarray:
    """k x m matrix W with W[a, i] = k * |[a/k, (a+1)/k) n [i/m, (i+1)/m)|.

    Rows sum to 1, so W @ H @ W.T is the matrix of cell averages of the step function H
    over the k-grid. Lengths are integers in units of 1/(k*m).
    """
    lo_a = np.arange(k)[:, None] * m
    lo_i = np.arange(m)[None, :] * k
    ov = np.minimum(lo_a + m, lo_i + k) - np.maximum(lo_a, lo_i)
    return np.clip(ov, 0, None) / float(m)


def grid_point_cells(n, m) -> np.ndarray:
    # cell of the m-grid containing the point u/n, u = 0..n-1
    return (np.arange(n) * m) // n


def lp_norm(field, p=1) -> float:
    # L^p norm of a step function on the uniform grid (cells of area 1/m^2)
    field = np.asarray(field, dtype=float)
    if p == math.inf:
        return float(np.abs(field).max())
    return float(np.mean(np.abs(field) ** p) ** (1.0 / p))


def triu_weights(m) -> np.ndarray:
    # multiplicity of each packed upper-triangle entry in the full symmetric matrix
    iu = np.triu_indices(m)
    return np.where(iu[0] == iu[1], 1.0, 2.0)


def triu_pack(H) -> np.ndarray:
    return np.asarray(H)[np.triu_indices(H.shape[0])]


def triu_unpack(x, m) -> np.ndarray:
    H = np.zeros((m, m))
    iu = np.triu_indices(m)
    H[iu] = x
    H[(iu[1], iu[0])] = x
    return H


def get_thread_count(default=None) -> int:
    raw = os.environ.get("GRAPHON_LDP_THREADS", None)
    if raw is None or raw == "":
        return default if default is not None else (os.cpu_count() or 1)
    try:
        n = int(raw)
    except ValueError:
        logging.warning("GRAPHON_LDP_THREADS={} is not an integer, using 1 thread".format(raw))
        return 1
    if n < 1:
        logging.warning("GRAPHON_LDP_THREADS={} is below 1, using 1 thread".format(raw))
        return 1
    return n


def is_inside_directory(root, path) -> bool:
    root = os.path.realpath(root)
    path = os.path.realpath(path)
    return os.path.commonpath([root, path]) == root


def write_atomic(path, text):
    dirPath = os.path.dirname(os.path.abspath(path))
    os.makedirs(dirPath, exist_ok=True)
    fd, tmpPath = tempfile.mkstemp(prefix=".tmp-", dir=dirPath)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as f:
            f.write(text)
        os.replace(tmpPath, path)
    except Exception:
        if os.path.exists(tmpPath):
            os.remove(tmpPath)
        raise
