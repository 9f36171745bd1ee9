from __future__ import annotations
import math
import logging

import numpy as np

from .General import (
    ValidationError,
    DomainError,
    ConvergenceError,
    DegenerateReferenceError,
    ResolutionMismatchError,
    check_same_resolution,
    symmetric_power_iteration,
)
from .Graphon import Graphon, level_k_approximant
from .Rate import rate_I, require_reference


"""

Eigen 负责核算子范数 ||T_h||、参考图元常数 C_r, B_r, K_r 以及最优扰动方向 Delta。
(kernel operator norm, reference constants and the perturbation calculus around r)

"""


NORM_TOL = 1e-12
NORM_MAX_ITER = 10000
GAP_TOL = 1e-8


class KernelNorm:
    def __init__(self, value, eigvec, iterations):
        eigvec = np.asarray(eigvec, dtype=float)
        eigvec.setflags(write=False)
        self.value = float(value)
        self.eigvec = eigvec
        self.iterations = int(iterations)

    def toInfo(self):
        return {"value": self.value, "iterations": self.iterations}

    def __repr__(self):
        return "KernelNorm({},iterations={})".format(self.value, self.iterations)


class ReferenceConstants:
    def __init__(self, C, B):
        self.C = float(C)
        self.B = float(B)
        self.K = self.C * self.C / (2.0 * self.B)

    def __iter__(self):
        return iter((self.C, self.B, self.K))

    def toInfo(self):
        return {"C_r": self.C, "B_r": self.B, "K_r": self.K}

    def __repr__(self):
        return "ReferenceConstants(C={},B={},K={})".format(self.C, self.B, self.K)


def operator_norm(h: Graphon, tol=NORM_TOL, max_iter=NORM_MAX_ITER) -> KernelNorm:
    """||T_h|| for the step kernel h: the Perron eigenvalue of values / m.

    eigvec is the Euclidean unit eigenvector; the L2-unit eigenfunction is sqrt(m) * eigvec
    on each cell. A small spectral gap can exhaust the power iteration budget; the value
    then comes from the dense decomposition.
    """
    M = h.values / float(h.m)
    if not M.any():
        return KernelNorm(0.0, np.full(h.m, 1.0 / math.sqrt(h.m)), 0)
    try:
        lam, v, it = symmetric_power_iteration(M, tol=tol, max_iter=max_iter)
    except ConvergenceError as e:
        lam, v, gap = top_eigenpair(h.values, h.m)
        logging.warning(
            "power iteration on {} stopped at residual {} after {} iterations (gap {}), using eigh".format(
                h.getName(), e.details.get("residual"), max_iter, gap
            )
        )
        it = max_iter
    return KernelNorm(lam, v, it)


def top_eigenpair(H, m):
    """(lambda, v, gap) of H / m by dense symmetric eigendecomposition."""
    vals, vecs = np.linalg.eigh(np.asarray(H, dtype=float) / float(m))
    v = vecs[:, -1]
    if v.sum() < 0:
        v = -v
    gap = float(vals[-1] - vals[-2]) if m > 1 else math.inf
    return float(vals[-1]), v, gap


def norm_gradient(h: Graphon) -> np.ndarray:
    """d||T_h|| / d h[i, j] = v_i v_j / m, every cell an independent variable.

    Only meaningful for a simple top eigenvalue; a warning is logged otherwise.
    """
    _, v, gap = top_eigenpair(h.values, h.m)
    if gap < GAP_TOL:
        logging.warning("top eigenvalue of {} is numerically degenerate (gap {})".format(h.getName(), gap))
    return np.outer(v, v) / float(h.m)


def constants(r: Graphon) -> ReferenceConstants:
    require_reference(r, "constants")
    C = operator_norm(r).value
    v = r.values
    B = float(np.mean(v**3 * (1.0 - v)))
    if not B > 0.0:
        raise DegenerateReferenceError("B_r = {} for {} error @constants".format(B, r.getName()))
    return ReferenceConstants(C, B)


def optimal_perturbation(r: Graphon, consts: ReferenceConstants = None) -> np.ndarray:
    # Delta = (C_r / B_r) r^2 (1 - r), the minimizer of the quadratic cost under int r Delta = C_r
    if consts is None:
        consts = constants(r)
    v = r.values
    delta = (consts.C / consts.B) * v * v * (1.0 - v)
    delta.setflags(write=False)
    return delta


def quadratic_cost(r: Graphon, delta) -> float:
    require_reference(r, "quadratic_cost")
    delta = np.asarray(delta, dtype=float)
    if delta.shape != r.values.shape:
        raise ResolutionMismatchError("delta shape {} vs m={} error @quadratic_cost".format(delta.shape, r.m))
    v = r.values
    return float(np.mean(delta * delta / (2.0 * v * (1.0 - v))))


def second_order_cost(r: Graphon, delta, eps, alpha=1.0):
    """(I_r(r + eps^alpha Delta), (1/2) eps^(2 alpha) int Delta^2 / (r(1-r)))."""
    if eps < 0:
        raise ValidationError("eps must be nonnegative error @second_order_cost")
    delta = np.asarray(delta, dtype=float)
    scale = float(eps) ** float(alpha)
    approx = scale * scale * quadratic_cost(r, delta)
    perturbed = r.values + scale * delta
    if perturbed.min() < -1e-12 or perturbed.max() > 1.0 + 1e-12:
        raise DomainError(
            "r + eps^alpha Delta leaves [0,1] (range [{}, {}]) error @second_order_cost".format(
                perturbed.min(), perturbed.max()
            )
        )
    exact = rate_I(Graphon(perturbed), r).value
    return exact, approx


def rate_approx_convergence(r: Graphon, f: Graphon, k_list) -> list:
    """|I_{r_k}(f_k) - I_r(f)| for the level-k approximants of r and f."""
    check_same_resolution(r, f, "rate_approx_convergence")
    require_reference(r, "rate_approx_convergence")
    base = rate_I(f, r).value
    out = []
    for k in k_list:
        if int(k) < 1 or r.m % int(k) != 0:
            raise ValidationError("k={} must be a positive divisor of m={} error @rate_approx_convergence".format(k, r.m))
        value = rate_I(level_k_approximant(f, int(k)), level_k_approximant(r, int(k))).value
        out.append(abs(value - base))
        logging.debug("k={} I_rk(f_k)={} |diff|={}".format(k, value, out[-1]))
    return out
