from __future__ import annotations
import math
import logging
import threading
from concurrent.futures import ThreadPoolExecutor

import numpy as np
from scipy.optimize import minimize
from scipy.special import rel_entr, logit

from .General import (
    ValidationError,
    ConvergenceError,
    GraphonLDPError,
    philox_generator,
    triu_weights,
    triu_pack,
    triu_unpack,
    lp_norm,
)
from .Graphon import Graphon
from .Rate import rate_I, require_reference
from .Eigen import operator_norm, constants, optimal_perturbation, top_eigenpair, GAP_TOL
from .Reference import parse_reference


BOUND_LO = 1e-9
BOUND_HI = 1.0 - 1e-9
MU_START = 10.0
MU_MAX = 1e6
MU_FACTOR = 2.0
SUFFICIENT_DECREASE = 0.25
CONSTRAINT_TOL = 1e-9
ACCEPT_RESIDUAL = 1e-5
MAX_OUTER = 60
INNER_MAXITER = 2000
INNER_FTOL = 1e-15
INNER_GTOL = 1e-12
NOISE_SCALE = 1e-8
RANDOM_START_SPREAD = 0.05
RANK1_TOL = 1e-10


class PsiProblem:
    """min I_r(h) subject to ||T_h|| = beta, over the packed upper triangle of h (diagonal included).

    Entry (i, j), i < j, stands for two cells of h, hence the weights 2 off the diagonal.
    """

    def __init__(self, r: Graphon, beta):
        self.r = r
        self.m = r.m
        self.beta = float(beta)
        self.w = triu_weights(self.m)
        self.r_packed = triu_pack(r.values)
        self.logit_r = logit(self.r_packed)
        self.scale = 1.0 / float(self.m * self.m)

    def unpack(self, x):
        return triu_unpack(x, self.m)

    def objective(self, x):
        f = self.scale * float(np.sum(self.w * (rel_entr(x, self.r_packed) + rel_entr(1.0 - x, 1.0 - self.r_packed))))
        g = self.scale * self.w * (logit(x) - self.logit_r)
        return f, g

    def constraint(self, x):
        lam, v, gap = top_eigenpair(self.unpack(x), self.m)
        g = self.w * triu_pack(np.outer(v, v)) / float(self.m)
        return lam - self.beta, g, gap

    def merit(self, x, lam_mult, mu):
        f, gf = self.objective(x)
        c, gc, _ = self.constraint(x)
        value = f - lam_mult * c + 0.5 * mu * c * c
        grad = gf + (mu * c - lam_mult) * gc
        return value, grad


class SolverResult:
    def __init__(self, beta, h_opt, psi, constraint_residual, trace=(), start=None, starts=(), outer_iterations=0):
        self.beta = float(beta)
        self.h_opt = h_opt
        self.psi = float(psi)
        self.constraint_residual = float(constraint_residual)
        self.trace = list(trace)
        self.start = start
        self.starts = list(starts)
        self.outer_iterations = int(outer_iterations)

    @classmethod
    def infinite(cls, beta):
        # psi_r(beta) = +inf outside [0, 1]
        return cls(beta, None, math.inf, math.nan)

    def isInfinite(self) -> bool:
        return math.isinf(self.psi)

    def toInfo(self, verbose=False):
        if self.isInfinite():
            return {"beta": self.beta, "psi": "inf", "constraint_residual": None, "start": None}
        info = {
            "beta": self.beta,
            "psi": self.psi,
            "constraint_residual": self.constraint_residual,
            "m": self.h_opt.m,
            "start": self.start,
            "outer_iterations": self.outer_iterations,
            "starts": self.starts,
        }
        if verbose:
            info["trace"] = [
                {"outer": o, "iteration": it, "objective": f, "residual": c, "merit": L}
                for (o, it, f, c, L) in self.trace
            ]
        return info

    def __repr__(self):
        return "SolverResult(beta={},psi={},residual={})".format(self.beta, self.psi, self.constraint_residual)


def _clip(x):
    return np.clip(x, BOUND_LO, BOUND_HI)


def _augmented_lagrangian(problem: PsiProblem, x0, seed=0):
    """Returns (x, trace, outer_iterations). trace rows: (outer, iteration, objective, residual, merit)."""
    x = _clip(np.array(x0, dtype=float))
    bounds = [(BOUND_LO, BOUND_HI)] * x.shape[0]
    _, gf = problem.objective(x)
    c, gc, _ = problem.constraint(x)
    # least-squares multiplier estimate from grad f = lambda grad c
    lam_mult = float(gf @ gc) / float(gc @ gc)
    mu = MU_START
    prev_c = abs(c)
    trace = []
    iteration = 0
    outer = 0
    for outer in range(1, MAX_OUTER + 1):
        _, _, gap = problem.constraint(x)
        if gap < GAP_TOL:
            logging.warning("degenerate top eigenvalue (gap {}), perturbing the iterate".format(gap))
            noise = philox_generator(seed, 1000 + outer).uniform(-NOISE_SCALE, NOISE_SCALE, x.shape[0])
            x = _clip(x + noise)

        def record(xk):
            nonlocal iteration
            iteration += 1
            f, _ = problem.objective(xk)
            ck, _, _ = problem.constraint(xk)
            trace.append((outer, iteration, f, abs(ck), f - lam_mult * ck + 0.5 * mu * ck * ck))

        res = minimize(
            problem.merit,
            x,
            args=(lam_mult, mu),
            jac=True,
            method="L-BFGS-B",
            bounds=bounds,
            callback=record,
            options={"maxiter": INNER_MAXITER, "ftol": INNER_FTOL, "gtol": INNER_GTOL},
        )
        x = np.asarray(res.x, dtype=float)
        c, _, _ = problem.constraint(x)
        logging.debug(
            "outer {} beta={} |c|={} lambda={} mu={} inner: {}".format(
                outer, problem.beta, abs(c), lam_mult, mu, res.message
            )
        )
        if abs(c) <= CONSTRAINT_TOL:
            break
        lam_mult -= mu * c
        if abs(c) > SUFFICIENT_DECREASE * prev_c:
            mu = min(MU_FACTOR * mu, MU_MAX)
        prev_c = abs(c)
    return x, trace, outer


def _starts(problem: PsiProblem, r: Graphon, seed, warm_start, consts):
    beta = problem.beta
    out = [("rescaled", _clip(problem.r_packed * beta / consts.C))]
    if warm_start:
        delta = triu_pack(optimal_perturbation(r, consts))
        out.append(("warm", _clip(problem.r_packed + (beta - consts.C) * delta)))
    gen = philox_generator(seed, 1)
    x = _clip(problem.r_packed + gen.uniform(-RANDOM_START_SPREAD, RANDOM_START_SPREAD, problem.r_packed.shape[0]))
    lam, _, _ = top_eigenpair(problem.unpack(x), problem.m)
    out.append(("random", _clip(x * beta / lam)))
    return out


def psi_solve(r: Graphon, beta, seed=0, warm_start=True, consts=None) -> SolverResult:
    """Grid approximation of psi_r(beta) = inf { I_r(h) : ||T_h|| = beta }.

    Runs the augmented Lagrangian from up to three starts and keeps the smallest psi whose
    constraint residual is at most 1e-5. Raises ConvergenceError when no start qualifies.
    """
    require_reference(r, "psi_solve")
    beta = float(beta)
    if not (0.0 <= beta <= 1.0):
        return SolverResult.infinite(beta)
    if consts is None:
        consts = constants(r)
    problem = PsiProblem(r, beta)
    best = None
    summary = []
    for name, x0 in _starts(problem, r, seed, warm_start, consts):
        x, trace, outer = _augmented_lagrangian(problem, x0, seed=seed)
        h = Graphon(problem.unpack(x), name="h_opt(beta={})".format(beta))
        residual = abs(operator_norm(h).value - beta)
        psi = rate_I(h, r).value
        accepted = residual <= ACCEPT_RESIDUAL
        summary.append({"start": name, "psi": psi, "residual": residual, "accepted": accepted})
        logging.debug("start {} psi={} residual={} outer={}".format(name, psi, residual, outer))
        if accepted and (best is None or psi < best.psi):
            best = SolverResult(beta, h, psi, residual, trace=trace, start=name, outer_iterations=outer)
    if best is None:
        best_residual = min(s["residual"] for s in summary)
        raise ConvergenceError(
            "no start reached constraint residual <= {} (best {}) error @psi_solve".format(ACCEPT_RESIDUAL, best_residual),
            residual=best_residual,
            beta=beta,
        )
    best.starts = summary
    return best


def is_rank1(r: Graphon) -> bool:
    s = np.linalg.svd(r.values, compute_uv=False)
    return s.shape[0] < 2 or s[1] <= RANK1_TOL * s[0]


class ScalingRow:
    def __init__(self, eps, psi=math.nan, ratio=math.nan, minimizer_dir=math.nan, error=None):
        self.eps = float(eps)
        self.psi = float(psi)
        self.ratio = float(ratio)
        self.minimizer_dir = float(minimizer_dir)
        self.error = error

    def isFlagged(self) -> bool:
        return self.error is not None


class ScalingReport:
    def __init__(self, consts, rows):
        self.consts = consts
        self.rows = list(rows)

    @property
    def eps_list(self):
        return [row.eps for row in self.rows]

    @property
    def psi_list(self):
        return [row.psi for row in self.rows]

    @property
    def ratio_list(self):
        return [row.ratio for row in self.rows]

    @property
    def minimizer_dirs(self):
        return [row.minimizer_dir for row in self.rows]

    def toCsv(self) -> str:
        lines = ["eps,psi,ratio,minimizer_dir"]
        for row in self.rows:
            lines.append("{},{},{},{}".format(repr(row.eps), repr(row.psi), repr(row.ratio), repr(row.minimizer_dir)))
        return "\n".join(lines) + "\n"

    def toInfo(self):
        return {
            "constants": self.consts.toInfo(),
            "rows": [
                {"eps": row.eps, "flagged": row.isFlagged(), "error": row.error}
                for row in self.rows
            ],
        }


def scaling_experiment(r: Graphon, eps_list, seed=0, warm_start=True, threads=1, progress_callback=None) -> ScalingReport:
    """psi_r(C_r + eps) / (K_r eps^2) and ||h_beta - r - eps Delta||_2 / eps for each eps.

    Solver failures flag their row and the remaining rows still run.
    """
    if not is_rank1(r):
        raise ValidationError("scaling needs a rank-1 reference, got {} error @scaling_experiment".format(r.getName()))
    consts = constants(r)
    delta = optimal_perturbation(r, consts)
    eps_list = [float(e) for e in eps_list]
    for eps in eps_list:
        if eps == 0.0:
            raise ValidationError("eps must be nonzero error @scaling_experiment")
    rows = [None] * len(eps_list)
    lock = threading.Lock()
    done = 0

    def process(i):
        nonlocal done
        eps = eps_list[i]
        try:
            res = psi_solve(r, consts.C + eps, seed=seed, warm_start=warm_start, consts=consts)
            if res.isInfinite():
                raise ValidationError("beta = C_r + eps = {} lies outside [0,1] error @scaling_experiment".format(res.beta))
            direction = lp_norm(res.h_opt.values - r.values - eps * delta, 2) / abs(eps)
            rows[i] = ScalingRow(eps, res.psi, res.psi / (consts.K * eps * eps), direction)
        except GraphonLDPError as e:
            logging.warning("scaling row eps={} flagged: {}".format(eps, e))
            rows[i] = ScalingRow(eps, error=e.kind)
        with lock:
            done += 1
            if progress_callback:
                progress_callback(done, len(eps_list))

    if threads <= 1:
        for i in range(len(eps_list)):
            process(i)
    else:
        with ThreadPoolExecutor(max_workers=threads) as executor:
            list(executor.map(process, range(len(eps_list))))
    return ScalingReport(consts, rows)


def psi_resolution_study(ref_spec, beta=None, m_list=(8, 16, 32), eps=None, seed=0, warm_start=True) -> list:
    """Solve psi for the same reference family at several grid sizes.

    Either beta is fixed or beta = C_r(m) + eps follows the discretized C_r. Each row is
    {m, C_r, beta, psi, residual}.
    """
    if (beta is None) == (eps is None):
        raise ValidationError("give exactly one of beta and eps error @psi_resolution_study")
    rows = []
    for m in m_list:
        r = parse_reference(ref_spec, int(m))
        consts = constants(r)
        b = float(beta) if beta is not None else consts.C + float(eps)
        res = psi_solve(r, b, seed=seed, warm_start=warm_start, consts=consts)
        rows.append(
            {
                "m": r.m,
                "C_r": consts.C,
                "beta": b,
                "psi": "inf" if res.isInfinite() else res.psi,
                "residual": None if res.isInfinite() else res.constraint_residual,
            }
        )
        logging.debug("resolution study m={} psi={}".format(r.m, rows[-1]["psi"]))
    return rows
