import logging

from .General import ConfigError
from .commandObject import commandObject
from .Graphon import Graphon, common_refinement, level_k_approximant, refine, l1_distance
from .Rate import rate_I, rate_J_estimate, reference_check, domination_bound, uniform_rate_bound
from .CutNorm import cut_distance_result, cut_metric_search, EXACT_LIMIT
from .Permutation import EXHAUSTIVE_LIMIT
from .Sampler import SampleSpec, sample, lambda_over_n, run_ensemble
from .Eigen import operator_norm, constants, rate_approx_convergence
from .Solver import psi_solve, scaling_experiment, psi_resolution_study, is_rank1


# transposition local search on the rate command, each step an exact cut norm
LOCAL_SEARCH_LIMIT = 12


class InfoCommand(commandObject):
    name = "info"

    def execute(self, progress_callback=None):
        r = self.getReference()
        check = reference_check(r)
        info = {
            "reference": r.getName(),
            "m": r.m,
            "reference_check": check.toInfo(),
            "operator_norm": operator_norm(r).value,
            "rank1": is_rank1(r),
        }
        if check.ok:
            info["constants"] = constants(r).toInfo()
            info["domination_bound"] = domination_bound(r)
        else:
            logging.warning("{} is not a valid reference: a cell value lies in {{0,1}}".format(r.getName()))
        self.writeJson("info.json", info)
        return info


class RateCommand(commandObject):
    name = "rate"

    def execute(self, progress_callback=None):
        r, h = common_refinement(self.getReference(), self.getGraphon())
        result = rate_I(h, r)
        info = {
            "reference": r.getName(),
            "graphon": h.getName(),
            "I": result.toInfo(verbose=self.config.get("verbose")),
            "J_estimate": rate_J_estimate(h, r, restarts=self.config.get("restarts"), seed=self.config.get("seed")),
            "cut_distance": cut_distance_result(
                h, r, restarts=self.config.get("cut_restarts"), seed=self.config.get("seed")
            ).toInfo(),
            "cut_metric_estimate": None,
        }
        if h.m <= LOCAL_SEARCH_LIMIT:
            value, phi = cut_metric_search(
                h, r, restarts=self.config.get("restarts"), seed=self.config.get("seed")
            )
            info["cut_metric_estimate"] = {
                "value": value,
                "permutation": (phi.perm + 1).tolist(),
                "search": "exhaustive" if h.m <= EXHAUSTIVE_LIMIT else "local",
            }
        else:
            logging.warning(
                "m={} > {}: cut_metric_estimate skipped, call cut_metric_estimate directly for a local search".format(
                    h.m, LOCAL_SEARCH_LIMIT
                )
            )
        if h.m > EXACT_LIMIT:
            logging.warning("m={} > {}: cut distance is a heuristic lower bound".format(h.m, EXACT_LIMIT))
        self.writeJson("rate.json", info)
        return {"I": result.value, "J_estimate": info["J_estimate"]}


class SampleCommand(commandObject):
    name = "sample"

    def execute(self, progress_callback=None):
        spec = SampleSpec(self.config.get("n"), self.getReference(), seed=self.config.get("seed"))
        g = sample(spec)
        self.writeText("graph.txt", g.toText())
        info = {"n": g.n, "edges": g.getEdgeCount(), "lambda_over_n": lambda_over_n(g), "seed": spec.seed}
        self.writeJson("sample.json", info)
        return info


class EnsembleCommand(commandObject):
    name = "ensemble"

    def derivedSeeds(self):
        seed = self.config.get("seed")
        return {"master": seed, "samples": [seed + i for i in range(self.config.get("count"))]}

    def execute(self, progress_callback=None):
        spec = SampleSpec(
            self.config.get("n"), self.getReference(), seed=self.config.get("seed"), count=self.config.get("count")
        )
        stats = run_ensemble(
            spec, self.config.get("thresholds"), threads=self.getThreads(), progress_callback=progress_callback
        )
        self.writeText("ensemble.csv", stats.toCsv())
        info = stats.toInfo()
        self.writeJson("ensemble_stats.json", info)
        return {"mean": info["mean"], "stddev": info["stddev"], "count": info["count"]}


class PsiCommand(commandObject):
    name = "psi"

    def derivedSeeds(self):
        return {"master": self.config.get("seed"), "random_start_stream": 1}

    def execute(self, progress_callback=None):
        r = self.getReference()
        beta = self.config.get("beta")
        result = psi_solve(r, beta, seed=self.config.get("seed"), warm_start=self.config.get("warm_start"))
        info = result.toInfo(verbose=self.config.get("verbose"))
        info["reference"] = r.getName()
        if not result.isInfinite():
            info["constants"] = constants(r).toInfo()
            info["h_opt_file"] = "h_opt.txt"
            self.writeText("h_opt.txt", result.h_opt.toText())
        self.writeJson("solver.json", info)
        if len(self.config.get("m_list")) > 0:
            rows = psi_resolution_study(
                self.config.get("ref"),
                beta=beta,
                m_list=self.config.get("m_list"),
                seed=self.config.get("seed"),
                warm_start=self.config.get("warm_start"),
            )
            lines = ["m,C_r,beta,psi,residual"]
            for row in rows:
                residual = "" if row["residual"] is None else repr(row["residual"])
                lines.append("{},{},{},{},{}".format(row["m"], repr(row["C_r"]), repr(row["beta"]), row["psi"], residual))
            self.writeText("resolution.csv", "\n".join(lines) + "\n")
        return {"beta": info["beta"], "psi": info["psi"], "constraint_residual": info["constraint_residual"]}


class ScalingCommand(commandObject):
    name = "scaling"

    def execute(self, progress_callback=None):
        report = scaling_experiment(
            self.getReference(),
            self.config.get("eps"),
            seed=self.config.get("seed"),
            warm_start=self.config.get("warm_start"),
            threads=self.getThreads(),
            progress_callback=progress_callback,
        )
        self.writeText("scaling.csv", report.toCsv())
        self.writeJson("scaling.json", report.toInfo())
        return {"ratio": report.ratio_list, "minimizer_dir": report.minimizer_dirs}


class ApproxCommand(commandObject):
    name = "approx"

    def getTarget(self, r):
        if self.config.get("graphon") is not None:
            f = self.getGraphon()
            if f.m != r.m:
                raise ConfigError("graphon m={} must match reference m={} error @ApproxCommand".format(f.m, r.m))
            return f
        # default target: r pushed along r^2 (1 - r)
        v = r.values
        return Graphon(v + 0.1 * v * v * (1.0 - v), name="{}+0.1r^2(1-r)".format(r.getName()))

    def execute(self, progress_callback=None):
        r = self.getReference()
        f = self.getTarget(r)
        k_list = self.config.get("k_list")
        diffs = rate_approx_convergence(r, f, k_list)
        lines = ["k,abs_difference"]
        rows = []
        for k, d in zip(k_list, diffs):
            lines.append("{},{}".format(k, repr(d)))
            r_k = refine(level_k_approximant(r, k), r.m)
            rows.append(
                {
                    "k": k,
                    "abs_difference": d,
                    "l1_distance": l1_distance(r_k, r),
                    "uniform_rate_bound": uniform_rate_bound(r_k, r),
                }
            )
        self.writeText("approx.csv", "\n".join(lines) + "\n")
        self.writeJson("approx.json", {"reference": r.getName(), "graphon": f.getName(), "rows": rows})
        return {"k": k_list, "abs_difference": diffs}
