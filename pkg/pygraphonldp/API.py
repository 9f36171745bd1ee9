from __future__ import annotations
import os
import logging


from .General import ConfigError, GraphonLDPError, get_thread_count
from .Experiment import ExperimentConfig, COMMANDS, DEFAULTS
from .Graph import Graph
from .Graphon import (
    Graphon,
    GridPermutation,
    empirical_graphon,
    level_k_approximant,
    refine,
    common_refinement,
    sample_grid,
    apply_permutation,
    l1_distance,
    l2_distance,
)
from .Reference import parse_reference, constant_reference, rank1_reference
from .CutNorm import cut_norm_exact, cut_norm_heuristic, cut_norm, cut_distance, cut_metric_estimate
from .Rate import (
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
from .Sampler import SampleSpec, sample, lambda_over_n, run_ensemble
from .Eigen import (
    operator_norm,
    constants,
    optimal_perturbation,
    second_order_cost,
    quadratic_cost,
    norm_gradient,
    rate_approx_convergence,
)
from .Solver import psi_solve, scaling_experiment, psi_resolution_study
from .Commands import InfoCommand, RateCommand, SampleCommand, EnsembleCommand, PsiCommand, ScalingCommand, ApproxCommand


class API:
    def __init__(self, config: ExperimentConfig):
        self.config = config

    @staticmethod
    def getCommandClass(name):
        table = {
            "info": InfoCommand,
            "rate": RateCommand,
            "sample": SampleCommand,
            "ensemble": EnsembleCommand,
            "psi": PsiCommand,
            "scaling": ScalingCommand,
            "approx": ApproxCommand,
        }
        if name not in table:
            logging.error("not registered command by name = [{}]".format(name))
            raise ConfigError("unknown command {} error @getCommandClass".format(name))
        return table[name]

    def getCommand(self):
        cls = self.getCommandClass(self.config.getCommand())
        return cls(self.config)

    def run(self, progress_callback=None) -> dict:
        """Execute the configured command; writes run.json and the command's artifacts into out."""
        command = self.getCommand()
        os.makedirs(self.config.getOutDir(), exist_ok=True)
        logging.debug("running {} into {}".format(command, self.config.getOutDir()))
        command.writeJson("run.json", {"config": self.config.getInfo(), "seeds": command.derivedSeeds()})
        summary = command.execute(progress_callback=progress_callback)
        logging.debug("{} wrote {}".format(command.name, command.written))
        return summary
