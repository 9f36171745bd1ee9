#!/usr/bin/env python3
import os
import sys
import json
import argparse
import logging

from rich.console import Console
from rich.logging import RichHandler
from rich.progress import Progress

from pygraphonldp import API
from pygraphonldp.Experiment import ExperimentConfig
from pygraphonldp.General import GraphonLDPError, write_atomic


def float_list(text):
    try:
        return [float(v) for v in text.split(",") if len(v.strip()) > 0]
    except ValueError:
        raise argparse.ArgumentTypeError("expected comma separated numbers, got '{}'".format(text))


def int_list(text):
    try:
        return [int(v) for v in text.split(",") if len(v.strip()) > 0]
    except ValueError:
        raise argparse.ArgumentTypeError("expected comma separated integers, got '{}'".format(text))


def build_parser():
    parser = argparse.ArgumentParser(description="Large-deviation computations for graphon random graphs.")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=str, default=None, help="JSON config file; flags override its fields")
    common.add_argument("--out", type=str, default=None, help="output directory (default: ./runs/<command>)")
    common.add_argument("--ref", type=str, default=None, help="builtin:const:<p> | builtin:rank1:<c0,c1,...> | graphon file")
    common.add_argument("--m", type=int, default=None, help="grid size for built-in references (default: 32)")
    common.add_argument("--seed", type=int, default=None, help="master seed (default: 0)")
    common.add_argument("--threads", type=int, default=None, help="worker threads (default: GRAPHON_LDP_THREADS or all cores)")
    common.add_argument("--verbose", action="store_true", default=None, help="include per-cell data and solver traces")
    common.add_argument("--quiet", action="store_true", help="no progress bar")
    common.add_argument("--log-level", type=str, default="WARNING", help="logging level (default: WARNING)")

    sub.add_parser("info", parents=[common], help="reference check, constants C_r, B_r, K_r")

    p = sub.add_parser("rate", parents=[common], help="rate functionals I_r, J_r and cut distances")
    p.add_argument("--graphon", type=str, default=None, help="graphon h, same syntax as --ref")
    p.add_argument("--restarts", type=int, default=None, help="permutation search restarts (default: 20)")
    p.add_argument("--cut-restarts", type=int, default=None, help="heuristic cut norm restarts (default: 32)")

    p = sub.add_parser("sample", parents=[common], help="sample one graph")
    p.add_argument("--n", type=int, default=None, help="vertex count (default: 100)")

    p = sub.add_parser("ensemble", parents=[common], help="Monte Carlo ensemble of lambda/n")
    p.add_argument("--n", type=int, default=None, help="vertex count (default: 100)")
    p.add_argument("--count", type=int, default=None, help="ensemble size (default: 100)")
    p.add_argument("--thresholds", type=float_list, default=None, help="sorted tail thresholds, comma separated")

    p = sub.add_parser("psi", parents=[common], help="solve psi_r(beta)")
    p.add_argument("--beta", type=float, default=None, help="target operator norm")
    p.add_argument("--no-warm-start", dest="warm_start", action="store_false", default=None)
    p.add_argument("--m-list", type=int_list, default=None, help="also solve at these grid sizes")

    p = sub.add_parser("scaling", parents=[common], help="quadratic scaling of psi near C_r")
    p.add_argument("--eps", type=float_list, default=None, help="offsets beta - C_r (default: 0.1,0.05,0.025)")
    p.add_argument("--no-warm-start", dest="warm_start", action="store_false", default=None)

    p = sub.add_parser("approx", parents=[common], help="I over level-k approximants")
    p.add_argument("--graphon", type=str, default=None, help="graphon f (default: r + 0.1 r^2 (1-r))")
    p.add_argument("--k-list", type=int_list, default=None, help="approximant levels (default: 4,8,16,32)")
    return parser


FLAG_KEYS = (
    "ref", "graphon", "m", "seed", "restarts", "cut_restarts", "beta", "eps", "n", "count",
    "thresholds", "k_list", "m_list", "warm_start", "verbose", "threads", "out",
)


def setup_logging(level):
    numeric = getattr(logging, str(level).upper(), None)
    if not isinstance(numeric, int):
        numeric = logging.WARNING
    logging.basicConfig(
        level=numeric,
        format="%(message)s",
        handlers=[RichHandler(console=Console(stderr=True), show_path=False)],
        force=True,
    )


def report_error(command, out, info, exit_code):
    info["command"] = command
    text = json.dumps(info, sort_keys=True)
    print(text)
    try:
        write_atomic(os.path.join(out, "error.json"), text + "\n")
    except OSError as e:
        logging.error("could not write error.json to {}: {}".format(out, e))
    return exit_code


def main(argv=None):
    args = build_parser().parse_args(argv)
    setup_logging(args.log_level)
    flags = {key: getattr(args, key, None) for key in FLAG_KEYS}
    out = args.out or os.path.join(".", "runs", args.command)
    try:
        fileInfo = ExperimentConfig.loadFileInfo(args.config) if args.config else None
        config = ExperimentConfig.resolve(args.command, fileInfo=fileInfo, flagInfo=flags)
        out = config.getOutDir()
        api = API(config)
        if args.quiet or args.command not in ("ensemble", "scaling"):
            summary = api.run()
        else:
            with Progress(console=Console(stderr=True), transient=True) as progress:
                task = progress.add_task(args.command, total=None)

                def progress_callback(done, total):
                    progress.update(task, completed=done, total=total)

                summary = api.run(progress_callback=progress_callback)
    except GraphonLDPError as e:
        logging.error("{}: {}".format(e.kind, e))
        return report_error(args.command, out, e.toInfo(), 2)
    except Exception as e:
        logging.exception("unexpected failure in {}".format(args.command))
        return report_error(args.command, out, {"error": "internal", "message": str(e)}, 1)
    print(json.dumps(summary, sort_keys=True))
    return 0


if __name__ == "__main__":
    sys.exit(main())
