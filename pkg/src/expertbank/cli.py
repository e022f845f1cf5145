"""Command-line interface.

Subcommands:

    gen-bank     generate a synthetic zero-one bank dataset directory
    mi           Monte Carlo experiment -> mi_report.json + gap_hist.csv
    alpha-sweep  shared-replica sweep   -> alpha_sweep.csv
    rd-curve     lambda sweep           -> rd_curve.csv
    routing-mi   routing information of a gate CSV -> stdout (+ json)

All randomness flows from --seed; reruns with the same flags and seed
produce byte-identical files for any --threads value.  Existing outputs
are only overwritten with --force, and every write is atomic.
"""

import argparse
import os
import sys

import numpy as np

from .bank_gen import BankGenConfig, gen_bank
from .core import ExperimentConfig, atomic_write_text, fmt_float, load_dataset, save_dataset
from .estimators import routing_mi
from .harness import (alpha_sweep, run_experiment, write_alpha_sweep_csv,
                      write_gap_hist_csv, write_mi_report_json)
from .rd_solver import default_lambda_grid, rd_sweep, write_rd_curve_csv

import json


class CliError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """argparse that fails with a one-line diagnostic and exit status 2."""

    def error(self, message):
        self.exit(2, "error: %s\n" % message)


def _parse_alphas(text):
    try:
        alphas = [float(tok) for tok in text.split(",") if tok.strip() != ""]
    except ValueError:
        raise CliError("could not parse --alphas %r" % text)
    if not alphas:
        raise CliError("--alphas must list at least one value")
    return alphas


def _claim_outputs(force, *paths):
    """Refuse to clobber existing outputs unless --force was given."""
    for path in paths:
        if os.path.exists(path) and not force:
            raise CliError("refusing to overwrite %s (use --force)" % path)


def _read_gate_csv(path):
    with open(path, "r", encoding="utf-8", newline="") as fh:
        header = fh.readline().strip().split(",")
        if header != ["e%d" % t for t in range(len(header))]:
            raise CliError("%s: gate header must be e0,e1,...,e{R-1}" % path)
        data = np.loadtxt(fh, delimiter=",", dtype=np.float64, ndmin=2)
    if data.size == 0:
        raise CliError("%s: no data rows" % path)
    return data


def _add_experiment_flags(sub):
    sub.add_argument("--data", required=True, help="dataset directory")
    sub.add_argument("--out", required=True, help="output directory")
    sub.add_argument("--m", type=int, default=256, help="sample size per replica")
    sub.add_argument("--replicas", type=int, default=300, help="Monte Carlo replica count")
    sub.add_argument("--bootstrap", type=int, default=2000, help="bootstrap resamples")
    sub.add_argument("--seed", type=int, default=0, help="master seed")


def build_parser():
    parser = _Parser(prog="expertbank",
                     description="Finite expert-bank selection, information "
                                 "estimates, and routing trade-off curves.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--threads", type=int, default=1,
                        help="parallelism cap; results are identical for any value")
    common.add_argument("--force", action="store_true",
                        help="overwrite existing output files")
    sub = parser.add_subparsers(dest="command", required=True,
                                parser_class=_Parser)

    p = sub.add_parser("gen-bank", parents=[common],
                       help="generate a synthetic zero-one bank")
    p.add_argument("--out", required=True, help="dataset directory to create")
    p.add_argument("--seed", type=int, default=BankGenConfig().seed)
    p.add_argument("--experts", type=int, default=25)
    p.add_argument("--pool", type=int, default=4096)
    p.add_argument("--test", type=int, default=20000)
    p.add_argument("--err-low", type=float, default=0.08)
    p.add_argument("--err-high", type=float, default=0.11)
    p.add_argument("--common-noise", type=float, default=0.742)

    p = sub.add_parser("mi", parents=[common],
                       help="single-alpha Monte Carlo experiment")
    _add_experiment_flags(p)
    p.add_argument("--alpha", type=float, default=0.7)

    p = sub.add_parser("alpha-sweep", parents=[common],
                       help="shared-replica alpha sweep")
    _add_experiment_flags(p)
    p.add_argument("--alphas", default="0,0.25,0.5,0.7,0.9,1.0",
                   help="comma-separated alpha grid")

    p = sub.add_parser("rd-curve", parents=[common],
                       help="rate-distortion sweep over lambda")
    p.add_argument("--data", required=True, help="dataset directory")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--lambda-min", type=float, default=1e-3)
    p.add_argument("--lambda-max", type=float, default=1e1)
    p.add_argument("--points", type=int, default=25)
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--max-iter", type=int, default=10000)
    p.add_argument("--items", type=int, default=2000,
                   help="use the first ITEMS test rows (0 or oversized = all)")

    p = sub.add_parser("routing-mi", parents=[common],
                       help="routing information of a gate CSV")
    p.add_argument("--gate", required=True, help="gate CSV (e0..e{R-1} header)")
    p.add_argument("--out", default=None, help="optional directory for routing_mi.json")

    return parser


def _cmd_gen_bank(args):
    config = BankGenConfig(
        num_experts=args.experts, n_pool=args.pool, n_test=args.test,
        error_rate_low=args.err_low, error_rate_high=args.err_high,
        common_noise_weight=args.common_noise, seed=args.seed)
    out = args.out
    _claim_outputs(args.force,
                   os.path.join(out, "meta.json"),
                   os.path.join(out, "pool_losses.csv"),
                   os.path.join(out, "test_losses.csv"))
    save_dataset(gen_bank(config), out)
    print("wrote dataset directory %s" % out)
    return 0


def _cmd_mi(args):
    config = ExperimentConfig(alpha=args.alpha, sample_size=args.m,
                              num_replicas=args.replicas, master_seed=args.seed,
                              bootstrap_resamples=args.bootstrap)
    report_path = os.path.join(args.out, "mi_report.json")
    hist_path = os.path.join(args.out, "gap_hist.csv")
    _claim_outputs(args.force, report_path, hist_path)
    dataset = load_dataset(args.data)
    report = run_experiment(dataset, config)
    os.makedirs(args.out, exist_ok=True)
    write_mi_report_json(report, report_path)
    write_gap_hist_csv(report, hist_path)
    print("wrote %s and %s" % (report_path, hist_path))
    return 0


def _cmd_alpha_sweep(args):
    alphas = _parse_alphas(args.alphas)
    config = ExperimentConfig(alpha=alphas[0], sample_size=args.m,
                              num_replicas=args.replicas, master_seed=args.seed,
                              bootstrap_resamples=args.bootstrap)
    out_path = os.path.join(args.out, "alpha_sweep.csv")
    _claim_outputs(args.force, out_path)
    dataset = load_dataset(args.data)
    reports = alpha_sweep(dataset, config, alphas)
    os.makedirs(args.out, exist_ok=True)
    write_alpha_sweep_csv(reports, out_path)
    print("wrote %s" % out_path)
    return 0


def _cmd_rd_curve(args):
    if args.points < 1:
        raise CliError("--points must be >= 1")
    if args.items < 0:
        raise CliError("--items must be >= 0")
    grid = default_lambda_grid(args.lambda_min, args.lambda_max, args.points)
    out_path = os.path.join(args.out, "rd_curve.csv")
    _claim_outputs(args.force, out_path)
    dataset = load_dataset(args.data)
    losses = dataset.test_losses
    if 0 < args.items < losses.shape[0]:
        losses = losses[:args.items]
    points = rd_sweep(losses, grid, tol=args.tol, max_iter=args.max_iter,
                      threads=args.threads)
    os.makedirs(args.out, exist_ok=True)
    write_rd_curve_csv(points, out_path)
    print("wrote %s" % out_path)
    return 0


def _cmd_routing_mi(args):
    gate = _read_gate_csv(args.gate)
    value = routing_mi(gate)
    if args.out is not None:
        out_path = os.path.join(args.out, "routing_mi.json")
        _claim_outputs(args.force, out_path)
        os.makedirs(args.out, exist_ok=True)
        payload = {"routing_mi_nats": value,
                   "num_items": int(gate.shape[0]),
                   "num_experts": int(gate.shape[1])}
        atomic_write_text(out_path, json.dumps(payload, indent=2, sort_keys=True,
                                               allow_nan=False) + "\n")
    print(fmt_float(value))
    return 0


_COMMANDS = {
    "gen-bank": _cmd_gen_bank,
    "mi": _cmd_mi,
    "alpha-sweep": _cmd_alpha_sweep,
    "rd-curve": _cmd_rd_curve,
    "routing-mi": _cmd_routing_mi,
}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.threads < 1:
        print("error: --threads must be >= 1", file=sys.stderr)
        return 2
    try:
        return _COMMANDS[args.command](args)
    except (CliError, ValueError, IndexError, OSError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
