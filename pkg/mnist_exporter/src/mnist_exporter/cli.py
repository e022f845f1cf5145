"""Command line front end for the MNIST bank exporter."""

import argparse
import sys

from .data import MnistUnavailableError
from .exporter import ExporterConfig, export_bank


def build_parser():
    parser = argparse.ArgumentParser(
        prog="mnist-exporter",
        description="Train a bank of small MNIST CNNs and export their "
                    "per-item 0/1 loss matrices as a dataset directory.")
    parser.add_argument("--out", required=True,
                        help="output dataset directory")
    parser.add_argument("--experts", type=int, default=25,
                        help="number of candidate networks (default 25)")
    parser.add_argument("--subset-size", type=int, default=10000,
                        help="training items per candidate (default 10000)")
    parser.add_argument("--epochs", type=int, default=1,
                        help="training epochs per candidate (default 1)")
    parser.add_argument("--learning-rate", type=float, default=1e-3,
                        help="Adam learning rate (default 1e-3)")
    parser.add_argument("--pool-size", type=int, default=20000,
                        help="training rows exported as the pool split "
                             "(default 20000)")
    parser.add_argument("--batch-size", type=int, default=64,
                        help="minibatch size (default 64)")
    parser.add_argument("--seed", type=int, default=0,
                        help="master seed for subsets, init, and batches")
    parser.add_argument("--data-dir", default=None,
                        help="directory holding mnist.npz or the IDX files")
    parser.add_argument("--no-download", action="store_true",
                        help="never try to download; use local data only")
    parser.add_argument("--parallel", type=int, default=1,
                        help="concurrent training processes (default 1)")
    parser.add_argument("--force", action="store_true",
                        help="overwrite an existing dataset directory")
    parser.add_argument("--quiet", action="store_true",
                        help="suppress per-candidate progress lines")
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = ExporterConfig(
            out_dir=args.out,
            num_candidates=args.experts,
            subset_size=args.subset_size,
            epochs=args.epochs,
            learning_rate=args.learning_rate,
            pool_size=args.pool_size,
            batch_size=args.batch_size,
            seed=args.seed,
            data_dir=args.data_dir,
            download=not args.no_download,
            parallel=args.parallel,
        )
        progress = None
        if not args.quiet:
            def progress(index, accuracy):
                print("candidate %d: test accuracy %.4f" % (index, accuracy),
                      file=sys.stderr)
        result = export_bank(config, overwrite=args.force, progress=progress)
    except (ValueError, FileExistsError, MnistUnavailableError, OSError) as exc:
        print("mnist-exporter: error: %s" % exc, file=sys.stderr)
        return 2
    accs = result.accuracies
    print("wrote %s (%d candidates, test accuracy %.4f .. %.4f)"
          % (result.out_dir, len(accs), min(accs), max(accs)))
    for message in result.warnings:
        print("warning: " + message, file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
