"""Train a bank of MNIST CNN candidates and export their 0/1 loss matrices.

The output is a dataset directory in the expertbank interchange layout:
``meta.json`` plus ``pool_losses.csv`` and ``test_losses.csv``, where entry
(i, r) is 1.0 exactly when candidate r misclassifies item i.  Pool rows are
a fixed random subset of the training set, test rows cover the full test
set.  Every candidate trains on its own random training subset, so the
candidates disagree with each other without sharing any label noise.

Randomness is fully determined by one integer seed: candidate r draws its
subset, its initial parameters, and its batch order from a numpy generator
spawned from (seed, r), and the pool indices come from their own spawned
stream.  Sequential and process-parallel runs therefore produce identical
bytes on disk.
"""

import concurrent.futures
import dataclasses
import json
import multiprocessing
import os
import tempfile

import numpy as np

from . import model
from .data import load_mnist

META_NAME = "meta.json"
POOL_NAME = "pool_losses.csv"
TEST_NAME = "test_losses.csv"

ACCURACY_FLOOR = 0.8

_SPAWN_POOL = 1
_SPAWN_CANDIDATE = 2


@dataclasses.dataclass(frozen=True)
class ExporterConfig:
    """Settings for one bank export.

    ``parallel`` is the number of concurrent training processes; 1 trains
    the candidates sequentially in this process.
    """

    out_dir: str
    num_candidates: int = 25
    subset_size: int = 10000
    epochs: int = 1
    learning_rate: float = 1e-3
    pool_size: int = 20000
    batch_size: int = 64
    seed: int = 0
    data_dir: str = None
    download: bool = True
    parallel: int = 1

    def __post_init__(self):
        if not self.out_dir:
            raise ValueError("out_dir must be a non-empty path")
        for name in ("num_candidates", "subset_size", "epochs", "pool_size",
                     "batch_size", "parallel"):
            value = getattr(self, name)
            if not isinstance(value, (int, np.integer)) or value < 1:
                raise ValueError("%s must be a positive integer, got %r"
                                 % (name, value))
        if not self.learning_rate > 0.0:
            raise ValueError("learning_rate must be positive")
        if not isinstance(self.seed, (int, np.integer)) or self.seed < 0:
            raise ValueError("seed must be a nonnegative integer")


@dataclasses.dataclass
class ExportResult:
    out_dir: str
    accuracies: list
    warnings: list
    pool_indices: np.ndarray


def candidate_rng(seed, index):
    """The generator that drives candidate ``index`` end to end."""
    ss = np.random.SeedSequence(seed, spawn_key=(_SPAWN_CANDIDATE, index))
    return np.random.default_rng(ss)


def pool_indices(seed, pool_size, num_train):
    """The training-set rows that become the exported pool split."""
    if pool_size > num_train:
        raise ValueError("pool_size %d exceeds training set size %d"
                         % (pool_size, num_train))
    ss = np.random.SeedSequence(seed, spawn_key=(_SPAWN_POOL,))
    rng = np.random.default_rng(ss)
    return np.sort(rng.choice(num_train, size=pool_size, replace=False))


def _train_one(config, index, train_x, train_y, test_x, test_y, pool_idx):
    """Train candidate ``index`` and return its loss columns and accuracy."""
    rng = candidate_rng(config.seed, index)
    subset = rng.choice(len(train_x), size=config.subset_size, replace=False)
    net = model.train_candidate(
        train_x[subset], train_y[subset], rng,
        epochs=config.epochs,
        learning_rate=config.learning_rate,
        batch_size=config.batch_size,
    )
    pool_pred = model.predict_labels(net, train_x[pool_idx])
    test_pred = model.predict_labels(net, test_x)
    pool_col = (pool_pred != train_y[pool_idx]).astype(np.float64)
    test_col = (test_pred != test_y).astype(np.float64)
    accuracy = float((test_pred == test_y).mean())
    return pool_col, test_col, accuracy


_WORKER_DATA = None


def _worker_init(data_dir, download):
    global _WORKER_DATA
    _WORKER_DATA = load_mnist(data_dir=data_dir, download=download)


def _worker_train(config, index):
    train_x, train_y, test_x, test_y = _WORKER_DATA
    pool_idx = pool_indices(config.seed, config.pool_size, len(train_x))
    return index, _train_one(config, index, train_x, train_y,
                             test_x, test_y, pool_idx)


def _losses_to_csv(losses):
    """Loss matrix to CSV text with an e0..e{R-1} header row."""
    num_cols = losses.shape[1]
    header = ",".join("e%d" % j for j in range(num_cols))
    lines = [header]
    for row in losses:
        lines.append(",".join(repr(v) for v in row.tolist()))
    return "\n".join(lines) + "\n"


def _atomic_write_text(path, text):
    directory = os.path.dirname(path) or "."
    fd, tmp = tempfile.mkstemp(prefix=".tmp.", dir=directory)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def _provenance(config, torch_version, warnings):
    parts = [
        "mnist cnn bank: seed=%d" % config.seed,
        "R=%d" % config.num_candidates,
        "subset_size=%d" % config.subset_size,
        "epochs=%d" % config.epochs,
        "learning_rate=%r" % config.learning_rate,
        "batch_size=%d" % config.batch_size,
        "pool_size=%d" % config.pool_size,
        "pixel_scale=1/255",
        "torch=%s" % torch_version,
        "candidate rng spawn_key=(%d, index)" % _SPAWN_CANDIDATE,
        "pool rng spawn_key=(%d,)" % _SPAWN_POOL,
        "test accuracies in candidate_accuracies",
        "pool rows (train-set indices) in pool_indices",
    ]
    text = ", ".join(parts)
    for message in warnings:
        text += "; warning: " + message
    return text


def export_bank(config, overwrite=False, progress=None):
    """Train the configured candidates and write the dataset directory.

    Refuses to clobber an existing export unless ``overwrite`` is true.
    ``progress``, when given, is called with (candidate_index, accuracy)
    as each candidate finishes.  Returns an ExportResult.
    """
    import torch

    meta_path = os.path.join(config.out_dir, META_NAME)
    if os.path.exists(meta_path) and not overwrite:
        raise FileExistsError(
            "refusing to overwrite existing dataset at %s" % config.out_dir)

    train_x, train_y, test_x, test_y = load_mnist(
        data_dir=config.data_dir, download=config.download)
    num_train = len(train_x)
    if config.subset_size > num_train:
        raise ValueError("subset_size %d exceeds training set size %d"
                         % (config.subset_size, num_train))
    pool_idx = pool_indices(config.seed, config.pool_size, num_train)

    num_candidates = config.num_candidates
    pool_losses = np.zeros((config.pool_size, num_candidates))
    test_losses = np.zeros((len(test_x), num_candidates))
    accuracies = [0.0] * num_candidates

    if config.parallel > 1:
        ctx = multiprocessing.get_context("spawn")
        workers = min(config.parallel, num_candidates)
        with concurrent.futures.ProcessPoolExecutor(
                max_workers=workers, mp_context=ctx,
                initializer=_worker_init,
                initargs=(config.data_dir, config.download)) as pool:
            futures = [pool.submit(_worker_train, config, r)
                       for r in range(num_candidates)]
            for fut in concurrent.futures.as_completed(futures):
                index, (pool_col, test_col, accuracy) = fut.result()
                pool_losses[:, index] = pool_col
                test_losses[:, index] = test_col
                accuracies[index] = accuracy
                if progress is not None:
                    progress(index, accuracy)
    else:
        for index in range(num_candidates):
            pool_col, test_col, accuracy = _train_one(
                config, index, train_x, train_y, test_x, test_y, pool_idx)
            pool_losses[:, index] = pool_col
            test_losses[:, index] = test_col
            accuracies[index] = accuracy
            if progress is not None:
                progress(index, accuracy)

    warnings = ["candidate %d test accuracy %.4f below %.1f"
                % (r, acc, ACCURACY_FLOOR)
                for r, acc in enumerate(accuracies) if acc < ACCURACY_FLOOR]

    meta = {
        "format_version": 1,
        "num_experts": num_candidates,
        "num_pool": config.pool_size,
        "num_test": len(test_x),
        "loss_kind": "zero_one",
        "provenance": _provenance(config, torch.__version__, warnings),
        "candidate_accuracies": accuracies,
        "pool_indices": pool_idx.tolist(),
    }

    os.makedirs(config.out_dir, exist_ok=True)
    _atomic_write_text(os.path.join(config.out_dir, POOL_NAME),
                       _losses_to_csv(pool_losses))
    _atomic_write_text(os.path.join(config.out_dir, TEST_NAME),
                       _losses_to_csv(test_losses))
    _atomic_write_text(meta_path,
                       json.dumps(meta, indent=2, sort_keys=True) + "\n")

    return ExportResult(out_dir=config.out_dir, accuracies=accuracies,
                        warnings=warnings, pool_indices=pool_idx)
