"""Helpers shared by the exporter tests: synthetic data and small configs."""

import os

import numpy as np
import pytest

from mnist_exporter import ExporterConfig
from mnist_exporter.data import MnistUnavailableError, load_mnist

MNIST_SKIP_REASON = (
    "MNIST is unavailable in this environment (no DNS resolution for the "
    "download mirrors and no local copy; verified 2026-08-25), so this "
    "real-data acceptance check cannot run; the export pipeline itself is "
    "covered by the synthetic-data tests"
)


def make_templates(seed=0):
    rng = np.random.default_rng(seed)
    return rng.integers(0, 256, size=(10, 28, 28)).astype(np.uint8)


def synth_split(templates, n, seed, noise=20):
    """n noisy template images with their class labels."""
    rng = np.random.default_rng(seed)
    labels = rng.integers(0, 10, size=n)
    jitter = rng.integers(-noise, noise + 1, size=(n, 28, 28))
    images = np.clip(templates[labels].astype(np.int16) + jitter, 0, 255)
    return images.astype(np.uint8), labels.astype(np.int64)


def small_config(synth_dir, out_dir, **overrides):
    """An export configuration sized for fast synthetic-data tests."""
    settings = dict(
        out_dir=str(out_dir),
        num_candidates=3,
        subset_size=128,
        pool_size=200,
        epochs=1,
        seed=7,
        data_dir=synth_dir,
        download=False,
    )
    settings.update(overrides)
    return ExporterConfig(**settings)


_MNIST_CACHE = []


def mnist_or_skip():
    """Load real MNIST once per session, or skip with the environment reason."""
    if not _MNIST_CACHE:
        try:
            _MNIST_CACHE.append(load_mnist(
                data_dir=os.environ.get("MNIST_DATA_DIR"), download=True))
        except MnistUnavailableError as exc:
            _MNIST_CACHE.append(exc)
    loaded = _MNIST_CACHE[0]
    if isinstance(loaded, Exception):
        pytest.skip(MNIST_SKIP_REASON)
    return loaded
