"""Shared fixtures: a synthetic image corpus sized so tests stay fast."""

import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(__file__))

from exporter_testkit import make_templates, mnist_or_skip, small_config, synth_split

from mnist_exporter import export_bank
from mnist_exporter.data import load_mnist


@pytest.fixture(scope="session")
def synth_dir(tmp_path_factory):
    """A directory holding mnist.npz built from the synthetic corpus."""
    templates = make_templates()
    train_x, train_y = synth_split(templates, 512, seed=1)
    test_x, test_y = synth_split(templates, 256, seed=2)
    directory = tmp_path_factory.mktemp("synth_data")
    np.savez(directory / "mnist.npz", x_train=train_x, y_train=train_y,
             x_test=test_x, y_test=test_y)
    return str(directory)


@pytest.fixture(scope="session")
def synth_arrays(synth_dir):
    return load_mnist(data_dir=synth_dir, download=False)


@pytest.fixture(scope="session")
def synth_bank(synth_dir, tmp_path_factory):
    """One sequential export of the small synthetic bank, reused everywhere."""
    out = tmp_path_factory.mktemp("bank") / "synth_bank"
    config = small_config(synth_dir, out)
    result = export_bank(config)
    return config, result


@pytest.fixture(scope="session")
def mnist_data():
    return mnist_or_skip()
