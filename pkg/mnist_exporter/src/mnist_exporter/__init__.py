"""Export banks of small MNIST CNN classifiers as loss-matrix datasets."""

from .data import MnistUnavailableError, load_mnist
from .exporter import (
    ACCURACY_FLOOR,
    ExporterConfig,
    ExportResult,
    candidate_rng,
    export_bank,
    pool_indices,
)
from .model import build_cnn, init_parameters, predict_labels, train_candidate

__version__ = "0.1.0"

__all__ = [
    "ACCURACY_FLOOR",
    "ExporterConfig",
    "ExportResult",
    "MnistUnavailableError",
    "build_cnn",
    "candidate_rng",
    "export_bank",
    "init_parameters",
    "load_mnist",
    "pool_indices",
    "predict_labels",
    "train_candidate",
    "__version__",
]
