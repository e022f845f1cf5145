"""Loss-matrix dataset types and bit-exact file I/O.

The interchange unit of the whole package is a per-item x per-expert loss
matrix with entries in [0, 1].  An expert bank is two such matrices (a
Monte Carlo pool and a held-out test set) plus light metadata.  Items are
rows, experts are columns.

On-disk layout of a dataset directory::

    meta.json         format_version, num_experts, num_pool, num_test,
                      loss_kind ("zero_one" | "bounded"), provenance
    pool_losses.csv   header "e0,e1,...,e{R-1}", one row per item
    test_losses.csv   same schema

Floats are serialized with ``repr``, the shortest decimal string that
parses back to the identical binary value, so save -> load -> save is
byte-identical.  All writes go through a temp file plus atomic rename.
"""

import json
import os
import tempfile
from dataclasses import dataclass

import numpy as np

FORMAT_VERSION = 1
LOSS_KINDS = ("zero_one", "bounded")

META_NAME = "meta.json"
POOL_NAME = "pool_losses.csv"
TEST_NAME = "test_losses.csv"


def _as_loss_matrix(a, name):
    a = np.array(a, dtype=np.float64, order="C", ndmin=2)
    if a.ndim != 2:
        raise ValueError("%s must be 2-D, got shape %r" % (name, a.shape))
    if a.shape[0] < 1 or a.shape[1] < 1:
        raise ValueError("%s must be nonempty, got shape %r" % (name, a.shape))
    if not np.all((a >= 0.0) & (a <= 1.0)):
        raise ValueError("%s has entries outside [0, 1]" % name)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class ExpertBankDataset:
    """Immutable pool/test loss matrices for a bank of R experts."""

    num_experts: int
    pool_losses: np.ndarray
    test_losses: np.ndarray
    loss_kind: str = "zero_one"
    provenance: str = ""

    def __post_init__(self):
        pool = _as_loss_matrix(self.pool_losses, "pool_losses")
        test = _as_loss_matrix(self.test_losses, "test_losses")
        r = int(self.num_experts)
        if r < 1:
            raise ValueError("num_experts must be >= 1, got %d" % r)
        if pool.shape[1] != r or test.shape[1] != r:
            raise ValueError(
                "column counts (%d pool, %d test) do not match num_experts=%d"
                % (pool.shape[1], test.shape[1], r)
            )
        if self.loss_kind not in LOSS_KINDS:
            raise ValueError("loss_kind must be one of %r, got %r" % (LOSS_KINDS, self.loss_kind))
        if self.loss_kind == "zero_one":
            for name, a in (("pool_losses", pool), ("test_losses", test)):
                if not np.all((a == 0.0) | (a == 1.0)):
                    raise ValueError("%s has non-binary entries under loss_kind=zero_one" % name)
        object.__setattr__(self, "num_experts", r)
        object.__setattr__(self, "pool_losses", pool)
        object.__setattr__(self, "test_losses", test)
        object.__setattr__(self, "provenance", str(self.provenance))

    @property
    def num_pool(self):
        return self.pool_losses.shape[0]

    @property
    def num_test(self):
        return self.test_losses.shape[0]

    def test_errors(self):
        """Per-expert test error: column means of the test matrix."""
        return self.test_losses.mean(axis=0)


@dataclass(frozen=True, eq=False)
class SampleIndices:
    """A sample S represented by the distinct pool rows it selects."""

    indices: np.ndarray

    def __post_init__(self):
        idx = np.asarray(self.indices, dtype=np.int64)
        if idx.ndim != 1 or idx.size < 1:
            raise ValueError("indices must be a nonempty 1-D integer array")
        if np.unique(idx).size != idx.size:
            raise ValueError("indices must be distinct")
        if idx.min() < 0:
            raise ValueError("indices must be nonnegative")
        idx = np.ascontiguousarray(idx)
        idx.setflags(write=False)
        object.__setattr__(self, "indices", idx)

    def __len__(self):
        return self.indices.size


@dataclass(frozen=True)
class ExperimentConfig:
    """Knobs of one Monte Carlo selection experiment.

    alpha is the mixture weight of the selection rule, sample_size the
    per-replica sample size m, num_replicas the Monte Carlo count M.
    """

    alpha: float = 0.7
    sample_size: int = 256
    num_replicas: int = 300
    master_seed: int = 0
    bootstrap_resamples: int = 2000

    def __post_init__(self):
        if not 0.0 <= float(self.alpha) <= 1.0:
            raise ValueError("alpha must lie in [0, 1], got %r" % (self.alpha,))
        if int(self.sample_size) < 1:
            raise ValueError("sample_size must be >= 1")
        if int(self.num_replicas) < 1:
            raise ValueError("num_replicas must be >= 1")
        if int(self.master_seed) < 0:
            raise ValueError("master_seed must be nonnegative")
        if int(self.bootstrap_resamples) < 1:
            raise ValueError("bootstrap_resamples must be >= 1")


def candidate_empirical_error(dataset, sample, r):
    """Mean pool loss of expert ``r`` over the rows of ``sample``.

    Order-invariant in the sample and always in [0, 1].
    """
    r = int(r)
    if not 0 <= r < dataset.num_experts:
        raise IndexError("expert index %d out of range [0, %d)" % (r, dataset.num_experts))
    idx = sample.indices
    if idx.max() >= dataset.num_pool:
        raise IndexError("sample index %d out of range [0, %d)" % (int(idx.max()), dataset.num_pool))
    return float(dataset.pool_losses[idx, r].mean())


# ---------------------------------------------------------------------------
# file I/O


def fmt_float(x):
    """Shortest decimal string that round-trips to the same float64."""
    return repr(float(x))


def atomic_write_text(path, text):
    """Write ``text`` to ``path`` via a same-directory temp file and rename."""
    path = os.fspath(path)
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp.", text=True)
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


def loss_csv_header(num_experts):
    return ",".join("e%d" % t for t in range(num_experts))


def losses_to_csv(losses):
    """Render a loss matrix as CSV text (LF endings, repr floats)."""
    losses = np.asarray(losses, dtype=np.float64)
    lines = [loss_csv_header(losses.shape[1])]
    for row in losses:
        lines.append(",".join(repr(v) for v in row.tolist()))
    lines.append("")
    return "\n".join(lines)


def csv_to_losses(path, num_experts):
    """Parse a loss CSV written by :func:`losses_to_csv`, checking the header."""
    with open(path, "r", encoding="utf-8", newline="") as fh:
        header = fh.readline().strip()
        expected = loss_csv_header(num_experts)
        if header != expected:
            raise ValueError("%s: bad header %r, expected %r" % (path, header, expected))
        data = np.loadtxt(fh, delimiter=",", dtype=np.float64, ndmin=2)
    if data.size == 0:
        raise ValueError("%s: no data rows" % path)
    if data.shape[1] != num_experts:
        raise ValueError("%s: %d columns, expected %d" % (path, data.shape[1], num_experts))
    return data


def save_dataset(dataset, path):
    """Write the dataset directory (meta.json + two CSVs) atomically."""
    path = os.fspath(path)
    os.makedirs(path, exist_ok=True)
    meta = {
        "format_version": FORMAT_VERSION,
        "num_experts": dataset.num_experts,
        "num_pool": dataset.num_pool,
        "num_test": dataset.num_test,
        "loss_kind": dataset.loss_kind,
        "provenance": dataset.provenance,
    }
    atomic_write_text(os.path.join(path, META_NAME),
                      json.dumps(meta, indent=2, sort_keys=True) + "\n")
    atomic_write_text(os.path.join(path, POOL_NAME), losses_to_csv(dataset.pool_losses))
    atomic_write_text(os.path.join(path, TEST_NAME), losses_to_csv(dataset.test_losses))


def load_dataset(path):
    """Load a dataset directory, validating shapes, ranges, and binarity."""
    path = os.fspath(path)
    with open(os.path.join(path, META_NAME), "r", encoding="utf-8") as fh:
        meta = json.load(fh)
    version = meta.get("format_version")
    if version != FORMAT_VERSION:
        raise ValueError("unsupported format_version %r (expected %d)" % (version, FORMAT_VERSION))
    r = int(meta["num_experts"])
    pool = csv_to_losses(os.path.join(path, POOL_NAME), r)
    test = csv_to_losses(os.path.join(path, TEST_NAME), r)
    if pool.shape[0] != int(meta["num_pool"]):
        raise ValueError("pool_losses row count %d does not match meta num_pool %d"
                         % (pool.shape[0], int(meta["num_pool"])))
    if test.shape[0] != int(meta["num_test"]):
        raise ValueError("test_losses row count %d does not match meta num_test %d"
                         % (test.shape[0], int(meta["num_test"])))
    return ExpertBankDataset(
        num_experts=r,
        pool_losses=pool,
        test_losses=test,
        loss_kind=str(meta["loss_kind"]),
        provenance=str(meta.get("provenance", "")),
    )
