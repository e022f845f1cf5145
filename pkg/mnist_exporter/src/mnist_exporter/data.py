"""MNIST acquisition.

Tries, in order: a local ``mnist.npz`` archive, local IDX files (plain or
gzipped, either directly in the data directory or under ``MNIST/raw``), and
finally a torchvision download.  Every attempt that fails is remembered so
the terminal error message explains exactly what was tried and why.
"""

import gzip
import os
import struct

import numpy as np

IDX_NAMES = {
    "train_images": "train-images-idx3-ubyte",
    "train_labels": "train-labels-idx1-ubyte",
    "test_images": "t10k-images-idx3-ubyte",
    "test_labels": "t10k-labels-idx1-ubyte",
}

NPZ_KEYS = ("x_train", "y_train", "x_test", "y_test")


class MnistUnavailableError(RuntimeError):
    """Raised when no acquisition strategy can produce the dataset."""


def _read_idx(path):
    """Parse one IDX file (gzipped or plain) into a numpy array."""
    opener = gzip.open if path.endswith(".gz") else open
    with opener(path, "rb") as fh:
        raw = fh.read()
    if len(raw) < 8:
        raise ValueError("%s: truncated IDX header" % path)
    zero, dtype_code, ndim = struct.unpack(">HBB", raw[:4])
    if zero != 0 or dtype_code != 0x08:
        raise ValueError("%s: not an unsigned-byte IDX file" % path)
    header = 4 + 4 * ndim
    if len(raw) < header:
        raise ValueError("%s: truncated IDX dimension block" % path)
    dims = struct.unpack(">" + "I" * ndim, raw[4:header])
    data = np.frombuffer(raw, dtype=np.uint8, offset=header)
    expected = int(np.prod(dims))
    if data.size != expected:
        raise ValueError(
            "%s: payload has %d bytes, dimensions imply %d"
            % (path, data.size, expected)
        )
    return data.reshape(dims)


def _find_idx_file(directory, stem):
    for name in (stem, stem + ".gz"):
        candidate = os.path.join(directory, name)
        if os.path.isfile(candidate):
            return candidate
    return None


def _load_idx_dir(directory):
    """Load the four MNIST IDX files from one directory, or return None."""
    paths = {}
    for key, stem in IDX_NAMES.items():
        found = _find_idx_file(directory, stem)
        if found is None:
            return None
        paths[key] = found
    train_x = _read_idx(paths["train_images"])
    train_y = _read_idx(paths["train_labels"])
    test_x = _read_idx(paths["test_images"])
    test_y = _read_idx(paths["test_labels"])
    return train_x, train_y, test_x, test_y


def _load_npz(path):
    with np.load(path) as archive:
        missing = [k for k in NPZ_KEYS if k not in archive]
        if missing:
            raise ValueError(
                "%s: missing arrays %s" % (path, ", ".join(missing))
            )
        return tuple(np.asarray(archive[k]) for k in NPZ_KEYS)


def _validate(train_x, train_y, test_x, test_y):
    train_x = np.ascontiguousarray(train_x, dtype=np.uint8)
    test_x = np.ascontiguousarray(test_x, dtype=np.uint8)
    train_y = np.ascontiguousarray(train_y, dtype=np.int64).reshape(-1)
    test_y = np.ascontiguousarray(test_y, dtype=np.int64).reshape(-1)
    for name, x, y in (("train", train_x, train_y), ("test", test_x, test_y)):
        if x.ndim != 3 or x.shape[1:] != (28, 28):
            raise ValueError(
                "%s images must have shape (n, 28, 28), got %r"
                % (name, x.shape)
            )
        if x.shape[0] != y.shape[0]:
            raise ValueError(
                "%s has %d images but %d labels" % (name, x.shape[0], y.shape[0])
            )
        if y.size == 0:
            raise ValueError("%s split is empty" % name)
        if y.min() < 0 or y.max() > 9:
            raise ValueError("%s labels must lie in 0..9" % name)
    return train_x, train_y, test_x, test_y


def _download_via_torchvision(cache_dir):
    from torchvision import datasets

    datasets.MNIST(root=cache_dir, train=True, download=True)
    datasets.MNIST(root=cache_dir, train=False, download=True)
    raw = os.path.join(cache_dir, "MNIST", "raw")
    loaded = _load_idx_dir(raw)
    if loaded is None:
        raise RuntimeError("download finished but raw IDX files are missing")
    return loaded


def load_mnist(data_dir=None, download=True, cache_dir=None):
    """Return (train_x, train_y, test_x, test_y) as uint8/int64 arrays.

    ``data_dir`` may contain either ``mnist.npz`` (arrays x_train, y_train,
    x_test, y_test) or the four standard IDX files, optionally gzipped,
    either directly or under ``MNIST/raw``.  When nothing local works and
    ``download`` is true, torchvision fetches the canonical archives into
    ``cache_dir`` (default ``~/.cache/mnist_exporter``).
    """
    attempts = []

    if data_dir is not None:
        npz = os.path.join(data_dir, "mnist.npz")
        if os.path.isfile(npz):
            try:
                return _validate(*_load_npz(npz))
            except Exception as exc:
                attempts.append("%s: %s" % (npz, exc))
        else:
            attempts.append("%s: not found" % npz)
        for directory in (data_dir, os.path.join(data_dir, "MNIST", "raw")):
            try:
                loaded = _load_idx_dir(directory)
            except Exception as exc:
                attempts.append("%s: %s" % (directory, exc))
                continue
            if loaded is not None:
                return _validate(*loaded)
            attempts.append("%s: IDX files not found" % directory)

    if download:
        if cache_dir is None:
            cache_dir = os.path.join(
                os.path.expanduser("~"), ".cache", "mnist_exporter"
            )
        try:
            return _validate(*_download_via_torchvision(cache_dir))
        except ImportError as exc:
            attempts.append("torchvision import failed: %s" % exc)
        except Exception as exc:
            attempts.append("torchvision download failed: %s" % exc)
    else:
        attempts.append("download disabled")

    raise MnistUnavailableError(
        "could not obtain MNIST; attempts:\n  " + "\n  ".join(attempts)
    )
