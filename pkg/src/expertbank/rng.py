"""Deterministic random-stream derivation.

Every stochastic routine in the package draws from a substream keyed by
(master_seed, purpose, index...).  Streams with different keys are
statistically independent, and a stream's output depends only on its own
key, so adding replicas, alphas, or bootstrap draws never perturbs the
draws of any other stream.
"""

import numpy as np

# purpose tags, first element of every spawn key
STREAM_SAMPLE = 1      # per-replica sample-index draws
STREAM_SELECT = 2      # per-replica candidate-selection uniforms
STREAM_BOOTSTRAP = 3   # bootstrap resampling weights
STREAM_BANK_POOL = 4   # synthetic bank, pool matrix
STREAM_BANK_TEST = 5   # synthetic bank, test matrix


def substream(master_seed, *key):
    """Return an independent ``numpy.random.Generator`` for the given key.

    Parameters
    ----------
    master_seed : int
        Nonnegative integer, the experiment's single entropy source.
    *key : int
        Purpose tag and indices identifying the substream.
    """
    master_seed = int(master_seed)
    if master_seed < 0:
        raise ValueError("master_seed must be nonnegative, got %d" % master_seed)
    parts = tuple(int(k) for k in key)
    if any(k < 0 for k in parts):
        raise ValueError("substream key parts must be nonnegative: %r" % (parts,))
    ss = np.random.SeedSequence(entropy=master_seed, spawn_key=parts)
    return np.random.default_rng(ss)
