"""Data-dependent expert selection.

Given a sample S of pool rows, the winner is the smallest-index expert
minimizing the sample's empirical error, and the selection distribution
is the alpha-mixture that puts mass alpha + (1-alpha)/R on the winner and
(1-alpha)/R on everyone else.  alpha=0 is uniform selection, alpha=1 is
pure empirical risk minimization.
"""

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True, eq=False)
class AlphaPosterior:
    """Selection distribution over a bank of R experts."""

    probs: np.ndarray
    winner: int
    alpha: float

    def __post_init__(self):
        p = np.ascontiguousarray(np.asarray(self.probs, dtype=np.float64))
        if p.ndim != 1 or p.size < 1:
            raise ValueError("probs must be a nonempty 1-D vector")
        if not 0.0 <= float(self.alpha) <= 1.0:
            raise ValueError("alpha must lie in [0, 1], got %r" % (self.alpha,))
        if not 0 <= int(self.winner) < p.size:
            raise ValueError("winner index %d out of range" % int(self.winner))
        if abs(p.sum() - 1.0) > 1e-12:
            raise ValueError("probs must sum to 1 within 1e-12, got %r" % p.sum())
        if p.min() < 0.0:
            raise ValueError("probs must be nonnegative")
        p.setflags(write=False)
        object.__setattr__(self, "probs", p)
        object.__setattr__(self, "winner", int(self.winner))
        object.__setattr__(self, "alpha", float(self.alpha))

    @property
    def num_experts(self):
        return self.probs.size


def sample_errors(dataset, sample):
    """Vector of all R empirical errors on the sample (one column mean each)."""
    idx = sample.indices
    if idx.max() >= dataset.num_pool:
        raise IndexError("sample index %d out of range [0, %d)"
                         % (int(idx.max()), dataset.num_pool))
    return dataset.pool_losses[idx].mean(axis=0)


def erm_select(dataset, sample):
    """Smallest-index expert minimizing the empirical error on ``sample``.

    Ties are exact: 0-1 sample errors are multiples of 1/m, so identical
    columns give bitwise-equal means and ``argmin`` picks the first.
    """
    return int(np.argmin(sample_errors(dataset, sample)))


def mixture_probs(winner, alpha, num_experts):
    """The alpha-mixture probability vector for a known winner."""
    r = int(num_experts)
    alpha = float(alpha)
    if r < 1:
        raise ValueError("num_experts must be >= 1")
    if not 0.0 <= alpha <= 1.0:
        raise ValueError("alpha must lie in [0, 1], got %r" % alpha)
    if not 0 <= int(winner) < r:
        raise ValueError("winner index %d out of range" % int(winner))
    floor = (1.0 - alpha) / r
    p = np.full(r, floor)
    p[int(winner)] += alpha
    return p


def alpha_posterior(dataset, sample, alpha):
    """Build the alpha-mixture selection distribution for one sample."""
    alpha = float(alpha)
    if not 0.0 <= alpha <= 1.0:
        raise ValueError("alpha must lie in [0, 1], got %r" % alpha)
    winner = erm_select(dataset, sample)
    probs = mixture_probs(winner, alpha, dataset.num_experts)
    return AlphaPosterior(probs=probs, winner=winner, alpha=alpha)


def index_from_uniform(probs, u):
    """Inverse-CDF draw: the index t with cum[t-1] < u <= cum[t]."""
    cum = np.cumsum(probs)
    return int(min(np.searchsorted(cum, u, side="left"), probs.size - 1))


def sample_candidate(posterior, rng):
    """Draw one expert index from the posterior, deterministic given ``rng``."""
    return index_from_uniform(posterior.probs, rng.random())


__all__ = [
    "AlphaPosterior",
    "alpha_posterior",
    "erm_select",
    "index_from_uniform",
    "mixture_probs",
    "sample_candidate",
    "sample_errors",
]
