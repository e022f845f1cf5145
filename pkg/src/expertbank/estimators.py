"""Plug-in information estimates over batches of selection distributions.

Given the M per-sample selection distributions q_i(r) produced by a Monte
Carlo run, the estimators here compute the plug-in marginal entropy, the
conditional entropy, their difference (the mutual information between the
sample and the selected expert), a Miller-Madow bias correction, a
percentile bootstrap confidence interval, and two deviation-bound proxies:
sqrt(2*mi/m) and the finite-class baseline sqrt(log R/(2m)).  Everything
is in nats.

`routing_mi` is the analogous plug-in quantity for a row-stochastic gate:
the mutual information between a uniformly drawn input row and the routed
expert, equal to the mean KL divergence of the rows from their average.
"""

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.special import rel_entr, xlogy


@dataclass(frozen=True, eq=False)
class PosteriorBatch:
    """M selection distributions of length R, one per Monte Carlo replica."""

    rows: np.ndarray
    alpha: float

    def __post_init__(self):
        rows = np.ascontiguousarray(np.asarray(self.rows, dtype=np.float64))
        if rows.ndim != 2 or rows.shape[0] < 1 or rows.shape[1] < 1:
            raise ValueError("rows must be a nonempty M x R matrix, got shape %r"
                             % (np.shape(self.rows),))
        if rows.min() < 0.0:
            raise ValueError("rows must be nonnegative")
        err = np.abs(rows.sum(axis=1) - 1.0).max()
        if err > 1e-12:
            raise ValueError("each row must sum to 1 within 1e-12 (max deviation %g)" % err)
        rows.setflags(write=False)
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "alpha", float(self.alpha))

    @property
    def num_replicas(self):
        return self.rows.shape[0]

    @property
    def num_experts(self):
        return self.rows.shape[1]


def mixture_batch(winners, alpha, num_experts):
    """Stack alpha-mixture rows for a vector of per-replica winners."""
    winners = np.asarray(winners, dtype=np.int64)
    r = int(num_experts)
    rows = np.full((winners.size, r), (1.0 - alpha) / r)
    rows[np.arange(winners.size), winners] += alpha
    return PosteriorBatch(rows=rows, alpha=float(alpha))


@dataclass(frozen=True, eq=False)
class MIReport:
    """Information summary of one experiment.

    The bound and CI fields are optional because `estimate_mi` fills only
    the entropy/mi fields; the experiment harness attaches the bootstrap
    interval and bound proxies afterwards.
    """

    h_w: float
    h_w_given_s: float
    mi: float
    mi_miller_madow: float
    marginal: np.ndarray
    ci_low: float = None
    ci_high: float = None
    bound_mi: float = None
    bound_union: float = None
    bound_clamped: bool = False

    def __post_init__(self):
        marginal = np.ascontiguousarray(np.asarray(self.marginal, dtype=np.float64))
        if abs(marginal.sum() - 1.0) > 1e-9:
            raise ValueError("marginal must sum to 1 within 1e-9")
        if abs(self.mi - (self.h_w - self.h_w_given_s)) > 1e-12:
            raise ValueError("mi must equal h_w - h_w_given_s within 1e-12")
        if self.mi < -1e-9:
            raise ValueError("mi must be >= -1e-9 (entropy concavity), got %r" % (self.mi,))
        if self.mi > math.log(marginal.size) + 1e-9:
            raise ValueError("mi exceeds log R")
        if self.mi_miller_madow < self.mi - 1e-12:
            raise ValueError("Miller-Madow correction must be nonnegative")
        marginal.setflags(write=False)
        object.__setattr__(self, "marginal", marginal)

    def with_bounds(self, ci_low, ci_high, bound_mi, bound_union, bound_clamped):
        return replace(self, ci_low=float(ci_low), ci_high=float(ci_high),
                       bound_mi=float(bound_mi), bound_union=float(bound_union),
                       bound_clamped=bool(bound_clamped))


def empirical_marginal(batch):
    """Column means of the batch: the marginal selection distribution."""
    return batch.rows.mean(axis=0)


def entropy(p):
    """Shannon entropy -sum p log p in nats, with 0 log 0 = 0."""
    p = np.asarray(p, dtype=np.float64)
    if p.min() < 0.0:
        raise ValueError("probability vector has a negative entry")
    if abs(p.sum() - 1.0) > 1e-9:
        raise ValueError("probability vector must sum to 1 within 1e-9, got %r" % p.sum())
    return float(-xlogy(p, p).sum())


def conditional_entropy(batch):
    """Mean entropy of the batch rows."""
    rows = batch.rows
    return float(np.mean(-xlogy(rows, rows).sum(axis=1)))


def alpha_mixture_entropy(alpha, num_experts):
    """Closed-form entropy of the alpha-mixture selection distribution.

    Independent of which expert wins, so it equals the conditional
    entropy of any mixture batch exactly.
    """
    alpha = float(alpha)
    r = int(num_experts)
    if not 0.0 <= alpha <= 1.0:
        raise ValueError("alpha must lie in [0, 1], got %r" % alpha)
    if r < 1:
        raise ValueError("num_experts must be >= 1")
    floor = (1.0 - alpha) / r
    top = alpha + floor
    return float(-(xlogy(top, top) + (r - 1) * xlogy(floor, floor)))


def estimate_mi(batch):
    """Plug-in mutual information of a posterior batch.

    Returns an MIReport with the entropy, mi, Miller-Madow, and marginal
    fields filled; CI and bound fields are left unset.
    """
    marginal = empirical_marginal(batch)
    h_w = entropy(marginal)
    h_cond = conditional_entropy(batch)
    mi = h_w - h_cond
    m_reps = batch.num_replicas
    r = batch.num_experts
    mi_mm = mi + (r - 1) / (2.0 * m_reps)
    return MIReport(h_w=h_w, h_w_given_s=h_cond, mi=mi, mi_miller_madow=mi_mm,
                    marginal=marginal)


def bootstrap_ci(batch, resamples=2000, level=0.95, *, rng):
    """Percentile bootstrap interval for the plug-in mi.

    Resamples whole replica rows with replacement ``resamples`` times and
    takes the (1-level)/2 and 1-(1-level)/2 quantiles of the re-estimated
    mi.  Deterministic given ``rng``.
    """
    resamples = int(resamples)
    level = float(level)
    if resamples < 1:
        raise ValueError("resamples must be >= 1")
    if not 0.0 < level < 1.0:
        raise ValueError("level must lie in (0, 1)")
    rows = batch.rows
    m_reps = rows.shape[0]
    counts = rng.multinomial(m_reps, np.full(m_reps, 1.0 / m_reps), size=resamples)
    weights = counts / m_reps
    marginals = weights @ rows
    h_w = -xlogy(marginals, marginals).sum(axis=1)
    row_entropy = -xlogy(rows, rows).sum(axis=1)
    h_cond = weights @ row_entropy
    mi = h_w - h_cond
    tail = (1.0 - level) / 2.0
    low, high = np.quantile(mi, [tail, 1.0 - tail])
    return float(low), float(high)


def mi_bound(mi, m):
    """Deviation-bound proxy sqrt(2 * mi / m); negative mi is clamped to 0."""
    m = int(m)
    if m < 1:
        raise ValueError("m must be >= 1")
    return float(math.sqrt(2.0 * max(float(mi), 0.0) / m))


def union_bound(num_experts, m):
    """Finite-class deviation baseline sqrt(log R / (2m))."""
    r = int(num_experts)
    m = int(m)
    if r < 1 or m < 1:
        raise ValueError("num_experts and m must be >= 1")
    return float(math.sqrt(math.log(r) / (2.0 * m)))


def routing_mi(gate):
    """Mutual information (nats) between a uniform input row and its route.

    ``gate`` is either a GateMatrix-like object with a row-stochastic
    ``cond`` attribute or a bare N x R array.  Equal to the mean KL
    divergence of the rows from the column-mean marginal, hence >= 0 and
    0 iff all rows are equal.
    """
    cond = np.asarray(getattr(gate, "cond", gate), dtype=np.float64)
    if cond.ndim != 2 or cond.shape[0] < 1 or cond.shape[1] < 1:
        raise ValueError("gate must be a nonempty 2-D matrix")
    if cond.min() < 0.0:
        raise ValueError("gate entries must be nonnegative")
    err = np.abs(cond.sum(axis=1) - 1.0).max()
    if err > 1e-9:
        raise ValueError("gate rows must sum to 1 within 1e-9 (max deviation %g)" % err)
    marginal = cond.mean(axis=0)
    terms = rel_entr(cond, np.broadcast_to(marginal, cond.shape))
    total = terms.sum()
    assert np.isfinite(total), "conditional mass on a zero-marginal expert"
    return float(total / cond.shape[0])


__all__ = [
    "MIReport",
    "PosteriorBatch",
    "alpha_mixture_entropy",
    "bootstrap_ci",
    "conditional_entropy",
    "empirical_marginal",
    "entropy",
    "estimate_mi",
    "mi_bound",
    "mixture_batch",
    "routing_mi",
    "union_bound",
]
