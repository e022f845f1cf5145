"""Monte Carlo selection experiment and the alpha sweep.

One experiment draws M independent samples of m pool rows, finds each
sample's winning expert, forms the alpha-mixture selection distribution,
draws one candidate per sample, and records its train error (on the
sample) and test error (test column mean).  Aggregates are the mean
train/test errors, the mean signed and absolute generalization gaps, a
30-bin gap histogram, and the full information report on the batch of
selection distributions.

The alpha sweep reuses the same samples, winners, and selection uniforms
for every alpha, so differences across the sweep isolate alpha exactly:
the candidate draw for replica i uses one uniform u_i fed through the
inverse CDF of the alpha-mixture, and the bootstrap stream is replayed
per alpha.  Consequently ``alpha_sweep(ds, cfg, [a])[0]`` equals
``run_experiment(ds, replace(cfg, alpha=a))`` bit for bit, and results
are invariant to execution order and thread count.
"""

import json
from dataclasses import dataclass, replace

import numpy as np

from .core import ExperimentConfig, atomic_write_text, fmt_float
from .estimators import bootstrap_ci, estimate_mi, mi_bound, mixture_batch, union_bound
from .rng import STREAM_BOOTSTRAP, STREAM_SAMPLE, STREAM_SELECT, substream

ALPHA_SWEEP_HEADER = ("alpha,mi_nats,mi_mm_nats,ci_low,ci_high,bound_mi,bound_union,"
                      "mean_gap,mean_abs_gap,mean_train,mean_test")
GAP_HIST_HEADER = "bin_left,bin_right,count"
GAP_HIST_BINS = 30


@dataclass(frozen=True, eq=False)
class ReplicaRecord:
    """Outcome of one Monte Carlo replica."""

    replica_index: int
    winner: int
    sampled: int
    train_error: float
    test_error: float
    gap: float


@dataclass(frozen=True, eq=False)
class ExperimentReport:
    """Aggregates of one experiment at a single alpha."""

    config: ExperimentConfig
    mean_train: float
    mean_test: float
    mean_gap: float
    mean_abs_gap: float
    mi_report: object
    hist_edges: np.ndarray
    hist_counts: np.ndarray
    replicas: tuple

    def __post_init__(self):
        if abs(self.mean_gap - (self.mean_test - self.mean_train)) > 1e-12:
            raise ValueError("mean_gap must equal mean_test - mean_train within 1e-12")
        counts = np.asarray(self.hist_counts)
        if int(counts.sum()) != len(self.replicas):
            raise ValueError("histogram counts must sum to the replica count")


def _replica_plan(dataset, config):
    """Samples, per-sample error vectors, winners, and selection uniforms.

    Replica i's draws depend only on (master_seed, i), never on alpha or
    on how many replicas run, so sweeps and reruns see identical samples.
    """
    m = int(config.sample_size)
    n_replicas = int(config.num_replicas)
    if m > dataset.num_pool:
        raise ValueError("sample_size %d exceeds pool size %d" % (m, dataset.num_pool))
    seed = int(config.master_seed)
    num_experts = dataset.num_experts
    sample_errs = np.empty((n_replicas, num_experts))
    winners = np.empty(n_replicas, dtype=np.int64)
    select_u = np.empty(n_replicas)
    samples = []
    for i in range(n_replicas):
        idx = substream(seed, STREAM_SAMPLE, i).choice(dataset.num_pool, size=m, replace=False)
        errs = dataset.pool_losses[idx].mean(axis=0)
        samples.append(idx)
        sample_errs[i] = errs
        winners[i] = np.argmin(errs)
        select_u[i] = substream(seed, STREAM_SELECT, i).random()
    return samples, sample_errs, winners, select_u


def _report_for_alpha(dataset, config, alpha, sample_errs, winners, select_u):
    alpha = float(alpha)
    num_experts = dataset.num_experts
    n_replicas = winners.size

    batch = mixture_batch(winners, alpha, num_experts)
    cum = np.cumsum(batch.rows, axis=1)
    sampled = np.minimum((cum < select_u[:, None]).sum(axis=1), num_experts - 1)

    train = sample_errs[np.arange(n_replicas), sampled]
    test = dataset.test_errors()[sampled]
    gaps = test - train

    mean_train = float(train.mean())
    mean_test = float(test.mean())
    mean_gap = mean_test - mean_train
    mean_abs_gap = float(np.abs(gaps).mean())
    counts, edges = np.histogram(gaps, bins=GAP_HIST_BINS)

    report = estimate_mi(batch)
    ci_low, ci_high = bootstrap_ci(
        batch, int(config.bootstrap_resamples), 0.95,
        rng=substream(int(config.master_seed), STREAM_BOOTSTRAP))
    full = report.with_bounds(
        ci_low=ci_low,
        ci_high=ci_high,
        bound_mi=mi_bound(report.mi, int(config.sample_size)),
        bound_union=union_bound(num_experts, int(config.sample_size)),
        bound_clamped=report.mi < 0.0,
    )

    replicas = tuple(
        ReplicaRecord(replica_index=i, winner=int(winners[i]), sampled=int(sampled[i]),
                      train_error=float(train[i]), test_error=float(test[i]),
                      gap=float(gaps[i]))
        for i in range(n_replicas)
    )
    return ExperimentReport(
        config=replace(config, alpha=alpha),
        mean_train=mean_train,
        mean_test=mean_test,
        mean_gap=mean_gap,
        mean_abs_gap=mean_abs_gap,
        mi_report=full,
        hist_edges=edges,
        hist_counts=counts,
        replicas=replicas,
    )


def run_experiment(dataset, config):
    """Run the full Monte Carlo experiment at config.alpha."""
    _, sample_errs, winners, select_u = _replica_plan(dataset, config)
    return _report_for_alpha(dataset, config, config.alpha, sample_errs, winners, select_u)


def alpha_sweep(dataset, config, alphas):
    """One report per alpha, sharing samples/winners/uniforms across alphas."""
    alphas = [float(a) for a in alphas]
    if not alphas:
        raise ValueError("alphas must be nonempty")
    for a in alphas:
        if not 0.0 <= a <= 1.0:
            raise ValueError("alpha must lie in [0, 1], got %r" % a)
    _, sample_errs, winners, select_u = _replica_plan(dataset, config)
    return [_report_for_alpha(dataset, config, a, sample_errs, winners, select_u)
            for a in alphas]


# ---------------------------------------------------------------------------
# serialization


def mi_report_json(report):
    """All scalar fields of the experiment and its information report."""
    cfg = report.config
    mi = report.mi_report
    payload = {
        "alpha": cfg.alpha,
        "sample_size": cfg.sample_size,
        "num_replicas": cfg.num_replicas,
        "master_seed": cfg.master_seed,
        "bootstrap_resamples": cfg.bootstrap_resamples,
        "mean_train": report.mean_train,
        "mean_test": report.mean_test,
        "mean_gap": report.mean_gap,
        "mean_abs_gap": report.mean_abs_gap,
        "h_w": mi.h_w,
        "h_w_given_s": mi.h_w_given_s,
        "mi": mi.mi,
        "mi_miller_madow": mi.mi_miller_madow,
        "ci_low": mi.ci_low,
        "ci_high": mi.ci_high,
        "bound_mi": mi.bound_mi,
        "bound_union": mi.bound_union,
        "bound_clamped": mi.bound_clamped,
    }
    return json.dumps(payload, indent=2, sort_keys=True, allow_nan=False) + "\n"


def write_mi_report_json(report, path):
    atomic_write_text(path, mi_report_json(report))


def alpha_sweep_csv(reports):
    lines = [ALPHA_SWEEP_HEADER]
    for rep in reports:
        mi = rep.mi_report
        lines.append(",".join(fmt_float(v) for v in (
            rep.config.alpha, mi.mi, mi.mi_miller_madow, mi.ci_low, mi.ci_high,
            mi.bound_mi, mi.bound_union, rep.mean_gap, rep.mean_abs_gap,
            rep.mean_train, rep.mean_test)))
    lines.append("")
    return "\n".join(lines)


def write_alpha_sweep_csv(reports, path):
    atomic_write_text(path, alpha_sweep_csv(reports))


def gap_hist_csv(report):
    lines = [GAP_HIST_HEADER]
    edges = report.hist_edges
    for k, count in enumerate(report.hist_counts):
        lines.append("%s,%s,%d" % (fmt_float(edges[k]), fmt_float(edges[k + 1]), int(count)))
    lines.append("")
    return "\n".join(lines)


def write_gap_hist_csv(report, path):
    atomic_write_text(path, gap_hist_csv(report))


__all__ = [
    "ALPHA_SWEEP_HEADER",
    "GAP_HIST_BINS",
    "GAP_HIST_HEADER",
    "ExperimentReport",
    "ReplicaRecord",
    "alpha_sweep",
    "alpha_sweep_csv",
    "gap_hist_csv",
    "mi_report_json",
    "run_experiment",
    "write_alpha_sweep_csv",
    "write_gap_hist_csv",
    "write_mi_report_json",
]
