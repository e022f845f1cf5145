import json

import numpy as np
import pytest

import expertbank as eb


def small_config(**kwargs):
    defaults = dict(alpha=0.7, sample_size=16, num_replicas=40, master_seed=5,
                    bootstrap_resamples=100)
    defaults.update(kwargs)
    return eb.ExperimentConfig(**defaults)


class TestRunExperiment:
    def test_deterministic(self, small_bank):
        a = eb.run_experiment(small_bank, small_config())
        b = eb.run_experiment(small_bank, small_config())
        assert a.mi_report.mi == b.mi_report.mi
        assert a.mean_gap == b.mean_gap
        assert [r.sampled for r in a.replicas] == [r.sampled for r in b.replicas]

    def test_replica_records_consistent(self, small_bank):
        rep = eb.run_experiment(small_bank, small_config())
        assert len(rep.replicas) == 40
        test_errors = small_bank.test_errors()
        for rec in rep.replicas:
            assert 0 <= rec.winner < small_bank.num_experts
            assert 0 <= rec.sampled < small_bank.num_experts
            assert rec.gap == rec.test_error - rec.train_error
            assert rec.test_error == test_errors[rec.sampled]

    def test_mean_gap_identity(self, small_bank):
        rep = eb.run_experiment(small_bank, small_config())
        assert rep.mean_gap == rep.mean_test - rep.mean_train
        gaps = np.array([r.gap for r in rep.replicas])
        np.testing.assert_allclose(rep.mean_abs_gap, np.abs(gaps).mean(),
                                   rtol=0, atol=1e-15)

    def test_histogram_counts_sum_to_replicas(self, small_bank):
        rep = eb.run_experiment(small_bank, small_config())
        assert rep.hist_counts.sum() == 40
        assert rep.hist_edges.size == rep.hist_counts.size + 1

    def test_single_replica_mi_is_exact_zero(self, small_bank):
        rep = eb.run_experiment(small_bank, small_config(num_replicas=1))
        assert rep.mi_report.mi == 0.0

    def test_conditional_entropy_matches_closed_form(self, small_bank):
        rep = eb.run_experiment(small_bank, small_config())
        want = eb.alpha_mixture_entropy(0.7, small_bank.num_experts)
        np.testing.assert_allclose(rep.mi_report.h_w_given_s, want,
                                   rtol=0, atol=1e-12)

    def test_alpha_one_samples_the_winner(self, small_bank):
        rep = eb.run_experiment(small_bank, small_config(alpha=1.0))
        for rec in rep.replicas:
            assert rec.sampled == rec.winner

    def test_alpha_zero_mi_is_tiny(self, small_bank):
        rep = eb.run_experiment(small_bank, small_config(alpha=0.0))
        assert abs(rep.mi_report.mi) < 1e-9

    def test_winner_stable_across_alpha(self, small_bank):
        a = eb.run_experiment(small_bank, small_config(alpha=0.2))
        b = eb.run_experiment(small_bank, small_config(alpha=0.9))
        assert [r.winner for r in a.replicas] == [r.winner for r in b.replicas]

    def test_replica_prefix_stable_when_count_grows(self, small_bank):
        short = eb.run_experiment(small_bank, small_config(num_replicas=10))
        long = eb.run_experiment(small_bank, small_config(num_replicas=25))
        for a, b in zip(short.replicas, long.replicas):
            assert a.winner == b.winner
            assert a.sampled == b.sampled
            assert a.train_error == b.train_error
            assert a.test_error == b.test_error

    def test_bounds_attached(self, small_bank):
        cfg = small_config()
        rep = eb.run_experiment(small_bank, cfg)
        mi = rep.mi_report
        assert mi.bound_mi == eb.mi_bound(mi.mi, cfg.sample_size)
        assert mi.bound_union == eb.union_bound(small_bank.num_experts,
                                                cfg.sample_size)
        assert mi.ci_low is not None and mi.ci_low <= mi.ci_high

    def test_sample_size_exceeding_pool_raises(self, small_bank):
        with pytest.raises(ValueError):
            eb.run_experiment(small_bank,
                              small_config(sample_size=small_bank.num_pool + 1))


class TestAlphaSweep:
    def test_matches_single_runs_exactly(self, small_bank):
        alphas = [0.0, 0.3, 1.0]
        sweep = eb.alpha_sweep(small_bank, small_config(), alphas)
        for alpha, rep in zip(alphas, sweep):
            single = eb.run_experiment(small_bank, small_config(alpha=alpha))
            assert rep.mi_report.mi == single.mi_report.mi
            assert rep.mi_report.ci_low == single.mi_report.ci_low
            assert rep.mean_gap == single.mean_gap

    def test_rejects_out_of_range_alpha(self, small_bank):
        with pytest.raises(ValueError):
            eb.alpha_sweep(small_bank, small_config(), [0.5, 1.5])

    def test_empty_alpha_list_rejected(self, small_bank):
        with pytest.raises(ValueError):
            eb.alpha_sweep(small_bank, small_config(), [])


class TestSerialization:
    def test_mi_report_json_keys(self, small_bank):
        rep = eb.run_experiment(small_bank, small_config())
        payload = json.loads(eb.mi_report_json(rep))
        want = {"alpha", "sample_size", "num_replicas", "master_seed",
                "bootstrap_resamples", "mean_train", "mean_test", "mean_gap",
                "mean_abs_gap", "h_w", "h_w_given_s", "mi", "mi_miller_madow",
                "ci_low", "ci_high", "bound_mi", "bound_union", "bound_clamped"}
        assert set(payload) == want
        assert payload["mi"] == rep.mi_report.mi
        assert payload["alpha"] == 0.7

    def test_alpha_sweep_csv_schema(self, small_bank, tmp_path):
        alphas = [0.0, 0.7]
        sweep = eb.alpha_sweep(small_bank, small_config(), alphas)
        out = tmp_path / "alpha_sweep.csv"
        eb.write_alpha_sweep_csv(sweep, out)
        lines = out.read_text().splitlines()
        assert lines[0] == ("alpha,mi_nats,mi_mm_nats,ci_low,ci_high,bound_mi,"
                            "bound_union,mean_gap,mean_abs_gap,mean_train,"
                            "mean_test")
        assert len(lines) == 3
        row = lines[2].split(",")
        assert float(row[0]) == 0.7
        assert float(row[1]) == sweep[1].mi_report.mi

    def test_gap_hist_csv_schema(self, small_bank, tmp_path):
        rep = eb.run_experiment(small_bank, small_config())
        out = tmp_path / "gap_hist.csv"
        eb.write_gap_hist_csv(rep, out)
        lines = out.read_text().splitlines()
        assert lines[0] == "bin_left,bin_right,count"
        assert len(lines) == 1 + eb.GAP_HIST_BINS
        counts = [int(line.split(",")[2]) for line in lines[1:]]
        assert sum(counts) == 40
        for line in lines[1:]:
            left, right, _ = line.split(",")
            assert float(left) < float(right)
