import json
import subprocess
import sys

import numpy as np
import pytest

import expertbank as eb

CLI = [sys.executable, "-m", "expertbank.cli"]


def run_cli(*args):
    return subprocess.run(CLI + list(args), capture_output=True, text=True)


@pytest.fixture(scope="module")
def bank_dir(tmp_path_factory):
    path = tmp_path_factory.mktemp("cli") / "bank"
    proc = run_cli("gen-bank", "--out", str(path), "--experts", "6",
                   "--pool", "400", "--test", "600", "--seed", "3")
    assert proc.returncode == 0, proc.stderr
    return path


class TestGenBank:
    def test_output_loads_and_matches_library(self, bank_dir, small_bank):
        ds = eb.load_dataset(bank_dir)
        np.testing.assert_array_equal(ds.pool_losses, small_bank.pool_losses)
        np.testing.assert_array_equal(ds.test_losses, small_bank.test_losses)

    def test_refuses_overwrite_without_force(self, bank_dir):
        proc = run_cli("gen-bank", "--out", str(bank_dir), "--experts", "6",
                       "--pool", "400", "--test", "600", "--seed", "3")
        assert proc.returncode == 2
        assert "refusing to overwrite" in proc.stderr

    def test_force_overwrites_byte_identically(self, bank_dir):
        before = (bank_dir / "pool_losses.csv").read_bytes()
        proc = run_cli("gen-bank", "--out", str(bank_dir), "--experts", "6",
                       "--pool", "400", "--test", "600", "--seed", "3",
                       "--force")
        assert proc.returncode == 0, proc.stderr
        assert (bank_dir / "pool_losses.csv").read_bytes() == before


class TestMi:
    def test_report_matches_library(self, bank_dir, small_bank, tmp_path):
        out = tmp_path / "mi"
        proc = run_cli("mi", "--data", str(bank_dir), "--out", str(out),
                       "--alpha", "0.7", "--m", "16", "--replicas", "40",
                       "--bootstrap", "100", "--seed", "5")
        assert proc.returncode == 0, proc.stderr
        payload = json.loads((out / "mi_report.json").read_text())
        cfg = eb.ExperimentConfig(alpha=0.7, sample_size=16, num_replicas=40,
                                  master_seed=5, bootstrap_resamples=100)
        rep = eb.run_experiment(small_bank, cfg)
        assert payload["mi"] == rep.mi_report.mi
        assert payload["ci_high"] == rep.mi_report.ci_high
        assert payload["mean_gap"] == rep.mean_gap
        hist = (out / "gap_hist.csv").read_text().splitlines()
        assert hist[0] == "bin_left,bin_right,count"
        assert len(hist) == 1 + eb.GAP_HIST_BINS

    def test_missing_data_dir_exits_2(self, tmp_path):
        proc = run_cli("mi", "--data", str(tmp_path / "nope"), "--out",
                       str(tmp_path / "out"))
        assert proc.returncode == 2
        assert proc.stderr.startswith("error:")


class TestAlphaSweep:
    def test_csv_matches_library(self, bank_dir, small_bank, tmp_path):
        out = tmp_path / "sweep"
        proc = run_cli("alpha-sweep", "--data", str(bank_dir), "--out", str(out),
                       "--alphas", "0,0.5,1.0", "--m", "16", "--replicas", "40",
                       "--bootstrap", "100", "--seed", "5")
        assert proc.returncode == 0, proc.stderr
        cfg = eb.ExperimentConfig(alpha=0.0, sample_size=16, num_replicas=40,
                                  master_seed=5, bootstrap_resamples=100)
        reports = eb.alpha_sweep(small_bank, cfg, [0.0, 0.5, 1.0])
        want = eb.alpha_sweep_csv(reports)
        assert (out / "alpha_sweep.csv").read_text() == want

    def test_bad_alpha_string_exits_2(self, bank_dir, tmp_path):
        proc = run_cli("alpha-sweep", "--data", str(bank_dir), "--out",
                       str(tmp_path / "x"), "--alphas", "0,zebra")
        assert proc.returncode == 2


class TestRdCurve:
    def test_rows_sorted_by_rate(self, bank_dir, tmp_path):
        out = tmp_path / "rd"
        proc = run_cli("rd-curve", "--data", str(bank_dir), "--out", str(out),
                       "--points", "6", "--items", "200")
        assert proc.returncode == 0, proc.stderr
        lines = (out / "rd_curve.csv").read_text().splitlines()
        assert lines[0] == "lambda,rate_nats,distortion,lagrangian,iterations,converged"
        rates = [float(line.split(",")[1]) for line in lines[1:]]
        assert rates == sorted(rates)
        assert len(rates) == 6

    def test_thread_count_does_not_change_bytes(self, bank_dir, tmp_path):
        outs = []
        for name, threads in (("a", "1"), ("b", "4")):
            out = tmp_path / name
            proc = run_cli("rd-curve", "--data", str(bank_dir), "--out",
                           str(out), "--points", "5", "--items", "150",
                           "--threads", threads)
            assert proc.returncode == 0, proc.stderr
            outs.append((out / "rd_curve.csv").read_bytes())
        assert outs[0] == outs[1]


class TestRoutingMi:
    def write_gate(self, path, cond):
        header = ",".join("e%d" % t for t in range(cond.shape[1]))
        rows = [",".join(repr(float(v)) for v in row) for row in cond]
        path.write_text(header + "\n" + "\n".join(rows) + "\n")

    def test_stdout_matches_library(self, tmp_path):
        cond = np.random.default_rng(2).dirichlet(np.ones(4), size=9)
        gate_path = tmp_path / "gate.csv"
        self.write_gate(gate_path, cond)
        proc = run_cli("routing-mi", "--gate", str(gate_path))
        assert proc.returncode == 0, proc.stderr
        assert float(proc.stdout.strip()) == eb.routing_mi(cond)

    def test_json_output(self, tmp_path):
        cond = np.eye(3)
        gate_path = tmp_path / "gate.csv"
        self.write_gate(gate_path, cond)
        out = tmp_path / "out"
        proc = run_cli("routing-mi", "--gate", str(gate_path), "--out", str(out))
        assert proc.returncode == 0, proc.stderr
        payload = json.loads((out / "routing_mi.json").read_text())
        assert payload["routing_mi_nats"] == eb.routing_mi(cond)
        assert payload["num_items"] == 3 and payload["num_experts"] == 3

    def test_bad_header_exits_2(self, tmp_path):
        gate_path = tmp_path / "gate.csv"
        gate_path.write_text("x,y\n0.5,0.5\n")
        proc = run_cli("routing-mi", "--gate", str(gate_path))
        assert proc.returncode == 2


class TestArgumentErrors:
    def test_no_subcommand(self):
        proc = run_cli()
        assert proc.returncode == 2

    def test_unknown_flag(self):
        proc = run_cli("gen-bank", "--out", "x", "--bogus")
        assert proc.returncode == 2

    def test_nonpositive_threads(self, bank_dir, tmp_path):
        proc = run_cli("rd-curve", "--data", str(bank_dir), "--out",
                       str(tmp_path / "o"), "--threads", "0")
        assert proc.returncode == 2
