"""On-disk dataset layout: meta.json contents, CSV schema, overwrite rules."""

import json
import os

import numpy as np
import pytest

from mnist_exporter import export_bank
from mnist_exporter.exporter import META_NAME, POOL_NAME, TEST_NAME

from exporter_testkit import small_config


def read_csv(path):
    with open(path, "rb") as fh:
        raw = fh.read()
    text = raw.decode("utf-8")
    lines = text.split("\n")
    header = lines[0].split(",")
    body = np.array([[float(v) for v in line.split(",")]
                     for line in lines[1:-1]])
    return raw, header, body


class TestLayout:
    def test_expected_files_only(self, synth_bank):
        config, _ = synth_bank
        names = sorted(os.listdir(config.out_dir))
        assert names == sorted([META_NAME, POOL_NAME, TEST_NAME])

    def test_meta_contents(self, synth_bank, synth_arrays):
        config, result = synth_bank
        with open(os.path.join(config.out_dir, META_NAME)) as fh:
            meta = json.load(fh)
        assert meta["format_version"] == 1
        assert meta["num_experts"] == config.num_candidates
        assert meta["num_pool"] == config.pool_size
        assert meta["num_test"] == len(synth_arrays[2])
        assert meta["loss_kind"] == "zero_one"
        assert meta["candidate_accuracies"] == result.accuracies
        assert meta["pool_indices"] == result.pool_indices.tolist()
        assert "seed=%d" % config.seed in meta["provenance"]
        assert "R=%d" % config.num_candidates in meta["provenance"]

    def test_meta_is_sorted_pretty_json_with_newline(self, synth_bank):
        config, _ = synth_bank
        with open(os.path.join(config.out_dir, META_NAME), "rb") as fh:
            raw = fh.read()
        assert raw.endswith(b"\n")
        assert b"\r" not in raw
        meta = json.loads(raw)
        expected = json.dumps(meta, indent=2, sort_keys=True) + "\n"
        assert raw.decode("utf-8") == expected

    @pytest.mark.parametrize("name", [POOL_NAME, TEST_NAME])
    def test_csv_schema(self, synth_bank, synth_arrays, name):
        config, _ = synth_bank
        raw, header, body = read_csv(os.path.join(config.out_dir, name))
        assert header == ["e%d" % j for j in range(config.num_candidates)]
        rows = config.pool_size if name == POOL_NAME else len(synth_arrays[2])
        assert body.shape == (rows, config.num_candidates)
        assert raw.endswith(b"\n")
        assert b"\r" not in raw

    @pytest.mark.parametrize("name", [POOL_NAME, TEST_NAME])
    def test_entries_are_binary(self, synth_bank, name):
        config, _ = synth_bank
        _, _, body = read_csv(os.path.join(config.out_dir, name))
        assert np.isin(body, (0.0, 1.0)).all()

    def test_no_temp_files_left_behind(self, synth_bank):
        config, _ = synth_bank
        assert not [n for n in os.listdir(config.out_dir)
                    if n.startswith(".tmp.")]


class TestBookkeeping:
    def test_accuracies_match_test_columns(self, synth_bank):
        config, result = synth_bank
        _, _, body = read_csv(os.path.join(config.out_dir, TEST_NAME))
        for r in range(config.num_candidates):
            assert result.accuracies[r] == 1.0 - body[:, r].mean()

    def test_pool_indices_are_valid_training_rows(self, synth_bank,
                                                  synth_arrays):
        config, result = synth_bank
        idx = result.pool_indices
        assert idx.shape == (config.pool_size,)
        assert len(np.unique(idx)) == config.pool_size
        assert idx.min() >= 0
        assert idx.max() < len(synth_arrays[0])
        assert (np.diff(idx) > 0).all()

    def test_low_accuracy_becomes_provenance_warning(self, synth_bank):
        config, result = synth_bank
        with open(os.path.join(config.out_dir, META_NAME)) as fh:
            meta = json.load(fh)
        low = [r for r, a in enumerate(result.accuracies) if a < 0.8]
        assert len(result.warnings) == len(low)
        for message in result.warnings:
            assert "warning: " + message in meta["provenance"]


class TestOverwrite:
    def test_refuses_existing_dataset(self, synth_bank, synth_dir):
        config, _ = synth_bank
        again = small_config(synth_dir, config.out_dir)
        with pytest.raises(FileExistsError, match="refusing to overwrite"):
            export_bank(again)

    def test_force_overwrites_identically(self, synth_bank, synth_dir):
        config, _ = synth_bank
        before = {}
        for name in (META_NAME, POOL_NAME, TEST_NAME):
            with open(os.path.join(config.out_dir, name), "rb") as fh:
                before[name] = fh.read()
        again = small_config(synth_dir, config.out_dir)
        export_bank(again, overwrite=True)
        for name, payload in before.items():
            with open(os.path.join(config.out_dir, name), "rb") as fh:
                assert fh.read() == payload
