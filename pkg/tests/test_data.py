"""Tests for dataset files, splits, preprocessing and the pendulum generator."""

import numpy as np
import pandas as pd
import pyarrow as pa
import pyarrow.parquet as pq
import pytest

from arnlab.data.csv_io import DatasetSchema, load_csv, save_csv
from arnlab.data.pendulum import (
    derivatives,
    gen_double_pendulum,
    integrate,
    pendulum_energy,
    positions,
    random_initial_states,
)
from arnlab.data.preprocess import apply_scaling, inputs_in_target_units, preprocess
from arnlab.data.snapshot import load_dataset, load_snapshot, save_snapshot
from arnlab.data.split import split, split_sizes
from arnlab.errors import ArtifactFormatError, DataError

CLASSIFICATION_CSV = """\
# task: classification
series_id,t,x0,x1,label
b,1,0.5,1.0,1
a,0,1.0,2.0,0
a,1,3.0,4.0,0
b,0,0.0,0.0,1
"""


def write(tmp_path, text, name="data.csv"):
    path = tmp_path / name
    path.write_text(text)
    return path


class TestLoadCsv:
    """Test reading the dataset interchange format."""

    def test_rows_are_grouped_and_ordered(self, tmp_path):
        dataset = load_csv(write(tmp_path, CLASSIFICATION_CSV))
        assert dataset.series_ids == ("a", "b")
        np.testing.assert_array_equal(dataset.inputs[0], [[1.0, 2.0], [3.0, 4.0]])
        np.testing.assert_array_equal(dataset.inputs[1], [[0.0, 0.0], [0.5, 1.0]])
        np.testing.assert_array_equal(dataset.labels(), [0, 1])
        assert dataset.n_classes == 2 and dataset.n_out == 2

    def test_regression_file(self, tmp_path):
        text = "# format_version: 1\n# task: regression\nseries_id,t,x0,y0\ns,0,1,2\ns,1,2,3\ns,2,3,4\n"
        dataset = load_csv(write(tmp_path, text))
        assert dataset.inputs.shape == (1, 3, 1)
        assert dataset.targets.shape == (1, 3, 1)

    def test_schema_overrides_header(self, tmp_path):
        text = CLASSIFICATION_CSV.replace("# task: classification\n", "")
        dataset = load_csv(write(tmp_path, text), DatasetSchema(task="classification", n_classes=4))
        assert dataset.n_classes == 4

    def test_missing_task(self, tmp_path):
        with pytest.raises(DataError, match="task"):
            load_csv(write(tmp_path, CLASSIFICATION_CSV.replace("# task: classification\n", "")))

    def test_non_numeric_cell_names_line(self, tmp_path):
        text = CLASSIFICATION_CSV.replace("a,0,1.0,2.0,0", "a,0,abc,2.0,0")
        with pytest.raises(DataError, match="line 4"):
            load_csv(write(tmp_path, text))

    def test_duplicate_timestep(self, tmp_path):
        text = CLASSIFICATION_CSV + "a,1,9,9,0\n"
        with pytest.raises(DataError, match="duplicate"):
            load_csv(write(tmp_path, text))

    def test_ragged_series(self, tmp_path):
        text = CLASSIFICATION_CSV + "a,2,9,9,0\n"
        with pytest.raises(DataError, match="timesteps"):
            load_csv(write(tmp_path, text))

    def test_series_on_different_time_grids(self, tmp_path):
        text = CLASSIFICATION_CSV.replace("b,1,0.5,1.0,1", "b,2,0.5,1.0,1")
        with pytest.raises(DataError, match=r"line 3: series 'b' has t=2 where series 'a' has t=1"):
            load_csv(write(tmp_path, text))

    def test_inconsistent_label(self, tmp_path):
        text = CLASSIFICATION_CSV.replace("b,0,0.0,0.0,1", "b,0,0.0,0.0,0")
        with pytest.raises(DataError, match="label"):
            load_csv(write(tmp_path, text))

    def test_missing_column(self, tmp_path):
        text = CLASSIFICATION_CSV.replace(",label", "").replace(",0\n", "\n").replace(",1\n", "\n")
        with pytest.raises(DataError, match="label"):
            load_csv(write(tmp_path, text))

    def test_unsupported_version(self, tmp_path):
        with pytest.raises(ArtifactFormatError):
            load_csv(write(tmp_path, "# format_version: 99\n" + CLASSIFICATION_CSV))

    def test_missing_file(self, tmp_path):
        with pytest.raises(DataError):
            load_csv(tmp_path / "absent.csv")

    def test_saved_file_reads_back(self, tmp_path, pendulum_raw):
        path = tmp_path / "pendulum.csv"
        save_csv(pendulum_raw, path)
        assert path.read_text().startswith("# format_version: 1\n# kind: dataset\n")
        loaded = load_csv(path)
        np.testing.assert_array_equal(loaded.inputs, pendulum_raw.inputs)
        assert loaded.metadata["generator"] == "double-pendulum"


class TestSplit:
    """Test the 50/25/25 partition."""

    @pytest.mark.parametrize("n, sizes", [(8, (4, 2, 2)), (16, (8, 4, 4)), (10, (5, 3, 2))])
    def test_sizes(self, n, sizes):
        assert split_sizes(n) == sizes

    def test_partition_is_disjoint_and_complete(self, pendulum_raw):
        parts = split(pendulum_raw, seed=4)
        ids = [parts.train.series_ids, parts.validation.series_ids, parts.test.series_ids]
        flat = [i for part in ids for i in part]
        assert sorted(flat) == sorted(pendulum_raw.series_ids)
        assert parts.test.use_once and not parts.train.use_once

    def test_seed_determines_split(self, pendulum_raw):
        assert split(pendulum_raw, 1).train.series_ids == split(pendulum_raw, 1).train.series_ids
        assert split(pendulum_raw, 1).train.series_ids != split(pendulum_raw, 2).train.series_ids

    @pytest.mark.parametrize("n", [3, 5])
    def test_too_few_series(self, pendulum_raw, n):
        with pytest.raises(DataError):
            split(pendulum_raw.subset(range(n)), seed=0)


class TestPreprocess:
    """Test scaling with training statistics."""

    def test_training_inputs_are_standardized(self, pendulum_split):
        flat = pendulum_split.train.inputs.reshape(-1, 4)
        np.testing.assert_allclose(flat.mean(axis=0), 0.0, atol=1e-12)
        np.testing.assert_allclose(flat.std(axis=0), 1.0, atol=1e-12)

    def test_other_splits_reuse_training_statistics(self, pendulum_split):
        assert pendulum_split.validation.scaling is pendulum_split.train.scaling
        assert pendulum_split.test.scaling is pendulum_split.train.scaling

    def test_constant_feature_keeps_unit_scale(self, tmp_path):
        text = "# task: classification\nseries_id,t,x0,label\na,0,5,0\nb,0,5,1\n"
        encoded = preprocess(load_csv(write(tmp_path, text)))
        assert not encoded.inputs.any()
        np.testing.assert_array_equal(encoded.targets, np.eye(2))

    def test_unscale_inverts_scaling(self, pendulum_raw, pendulum_split):
        scaling = pendulum_split.train.scaling
        restored = scaling.unscale_targets(pendulum_split.test.targets)
        raw = pendulum_raw.subset([pendulum_raw.series_ids.index(s) for s in pendulum_split.test.series_ids])
        np.testing.assert_allclose(restored, raw.targets, atol=1e-12)

    def test_inputs_in_target_units(self, pendulum_split):
        train = pendulum_split.train
        np.testing.assert_allclose(inputs_in_target_units(train)[:, 1:], train.targets[:, :-1], atol=1e-12)

    def test_already_encoded(self, pendulum_split):
        with pytest.raises(ValueError):
            apply_scaling(pendulum_split.train, pendulum_split.train.scaling)

    def test_crop_to_last_timesteps(self, pendulum_split):
        cropped = pendulum_split.train.last_timesteps(3)
        np.testing.assert_array_equal(cropped.inputs, pendulum_split.train.inputs[:, -3:])
        assert pendulum_split.train.last_timesteps(100) is pendulum_split.train


class TestPendulum:
    """Test the double-pendulum generator."""

    def test_rest_is_an_equilibrium(self):
        state = np.zeros((1, 4))
        assert not derivatives(state).any()
        np.testing.assert_allclose(positions(integrate(state, 1e-3, 100)), [[0.0, -1.0, 0.0, -2.0]])

    def test_energy_is_conserved(self, rng):
        state = random_initial_states(5, rng)
        before = pendulum_energy(state)
        after = pendulum_energy(integrate(state, 1e-3, 1000))
        np.testing.assert_allclose(after, before, rtol=1e-6, atol=1e-6)

    def test_targets_are_next_inputs(self, pendulum_raw):
        assert pendulum_raw.inputs.shape == (16, 8, 4)
        np.testing.assert_array_equal(pendulum_raw.inputs[:, 1:], pendulum_raw.targets[:, :-1])

    def test_rods_have_unit_length(self, pendulum_raw):
        coords = pendulum_raw.inputs.reshape(-1, 4)
        np.testing.assert_allclose(np.hypot(coords[:, 0], coords[:, 1]), 1.0)
        np.testing.assert_allclose(np.hypot(coords[:, 2] - coords[:, 0], coords[:, 3] - coords[:, 1]), 1.0)

    def test_seed_determines_data(self):
        a, b = gen_double_pendulum(3, 4, seed=7), gen_double_pendulum(3, 4, seed=7)
        np.testing.assert_array_equal(a.inputs, b.inputs)
        assert not np.array_equal(a.inputs, gen_double_pendulum(3, 4, seed=8).inputs)

    @pytest.mark.parametrize("n_series, n_steps", [(0, 4), (3, 1)])
    def test_invalid_sizes(self, n_series, n_steps):
        with pytest.raises(ValueError):
            gen_double_pendulum(n_series, n_steps)


class TestSnapshot:
    """Test the parquet dataset cache."""

    def test_cache_is_reused(self, tmp_path, pendulum_raw):
        path = tmp_path / "pendulum.csv"
        save_csv(pendulum_raw, path)
        cache = tmp_path / "cache"
        first = load_dataset(path, cache_dir=cache)
        snapshots = list(cache.glob("*.parquet"))
        assert len(snapshots) == 1
        second = load_dataset(path, cache_dir=cache)
        np.testing.assert_array_equal(first.inputs, second.inputs)
        assert second.series_ids == first.series_ids
        assert list(cache.glob("*.parquet")) == snapshots

    def test_classification_snapshot(self, tmp_path):
        dataset = load_csv(write(tmp_path, CLASSIFICATION_CSV))
        save_snapshot(dataset, tmp_path / "snap.parquet")
        loaded = load_snapshot(tmp_path / "snap.parquet")
        np.testing.assert_array_equal(loaded.labels(), [0, 1])
        assert loaded.n_classes == 2

    def test_snapshot_without_version(self, tmp_path):
        path = tmp_path / "plain.parquet"
        pq.write_table(pa.Table.from_pandas(pd.DataFrame({"a": [1.0]})), path)
        with pytest.raises(ArtifactFormatError):
            load_snapshot(path)
