"""Synthetic generation, CSV ingestion, and split/fold behavior."""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from csboost import (
    ConfigError,
    ContractError,
    DataLoadError,
    Dataset,
    InfeasibleError,
    SynthConfig,
    generate_synthetic,
    load_csv,
    save_csv,
    stratified_kfold,
    subset,
    train_test_split,
)
from csboost.data import _class_counts_from_weights, _cluster_centers


def small_config(**overrides):
    base = dict(n_samples=60, n_features=4, n_informative=3, n_classes=3,
                clusters_per_class=2, class_sep=1.0,
                weights=(0.6, 0.3, 0.1), seed=5)
    base.update(overrides)
    return SynthConfig(**base)


class TestDataset:
    def test_rejects_label_out_of_range(self):
        with pytest.raises(ContractError):
            Dataset.from_arrays(np.zeros((2, 1)), np.array([1, 3]), K=2)

    def test_rejects_shape_mismatch(self):
        with pytest.raises(ContractError):
            Dataset.from_arrays(np.zeros((3, 1)), np.array([1, 2]))

    def test_arrays_read_only(self):
        ds = Dataset.from_arrays(np.zeros((2, 1)), np.array([1, 2]))
        with pytest.raises(ValueError):
            ds.features[0, 0] = 1.0
        with pytest.raises(ValueError):
            ds.labels[0] = 2

    def test_class_counts(self):
        ds = Dataset.from_arrays(np.zeros((4, 1)), np.array([1, 1, 2, 3]))
        assert ds.K == 3
        assert tuple(ds.class_counts) == (2, 1, 1)


class TestSynthConfig:
    def test_weights_must_sum_to_one(self):
        with pytest.raises(ConfigError, match="weights"):
            small_config(weights=(0.6, 0.3, 0.2))

    def test_weight_count_must_match_classes(self):
        with pytest.raises(ConfigError):
            small_config(weights=(0.5, 0.5))

    def test_too_many_clusters_for_hypercube(self):
        # 3 classes * 4 clusters = 12 centers > 2^3 vertices
        with pytest.raises(ConfigError):
            small_config(n_informative=3, clusters_per_class=4)

    def test_informative_cannot_exceed_features(self):
        with pytest.raises(ConfigError):
            small_config(n_features=2, n_informative=3)

    def test_json_round_trip(self):
        cfg = small_config()
        again = SynthConfig.from_dict(cfg.to_dict())
        assert again == cfg


class TestCountsRule:
    def test_full_scale_counts(self):
        got = _class_counts_from_weights(np.array([0.90, 0.09, 0.01]), 100000)
        assert tuple(got) == (90000, 9000, 1000)

    def test_symmetric(self):
        got = _class_counts_from_weights(np.array([0.5, 0.5]), 10)
        assert tuple(got) == (5, 5)

    def test_remainder_goes_to_class_one(self):
        # thirds of 7: each rounds to 2, leftover sample lands on class 1
        got = _class_counts_from_weights(np.array([1, 1, 1]) / 3.0, 7)
        assert tuple(got) == (3, 2, 2)

    def test_overshoot_rejected(self):
        # minority rounds claim 11 of 10 samples, majority would go negative
        with pytest.raises(ConfigError):
            _class_counts_from_weights(np.array([0.04, 0.25, 0.35, 0.36]), 10)

    @given(st.integers(2, 6), st.integers(20, 400), st.integers(0, 2**32 - 1))
    @settings(max_examples=60, deadline=None)
    def test_counts_rule_for_random_weights(self, k, n, seed):
        rng = np.random.default_rng(seed)
        raw = rng.uniform(0.1, 1.0, size=k)
        w = raw / raw.sum()
        counts = _class_counts_from_weights(w, n)
        assert counts.sum() == n
        for j in range(1, k):
            assert counts[j] == int(np.floor(w[j] * n + 0.5))


class TestGenerate:
    def test_counts_and_shapes(self):
        ds = generate_synthetic(small_config())
        assert ds.n_samples == 60
        assert ds.n_features == 4
        assert tuple(ds.class_counts) == (36, 18, 6)

    def test_deterministic_bitwise(self):
        a = generate_synthetic(small_config())
        b = generate_synthetic(small_config())
        assert np.array_equal(a.features, b.features)
        assert np.array_equal(a.labels, b.labels)

    def test_seed_changes_data(self):
        a = generate_synthetic(small_config())
        b = generate_synthetic(small_config(seed=6))
        assert not np.array_equal(a.features, b.features)

    def test_noise_dims_are_standard_normal_scale(self):
        cfg = small_config(n_samples=4000, n_features=6, n_informative=2,
                           clusters_per_class=1, class_sep=8.0,
                           weights=(0.5, 0.3, 0.2))
        ds = generate_synthetic(cfg)
        noise = ds.features[:, 2:]
        assert abs(noise.mean()) < 0.1
        assert abs(noise.std() - 1.0) < 0.1
        # informative dims carry the +/- class_sep offsets
        assert ds.features[:, :2].std() > 4.0

    def test_centers_distinct_vertices(self):
        cfg = small_config(n_informative=3, clusters_per_class=2)
        rng = np.random.default_rng(0)
        centers = _cluster_centers(cfg, rng)
        assert centers.shape == (6, 3)
        assert np.all(np.abs(centers) == cfg.class_sep)
        assert len({tuple(row) for row in centers}) == 6

    def test_centers_distinct_beyond_permutation_limit(self):
        # 22 informative axes: vertex codes are rejection-sampled, not enumerated
        cfg = SynthConfig(n_samples=50, n_features=22, n_informative=22,
                          n_classes=5, clusters_per_class=1, class_sep=2.0,
                          weights=(0.2, 0.2, 0.2, 0.2, 0.2), seed=1)
        centers = _cluster_centers(cfg, np.random.default_rng(3))
        assert centers.shape == (5, 22)
        assert len({tuple(row) for row in centers}) == 5


class TestCsvRoundTrip:
    def test_save_load_bitwise(self, tmp_path):
        ds = generate_synthetic(small_config())
        path = tmp_path / "d.csv"
        save_csv(ds, path)
        back = load_csv(path)
        assert np.array_equal(back.features, ds.features)
        assert np.array_equal(back.labels, ds.labels)
        assert back.K == ds.K

    def test_integer_labels_pass_through(self, tmp_path):
        path = tmp_path / "d.csv"
        path.write_text("f0,label\n0.5,1\n0.25,1\n1.5,2\n2.5,3\n")
        ds = load_csv(path)
        assert ds.K == 3
        assert tuple(ds.class_counts) == (2, 1, 1)
        assert ds.label_names is None

    def test_token_labels_first_appearance_order(self, tmp_path):
        path = tmp_path / "d.csv"
        path.write_text("f0,label\n0.0,b\n1.0,a\n2.0,b\n")
        ds = load_csv(path)
        assert list(ds.labels) == [1, 2, 1]
        assert ds.label_names == ("b", "a")

    def test_token_labels_survive_round_trip(self, tmp_path):
        path = tmp_path / "d.csv"
        path.write_text("f0,label\n0.0,cat\n1.0,dog\n")
        ds = load_csv(path)
        out = tmp_path / "out.csv"
        save_csv(ds, out)
        assert "cat" in out.read_text()
        again = load_csv(out)
        assert list(again.labels) == list(ds.labels)

    def test_missing_file(self, tmp_path):
        with pytest.raises(DataLoadError):
            load_csv(tmp_path / "nope.csv")

    def test_blank_cell_names_row_and_column(self, tmp_path):
        path = tmp_path / "d.csv"
        path.write_text("f0,f1,label\n0.0,1.0,1\n0.5,,2\n")
        # file row 3 counting the header line
        with pytest.raises(DataLoadError, match=r"row 3.*'f1'"):
            load_csv(path)

    def test_non_numeric_cell(self, tmp_path):
        path = tmp_path / "d.csv"
        path.write_text("f0,label\nabc,1\n")
        with pytest.raises(DataLoadError, match="f0"):
            load_csv(path)

    def test_empty_file(self, tmp_path):
        path = tmp_path / "d.csv"
        path.write_text("")
        with pytest.raises(DataLoadError):
            load_csv(path)

    def test_missing_label_column(self, tmp_path):
        path = tmp_path / "d.csv"
        path.write_text("f0,target\n1.0,1\n")
        with pytest.raises(DataLoadError, match="label"):
            load_csv(path)

    def test_noncontiguous_int_labels_treated_as_tokens(self, tmp_path):
        path = tmp_path / "d.csv"
        path.write_text("f0,label\n0.0,2\n1.0,5\n")
        ds = load_csv(path)
        assert list(ds.labels) == [1, 2]
        assert ds.label_names == ("2", "5")


class TestSplit:
    def test_full_scale_split_counts(self):
        cfg = SynthConfig(n_samples=100000, n_features=50, n_informative=50,
                          n_classes=3, clusters_per_class=1, class_sep=1.0,
                          weights=(0.90, 0.09, 0.01), seed=0)
        ds = generate_synthetic(cfg)
        assert tuple(ds.class_counts) == (90000, 9000, 1000)
        tr, te = train_test_split(ds, 0.75, seed=1)
        assert tuple(tr.class_counts) == (67500, 6750, 750)
        assert tuple(te.class_counts) == (22500, 2250, 250)

    def test_minimal_stratification(self):
        ds = Dataset.from_arrays(np.arange(4, dtype=float).reshape(4, 1),
                                 np.array([1, 1, 2, 2]))
        tr, te = train_test_split(ds, 0.5, seed=0)
        assert tuple(tr.class_counts) == (1, 1)
        assert tuple(te.class_counts) == (1, 1)

    def test_partition_is_exact(self):
        ds = generate_synthetic(small_config(n_samples=97, weights=(0.5, 0.3, 0.2)))
        tr, te = train_test_split(ds, 0.6, seed=3)
        merged = np.sort(np.concatenate([tr.features[:, 0], te.features[:, 0]]))
        assert np.array_equal(merged, np.sort(ds.features[:, 0]))
        assert tr.n_samples + te.n_samples == 97

    def test_tiny_class_fraction_keeps_one(self):
        ds = Dataset.from_arrays(np.zeros((12, 1)),
                                 np.array([1] * 10 + [2, 2]))
        tr, te = train_test_split(ds, 0.1, seed=0)
        # floor(0.1*10)=1 and floor(0.1*2)=0 but every class keeps >= 1
        assert tuple(tr.class_counts) == (1, 1)

    def test_singleton_class_rejected(self):
        ds = Dataset.from_arrays(np.zeros((3, 1)), np.array([1, 1, 2]))
        with pytest.raises(InfeasibleError):
            train_test_split(ds, 0.5, seed=0)

    def test_deterministic(self):
        ds = generate_synthetic(small_config())
        a1, b1 = train_test_split(ds, 0.75, seed=9)
        a2, b2 = train_test_split(ds, 0.75, seed=9)
        assert np.array_equal(a1.features, a2.features)
        assert np.array_equal(b1.labels, b2.labels)


class TestKFold:
    def _ds(self, counts):
        labels = np.concatenate([np.full(c, k + 1) for k, c in enumerate(counts)])
        return Dataset.from_arrays(np.arange(len(labels), dtype=float)[:, None], labels)

    def test_exact_division(self):
        fa = stratified_kfold(self._ds((10, 5)), 5, seed=0)
        ds = self._ds((10, 5))
        for f in range(5):
            _, held = fa.fold_indices(f)
            held_labels = ds.labels[held]
            assert (held_labels == 1).sum() == 2
            assert (held_labels == 2).sum() == 1

    def test_remainder_rule(self):
        ds = self._ds((11, 5))
        fa = stratified_kfold(ds, 5, seed=0)
        sizes = sorted(
            int((ds.labels[fa.fold_indices(f)[1]] == 1).sum()) for f in range(5)
        )
        assert sizes == [2, 2, 2, 2, 3]

    def test_class_smaller_than_k_rejected(self):
        with pytest.raises(InfeasibleError, match="class 2"):
            stratified_kfold(self._ds((10, 4)), 5, seed=0)

    def test_folds_partition_everything(self):
        ds = generate_synthetic(small_config(n_samples=83, weights=(0.5, 0.3, 0.2)))
        fa = stratified_kfold(ds, 4, seed=2)
        held_all = np.sort(np.concatenate([fa.fold_indices(f)[1] for f in range(4)]))
        assert np.array_equal(held_all, np.arange(83))
        tr0, held0 = fa.fold_indices(0)
        assert np.array_equal(np.sort(np.concatenate([tr0, held0])), np.arange(83))


class TestSubset:
    def test_preserves_k_and_rows(self):
        ds = generate_synthetic(small_config())
        sub = subset(ds, np.array([0, 5, 9]))
        assert sub.K == ds.K
        assert sub.n_samples == 3
        assert np.array_equal(sub.features, ds.features[[0, 5, 9]])
