"""Dataset container, synthetic imbalanced data generation, CSV I/O, and splits.

Labels are 1-based integers in {1..K} throughout. All randomized operations
are pure functions of their inputs and an explicit seed.
"""

from __future__ import annotations

import csv
import json
import os
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, ContractError, DataLoadError, InfeasibleError

__all__ = [
    "Dataset",
    "SynthConfig",
    "FoldAssignment",
    "generate_synthetic",
    "load_csv",
    "save_csv",
    "train_test_split",
    "stratified_kfold",
    "subset",
]


@dataclass(frozen=True, eq=False)
class Dataset:
    """Feature matrix plus 1-based integer class labels.

    features: (N, d) float64; labels: (N,) int64 with values in {1..K};
    class_counts: (K,) int64 summing to N. Arrays are read-only after
    construction, so instances are safe to share across threads.
    label_names maps class k to its original token when labels were
    remapped during loading (index k-1).
    """

    features: np.ndarray
    labels: np.ndarray
    K: int
    class_counts: np.ndarray
    label_names: tuple[str, ...] | None = None

    def __post_init__(self):
        f, y, counts = self.features, self.labels, self.class_counts
        if f.ndim != 2 or f.shape[0] < 1 or f.shape[1] < 1:
            raise ContractError("features must be a non-empty 2-D matrix")
        if self.K < 2:
            raise ContractError("K must be >= 2")
        if y.shape != (f.shape[0],):
            raise ContractError("labels length must match feature rows")
        if y.min() < 1 or y.max() > self.K:
            raise ContractError(f"labels must lie in 1..{self.K}")
        expected = np.bincount(y, minlength=self.K + 1)[1:]
        if counts.shape != (self.K,) or not np.array_equal(counts, expected):
            raise ContractError("class_counts does not match labels")

    @classmethod
    def from_arrays(cls, features, labels, K: int | None = None,
                    label_names=None) -> "Dataset":
        f = np.ascontiguousarray(features, dtype=np.float64)
        y = np.ascontiguousarray(labels, dtype=np.int64)
        if K is None:
            K = int(y.max()) if y.size else 0
        counts = np.bincount(y, minlength=K + 1)[1:] if y.size else np.zeros(K, np.int64)
        f.setflags(write=False)
        y.setflags(write=False)
        counts.setflags(write=False)
        names = tuple(label_names) if label_names is not None else None
        return cls(f, y, int(K), counts.astype(np.int64), names)

    @property
    def n_samples(self) -> int:
        return self.features.shape[0]

    @property
    def n_features(self) -> int:
        return self.features.shape[1]


@dataclass(frozen=True)
class SynthConfig:
    """Parameters of the synthetic imbalanced-cluster generator."""

    n_samples: int
    n_features: int
    n_informative: int
    n_classes: int
    clusters_per_class: int
    class_sep: float
    weights: tuple[float, ...]
    seed: int

    def __post_init__(self):
        if self.n_samples < 1:
            raise ConfigError("n_samples must be positive")
        if self.n_features < 1:
            raise ConfigError("n_features must be positive")
        if not (1 <= self.n_informative <= self.n_features):
            raise ConfigError("n_informative must be in 1..n_features")
        if self.n_classes < 2:
            raise ConfigError("n_classes must be >= 2")
        if self.clusters_per_class < 1:
            raise ConfigError("clusters_per_class must be positive")
        if not self.class_sep > 0:
            raise ConfigError("class_sep must be positive")
        w = np.asarray(self.weights, dtype=np.float64)
        if w.shape != (self.n_classes,):
            raise ConfigError("weights must have one entry per class")
        if (w <= 0).any():
            raise ConfigError("weights entries must be positive")
        if abs(float(w.sum()) - 1.0) > 1e-9:
            raise ConfigError("weights must sum to 1 within 1e-9")
        n_clusters = self.clusters_per_class * self.n_classes
        if self.n_informative < 63 and n_clusters > 2 ** self.n_informative:
            raise ConfigError(
                "clusters_per_class * n_classes exceeds the "
                "2^n_informative available hypercube vertices")

    @classmethod
    def from_dict(cls, doc: dict) -> "SynthConfig":
        allowed = {"n_samples", "n_features", "n_informative", "n_classes",
                   "clusters_per_class", "class_sep", "weights", "seed"}
        unknown = set(doc) - allowed
        if unknown:
            raise ConfigError(f"unknown SynthConfig fields: {sorted(unknown)}")
        missing = allowed - set(doc)
        if missing:
            raise ConfigError(f"missing SynthConfig fields: {sorted(missing)}")
        return cls(
            n_samples=int(doc["n_samples"]),
            n_features=int(doc["n_features"]),
            n_informative=int(doc["n_informative"]),
            n_classes=int(doc["n_classes"]),
            clusters_per_class=int(doc["clusters_per_class"]),
            class_sep=float(doc["class_sep"]),
            weights=tuple(float(w) for w in doc["weights"]),
            seed=int(doc["seed"]),
        )

    @classmethod
    def from_json(cls, text: str) -> "SynthConfig":
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid SynthConfig JSON: {exc}") from exc
        if not isinstance(doc, dict):
            raise ConfigError("SynthConfig JSON must be an object")
        return cls.from_dict(doc)

    def to_dict(self) -> dict:
        return {
            "n_samples": self.n_samples,
            "n_features": self.n_features,
            "n_informative": self.n_informative,
            "n_classes": self.n_classes,
            "clusters_per_class": self.clusters_per_class,
            "class_sep": self.class_sep,
            "weights": list(self.weights),
            "seed": self.seed,
        }


@dataclass(frozen=True, eq=False)
class FoldAssignment:
    """Stratified fold index per sample; folds numbered 0..k_folds-1."""

    fold_of_sample: np.ndarray
    k_folds: int

    def fold_indices(self, fold: int) -> tuple[np.ndarray, np.ndarray]:
        """Return (train_indices, heldout_indices) for one fold."""
        if not (0 <= fold < self.k_folds):
            raise ContractError(f"fold must be in 0..{self.k_folds - 1}")
        held = np.flatnonzero(self.fold_of_sample == fold)
        train = np.flatnonzero(self.fold_of_sample != fold)
        return train, held


def _class_counts_from_weights(weights: np.ndarray, n_samples: int) -> np.ndarray:
    # Conventional rounding per class; the rounding remainder goes to class 1
    # so minority counts stay exact.
    counts = np.floor(weights * n_samples + 0.5).astype(np.int64)
    counts[0] += n_samples - counts.sum()
    if counts[0] < 0:
        raise ConfigError(
            "weights round to more samples than n_samples provides; "
            "class 1 cannot absorb the remainder")
    return counts


def _cluster_centers(cfg: SynthConfig, rng: np.random.Generator) -> np.ndarray:
    """Pick one distinct hypercube vertex per cluster, scaled by class_sep.

    Vertices live in {-class_sep, +class_sep}^n_informative. For small vertex
    spaces the choice is a seeded shuffle; for large ones, seeded rejection
    sampling of distinct vertex codes.
    """
    m = cfg.n_informative
    n_clusters = cfg.clusters_per_class * cfg.n_classes
    if m <= 20:
        codes = rng.permutation(2 ** m)[:n_clusters].astype(np.uint64)
    else:
        chosen: list[int] = []
        seen: set[int] = set()
        while len(chosen) < n_clusters:
            c = int(rng.integers(0, 2 ** min(m, 63), dtype=np.uint64))
            if c not in seen:
                seen.add(c)
                chosen.append(c)
        codes = np.array(chosen, dtype=np.uint64)
    bits = (codes[:, None] >> np.arange(m, dtype=np.uint64)[None, :]) & 1
    return np.where(bits == 1, cfg.class_sep, -cfg.class_sep).astype(np.float64)


def generate_synthetic(cfg: SynthConfig) -> Dataset:
    """Generate a deterministic imbalanced multi-cluster dataset.

    Class k gets round(weights[k] * n_samples) samples (rounding remainder
    to class 1), spread round-robin over its clusters. Each cluster center
    is a distinct vertex of the scaled hypercube over the informative
    coordinates; samples add unit normal noise on every coordinate, and
    the non-informative coordinates are pure noise.
    """
    rng = np.random.default_rng(cfg.seed)
    w = np.asarray(cfg.weights, dtype=np.float64)
    counts = _class_counts_from_weights(w, cfg.n_samples)
    centers = _cluster_centers(cfg, rng)

    labels = np.repeat(np.arange(1, cfg.n_classes + 1), counts)
    cluster_of_sample = np.concatenate([
        (k * cfg.clusters_per_class) + (np.arange(counts[k]) % cfg.clusters_per_class)
        for k in range(cfg.n_classes)
    ])

    X = rng.standard_normal((cfg.n_samples, cfg.n_features))
    X[:, :cfg.n_informative] += centers[cluster_of_sample]

    perm = rng.permutation(cfg.n_samples)
    return Dataset.from_arrays(X[perm], labels[perm], K=cfg.n_classes)


def subset(ds: Dataset, indices: np.ndarray) -> Dataset:
    """Dataset restricted to the given sample indices; K is preserved."""
    idx = np.asarray(indices, dtype=np.int64)
    return Dataset.from_arrays(ds.features[idx], ds.labels[idx], K=ds.K,
                               label_names=ds.label_names)


def train_test_split(ds: Dataset, train_fraction: float,
                     seed: int) -> tuple[Dataset, Dataset]:
    """Stratified split: per class, floor(train_fraction * n_k) samples
    (at least 1) go to train, the rest to test."""
    if not (0.0 < train_fraction < 1.0):
        raise ContractError("train_fraction must lie in (0, 1)")
    rng = np.random.default_rng(seed)
    train_idx: list[np.ndarray] = []
    test_idx: list[np.ndarray] = []
    for k in range(1, ds.K + 1):
        members = np.flatnonzero(ds.labels == k)
        if members.size < 2:
            raise InfeasibleError(
                f"class {k} has {members.size} sample(s); "
                "need at least 2 to split")
        shuffled = rng.permutation(members)
        n_train = max(1, int(np.floor(train_fraction * members.size)))
        train_idx.append(np.sort(shuffled[:n_train]))
        test_idx.append(np.sort(shuffled[n_train:]))
    return (subset(ds, np.sort(np.concatenate(train_idx))),
            subset(ds, np.sort(np.concatenate(test_idx))))


def stratified_kfold(ds: Dataset, k_folds: int, seed: int) -> FoldAssignment:
    """Assign each sample a fold so per-class fold sizes differ by <= 1."""
    if k_folds < 1:
        raise ContractError("k_folds must be positive")
    rng = np.random.default_rng(seed)
    fold_of_sample = np.empty(ds.n_samples, dtype=np.int64)
    for k in range(1, ds.K + 1):
        members = np.flatnonzero(ds.labels == k)
        if members.size < k_folds:
            raise InfeasibleError(
                f"class {k} has {members.size} sample(s), fewer than "
                f"{k_folds} folds")
        shuffled = rng.permutation(members)
        fold_of_sample[shuffled] = np.arange(members.size) % k_folds
    return FoldAssignment(fold_of_sample, k_folds)


# CSV layout: header f0,...,f{d-1},label; one sample per row; UTF-8.

def save_csv(ds: Dataset, path: str | os.PathLike) -> None:
    """Write a dataset in the canonical CSV layout, full float precision."""
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow([f"f{j}" for j in range(ds.n_features)] + ["label"])
        names = ds.label_names
        for row, y in zip(ds.features, ds.labels):
            tail = names[y - 1] if names is not None else int(y)
            writer.writerow([repr(float(v)) for v in row] + [tail])


def _map_labels(tokens: list[str]) -> tuple[np.ndarray, tuple[str, ...] | None]:
    # Integer labels already forming 1..K pass through; anything else is
    # treated as category tokens mapped in first-appearance order.
    try:
        ints = np.array([int(t) for t in tokens], dtype=np.int64)
    except ValueError:
        ints = None
    if ints is not None:
        distinct = np.unique(ints)
        if distinct[0] == 1 and np.array_equal(distinct, np.arange(1, distinct.size + 1)):
            return ints, None
    order: dict[str, int] = {}
    for t in tokens:
        if t not in order:
            order[t] = len(order) + 1
    labels = np.array([order[t] for t in tokens], dtype=np.int64)
    return labels, tuple(order)


def load_csv(path: str | os.PathLike, label_column: str = "label") -> Dataset:
    """Load a dataset CSV; K is inferred from the distinct labels.

    Non-1..K label values are remapped in first-appearance order and the
    mapping is reported through Dataset.label_names.
    """
    if not os.path.exists(path):
        raise DataLoadError(f"no such file: {path}")
    with open(path, "r", newline="", encoding="utf-8") as handle:
        reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration:
            raise DataLoadError(f"empty file: {path}") from None
        if label_column not in header:
            raise DataLoadError(
                f"label column {label_column!r} not found in {path}")
        label_pos = header.index(label_column)
        feature_cols = [(i, name) for i, name in enumerate(header)
                        if i != label_pos]
        rows: list[list[str]] = []
        tokens: list[str] = []
        for lineno, row in enumerate(reader, start=2):
            if len(row) != len(header):
                raise DataLoadError(
                    f"{path}: row {lineno} has {len(row)} cells, "
                    f"expected {len(header)}")
            tokens.append(row[label_pos])
            rows.append([row[i] for i, _ in feature_cols])
    if not rows:
        raise DataLoadError(f"no data rows in {path}")
    try:
        features = np.array(rows, dtype=np.float64)
    except ValueError:
        for r, row in enumerate(rows, start=2):
            for (_, name), cell in zip(feature_cols, row):
                try:
                    float(cell)
                except ValueError:
                    raise DataLoadError(
                        f"{path}: row {r}, column {name!r}: "
                        f"non-numeric value {cell!r}") from None
        raise DataLoadError(f"{path}: non-numeric feature data") from None
    labels, names = _map_labels(tokens)
    return Dataset.from_arrays(features, labels, label_names=names)
