"""Evaluation metrics for imbalanced multi-class problems.

The headline metric is the macro-averaged geometric mean of per-class
recalls (MAvG): one failed class drives it to zero, so it cannot be
gamed by ignoring minorities the way plain accuracy can.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ContractError

__all__ = [
    "ConfusionMatrix",
    "confusion_matrix",
    "recall_per_class",
    "mavg",
    "accuracy",
    "test_error",
    "metrics_report",
]


@dataclass(frozen=True, eq=False)
class ConfusionMatrix:
    """counts[i, j] = samples of true class i+1 predicted as class j+1."""

    counts: np.ndarray
    K: int

    def __post_init__(self):
        if self.K < 2:
            raise ContractError("K must be >= 2")
        if self.counts.shape != (self.K, self.K):
            raise ContractError("confusion counts must be K x K")
        if (self.counts < 0).any():
            raise ContractError("confusion counts must be nonnegative")

    @property
    def total(self) -> int:
        return int(self.counts.sum())


def _check_pair(labels, preds, K: int) -> tuple[np.ndarray, np.ndarray]:
    t = np.asarray(labels, dtype=np.int64)
    p = np.asarray(preds, dtype=np.int64)
    if t.ndim != 1 or p.shape != t.shape:
        raise ContractError("labels and preds must be 1-D and equal length")
    if K < 2:
        raise ContractError("K must be >= 2")
    if t.size:
        for name, arr in (("labels", t), ("preds", p)):
            if arr.min() < 1 or arr.max() > K:
                raise ContractError(f"{name} values must lie in 1..{K}")
    return t, p


def confusion_matrix(labels, preds, K: int) -> ConfusionMatrix:
    """Count (true, predicted) pairs; empty input gives the zero matrix."""
    t, p = _check_pair(labels, preds, K)
    flat = np.bincount((t - 1) * K + (p - 1), minlength=K * K)
    return ConfusionMatrix(flat.reshape(K, K).astype(np.int64), K)


def recall_per_class(cm: ConfusionMatrix) -> np.ndarray:
    """Diagonal over row sums; a class with no true samples gets NaN.

    NaN is a deliberate undefined marker, not zero: silently scoring an
    absent class would corrupt downstream MAvG comparisons.
    """
    row = cm.counts.sum(axis=1).astype(np.float64)
    diag = np.diag(cm.counts).astype(np.float64)
    out = np.full(cm.K, np.nan)
    present = row > 0
    out[present] = diag[present] / row[present]
    return out


def mavg(recalls) -> float:
    """Geometric mean of per-class recalls.

    Computed in log space; any zero recall gives exactly 0.0 (no
    smoothing). NaN entries mean a class never appeared and make the
    statistic undefined.
    """
    r = np.asarray(recalls, dtype=np.float64)
    if r.ndim != 1 or r.size == 0:
        raise ContractError("recalls must be a non-empty vector")
    if np.isnan(r).any():
        raise ContractError(
            "recalls contain an undefined entry (class absent from labels)")
    if (r < 0).any() or (r > 1).any():
        raise ContractError("recalls must lie in [0, 1]")
    if (r == 0).any():
        return 0.0
    return float(np.exp(np.mean(np.log(r))))


def accuracy(cm: ConfusionMatrix) -> float:
    if cm.total == 0:
        raise ContractError("accuracy undefined on an empty confusion matrix")
    return float(np.trace(cm.counts) / cm.total)


def test_error(cm: ConfusionMatrix) -> float:
    return 1.0 - accuracy(cm)


def metrics_report(labels, preds, K: int) -> dict:
    """Accuracy, error rate, per-class recalls, and MAvG in one pass."""
    cm = confusion_matrix(labels, preds, K)
    recalls = recall_per_class(cm)
    return {
        "accuracy": accuracy(cm),
        "test_error": test_error(cm),
        "recalls": [float(r) for r in recalls],
        "mavg": mavg(recalls),
    }
