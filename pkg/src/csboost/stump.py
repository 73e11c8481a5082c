"""Weighted decision stumps: the weak learner behind every ensemble here.

A stump tests one feature against one threshold (x[j] <= t goes left) and
emits a class per side. Fitting minimizes weighted 0-1 error over every
feature and every midpoint between consecutive distinct sorted values,
plus a threshold below the feature minimum (so a stump can vote one class
for everything). Ties are broken deterministically: lowest error, then
lowest feature index, then lowest threshold; per-side class ties resolve
to the lowest class index.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from .data import Dataset
from .errors import ContractError

__all__ = ["StumpModel", "StumpSearcher", "fit_stump", "predict_stump"]

# Candidate errors that differ by less than this are treated as tied, so
# the documented tie-break order wins instead of ~1e-16 cancellation noise
# from the running sums. Genuine error gaps in weighted data are far above
# this; accumulated roundoff stays below it for sample counts into the
# millions.
TIE_TOL = 1e-9


@dataclass(frozen=True)
class StumpModel:
    feature_index: int
    threshold: float
    left_class: int
    right_class: int

    def to_dict(self) -> dict:
        return {
            "feature_index": self.feature_index,
            "threshold": self.threshold,
            "left_class": self.left_class,
            "right_class": self.right_class,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "StumpModel":
        return cls(int(doc["feature_index"]), float(doc["threshold"]),
                   int(doc["left_class"]), int(doc["right_class"]))


@njit(cache=True)
def _best_split(sorted_vals, sorted_labels, orders, w, K, tol):
    """Scan all (feature, cut) candidates; return the weighted-error argmin.

    sorted_vals[j] is feature j sorted ascending, sorted_labels[j] the
    0-based labels in that order, orders[j] the argsort permutation.
    Returns (feature, cut_position, left_class, right_class, error) with
    0-based classes; cut_position -1 means the below-minimum threshold.

    Candidates are visited in tie-break order (feature ascending, then
    threshold ascending starting with below-minimum) and replaced only on
    improvement beyond tol, so ties keep the first candidate. Per-side
    class votes likewise switch only on a beyond-tol win, keeping the
    lowest class on ties.
    """
    d, n = sorted_vals.shape
    tot = np.zeros(K)
    for i in range(n):
        tot[sorted_labels[0, i]] += w[orders[0, i]]
    total = 0.0
    tmax = 0.0
    for k in range(K):
        total += tot[k]
        if tot[k] > tmax + tol:
            tmax = tot[k]
    best_err = np.inf
    best_j = -1
    best_i = -2
    best_l = 0
    best_r = 0
    left = np.zeros(K)
    right = np.zeros(K)
    for j in range(d):
        err0 = total - tmax
        if err0 < best_err - tol:
            rc = 0
            rbest = tot[0]
            for k in range(1, K):
                if tot[k] > rbest + tol:
                    rbest = tot[k]
                    rc = k
            best_err = err0
            best_j = j
            best_i = -1
            best_l = 0
            best_r = rc
        for k in range(K):
            left[k] = 0.0
            right[k] = tot[k]
        lsum = 0.0
        for i in range(n - 1):
            y = sorted_labels[j, i]
            wi = w[orders[j, i]]
            left[y] += wi
            right[y] -= wi
            lsum += wi
            if sorted_vals[j, i] != sorted_vals[j, i + 1]:
                lmax = left[0]
                lc = 0
                rmax = right[0]
                rc = 0
                for k in range(1, K):
                    if left[k] > lmax + tol:
                        lmax = left[k]
                        lc = k
                    if right[k] > rmax + tol:
                        rmax = right[k]
                        rc = k
                err = (lsum - lmax) + ((total - lsum) - rmax)
                if err < best_err - tol:
                    best_err = err
                    best_j = j
                    best_i = i
                    best_l = lc
                    best_r = rc
    return best_j, best_i, best_l, best_r, best_err


class StumpSearcher:
    """Reusable stump fitter for one dataset.

    Sorting each feature once up front turns every subsequent weighted fit
    into a linear scan, which is what makes boosting thousands of rounds
    affordable.
    """

    def __init__(self, ds: Dataset):
        X = ds.features
        self._orders = np.ascontiguousarray(
            np.argsort(X, axis=0, kind="stable").T, dtype=np.int64)
        self._sorted_vals = np.take_along_axis(
            np.ascontiguousarray(X.T), self._orders, axis=1)
        self._sorted_labels = np.ascontiguousarray(
            (ds.labels - 1)[self._orders], dtype=np.int64)
        self._n = ds.n_samples
        self._K = ds.K

    def fit(self, weights: np.ndarray) -> tuple[StumpModel, float]:
        """Return (stump, weighted_error) for the given sample weights."""
        w = np.ascontiguousarray(weights, dtype=np.float64)
        if w.shape != (self._n,):
            raise ContractError(
                f"weights must have shape ({self._n},), got {w.shape}")
        if (w <= 0).any():
            raise ContractError("weights must be strictly positive")
        if abs(float(w.sum()) - 1.0) > 1e-9:
            raise ContractError("weights must sum to 1 within 1e-9")
        j, i, lc, rc, err = _best_split(
            self._sorted_vals, self._sorted_labels, self._orders, w,
            self._K, TIE_TOL)
        if i == -1:
            threshold = float(self._sorted_vals[j, 0]) - 1.0
        else:
            threshold = (float(self._sorted_vals[j, i])
                         + float(self._sorted_vals[j, i + 1])) / 2.0
        return StumpModel(int(j), threshold, lc + 1, rc + 1), max(float(err), 0.0)


def fit_stump(ds: Dataset, weights: np.ndarray) -> tuple[StumpModel, float]:
    """One-shot stump fit; use StumpSearcher when fitting repeatedly."""
    return StumpSearcher(ds).fit(weights)


def predict_stump(model: StumpModel, features: np.ndarray) -> np.ndarray:
    """Predict 1-based labels for an (N, d) feature matrix."""
    X = np.asarray(features, dtype=np.float64)
    if X.ndim != 2:
        raise ContractError("features must be a 2-D matrix")
    if not (0 <= model.feature_index < X.shape[1]):
        raise ContractError(
            f"stump tests feature {model.feature_index}, but input has "
            f"{X.shape[1]} feature(s)")
    go_left = X[:, model.feature_index] <= model.threshold
    return np.where(go_left, model.left_class, model.right_class).astype(np.int64)
