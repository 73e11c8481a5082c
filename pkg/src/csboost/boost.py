"""Boosting engine: four AdaBoost variants over one shared iteration loop.

The variants differ only in three strategy points:

  * the error rate (plain weighted error, or cost-weighted for AdaC2),
  * the classifier weight alpha as a function of that error,
  * whether per-class costs multiply into the weight update.

Labels are 1-based; sample weights form a normalized distribution that
every round re-tilts toward currently misclassified (and expensive)
samples. A round is kept only when its alpha is positive; at or past the
random-guessing boundary the update would push weights the wrong way, so
training stops instead.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass

import numpy as np

from .data import Dataset
from .errors import (ContractError, DataLoadError, DegenerateWeightsError,
                     InfeasibleError)
from .metrics import confusion_matrix, mavg, recall_per_class
from .stump import StumpModel, StumpSearcher, predict_stump

__all__ = [
    "EPS_MIN",
    "Variant",
    "WeightDistribution",
    "CostVector",
    "EnsembleModel",
    "TraceRow",
    "TrainTrace",
    "BoostHistory",
    "weighted_error",
    "classifier_weight",
    "update_weights",
    "fit",
    "predict",
    "predict_batch",
    "save_model",
    "load_model",
    "write_trace_csv",
]

# Error rates are clamped into [EPS_MIN, 1 - EPS_MIN] before computing
# alpha, so a perfect weak learner yields a large finite vote instead of
# an infinite one.
EPS_MIN = 1e-10

TERMINATED_COMPLETED = "completed_T"
TERMINATED_PERFECT = "perfect_fit"
TERMINATED_DEGENERATE = "degenerate_error"


class Variant(enum.Enum):
    """The four boosting flavours sharing the engine loop."""

    ADABOOST_M1 = "AdaBoostM1"
    ADA_C2 = "AdaC2"
    SAMME = "SAMME"
    SAMME_C2 = "SAMMEC2"

    @classmethod
    def parse(cls, tag: str) -> "Variant":
        for v in cls:
            if v.value == tag:
                return v
        valid = ", ".join(v.value for v in cls)
        raise ContractError(f"unknown variant {tag!r}; expected one of {valid}")

    @property
    def is_cost_sensitive(self) -> bool:
        return self in (Variant.ADA_C2, Variant.SAMME_C2)

    @property
    def binary_only(self) -> bool:
        return self in (Variant.ADABOOST_M1, Variant.ADA_C2)


@dataclass(frozen=True, eq=False)
class WeightDistribution:
    """Per-sample training weights: strictly positive, summing to 1."""

    w: np.ndarray

    def __post_init__(self):
        w = self.w
        if w.ndim != 1 or w.size == 0:
            raise ContractError("weights must be a non-empty vector")
        if (w <= 0).any():
            raise ContractError("weights must be strictly positive")
        if abs(float(w.sum()) - 1.0) > 1e-9:
            raise ContractError("weights must sum to 1 within 1e-9")

    @classmethod
    def uniform(cls, n: int) -> "WeightDistribution":
        if n < 1:
            raise ContractError("need at least one sample")
        return cls(np.full(n, 1.0 / n))

    @property
    def n(self) -> int:
        return self.w.shape[0]


@dataclass(frozen=True, eq=False)
class CostVector:
    """Per-class cost multipliers, each in (0, 1].

    For cost-sensitive variants the engine additionally requires the
    rarest training class to carry the maximal cost (checked at fit time,
    since only the dataset knows the class counts).
    """

    cost: np.ndarray

    def __post_init__(self):
        c = self.cost
        if c.ndim != 1 or c.size < 2:
            raise ContractError("costs must be a vector with K >= 2 entries")
        if (c <= 0).any() or (c > 1).any():
            raise ContractError("cost entries must lie in (0, 1]")

    @classmethod
    def of(cls, values) -> "CostVector":
        arr = np.ascontiguousarray(values, dtype=np.float64)
        arr.setflags(write=False)
        return cls(arr)

    @classmethod
    def ones(cls, K: int) -> "CostVector":
        return cls.of(np.ones(K))

    @property
    def K(self) -> int:
        return self.cost.shape[0]


@dataclass(frozen=True, eq=False)
class EnsembleModel:
    """Ordered (alpha, stump) votes plus the context needed to apply them."""

    variant: Variant
    K: int
    d: int
    costs: CostVector
    rounds: tuple[tuple[float, StumpModel], ...]

    @property
    def n_rounds(self) -> int:
        return len(self.rounds)

    def to_dict(self) -> dict:
        return {
            "variant": self.variant.value,
            "K": self.K,
            "d": self.d,
            "costs": [float(c) for c in self.costs.cost],
            "rounds": [
                {"alpha": float(a), "stump": s.to_dict()} for a, s in self.rounds
            ],
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "EnsembleModel":
        try:
            variant = Variant.parse(str(doc["variant"]))
            rounds = tuple(
                (float(r["alpha"]), StumpModel.from_dict(r["stump"]))
                for r in doc["rounds"]
            )
            return cls(variant, int(doc["K"]), int(doc["d"]),
                       CostVector.of(doc["costs"]), rounds)
        except (KeyError, TypeError, ValueError) as exc:
            raise DataLoadError(f"malformed model document: {exc}") from exc


@dataclass(frozen=True)
class TraceRow:
    """One boosting iteration as recorded in the training trace.

    Rejected iterations (alpha <= 0) keep their measured epsilon/alpha but
    carry no metrics, because the ensemble did not change. Test fields are
    None when no evaluation set was supplied.
    """

    iteration: int
    epsilon: float
    alpha: float
    accepted: bool
    train_error: float | None = None
    test_error: float | None = None
    test_mavg: float | None = None
    test_recalls: tuple[float, ...] | None = None


@dataclass(frozen=True, eq=False)
class BoostHistory:
    """Per-round internals captured for consistency oracles.

    distributions holds the weight vector before round 1 and after every
    accepted round (length = accepted rounds + 1); correct_masks and
    predictions hold one entry per accepted round.
    """

    labels: np.ndarray
    distributions: tuple[np.ndarray, ...]
    correct_masks: tuple[np.ndarray, ...]
    predictions: tuple[np.ndarray, ...]


@dataclass(frozen=True, eq=False)
class TrainTrace:
    rows: tuple[TraceRow, ...]
    termination_reason: str
    history: BoostHistory | None = None

    @property
    def n_accepted(self) -> int:
        return sum(1 for r in self.rows if r.accepted)

    def accepted_rows(self) -> list[TraceRow]:
        return [r for r in self.rows if r.accepted]


def _weights_array(weights) -> np.ndarray:
    if isinstance(weights, WeightDistribution):
        return weights.w
    return WeightDistribution(np.ascontiguousarray(weights, np.float64)).w


def _costs_per_sample(costs: CostVector | None, labels: np.ndarray,
                      variant: Variant) -> np.ndarray | None:
    """Per-sample cost factors, or None when the variant ignores costs."""
    if not variant.is_cost_sensitive:
        return None
    if costs is None:
        raise ContractError(
            f"variant {variant.value} requires a cost vector")
    if labels.max() > costs.K:
        raise ContractError(
            f"cost vector has {costs.K} entries but labels reach {labels.max()}")
    return costs.cost[labels - 1]


def weighted_error(weights, preds, labels, costs: CostVector | None,
                   variant: Variant) -> float:
    """Weighted misclassification rate of one weak classifier.

    AdaC2 folds the per-class costs into both numerator and denominator;
    the other variants use the plain weight mass of the mistakes.
    """
    w = _weights_array(weights)
    p = np.asarray(preds, dtype=np.int64)
    y = np.asarray(labels, dtype=np.int64)
    if p.shape != w.shape or y.shape != w.shape:
        raise ContractError("weights, preds, and labels must share length")
    wrong = p != y
    if variant is Variant.ADA_C2:
        c = _costs_per_sample(costs, y, variant)
        num = float(np.sum(c[wrong] * w[wrong]))
        den = float(np.sum(c * w))
    else:
        num = float(np.sum(w[wrong]))
        den = float(np.sum(w))
    return num / den


def classifier_weight(epsilon: float, K: int, variant: Variant) -> float:
    """Vote weight alpha for a weak classifier with error rate epsilon.

    epsilon is clamped into [EPS_MIN, 1 - EPS_MIN] first, so the result is
    always finite. Positive alpha requires beating random guessing: error
    below 1/2 for the binary variants, below (K-1)/K otherwise.
    """
    if K < 2:
        raise ContractError("K must be >= 2")
    eps = min(max(float(epsilon), EPS_MIN), 1.0 - EPS_MIN)
    base = math.log((1.0 - eps) / eps)
    if variant is Variant.ADABOOST_M1:
        return base
    if variant is Variant.ADA_C2:
        return 0.5 * base
    return base + math.log(K - 1)


def update_weights(weights, alpha: float, preds, labels,
                   costs: CostVector | None, variant: Variant) -> WeightDistribution:
    """One multiplicative reweighting step, renormalized to sum 1.

    Correctly classified samples are scaled by exp(-alpha); cost-sensitive
    variants additionally scale every sample by its class cost. The two
    conventions (penalize-correct versus boost-wrong) differ only in the
    normalizer, and this is the penalize-correct form.
    """
    w = _weights_array(weights)
    if not math.isfinite(alpha):
        raise ContractError("alpha must be finite")
    p = np.asarray(preds, dtype=np.int64)
    y = np.asarray(labels, dtype=np.int64)
    if p.shape != w.shape or y.shape != w.shape:
        raise ContractError("weights, preds, and labels must share length")
    factors = np.where(p == y, math.exp(-alpha), 1.0)
    c = _costs_per_sample(costs, y, variant)
    if c is not None:
        factors = factors * c
    new = w * factors
    total = float(new.sum())
    if total < 1e-300:
        raise DegenerateWeightsError(
            "weight update underflowed; distribution is no longer usable")
    return WeightDistribution(new / total)


def _rarest_class(class_counts: np.ndarray) -> int:
    """1-based class with the fewest samples; ties go to the higher index."""
    counts = np.asarray(class_counts)
    reversed_argmin = int(np.argmin(counts[::-1]))
    return counts.shape[0] - reversed_argmin


def _check_fit_inputs(train: Dataset, variant: Variant, T: int,
                      costs: CostVector | None,
                      eval_ds: Dataset | None) -> CostVector:
    if T < 1:
        raise ContractError("T must be >= 1")
    if train.n_samples < 1:
        raise ContractError("training set is empty")
    if variant.binary_only and train.K != 2:
        raise ContractError(
            f"variant {variant.value} supports K=2 only, got K={train.K}")
    if variant.is_cost_sensitive:
        if costs is None:
            raise ContractError(
                f"variant {variant.value} requires a cost vector")
        if costs.K != train.K:
            raise ContractError(
                f"cost vector has {costs.K} entries, dataset has {train.K} classes")
        rare = _rarest_class(train.class_counts)
        if costs.cost[rare - 1] < costs.cost.max():
            raise ContractError(
                f"rarest class {rare} must carry the maximal cost; "
                f"got {costs.cost[rare - 1]} < {costs.cost.max()}")
        effective = costs
    else:
        # Non-cost variants accept and ignore any supplied costs.
        effective = CostVector.ones(train.K)
    if eval_ds is not None:
        if eval_ds.n_features != train.n_features:
            raise ContractError(
                f"eval set has {eval_ds.n_features} features, "
                f"train has {train.n_features}")
        if eval_ds.K != train.K:
            raise ContractError(
                f"eval set has K={eval_ds.K}, train has K={train.K}")
        missing = np.flatnonzero(eval_ds.class_counts == 0) + 1
        if missing.size:
            raise InfeasibleError(
                f"eval set lacks class {int(missing[0])}; "
                "per-round MAvG would be undefined")
    return effective


def fit(train: Dataset, variant: Variant, T: int,
        costs: CostVector | None = None, eval_ds: Dataset | None = None,
        capture_history: bool = False) -> tuple[EnsembleModel, TrainTrace]:
    """Run up to T boosting rounds and return the model plus its trace.

    Termination: completed_T after T accepted rounds; perfect_fit when a
    round's error hits the EPS_MIN floor (that round is kept, with epsilon
    clamped); degenerate_error when alpha <= 0 (that round is recorded but
    discarded, and earlier rounds stand).

    With capture_history=True the trace carries every intermediate weight
    distribution, per-round correctness masks, and per-round predictions,
    for use by external consistency checks.
    """
    effective_costs = _check_fit_inputs(train, variant, T, costs, eval_ds)
    N, K = train.n_samples, train.K
    y = train.labels
    searcher = StumpSearcher(train)
    dist = WeightDistribution.uniform(N)

    train_votes = np.zeros((N, K))
    if eval_ds is not None:
        test_votes = np.zeros((eval_ds.n_samples, K))

    rows: list[TraceRow] = []
    rounds: list[tuple[float, StumpModel]] = []
    termination = TERMINATED_COMPLETED
    hist_dists = [dist.w.copy()] if capture_history else None
    hist_correct: list[np.ndarray] = []
    hist_preds: list[np.ndarray] = []

    for t in range(1, T + 1):
        stump, _ = searcher.fit(dist.w)
        preds = predict_stump(stump, train.features)
        eps = weighted_error(dist, preds, y, effective_costs, variant)
        perfect = eps <= EPS_MIN
        if perfect:
            eps = EPS_MIN
        alpha = classifier_weight(eps, K, variant)
        if not perfect and alpha <= 0.0:
            rows.append(TraceRow(t, eps, alpha, accepted=False))
            termination = TERMINATED_DEGENERATE
            break

        rounds.append((alpha, stump))
        train_votes[np.arange(N), preds - 1] += alpha
        train_error = float(
            np.count_nonzero(np.argmax(train_votes, axis=1) + 1 != y) / N)

        test_err = test_mavg = None
        test_recalls = None
        if eval_ds is not None:
            test_votes[np.arange(eval_ds.n_samples),
                       predict_stump(stump, eval_ds.features) - 1] += alpha
            test_pred = np.argmax(test_votes, axis=1) + 1
            cm = confusion_matrix(eval_ds.labels, test_pred, K)
            recalls = recall_per_class(cm)
            test_err = float(np.count_nonzero(test_pred != eval_ds.labels)
                             / eval_ds.n_samples)
            test_mavg = mavg(recalls)
            test_recalls = tuple(float(r) for r in recalls)

        dist = update_weights(dist, alpha, preds, y, effective_costs, variant)
        if capture_history:
            hist_dists.append(dist.w.copy())
            hist_correct.append(preds == y)
            hist_preds.append(preds)

        rows.append(TraceRow(t, eps, alpha, accepted=True,
                             train_error=train_error, test_error=test_err,
                             test_mavg=test_mavg, test_recalls=test_recalls))
        if perfect:
            termination = TERMINATED_PERFECT
            break

    history = None
    if capture_history:
        history = BoostHistory(y, tuple(hist_dists), tuple(hist_correct),
                               tuple(hist_preds))
    model = EnsembleModel(variant, K, train.n_features, effective_costs,
                          tuple(rounds))
    return model, TrainTrace(tuple(rows), termination, history)


def predict(model: EnsembleModel, x) -> int:
    """Weighted-vote class for one feature vector; ties pick the lowest class."""
    if model.n_rounds == 0:
        raise ContractError("model has no rounds")
    v = np.asarray(x, dtype=np.float64)
    if v.shape != (model.d,):
        raise ContractError(f"expected a length-{model.d} feature vector, "
                            f"got shape {v.shape}")
    votes = np.zeros(model.K)
    for alpha, stump in model.rounds:
        k = stump.left_class if v[stump.feature_index] <= stump.threshold \
            else stump.right_class
        votes[k - 1] += alpha
    return int(np.argmax(votes)) + 1


def predict_batch(model: EnsembleModel, data) -> np.ndarray:
    """Vectorized predict over a Dataset or a bare (N, d) feature matrix."""
    if model.n_rounds == 0:
        raise ContractError("model has no rounds")
    X = data.features if isinstance(data, Dataset) else \
        np.asarray(data, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != model.d:
        raise ContractError(
            f"expected an (N, {model.d}) feature matrix, got shape {X.shape}")
    votes = np.zeros((X.shape[0], model.K))
    for alpha, stump in model.rounds:
        left = X[:, stump.feature_index] <= stump.threshold
        votes[left, stump.left_class - 1] += alpha
        votes[~left, stump.right_class - 1] += alpha
    return (np.argmax(votes, axis=1) + 1).astype(np.int64)


def save_model(model: EnsembleModel, path) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(model.to_dict(), handle, indent=2)
        handle.write("\n")


def load_model(path) -> EnsembleModel:
    try:
        with open(path, "r", encoding="utf-8") as handle:
            doc = json.load(handle)
    except FileNotFoundError:
        raise DataLoadError(f"no such file: {path}") from None
    except json.JSONDecodeError as exc:
        raise DataLoadError(f"{path}: invalid model JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise DataLoadError(f"{path}: model JSON must be an object")
    return EnsembleModel.from_dict(doc)


def _cell(value) -> str:
    if value is None:
        return ""
    return repr(float(value))


def write_trace_csv(trace: TrainTrace, path, K: int | None = None) -> None:
    """Write the per-iteration trace.

    Columns: iter,epsilon,alpha,train_error,test_error,test_mavg,accepted,
    then test_recall_1..K when per-class recalls were tracked.
    """
    with_recalls = K is not None and any(
        r.test_recalls is not None for r in trace.rows)
    header = ["iter", "epsilon", "alpha", "train_error",
              "test_error", "test_mavg", "accepted"]
    if with_recalls:
        header += [f"test_recall_{k}" for k in range(1, K + 1)]
    lines = [",".join(header)]
    for r in trace.rows:
        cells = [str(r.iteration), _cell(r.epsilon), _cell(r.alpha),
                 _cell(r.train_error), _cell(r.test_error), _cell(r.test_mavg),
                 "true" if r.accepted else "false"]
        if with_recalls:
            if r.test_recalls is None:
                cells += [""] * K
            else:
                cells += [repr(float(v)) for v in r.test_recalls]
        lines.append(",".join(cells))
    with open(path, "w", encoding="utf-8") as handle:
        handle.write("\n".join(lines) + "\n")
