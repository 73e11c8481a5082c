"""Score-space identities behind the boosting engine.

Classes are recoded as symmetric K-vectors (1 at the true class,
-1/(K-1) elsewhere) so that the engine's reweighting loop can be checked
against its additive-model reading: each round adds a scaled recoded
prediction to a running score vector, and the cost-weighted exponential
loss of that score must fall while weak learners keep beating random
guessing. The functions here are used both as library utilities and as
oracles inside the test suite.
"""

from __future__ import annotations

import numpy as np

from .boost import BoostHistory, CostVector, TrainTrace
from .errors import ContractError

__all__ = [
    "recode_label",
    "label_score_product",
    "cs_exp_loss",
    "bayes_f_star",
    "implied_probs",
    "stagewise_loss_curve",
    "stagewise_consistency_check",
]


def recode_label(y: int, K: int) -> np.ndarray:
    """Symmetric vector code of class y: 1 at y, -1/(K-1) elsewhere.

    The components always sum to zero, carrying the +1/-1 symmetry of
    binary labels over to K classes.
    """
    if K < 2:
        raise ContractError("K must be >= 2")
    if not (1 <= y <= K):
        raise ContractError(f"label {y} outside 1..{K}")
    u = np.full(K, -1.0 / (K - 1))
    u[y - 1] = 1.0
    return u


def label_score_product(u: np.ndarray, g: np.ndarray) -> float:
    """Inner product of two recoded labels.

    Takes exactly two values: K/(K-1) when both encode the same class and
    -K/(K-1)^2 otherwise.
    """
    a = np.asarray(u, dtype=np.float64)
    b = np.asarray(g, dtype=np.float64)
    if a.ndim != 1 or a.shape != b.shape:
        raise ContractError("recoded labels must be 1-D and share K")
    return float(np.dot(a, b))


def _cost_array(costs, K: int) -> np.ndarray:
    c = costs.cost if isinstance(costs, CostVector) else \
        np.asarray(costs, dtype=np.float64)
    if c.shape != (K,):
        raise ContractError(f"costs must have {K} entries, got shape {c.shape}")
    return c


def cs_exp_loss(labels, scores, costs) -> float:
    """Cost-weighted exponential loss sum_i C(y_i) * exp(-u_i'f_i / K).

    scores is the (N, K) matrix of per-sample score vectors f(x_i); u_i is
    the recoded true label. The inner product reduces to
    (K*f_iy - sum_j f_ij) / (K-1), which avoids materializing the u_i.
    """
    y = np.asarray(labels, dtype=np.int64)
    f = np.asarray(scores, dtype=np.float64)
    if f.ndim != 2 or f.shape[0] != y.shape[0]:
        raise ContractError("scores must be (N, K) matching labels")
    K = f.shape[1]
    if K < 2:
        raise ContractError("K must be >= 2")
    if y.size and (y.min() < 1 or y.max() > K):
        raise ContractError(f"labels must lie in 1..{K}")
    c = _cost_array(costs, K)
    f_true = f[np.arange(y.shape[0]), y - 1]
    dots = (K * f_true - f.sum(axis=1)) / (K - 1)
    return float(np.sum(c[y - 1] * np.exp(-dots / K)))


def bayes_f_star(probs) -> np.ndarray:
    """Score vector minimizing the population exponential loss.

    f_k = (K-1) * (log p_k - mean_j log p_j); the output sums to zero and
    shares its argmax with the input probabilities.
    """
    p = np.asarray(probs, dtype=np.float64)
    if p.ndim != 1 or p.size < 2:
        raise ContractError("probs must be a vector with K >= 2 entries")
    if (p <= 0).any():
        raise ContractError("probs must be strictly positive (log undefined)")
    if abs(float(p.sum()) - 1.0) > 1e-9:
        raise ContractError("probs must sum to 1 within 1e-9")
    logs = np.log(p)
    return (p.size - 1) * (logs - logs.mean())


def implied_probs(f) -> np.ndarray:
    """Probabilities implied by a score vector: softmax of f/(K-1).

    Inverse of bayes_f_star on the open simplex. The max-shift keeps exp
    from overflowing for large scores.
    """
    s = np.asarray(f, dtype=np.float64)
    if s.ndim != 1 or s.size < 2:
        raise ContractError("scores must be a vector with K >= 2 entries")
    if not np.isfinite(s).all():
        raise ContractError("scores must be finite")
    z = s / (s.size - 1)
    z = z - z.max()
    e = np.exp(z)
    return e / e.sum()


def stagewise_loss_curve(labels, predictions_per_round, alphas, costs,
                         K: int) -> np.ndarray:
    """Loss trajectory of the additive model implied by a boosting run.

    Round t adds beta_t * recode(h_t(x_i)) to each sample's score, with
    beta_t = alpha_t * (K-1)^2 / K. Returns R+1 losses: the zero-score
    baseline first, then one value after each round.
    """
    y = np.asarray(labels, dtype=np.int64)
    N = y.shape[0]
    scores = np.zeros((N, K))
    losses = [cs_exp_loss(y, scores, costs)]
    for preds, alpha in zip(predictions_per_round, alphas, strict=True):
        p = np.asarray(preds, dtype=np.int64)
        beta = float(alpha) * (K - 1) ** 2 / K
        g = np.full((N, K), -1.0 / (K - 1))
        g[np.arange(N), p - 1] = 1.0
        scores = scores + beta * g
        losses.append(cs_exp_loss(y, scores, costs))
    return np.asarray(losses)


def stagewise_consistency_check(trace: TrainTrace, weights_history,
                                costs, K: int,
                                tol: float = 1e-9) -> tuple[bool, float]:
    """Replay every accepted round against the engine's weight history.

    Two checks per round: the stored next distribution must match the
    normalized form cost * D * exp(-alpha) on correct samples and
    cost * D on incorrect ones; and alpha must survive the round trip
    through its score-space scaling beta = alpha * (K-1)^2 / K. Returns
    (all rounds within tol, worst absolute deviation).
    """
    history = weights_history
    if not isinstance(history, BoostHistory):
        raise ContractError(
            "weights_history is missing; fit with capture_history=True")
    alphas = [row.alpha for row in trace.accepted_rows()]
    R = len(alphas)
    if len(history.distributions) != R + 1 or len(history.correct_masks) != R:
        raise ContractError(
            "history length does not match the trace's accepted rounds")
    c = _cost_array(costs, K)[history.labels - 1]
    worst = 0.0
    for t, alpha in enumerate(alphas):
        d_now = history.distributions[t]
        correct = history.correct_masks[t]
        unnorm = c * d_now * np.exp(-alpha * correct.astype(np.float64))
        expected = unnorm / unnorm.sum()
        dev = float(np.max(np.abs(expected - history.distributions[t + 1])))
        beta = alpha * (K - 1) ** 2 / K
        dev = max(dev, abs(beta * K / (K - 1) ** 2 - alpha))
        worst = max(worst, dev)
    return worst <= tol, worst
