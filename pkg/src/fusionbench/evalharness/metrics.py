"""Binary F1 and ROC-AUC, defined exactly as the evaluation uses them."""

from __future__ import annotations

import numpy as np


class MetricError(ValueError):
    pass


def f1_score(y_true, y_pred) -> float:
    """2TP / (2TP + FP + FN); 0.0 when the denominator is zero.

    The zero convention penalizes degenerate all-negative predictors instead
    of rewarding them.
    """
    y_true = np.asarray(y_true, dtype=int)
    y_pred = np.asarray(y_pred, dtype=int)
    if y_true.shape != y_pred.shape:
        raise MetricError(f"length mismatch: {y_true.shape} vs {y_pred.shape}")
    tp = int(np.sum((y_true == 1) & (y_pred == 1)))
    fp = int(np.sum((y_true == 0) & (y_pred == 1)))
    fn = int(np.sum((y_true == 1) & (y_pred == 0)))
    denom = 2 * tp + fp + fn
    if denom == 0:
        return 0.0
    return 2 * tp / denom


def roc_auc(y_true, scores) -> float:
    """P(score_pos > score_neg) with ties counted 1/2 (Mann-Whitney).

    Equals the trapezoidal area under the ROC curve. Requires both classes.
    """
    y_true = np.asarray(y_true, dtype=int)
    scores = np.asarray(scores, dtype=np.float64)
    if y_true.shape != scores.shape:
        raise MetricError(f"length mismatch: {y_true.shape} vs {scores.shape}")
    n_pos = int(np.sum(y_true == 1))
    n_neg = int(np.sum(y_true == 0))
    if n_pos == 0 or n_neg == 0:
        raise MetricError("ROC-AUC needs both classes present")
    order = np.argsort(scores, kind="mergesort")
    ranks = np.empty_like(scores)
    sorted_scores = scores[order]
    # midranks: tied scores share the average of their rank span
    i = 0
    n = len(scores)
    rank_values = np.empty(n, dtype=np.float64)
    while i < n:
        j = i
        while j + 1 < n and sorted_scores[j + 1] == sorted_scores[i]:
            j += 1
        rank_values[i : j + 1] = 0.5 * (i + j) + 1.0
        i = j + 1
    ranks[order] = rank_values
    rank_sum_pos = float(ranks[y_true == 1].sum())
    u = rank_sum_pos - n_pos * (n_pos + 1) / 2.0
    return u / (n_pos * n_neg)


def roc_curve_points(y_true, scores) -> tuple[np.ndarray, np.ndarray]:
    """(fpr, tpr) polyline pooled over all distinct thresholds, tie-grouped.

    Starts at (0, 0) and ends at (1, 1); trapezoidal area equals roc_auc.
    """
    y_true = np.asarray(y_true, dtype=int)
    scores = np.asarray(scores, dtype=np.float64)
    n_pos = int(np.sum(y_true == 1))
    n_neg = int(np.sum(y_true == 0))
    if n_pos == 0 or n_neg == 0:
        raise MetricError("ROC curve needs both classes present")
    order = np.argsort(-scores, kind="mergesort")
    sorted_y = y_true[order]
    sorted_s = scores[order]
    boundaries = np.nonzero(np.diff(sorted_s))[0]  # last index of each tie group
    idx = np.concatenate([boundaries, [len(sorted_s) - 1]])
    tp_cum = np.cumsum(sorted_y == 1)[idx]
    fp_cum = np.cumsum(sorted_y == 0)[idx]
    tpr = np.concatenate([[0.0], tp_cum / n_pos])
    fpr = np.concatenate([[0.0], fp_cum / n_neg])
    return fpr, tpr
