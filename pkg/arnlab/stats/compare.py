"""Side-by-side comparison of two models' predictions on one test set."""

from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np

from arnlab.network.losses import accuracy, cross_entropy, mean_squared_error
from arnlab.stats.significance import mcnemar, wilcoxon_signed_rank


@dataclass(frozen=True)
class ComparisonRow:
    """Losses, accuracies and the paired test of model A against model B."""

    task: str
    n_examples: int
    loss_a: float
    loss_b: float
    factor_better: float
    accuracy_a: Optional[float]
    accuracy_b: Optional[float]
    test: str
    statistic: float
    p_value: float

    def to_dict(self) -> dict:
        return asdict(self)


def compare(pred_a: np.ndarray, pred_b: np.ndarray, targets: np.ndarray, task: str) -> ComparisonRow:
    """Compare two prediction sets.

    Classification takes final-step logits (N, C) and one-hot targets and is
    tested with McNemar; regression takes (N, n_t, m) predictions and is
    tested with Wilcoxon on per-example squared-error differences.
    ``factor_better`` is loss_a / loss_b.
    """
    if pred_a.shape != targets.shape or pred_b.shape != targets.shape:
        raise ValueError("predictions and targets must have the same shape")
    n = targets.shape[0]
    if task == "classification":
        loss_a, loss_b = cross_entropy(pred_a, targets), cross_entropy(pred_b, targets)
        truth = np.argmax(targets, axis=-1)
        right_a = np.argmax(pred_a, axis=-1) == truth
        right_b = np.argmax(pred_b, axis=-1) == truth
        b = int(np.sum(right_a & ~right_b))
        c = int(np.sum(~right_a & right_b))
        result = mcnemar(b, c)
        test = "mcnemar"
        acc_a, acc_b = accuracy(pred_a, targets), accuracy(pred_b, targets)
    else:
        loss_a, loss_b = mean_squared_error(pred_a, targets), mean_squared_error(pred_b, targets)
        axes = tuple(range(1, targets.ndim))
        err_a = ((pred_a - targets) ** 2).mean(axis=axes)
        err_b = ((pred_b - targets) ** 2).mean(axis=axes)
        result = wilcoxon_signed_rank(err_a - err_b)
        test = "wilcoxon"
        acc_a = acc_b = None
    factor = loss_a / loss_b if loss_b > 0 else float("inf")
    return ComparisonRow(task, n, loss_a, loss_b, factor, acc_a, acc_b, test, result.statistic, result.p_value)
