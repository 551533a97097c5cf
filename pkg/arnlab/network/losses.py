"""Training losses and evaluation metrics."""

from __future__ import annotations

from typing import Optional

import numpy as np

from arnlab.runtime.tape import Tape, Tensor


def loss(
    tape: Tape,
    predictions: Tensor,
    targets: np.ndarray,
    task: str,
    last_timesteps: Optional[int] = None,
) -> Tensor:
    """MSE over timesteps and outputs, or softmax cross entropy of final logits.

    Args:
        tape: Tape the predictions were recorded on
        predictions: (B, n_t, n_out) for regression, (B, n_out) for classification
        targets: Same shape as the predictions; one-hot rows for classification
        task: regression or classification
        last_timesteps: Regression only; restrict the loss to the last k steps
    """
    if predictions.shape != targets.shape:
        raise ValueError(f"prediction shape {predictions.shape} != target shape {targets.shape}")
    if task == "classification":
        return tape.softmax_cross_entropy(predictions, targets)
    if last_timesteps is not None:
        window = (slice(None), slice(-last_timesteps, None))
        predictions = tape.take(predictions, window)
        targets = targets[window]
    return tape.mean_squared_error(predictions, targets)


def mean_squared_error(predictions: np.ndarray, targets: np.ndarray) -> float:
    diff = predictions - targets
    return float(np.mean(diff * diff))


def cross_entropy(logits: np.ndarray, onehot: np.ndarray) -> float:
    """Mean natural-log cross entropy of softmax(logits)."""
    shifted = logits - logits.max(axis=-1, keepdims=True)
    log_probs = shifted - np.log(np.exp(shifted).sum(axis=-1, keepdims=True))
    return float(-np.sum(onehot * log_probs) / logits.shape[0])


def accuracy(logits: np.ndarray, onehot: np.ndarray) -> float:
    # np.argmax returns the first maximum, so ties go to the lowest class
    return float(np.mean(np.argmax(logits, axis=-1) == np.argmax(onehot, axis=-1)))


def metrics(predictions: np.ndarray, targets: np.ndarray, task: str) -> dict[str, float]:
    """``{"mse"}`` for regression, ``{"cce", "accuracy"}`` for classification."""
    if task == "classification":
        return {
            "cce": cross_entropy(predictions, targets),
            "accuracy": accuracy(predictions, targets),
        }
    return {"mse": mean_squared_error(predictions, targets)}


def persistence_mse(inputs: np.ndarray, targets: np.ndarray) -> float:
    """MSE of predicting each step's inputs as its next-step targets."""
    if inputs.shape != targets.shape:
        raise ValueError("persistence baseline needs targets shaped like the inputs")
    return mean_squared_error(inputs, targets)


