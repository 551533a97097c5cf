"""Centering, scaling and one-hot encoding with training-split statistics."""

from __future__ import annotations

from dataclasses import replace

import numpy as np

from arnlab.data.dataset import Dataset, Scaling, SplitDataset

MIN_SCALE = 1e-12


def _moments(values: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    flat = values.reshape(-1, values.shape[-1])
    center = flat.mean(axis=0)
    scale = flat.std(axis=0)
    scale[scale < MIN_SCALE] = 1.0
    return center, scale


def fit_scaling(train: Dataset) -> Scaling:
    """Per-feature (and per-target for regression) mean and population std."""
    center, scale = _moments(train.inputs)
    if train.task == "classification":
        return Scaling(center, scale)
    t_center, t_scale = _moments(train.targets)
    return Scaling(center, scale, t_center, t_scale)


def apply_scaling(dataset: Dataset, scaling: Scaling) -> Dataset:
    """Encode a raw dataset with already fitted statistics."""
    if dataset.is_encoded:
        raise ValueError("dataset is already preprocessed")
    inputs = (dataset.inputs - scaling.feature_center) / scaling.feature_scale
    if dataset.task == "classification":
        targets = one_hot(dataset.targets.astype(int), int(dataset.n_classes))
    else:
        targets = (dataset.targets - scaling.target_center) / scaling.target_scale
    return replace(dataset, inputs=inputs, targets=targets, scaling=scaling)


def one_hot(labels: np.ndarray, n_classes: int) -> np.ndarray:
    return np.eye(n_classes)[labels]


def preprocess(data: SplitDataset | Dataset) -> SplitDataset | Dataset:
    """Scale ordinal values and one-hot encode labels.

    Statistics always come from the training split; a lone dataset is its
    own training split.
    """
    if isinstance(data, Dataset):
        return apply_scaling(data, fit_scaling(data))
    scaling = fit_scaling(data.train)
    return SplitDataset(
        train=apply_scaling(data.train, scaling),
        validation=apply_scaling(data.validation, scaling),
        test=apply_scaling(data.test, scaling),
    )


def inputs_in_target_units(dataset: Dataset) -> np.ndarray:
    """Encoded inputs re-expressed in the encoded target units.

    Only meaningful when inputs and targets measure the same quantities,
    as for next-step prediction.
    """
    s = dataset.scaling
    raw = dataset.inputs * s.feature_scale + s.feature_center
    return (raw - s.target_center) / s.target_scale
