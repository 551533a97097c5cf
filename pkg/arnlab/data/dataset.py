"""In-memory time-series datasets."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Literal, Optional, Sequence

import numpy as np

Task = Literal["regression", "classification"]


@dataclass(frozen=True)
class Scaling:
    """Centering and scaling fitted on a training split."""

    feature_center: np.ndarray
    feature_scale: np.ndarray
    target_center: Optional[np.ndarray] = None
    target_scale: Optional[np.ndarray] = None

    def to_dict(self) -> dict:
        out = {"feature_center": self.feature_center.tolist(), "feature_scale": self.feature_scale.tolist()}
        if self.target_center is not None:
            out["target_center"] = self.target_center.tolist()
            out["target_scale"] = self.target_scale.tolist()
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "Scaling":
        def arr(key):
            return np.asarray(data[key], dtype=np.float64) if data.get(key) is not None else None

        return cls(arr("feature_center"), arr("feature_scale"), arr("target_center"), arr("target_scale"))

    def unscale_targets(self, values: np.ndarray) -> np.ndarray:
        if self.target_center is None:
            return values
        return values * self.target_scale + self.target_center


@dataclass(frozen=True)
class Dataset:
    """Rectangular collection of series.

    ``inputs`` is (N, n_t, n_in).  Regression ``targets`` are (N, n_t, n_out).
    Classification targets are integer labels (N,) until :func:`preprocess`
    one-hot encodes them to (N, n_classes).
    """

    series_ids: tuple[str, ...]
    inputs: np.ndarray
    targets: np.ndarray
    task: Task
    feature_names: tuple[str, ...]
    target_names: tuple[str, ...]
    n_classes: Optional[int] = None
    scaling: Optional[Scaling] = None
    use_once: bool = False
    metadata: dict = field(default_factory=dict)

    @property
    def n_series(self) -> int:
        return len(self.series_ids)

    @property
    def n_timesteps(self) -> int:
        return self.inputs.shape[1]

    @property
    def n_in(self) -> int:
        return self.inputs.shape[2]

    @property
    def n_out(self) -> int:
        if self.task == "classification":
            return int(self.n_classes)
        return self.targets.shape[2]

    @property
    def is_encoded(self) -> bool:
        """Targets are ready for the loss (scaled or one-hot)."""
        return self.scaling is not None

    def labels(self) -> np.ndarray:
        if self.task != "classification":
            raise ValueError("regression datasets have no labels")
        return np.argmax(self.targets, axis=1) if self.targets.ndim == 2 else self.targets.astype(int)

    def subset(self, indices: Sequence[int], use_once: bool = False) -> "Dataset":
        idx = np.asarray(indices, dtype=int)
        return replace(
            self,
            series_ids=tuple(self.series_ids[i] for i in idx),
            inputs=self.inputs[idx],
            targets=self.targets[idx],
            use_once=use_once,
        )

    def last_timesteps(self, k: int) -> "Dataset":
        """Crop every series to its final ``k`` timesteps."""
        if k >= self.n_timesteps:
            return self
        targets = self.targets if self.task == "classification" else self.targets[:, -k:]
        return replace(self, inputs=self.inputs[:, -k:], targets=targets)

    def summary(self) -> dict:
        return {
            "series": self.n_series,
            "timesteps": self.n_timesteps,
            "inputs": self.n_in,
            "outputs": self.n_out,
            "task": self.task,
        }


@dataclass(frozen=True)
class SplitDataset:
    train: Dataset
    validation: Dataset
    test: Dataset

    def sizes(self) -> tuple[int, int, int]:
        return (self.train.n_series, self.validation.n_series, self.test.n_series)
