"""Prediction files consumed by ``compare``.

Classification rows are ``series_id,p0..p{C-1}`` holding final-step logits;
regression rows are ``series_id,t,p0..p{m-1}`` in target units.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np
import pandas as pd

from arnlab.data.csv_io import ID_COLUMN, TIME_COLUMN
from arnlab.data.dataset import Dataset
from arnlab.errors import DataError
from arnlab.models.artifact import read_csv, write_csv

PREDICTIONS_KIND = "predictions"


def _columns(width: int) -> list[str]:
    return [f"p{i}" for i in range(width)]


def write_predictions(path: Path, dataset: Dataset, predictions: np.ndarray) -> None:
    """Write ``predictions`` for ``dataset``; regression values are unscaled first."""
    ids = list(dataset.series_ids)
    if dataset.task == "classification":
        frame = pd.DataFrame(predictions, columns=_columns(predictions.shape[1]))
        frame.insert(0, ID_COLUMN, ids)
    else:
        if dataset.scaling is not None:
            predictions = dataset.scaling.unscale_targets(predictions)
        n, n_t, m = predictions.shape
        frame = pd.DataFrame(predictions.reshape(n * n_t, m), columns=_columns(m))
        frame.insert(0, TIME_COLUMN, np.tile(np.arange(n_t), n))
        frame.insert(0, ID_COLUMN, np.repeat(ids, n_t))
    write_csv(path, frame, PREDICTIONS_KIND, task=dataset.task)


def read_predictions(path: Path) -> tuple[str, tuple[str, ...], np.ndarray]:
    """Task, series ids and the prediction array, (N, C) or (N, n_t, m).

    Raises:
        DataError: missing columns or ragged series
    """
    header, frame, _ = read_csv(path, kind=PREDICTIONS_KIND, dtype={ID_COLUMN: str})
    task = header.get("task")
    columns = [c for c in frame.columns if c.startswith("p") and c[1:].isdigit()]
    if ID_COLUMN not in frame.columns or not columns:
        raise DataError(f"{path}: needs {ID_COLUMN} and p0.. columns")
    if task == "classification":
        return task, tuple(frame[ID_COLUMN]), frame[columns].to_numpy(dtype=np.float64)
    if TIME_COLUMN not in frame.columns:
        raise DataError(f"{path}: regression predictions need a {TIME_COLUMN} column")
    frame = frame.sort_values([ID_COLUMN, TIME_COLUMN], kind="stable")
    ids = tuple(dict.fromkeys(frame[ID_COLUMN]))
    values = frame[columns].to_numpy(dtype=np.float64)
    if len(values) % len(ids):
        raise DataError(f"{path}: series have different lengths")
    return task, ids, values.reshape(len(ids), -1, len(columns))


def align(ids: tuple[str, ...], values: np.ndarray, order: tuple[str, ...], source: Path) -> np.ndarray:
    """Reorder ``values`` to follow ``order``.

    Raises:
        DataError: a series in ``order`` has no prediction
    """
    index = {sid: i for i, sid in enumerate(ids)}
    missing = [sid for sid in order if sid not in index]
    if missing:
        raise DataError(f"{source}: no predictions for series {missing[0]!r}")
    return values[[index[sid] for sid in order]]
