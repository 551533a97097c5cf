"""Dataset interchange CSV.

One row per timestep: ``series_id,t,x0..x{k-1},<targets>``.  Regression
targets are ``y0..y{m-1}``; classification uses a single integer ``label``
column repeated on every row of a series.  Leading ``# key: value`` lines
carry ``format_version``, ``kind`` and ``task``.
"""

from __future__ import annotations

import io
from pathlib import Path
from typing import Optional

import numpy as np
import pandas as pd
from pydantic import BaseModel, Field

from arnlab.data.dataset import Dataset, Task
from arnlab.errors import DataError
from arnlab.models.artifact import check_version, read_csv_header, write_csv
from arnlab.utils.logging import get_logger

logger = get_logger(__name__)

DATASET_KIND = "dataset"
ID_COLUMN = "series_id"
TIME_COLUMN = "t"
LABEL_COLUMN = "label"


class DatasetSchema(BaseModel):
    """How to read a dataset file; unset fields come from the file header."""

    task: Optional[Task] = Field(None, description="Override the task named in the file header")
    feature_prefix: str = Field("x", description="Prefix of input feature columns")
    target_prefix: str = Field("y", description="Prefix of regression target columns")
    n_classes: Optional[int] = Field(None, ge=2, description="Number of classes; inferred when unset")


def _columns(frame: pd.DataFrame, prefix: str) -> list[str]:
    cols = [c for c in frame.columns if c.startswith(prefix) and c[len(prefix) :].isdigit()]
    return sorted(cols, key=lambda c: int(c[len(prefix) :]))


def load_csv(path: Path, schema: Optional[DatasetSchema] = None) -> Dataset:
    """Read a dataset file, grouping rows by series and ordering them by ``t``.

    Raises:
        DataError: missing column, non-numeric cell, duplicate or ragged
            timesteps, series on different time grids, inconsistent labels;
            messages name the file line
    """
    schema = schema or DatasetSchema()
    path = Path(path)
    if not path.exists():
        raise DataError(f"{path}: no such dataset file")
    text = path.read_text(encoding="utf-8")
    header, skipped = read_csv_header(text)
    if "format_version" in header:
        check_version(header, path)
    task = schema.task or header.get("task")
    if task not in ("regression", "classification"):
        raise DataError(f"{path}: task must be given in the header or the schema, got {task!r}")

    frame = pd.read_csv(io.StringIO(text), skiprows=skipped, dtype=str, keep_default_na=False)
    first_line = skipped + 2  # 1-based line of the first data row

    features = _columns(frame, schema.feature_prefix)
    targets = [LABEL_COLUMN] if task == "classification" else _columns(frame, schema.target_prefix)
    for column in [ID_COLUMN, TIME_COLUMN] + targets:
        if column not in frame.columns:
            raise DataError(f"{path}: missing column {column!r}")
    if not features:
        raise DataError(f"{path}: no feature columns {schema.feature_prefix}0..")
    if not targets:
        raise DataError(f"{path}: no target columns {schema.target_prefix}0..")

    numeric = pd.DataFrame({ID_COLUMN: frame[ID_COLUMN]})
    for column in [TIME_COLUMN] + features + targets:
        values = pd.to_numeric(frame[column].str.strip(), errors="coerce")
        bad = values.isna() | ~np.isfinite(values.to_numpy(dtype=float, na_value=np.nan))
        if bad.any():
            row = int(np.flatnonzero(bad.to_numpy())[0])
            raise DataError(
                f"{path}, line {first_line + row}: column {column!r} is not a finite number: "
                f"{frame[column].iloc[row]!r}"
            )
        numeric[column] = values.astype(float)

    numeric["_line"] = np.arange(len(numeric)) + first_line
    numeric = numeric.sort_values([ID_COLUMN, TIME_COLUMN], kind="stable")
    dup = numeric.duplicated([ID_COLUMN, TIME_COLUMN])
    if dup.any():
        line = int(numeric.loc[dup, "_line"].iloc[0])
        raise DataError(f"{path}, line {line}: duplicate timestep within a series")

    groups = [(sid, g) for sid, g in numeric.groupby(ID_COLUMN, sort=True)]
    if not groups:
        raise DataError(f"{path}: no rows")
    n_t = len(groups[0][1])
    for sid, g in groups:
        if len(g) != n_t:
            raise DataError(
                f"{path}, line {int(g['_line'].min())}: series {sid!r} has {len(g)} timesteps, expected {n_t}"
            )
    first_id, times = groups[0][0], groups[0][1][TIME_COLUMN].to_numpy()
    for sid, g in groups[1:]:
        mismatch = np.flatnonzero(g[TIME_COLUMN].to_numpy() != times)
        if mismatch.size:
            k = int(mismatch[0])
            raise DataError(
                f"{path}, line {int(g['_line'].iloc[k])}: series {sid!r} has t={g[TIME_COLUMN].iloc[k]:g} "
                f"where series {first_id!r} has t={times[k]:g}"
            )

    inputs = np.stack([g[features].to_numpy() for _, g in groups])
    n_classes = None
    if task == "classification":
        labels = []
        for sid, g in groups:
            values = g[LABEL_COLUMN].to_numpy()
            if (values != values[0]).any() or values[0] < 0 or values[0] != int(values[0]):
                raise DataError(
                    f"{path}, line {int(g['_line'].min())}: series {sid!r} needs one non-negative integer label"
                )
            labels.append(int(values[0]))
        target_array = np.asarray(labels, dtype=np.float64)
        n_classes = schema.n_classes or int(max(labels)) + 1
        if max(labels) >= n_classes:
            raise DataError(f"{path}: label {max(labels)} outside [0, {n_classes})")
    else:
        target_array = np.stack([g[targets].to_numpy() for _, g in groups])

    dataset = Dataset(
        series_ids=tuple(str(sid) for sid, _ in groups),
        inputs=inputs,
        targets=target_array,
        task=task,
        feature_names=tuple(features),
        target_names=tuple(targets),
        n_classes=n_classes,
        metadata={k: v for k, v in header.items() if k not in ("format_version", "kind", "task")},
    )
    logger.info("loaded %s: %s", path, dataset.summary())
    return dataset


def dataset_frame(dataset: Dataset) -> pd.DataFrame:
    """Long-format rows of an unencoded dataset."""
    n, n_t = dataset.n_series, dataset.n_timesteps
    frame = pd.DataFrame(
        {
            ID_COLUMN: np.repeat(np.asarray(dataset.series_ids), n_t),
            TIME_COLUMN: np.tile(np.arange(n_t), n),
        }
    )
    for j, name in enumerate(dataset.feature_names):
        frame[name] = dataset.inputs[:, :, j].reshape(-1)
    if dataset.task == "classification":
        frame[LABEL_COLUMN] = np.repeat(dataset.labels(), n_t)
    else:
        for j, name in enumerate(dataset.target_names):
            frame[name] = dataset.targets[:, :, j].reshape(-1)
    return frame


def save_csv(dataset: Dataset, path: Path) -> None:
    extra = {"task": dataset.task, **dataset.metadata}
    write_csv(path, dataset_frame(dataset), DATASET_KIND, **extra)
