"""Parquet snapshots of parsed datasets, cached by source content."""

from __future__ import annotations

import hashlib
import json
from pathlib import Path
from typing import Optional

import numpy as np
import pyarrow as pa
import pyarrow.parquet as pq

from arnlab import FORMAT_VERSION
from arnlab.data.csv_io import LABEL_COLUMN, DatasetSchema, dataset_frame, load_csv
from arnlab.data.dataset import Dataset
from arnlab.errors import ArtifactFormatError
from arnlab.utils.logging import get_logger

logger = get_logger(__name__)

VERSION_KEY = b"arnlab.format_version"
INFO_KEY = b"arnlab.dataset"


def save_snapshot(dataset: Dataset, path: Path) -> None:
    if dataset.is_encoded:
        raise ValueError("snapshots hold raw datasets only")
    table = pa.Table.from_pandas(dataset_frame(dataset), preserve_index=False)
    info = {
        "task": dataset.task,
        "n_series": dataset.n_series,
        "n_timesteps": dataset.n_timesteps,
        "series_ids": list(dataset.series_ids),
        "feature_names": list(dataset.feature_names),
        "target_names": list(dataset.target_names),
        "n_classes": dataset.n_classes,
        "metadata": dataset.metadata,
    }
    metadata = dict(table.schema.metadata or {})
    metadata[VERSION_KEY] = str(FORMAT_VERSION).encode()
    metadata[INFO_KEY] = json.dumps(info).encode()
    path.parent.mkdir(parents=True, exist_ok=True)
    pq.write_table(table.replace_schema_metadata(metadata), path, compression="snappy")


def load_snapshot(path: Path) -> Dataset:
    table = pq.read_table(path)
    metadata = table.schema.metadata or {}
    if metadata.get(VERSION_KEY) != str(FORMAT_VERSION).encode():
        raise ArtifactFormatError(f"{path}: missing or unsupported snapshot version")
    info = json.loads(metadata[INFO_KEY])
    frame = table.to_pandas()
    n, n_t = info["n_series"], info["n_timesteps"]
    inputs = frame[info["feature_names"]].to_numpy(dtype=np.float64).reshape(n, n_t, -1)
    if info["task"] == "classification":
        targets = frame[LABEL_COLUMN].to_numpy(dtype=np.float64).reshape(n, n_t)[:, 0]
    else:
        targets = frame[info["target_names"]].to_numpy(dtype=np.float64).reshape(n, n_t, -1)
    return Dataset(
        series_ids=tuple(info["series_ids"]),
        inputs=inputs,
        targets=targets,
        task=info["task"],
        feature_names=tuple(info["feature_names"]),
        target_names=tuple(info["target_names"]),
        n_classes=info["n_classes"],
        metadata=info["metadata"],
    )


def load_dataset(path: Path, schema: Optional[DatasetSchema] = None, cache_dir: Optional[Path] = None) -> Dataset:
    """``load_csv`` with an optional content-addressed snapshot cache."""
    path = Path(path)
    if cache_dir is None or not path.exists():
        return load_csv(path, schema)
    digest = hashlib.sha256(path.read_bytes())
    digest.update((schema or DatasetSchema()).model_dump_json().encode())
    cached = Path(cache_dir) / f"{digest.hexdigest()[:32]}.parquet"
    if cached.exists():
        logger.debug("dataset cache hit %s", cached)
        return load_snapshot(cached)
    dataset = load_csv(path, schema)
    save_snapshot(dataset, cached)
    return dataset
