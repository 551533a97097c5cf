"""Trained model directory: configuration, weights, loss history and summary."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Dict

import numpy as np
import pandas as pd

from arnlab import FORMAT_VERSION
from arnlab.data.dataset import Scaling
from arnlab.dsl.parser import parse
from arnlab.errors import ArtifactFormatError
from arnlab.models.artifact import ArtifactFile, read_csv, write_csv
from arnlab.network.net import Network, NetworkConfig
from arnlab.runtime.init import Weights
from arnlab.trainer.config import TrainConfig
from arnlab.trainer.session import HistoryRow
from arnlab.utils.logging import get_logger

logger = get_logger(__name__)

MODEL_FILE = "model.yaml"
WEIGHTS_FILE = "weights.npz"
HISTORY_FILE = "loss_history.csv"
SUMMARY_FILE = "summary.txt"
VERSION_KEY = "__format_version__"


def save_weights(path: Path, weights: Weights) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    np.savez(path, **{VERSION_KEY: np.array(FORMAT_VERSION)}, **weights)


def load_weights(path: Path) -> Weights:
    """Read a weight archive.

    Raises:
        ArtifactFormatError: archive has no supported version entry
    """
    with np.load(path) as archive:
        if VERSION_KEY not in archive.files:
            raise ArtifactFormatError(f"{path}: missing {VERSION_KEY} entry")
        version = int(archive[VERSION_KEY])
        if version != FORMAT_VERSION:
            raise ArtifactFormatError(f"{path}: unsupported format_version {version}")
        return {key: archive[key] for key in archive.files if key != VERSION_KEY}


@dataclass
class ModelBundle:
    """Everything needed to rebuild and evaluate a trained network."""

    source: str
    network: NetworkConfig
    train: TrainConfig
    split_seed: int
    scaling: Scaling
    weights: Weights
    history: list[HistoryRow] = field(default_factory=list)
    summary: Dict[str, Any] = field(default_factory=dict)

    def build(self) -> Network:
        return Network.from_program(parse(self.source), self.network)

    def save(self, directory: Path) -> None:
        """Write the four model files into ``directory``."""
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        ArtifactFile(
            "model",
            {
                "network": self.network.model_dump(),
                "train": self.train.model_dump(),
                "split_seed": self.split_seed,
                "scaling": self.scaling.to_dict(),
            },
            self.source,
        ).save(directory / MODEL_FILE)
        save_weights(directory / WEIGHTS_FILE, self.weights)
        history = pd.DataFrame([asdict(row) for row in self.history], columns=list(HistoryRow.__dataclass_fields__))
        write_csv(directory / HISTORY_FILE, history, "loss-history")
        ArtifactFile("summary", self.summary).save(directory / SUMMARY_FILE)
        logger.info("saved model to %s", directory)

    @classmethod
    def load(cls, directory: Path) -> "ModelBundle":
        """Read a model directory written by :meth:`save`.

        Raises:
            ArtifactFormatError: a file is missing or has a bad version header
        """
        directory = Path(directory)
        for name in (MODEL_FILE, WEIGHTS_FILE):
            if not (directory / name).exists():
                raise ArtifactFormatError(f"{directory}: missing {name}")
        model = ArtifactFile.load(directory / MODEL_FILE, kind="model")
        history: list[HistoryRow] = []
        if (directory / HISTORY_FILE).exists():
            _, frame, _ = read_csv(directory / HISTORY_FILE, kind="loss-history")
            history = [HistoryRow(**row) for row in frame.to_dict("records")]
        summary: Dict[str, Any] = {}
        if (directory / SUMMARY_FILE).exists():
            header = ArtifactFile.load(directory / SUMMARY_FILE, kind="summary").header
            summary = {k: v for k, v in header.items() if k not in ("format_version", "kind")}
        return cls(
            source=model.body,
            network=NetworkConfig.model_validate(model.header["network"]),
            train=TrainConfig.model_validate(model.header["train"]),
            split_seed=int(model.header["split_seed"]),
            scaling=Scaling.from_dict(model.header["scaling"]),
            weights=load_weights(directory / WEIGHTS_FILE),
            history=history,
            summary=summary,
        )


def summary_values(values: Dict[str, Any]) -> Dict[str, Any]:
    """Plain YAML-safe scalars for a summary file; non-finite floats become strings."""
    out: Dict[str, Any] = {}
    for key, value in values.items():
        if isinstance(value, (np.floating, float)):
            value = float(value)
            out[key] = value if np.isfinite(value) else str(value)
        elif isinstance(value, np.integer):
            out[key] = int(value)
        else:
            out[key] = value
    return out
