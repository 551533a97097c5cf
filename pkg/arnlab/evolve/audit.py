"""Evolution outputs: JSONL audit log, front snapshots and scatter CSV."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import pandas as pd
import yaml

from arnlab import FORMAT_VERSION
from arnlab.errors import ArtifactFormatError
from arnlab.evolve.candidate import AuditRecord
from arnlab.evolve.pareto import FrontMember, ParetoFront
from arnlab.models.artifact import ArtifactFile, check_version, write_csv

AUDIT_FILE = "audit.jsonl"
FRONT_CSV = "front.csv"
SNAPSHOT_KIND = "pareto-front"
AUDIT_KIND = "audit"


def snapshot_name(generation: int) -> str:
    return f"front_gen_{generation:04d}.yaml"


class AuditLog:
    """Append-only line-delimited JSON records, one per candidate.

    The first line is a header object carrying ``format_version`` and
    ``kind``.
    """

    def __init__(self, path: Path):
        self.path = Path(path)
        self.path.parent.mkdir(parents=True, exist_ok=True)

    def write(self, record: AuditRecord) -> None:
        fresh = not self.path.exists() or self.path.stat().st_size == 0
        with open(self.path, "a", encoding="utf-8") as f:
            if fresh:
                f.write(json.dumps({"format_version": FORMAT_VERSION, "kind": AUDIT_KIND}) + "\n")
            f.write(record.model_dump_json() + "\n")

    def read(self) -> list[AuditRecord]:
        """Records in write order.

        Raises:
            ArtifactFormatError: the header line is missing or unsupported
        """
        if not self.path.exists():
            return []
        with open(self.path, encoding="utf-8") as f:
            lines = [line for line in f if line.strip()]
        if not lines:
            return []
        try:
            header = json.loads(lines[0])
        except json.JSONDecodeError:
            raise ArtifactFormatError(f"{self.path}: first line is not a JSON header") from None
        if not isinstance(header, dict):
            raise ArtifactFormatError(f"{self.path}: first line is not a JSON header")
        check_version(header, self.path, AUDIT_KIND)
        return [AuditRecord.model_validate_json(line) for line in lines[1:]]


@dataclass
class FrontSnapshot:
    """A front plus what is needed to continue the run after it."""

    generation: int
    run_seed: int
    front: ParetoFront
    parents: list[str] = field(default_factory=list)

    def save(self, path: Path) -> None:
        members = [
            {
                "candidate_id": m.candidate_id,
                "complexity_bits": m.complexity_bits,
                "loss": m.loss,
                "source": m.source,
            }
            for m in self.front
        ]
        body = yaml.safe_dump({"members": members, "parents": self.parents}, sort_keys=False)
        header = {"generation": self.generation, "run_seed": self.run_seed}
        ArtifactFile(SNAPSHOT_KIND, header, body).save(path)

    @classmethod
    def load(cls, path: Path) -> "FrontSnapshot":
        artifact = ArtifactFile.load(path, kind=SNAPSHOT_KIND)
        body = yaml.safe_load(artifact.body) or {}
        members = tuple(
            FrontMember(float(m["complexity_bits"]), float(m["loss"]), m["candidate_id"], m["source"])
            for m in body.get("members", [])
        )
        return cls(
            generation=int(artifact.header["generation"]),
            run_seed=int(artifact.header["run_seed"]),
            front=ParetoFront(members),
            parents=list(body.get("parents", [])),
        )


def write_front_csv(path: Path, front: ParetoFront) -> None:
    """Scatter data: complexity in bits against validation loss."""
    frame = pd.DataFrame(
        {
            "candidate_id": [m.candidate_id for m in front],
            "complexity_bits": [m.complexity_bits for m in front],
            "validation_loss": [m.loss for m in front],
        }
    )
    write_csv(path, frame, "front-scatter")
