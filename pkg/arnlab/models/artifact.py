"""Versioned artifact files: YAML front matter records and commented CSV."""

from __future__ import annotations

import io
from pathlib import Path
from typing import Any, Dict, Optional

import pandas as pd
import yaml

from arnlab import FORMAT_VERSION
from arnlab.errors import ArtifactFormatError

SUPPORTED_VERSIONS = (FORMAT_VERSION,)


def check_version(header: Dict[str, Any], source: Path | str, kind: Optional[str] = None) -> None:
    """Raise ArtifactFormatError unless ``header`` carries a supported version and kind."""
    version = header.get("format_version")
    if version is None:
        raise ArtifactFormatError(f"{source}: missing format_version header")
    try:
        version = int(version)
    except (TypeError, ValueError):
        raise ArtifactFormatError(f"{source}: unreadable format_version {version!r}") from None
    if version not in SUPPORTED_VERSIONS:
        raise ArtifactFormatError(f"{source}: unsupported format_version {version}")
    if kind is not None and header.get("kind") != kind:
        raise ArtifactFormatError(f"{source}: expected a {kind!r} file, found {header.get('kind')!r}")


class ArtifactFile:
    """A text artifact with a YAML front matter block and a free-form body."""

    def __init__(self, kind: str, header: Dict[str, Any], body: str = ""):
        self.header = {"format_version": FORMAT_VERSION, "kind": kind, **header}
        self.body = body

    @property
    def kind(self) -> str:
        return self.header["kind"]

    @classmethod
    def loads(cls, text: str, source: str = "<string>", kind: Optional[str] = None) -> "ArtifactFile":
        if not text.startswith("---\n"):
            raise ArtifactFormatError(f"{source}: no front matter block")
        parts = text.split("---\n", 2)
        if len(parts) < 3:
            raise ArtifactFormatError(f"{source}: unterminated front matter block")
        header = yaml.safe_load(parts[1]) or {}
        check_version(header, source, kind)
        return cls(header["kind"], header, parts[2].lstrip("\n"))

    @classmethod
    def load(cls, file_path: Path, kind: Optional[str] = None) -> "ArtifactFile":
        """Read and validate an artifact.

        Raises:
            ArtifactFormatError: when the version header is missing or unsupported
        """
        text = Path(file_path).read_text(encoding="utf-8")
        return cls.loads(text, str(file_path), kind)

    def save(self, file_path: Path) -> None:
        file_path = Path(file_path)
        file_path.parent.mkdir(parents=True, exist_ok=True)
        file_path.write_text(self.to_string(), encoding="utf-8")

    def to_string(self) -> str:
        yaml_str = yaml.safe_dump(self.header, default_flow_style=False, sort_keys=False)
        return f"---\n{yaml_str}---\n\n{self.body}"


def write_csv(path: Path, frame: pd.DataFrame, kind: str, **extra: Any) -> None:
    """Write ``frame`` after ``# key: value`` comment lines carrying the version."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [f"# format_version: {FORMAT_VERSION}", f"# kind: {kind}"]
    lines += [f"# {key}: {value}" for key, value in extra.items()]
    with open(path, "w", encoding="utf-8", newline="") as f:
        f.write("\n".join(lines) + "\n")
        frame.to_csv(f, index=False, float_format="%.17g")


def read_csv_header(text: str) -> tuple[Dict[str, str], int]:
    """Parse leading ``# key: value`` lines; returns the header and its line count."""
    header: Dict[str, str] = {}
    count = 0
    for line in text.splitlines():
        if not line.startswith("#"):
            break
        count += 1
        key, sep, value = line[1:].partition(":")
        if sep:
            header[key.strip()] = value.strip()
    return header, count


def read_csv(path: Path, kind: Optional[str] = None, **read_kwargs: Any) -> tuple[Dict[str, str], pd.DataFrame, int]:
    """Read a commented CSV artifact.

    Returns:
        The header, the frame and the number of comment lines before the
        column header (for row-precise diagnostics)
    """
    text = Path(path).read_text(encoding="utf-8")
    header, skipped = read_csv_header(text)
    check_version(header, path, kind)
    frame = pd.read_csv(io.StringIO(text), skiprows=skipped, **read_kwargs)
    return header, frame, skipped
