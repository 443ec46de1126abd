"""Stage artifact files: self-describing TSV with atomic writes."""

from __future__ import annotations

import os
import tempfile
from pathlib import Path
from typing import Iterable, Iterator, Sequence

from . import __version__


class MissingArtifactError(FileNotFoundError):
    def __init__(self, path: Path, stage: str):
        super().__init__(f"missing artifact {path.name}; run stage '{stage}' first")
        self.path = path
        self.stage = stage


def header_comment(stage: str, extra: str = "") -> str:
    line = f"# catmine {__version__} stage={stage}"
    return f"{line} {extra}".rstrip() + "\n"


def atomic_write(path: Path, chunks: Iterable[str]) -> None:
    """Write to a sibling temp file, then rename over ``path``."""
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            for chunk in chunks:
                fh.write(chunk)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _clean_cell(value: object) -> str:
    text = str(value)
    if "\t" in text or "\n" in text:
        raise ValueError(f"TSV cell contains a tab or newline: {text!r}")
    return text


def write_tsv(path: Path, stage: str, columns: Sequence[str], rows: Iterable[Sequence[object]], extra: str = "") -> None:
    def chunks() -> Iterator[str]:
        yield header_comment(stage, extra)
        yield "\t".join(columns) + "\n"
        for row in rows:
            yield "\t".join(_clean_cell(v) for v in row) + "\n"

    atomic_write(path, chunks())


def read_tsv(path: Path, stage: str) -> Iterator[list[str]]:
    """Data rows of an artifact; comment lines and the column header are skipped."""
    if not path.exists():
        raise MissingArtifactError(path, stage)
    with open(path, encoding="utf-8") as fh:
        seen_header = False
        for line in fh:
            if line.startswith("#"):
                continue
            line = line.rstrip("\n")
            if not seen_header:
                seen_header = True
                continue
            yield line.split("\t")


def require(path: Path, stage: str) -> Path:
    if not path.exists():
        raise MissingArtifactError(path, stage)
    return path
