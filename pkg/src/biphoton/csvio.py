"""CSV writing and reading with an embedded run manifest.

Every output file starts with ``#``-prefixed manifest lines (command, a
hash of the resolved configuration, the configuration itself, method and
tolerance tags), followed by a header row naming the columns and the data
rows in ``%.9e`` format.  Readers skip manifest lines, so the files load
directly into numpy or pandas.
"""

from __future__ import annotations

import hashlib
from pathlib import Path

import numpy as np

__all__ = ["CsvFormatError", "config_sha256", "write_csv", "read_csv"]


class CsvFormatError(ValueError):
    """A CSV input could not be parsed; the message names the line."""


def config_sha256(entries: dict[str, str]) -> str:
    """Hash of the resolved configuration, stable across key order."""
    canon = "\n".join(f"{k} = {v}" for k, v in sorted(entries.items()))
    return hashlib.sha256(canon.encode("utf-8")).hexdigest()


def write_csv(
    path: str | Path,
    command: str,
    config_entries: dict[str, str],
    extra_meta: dict[str, str],
    columns: list[str],
    rows: np.ndarray,
) -> None:
    """Write a manifest-carrying CSV with fixed ``%.9e`` formatting."""
    rows = np.atleast_2d(np.asarray(rows, dtype=float))
    if rows.size and rows.shape[1] != len(columns):
        raise ValueError(f"{rows.shape[1]} data columns for {len(columns)} names")
    lines = [
        "# biphoton output",
        f"# command = {command}",
        f"# config_sha256 = {config_sha256(config_entries)}",
    ]
    for key, value in sorted(config_entries.items()):
        lines.append(f"# {key} = {value}")
    for key, value in extra_meta.items():
        lines.append(f"# {key} = {value}")
    lines.append("# columns = " + ",".join(columns))
    lines.append(",".join(columns))
    for row in rows:
        lines.append(",".join("%.9e" % v for v in row))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_csv(path: str | Path) -> tuple[list[str], np.ndarray, dict[str, str]]:
    """Read a CSV written by :func:`write_csv` (or any #-commented CSV).

    Returns ``(column_names, data, metadata)`` where ``metadata`` collects
    the ``# key = value`` manifest lines.  Raises :class:`CsvFormatError`
    naming the offending line on any malformed content.
    """
    meta: dict[str, str] = {}
    header: list[str] | None = None
    data: list[list[float]] = []
    text = Path(path).read_text(encoding="utf-8")
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if "=" in body:
                key, _, value = body.partition("=")
                meta[key.strip()] = value.strip()
            continue
        cells = [c.strip() for c in line.split(",")]
        if header is None:
            header = cells
            continue
        if len(cells) != len(header):
            raise CsvFormatError(
                f"{path}:{lineno}: expected {len(header)} columns, found {len(cells)}"
            )
        try:
            data.append([float(c) for c in cells])
        except ValueError:
            raise CsvFormatError(f"{path}:{lineno}: non-numeric cell in data row") from None
    if header is None:
        raise CsvFormatError(f"{path}: no header row found")
    if not data:
        raise CsvFormatError(f"{path}: no data rows found")
    return header, np.asarray(data, dtype=float), meta
