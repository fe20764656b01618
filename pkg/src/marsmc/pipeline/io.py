"""File formats: delimited series data and binary particle dumps.

CSV files carry a header row, an optional leading column of date labels
(detected, never parsed as numbers), and plain decimal-point numbers.
Values are written with 17 significant digits so a write/load round trip is
lossless for doubles.
"""

from __future__ import annotations

import csv
import struct
from pathlib import Path

import numpy as np

from ..errors import DataFormatError
from ..model import SeriesData

_CLOUD_MAGIC = b"MRSC"
_CLOUD_VERSION = 1

_DATE_HEADERS = {"date", "dates", "time", "period", "index"}


def _parse_cell(text: str) -> float | None:
    try:
        return float(text)
    except ValueError:
        return None


def load_csv(path) -> SeriesData:
    """Read a T x n sample; header required, first column may be dates."""
    path = Path(path)
    with path.open(newline="") as fh:
        rows = [row for row in csv.reader(fh) if row]
    if not rows:
        raise DataFormatError(f"{path}: empty file")
    header = [h.strip() for h in rows[0]]
    body = rows[1:]
    if not body:
        raise DataFormatError(f"{path}: no observations")

    has_dates = header[0].lower() in _DATE_HEADERS or _parse_cell(body[0][0]) is None
    first_col = 1 if has_dates else 0
    columns = tuple(header[first_col:])
    if not columns:
        raise DataFormatError(f"{path}: no value columns")

    width = len(header)
    values = np.empty((len(body), len(columns)))
    dates = [] if has_dates else None
    for i, row in enumerate(body):
        if len(row) != width:
            raise DataFormatError(
                f"{path}: row {i + 2} has {len(row)} cells, expected {width}"
            )
        if has_dates:
            dates.append(row[0].strip())
        for j, name in enumerate(columns):
            cell = _parse_cell(row[first_col + j])
            if cell is None:
                raise DataFormatError(
                    f"{path}: non-numeric value {row[first_col + j]!r} "
                    f"at row {i + 2}, column {name!r}"
                )
            values[i, j] = cell
    return SeriesData(
        values=values, columns=columns, dates=tuple(dates) if has_dates else None
    )


def write_csv(path, data: SeriesData) -> None:
    """Write a sample with full double precision (17 significant digits)."""
    path = Path(path)
    columns = data.columns or tuple(f"s{j + 1}" for j in range(data.n))
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        if data.dates is not None:
            writer.writerow(("date", *columns))
            for label, row in zip(data.dates, data.values):
                writer.writerow((label, *(f"{x:.17g}" for x in row)))
        else:
            writer.writerow(columns)
            for row in data.values:
                writer.writerow(f"{x:.17g}" for x in row)


def save_cloud(path, params: np.ndarray) -> None:
    """Dump a P x k particle matrix with a 16-byte header (magic, version, P, k)."""
    params = np.ascontiguousarray(params, dtype=np.float64)
    p, k = params.shape
    with Path(path).open("wb") as fh:
        fh.write(struct.pack("<4sIII", _CLOUD_MAGIC, _CLOUD_VERSION, p, k))
        fh.write(params.tobytes())


def load_cloud(path) -> np.ndarray:
    path = Path(path)
    with path.open("rb") as fh:
        header = fh.read(16)
        if len(header) != 16:
            raise DataFormatError(f"{path}: truncated header")
        magic, version, p, k = struct.unpack("<4sIII", header)
        if magic != _CLOUD_MAGIC:
            raise DataFormatError(f"{path}: not a particle dump")
        if version != _CLOUD_VERSION:
            raise DataFormatError(f"{path}: unsupported version {version}")
        payload = fh.read(8 * p * k)
    if len(payload) != 8 * p * k:
        raise DataFormatError(f"{path}: truncated payload")
    return np.frombuffer(payload, dtype=np.float64).reshape(p, k).copy()
