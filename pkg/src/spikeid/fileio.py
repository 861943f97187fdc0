"""Reading and writing recordings, reports and manifests.

Two data formats are supported:

* ``csv`` - one row per channel, one column per sample, optional header row;
* ``raw-f64`` - a 16-byte little-endian header (``b"SPKC"``, ``u32 K``,
  ``u32 T``) followed by ``K*T`` little-endian float64 values, row-major.

Every writer produces byte-identical output for identical input, and files
are written atomically (temporary file, then rename).
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import os
import struct
import tempfile
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .core import DataMatrix, as_data
from .exceptions import DataQualityError

__all__ = [
    "FORMATS",
    "RAW_MAGIC",
    "ingest",
    "emit",
    "read_csv",
    "write_csv",
    "read_raw",
    "write_raw",
    "write_text",
    "write_table",
    "format_value",
    "format_report",
    "sha256_file",
]

FORMATS = ("csv", "raw-f64")
RAW_MAGIC = b"SPKC"
_HEADER = struct.Struct("<4sII")


def format_value(x) -> str:
    """Shortest round-tripping text for numbers; plain ``str`` otherwise."""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    if x is None:
        return ""
    if isinstance(x, (list, tuple, np.ndarray)):
        return "[" + ", ".join(format_value(v) for v in x) + "]"
    return str(x)


def write_text(path: str | os.PathLike, text: str | bytes) -> Path:
    """Atomically write ``text`` (UTF-8, ``\\n`` newlines) to ``path``."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    data = text.encode("utf-8") if isinstance(text, str) else text
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def write_table(path, header: Sequence[str], rows: Iterable[Sequence]) -> Path:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([format_value(v) for v in row])
    return write_text(path, buf.getvalue())


def _is_number(cell: str) -> bool:
    try:
        float(cell)
    except ValueError:
        return False
    return True


def read_csv(path: str | os.PathLike, sample_period_ms: float = 1.0) -> DataMatrix:
    """Channels-by-samples CSV; a first row with no numeric cell is a header."""
    with open(path, newline="", encoding="utf-8") as fh:
        rows = [r for r in csv.reader(fh) if r and any(c.strip() for c in r)]
    if not rows:
        raise DataQualityError(f"{path}: no data rows")
    first_line = 1
    if not any(_is_number(c.strip()) for c in rows[0]):
        rows = rows[1:]
        first_line = 2
        if not rows:
            raise DataQualityError(f"{path}: header but no data rows")
    width = len(rows[0])
    values = np.empty((len(rows), width))
    for i, row in enumerate(rows):
        if len(row) != width:
            raise DataQualityError(
                f"{path}: row {i + first_line} has {len(row)} columns, expected {width}"
            )
        for j, cell in enumerate(row):
            try:
                values[i, j] = float(cell.strip())
            except ValueError:
                raise DataQualityError(
                    f"{path}: non-numeric cell {cell!r} at row {i + first_line}, column {j + 1}"
                ) from None
    return DataMatrix(values, sample_period_ms)


def write_csv(path, data: DataMatrix | np.ndarray) -> Path:
    d = as_data(data)
    lines = [",".join(repr(float(v)) for v in row) for row in d.values]
    return write_text(path, "\n".join(lines) + "\n")


def read_raw(path: str | os.PathLike, sample_period_ms: float = 1.0) -> DataMatrix:
    blob = Path(path).read_bytes()
    if len(blob) < _HEADER.size:
        raise DataQualityError(f"{path}: truncated header ({len(blob)} of {_HEADER.size} bytes)")
    magic, k, t = _HEADER.unpack_from(blob)
    if magic != RAW_MAGIC:
        raise DataQualityError(f"{path}: bad magic {magic!r}, expected {RAW_MAGIC!r}")
    expected = k * t
    body = len(blob) - _HEADER.size
    if body % 8:
        raise DataQualityError(f"{path}: payload of {body} bytes is not a whole number of float64 values")
    got = body // 8
    if got != expected:
        kind = "truncated" if got < expected else "oversized"
        raise DataQualityError(
            f"{path}: {kind} payload: header declares K={k}, T={t} (expected {expected} values), found {got}"
        )
    values = np.frombuffer(blob, dtype="<f8", offset=_HEADER.size).reshape(k, t)
    return DataMatrix(values.astype(np.float64), sample_period_ms)


def write_raw(path, data: DataMatrix | np.ndarray) -> Path:
    d = as_data(data)
    k, t = d.values.shape
    payload = _HEADER.pack(RAW_MAGIC, k, t) + np.ascontiguousarray(d.values, dtype="<f8").tobytes()
    return write_text(path, payload)


def ingest(path, fmt: str = "csv", sample_period_ms: float = 1.0) -> DataMatrix:
    """Read a recording in one of :data:`FORMATS`."""
    if not Path(path).is_file():
        raise DataQualityError(f"input file not found: {path}")
    if fmt == "csv":
        return read_csv(path, sample_period_ms)
    if fmt == "raw-f64":
        return read_raw(path, sample_period_ms)
    raise DataQualityError(f"unknown data format {fmt!r}")


def emit(path, data: DataMatrix | np.ndarray, fmt: str = "csv") -> Path:
    if fmt == "csv":
        return write_csv(path, data)
    if fmt == "raw-f64":
        return write_raw(path, data)
    raise DataQualityError(f"unknown data format {fmt!r}")


def format_report(items: dict) -> str:
    """``key = value`` lines in insertion order."""
    return "".join(f"{k} = {format_value(v)}\n" for k, v in items.items())


def sha256_file(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def dump_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, default=_json_default) + "\n"


def _json_default(x):
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.floating):
        return float(x)
    if isinstance(x, np.ndarray):
        return x.tolist()
    raise TypeError(f"cannot serialize {type(x).__name__}")
