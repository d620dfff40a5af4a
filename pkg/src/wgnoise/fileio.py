"""Latent vector file format and delimited-output helpers.

Latent files are little-endian binary: magic ``WGNL``, a uint32 version
(currently 1), a uint64 length ``n``, then ``n`` IEEE-754 float64 values.

CSV output is bit-stable for golden-file comparison: ``.`` decimal
separator, ``\\n`` line endings, a header row always present, and floats
rendered with ``repr`` (shortest round-trip form).
"""

from __future__ import annotations

import csv
import struct
from typing import Iterable, Sequence

import numpy as np

from .errors import ValidationError

MAGIC = b"WGNL"
VERSION = 1
_HEADER = struct.Struct("<4sIQ")


def write_latent(path, values) -> None:
    """Write a latent vector; entries must be finite."""
    arr = np.ascontiguousarray(values, dtype="<f8")
    if arr.ndim != 1:
        raise ValidationError(f"latent must be 1-d, got shape {arr.shape}")
    if not np.isfinite(arr).all():
        raise ValidationError("latent contains non-finite entries")
    with open(path, "wb") as handle:
        handle.write(_HEADER.pack(MAGIC, VERSION, arr.shape[0]))
        handle.write(arr.tobytes())


def read_latent(path) -> np.ndarray:
    """Read a latent vector, validating magic, version, length, and finiteness."""
    with open(path, "rb") as handle:
        header = handle.read(_HEADER.size)
        if len(header) != _HEADER.size:
            raise ValidationError(f"{path}: truncated header")
        magic, version, n = _HEADER.unpack(header)
        if magic != MAGIC:
            raise ValidationError(f"{path}: bad magic {magic!r}")
        if version != VERSION:
            raise ValidationError(f"{path}: unsupported version {version}")
        payload = handle.read(8 * n)
        if len(payload) != 8 * n:
            raise ValidationError(f"{path}: expected {n} float64 values, file is short")
        if handle.read(1):
            raise ValidationError(f"{path}: trailing bytes after {n} values")
    arr = np.frombuffer(payload, dtype="<f8").astype(np.float64)
    if not np.isfinite(arr).all():
        raise ValidationError(f"{path}: latent contains non-finite entries")
    return arr


def format_cell(value) -> str:
    """Render one CSV cell; floats use shortest round-trip form."""
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return str(value)


def write_csv(path, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(list(header))
        for row in rows:
            writer.writerow([format_cell(cell) for cell in row])
