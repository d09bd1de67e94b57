"""CSV ingestion of functional samples and serialization of results.

Input files have a header ``id,<t1>,...,<tk>`` followed by one row per
function ``<id>,<v1>,...,<vk>``.  A d-variate sample is stored as d such
files (one per coordinate) sharing grid and ids.
"""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np

from .sample import FunctionalSample

__all__ = ["DataError", "read_csv", "load_dataset", "save_dataset", "fmt", "write_table", "write_json"]


class DataError(ValueError):
    """Malformed input data; the message names file, line and column."""


def _parse_float(cell, where):
    try:
        value = float(cell)
    except ValueError:
        raise DataError(f"{where}: non-numeric value {cell!r}") from None
    if not math.isfinite(value):
        raise DataError(f"{where}: non-finite value {cell!r}")
    return value


def read_csv(path):
    """Parse one coordinate file into ``(grid, ids, values)``.

    Raises
    ------
    DataError
        On missing header, non-numeric cells, ragged rows or a grid that is
        not strictly increasing.
    """
    path = Path(path)
    try:
        handle = open(path, newline="", encoding="utf-8")
    except OSError as exc:
        raise DataError(f"{path}: cannot open file ({exc.strerror})") from None
    with handle:
        rows = [(i, row) for i, row in enumerate(csv.reader(handle), start=1) if any(c.strip() for c in row)]
    if not rows:
        raise DataError(f"{path}: empty file")
    line, header = rows[0]
    if len(header) < 3:
        raise DataError(f"{path}:{line}: header needs an id column and at least 2 time points")
    grid = np.array([_parse_float(c.strip(), f"{path}:{line}:{j}") for j, c in enumerate(header[1:], start=2)])
    for j in range(1, grid.size):
        if grid[j] <= grid[j - 1]:
            prev, cur = float(grid[j - 1]), float(grid[j])
            raise DataError(f"{path}:{line}:{j + 2}: grid is not strictly increasing ({prev!r} then {cur!r})")
    k = grid.size
    ids, values = [], []
    for line, row in rows[1:]:
        if len(row) != k + 1:
            raise DataError(f"{path}:{line}: expected {k} values after the id, got {len(row) - 1}")
        ids.append(row[0].strip())
        values.append([_parse_float(c.strip(), f"{path}:{line}:{j}") for j, c in enumerate(row[1:], start=2)])
    if not values:
        raise DataError(f"{path}: no data rows")
    return grid, ids, np.array(values)


def load_dataset(path, path2=None):
    """Load a univariate sample, or a bivariate one from two coordinate files.

    Both files of a bivariate sample must have identical grids and id lists.
    """
    grid, ids, values = read_csv(path)
    if path2 is None:
        return FunctionalSample(grid, values[:, :, None], ids)
    grid2, ids2, values2 = read_csv(path2)
    if grid2.size != grid.size:
        raise DataError(f"{path2}:1: grid mismatch with {path}: {grid2.size} time points instead of {grid.size}")
    diff = np.flatnonzero(grid2 != grid)
    if diff.size:
        j = int(diff[0])
        raise DataError(f"{path2}:1:{j + 2}: grid mismatch with {path}: {float(grid2[j])!r} != {float(grid[j])!r}")
    if len(ids2) != len(ids):
        raise DataError(f"{path2}: id mismatch with {path}: {len(ids2)} rows instead of {len(ids)}")
    for r, (a, b) in enumerate(zip(ids, ids2)):
        if a != b:
            raise DataError(f"{path2}:{r + 2}:1: id mismatch with {path}: {b!r} != {a!r}")
    return FunctionalSample(grid, np.stack([values, values2], axis=2), ids)


def save_dataset(sample, path, path2=None):
    """Write a sample in the input format (shortest round-trip float repr)."""
    paths = [path] if path2 is None else [path, path2]
    if len(paths) != sample.d:
        raise ValueError(f"need {sample.d} output path(s) for d={sample.d}")
    for c, p in enumerate(paths):
        with open(p, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["id"] + [repr(float(t)) for t in sample.grid])
            for i, row in zip(sample.ids, sample.values[:, :, c]):
                w.writerow([i] + [repr(float(v)) for v in row])


def fmt(value):
    """17 significant digits; empty string for missing values."""
    if value is None or (isinstance(value, float) and math.isnan(value)):
        return ""
    if isinstance(value, (int, np.integer)) and not isinstance(value, bool):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return "%.17g" % value
    return str(value)


def write_table(handle, header, rows):
    w = csv.writer(handle, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) for v in row])


def _jsonable(value):
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return None if math.isnan(value) else float("%.17g" % value)
    if isinstance(value, np.ndarray):
        return _jsonable(value.tolist())
    return value


def write_json(handle, obj):
    json.dump(_jsonable(obj), handle, indent=2, sort_keys=False, allow_nan=False)
    handle.write("\n")
