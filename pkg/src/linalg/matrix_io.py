"""Matrix files.

CSV: the first line holds the two integers ``d,k``; each of the next d lines
holds k comma-separated floats written with Python ``repr``; lines end with
``\\n``.

JSON: one object ``{"rows": d, "cols": k, "data": [...]}`` with the entries
in row-major order, compact separators and a trailing newline.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path
from typing import Any

import numpy as np

from linalg.matrix import as_matrix
from utils import ShapeMismatchError, ValidationError, get_logger

logger = get_logger(__name__)


def save_matrix(A: Any, filepath: Path) -> Path:
    """Write A as CSV or JSON depending on the file suffix."""
    arr = as_matrix(A)
    filepath = Path(filepath)
    filepath.parent.mkdir(parents=True, exist_ok=True)
    d, k = arr.shape
    suffix = filepath.suffix.lower()
    if suffix == ".csv":
        with open(filepath, "w", newline="", encoding="utf-8") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow([d, k])
            for row in arr:
                writer.writerow([repr(float(v)) for v in row])
    elif suffix == ".json":
        payload = {"rows": d, "cols": k, "data": [float(v) for v in arr.ravel()]}
        filepath.write_text(json.dumps(payload, separators=(",", ":")) + "\n", encoding="utf-8")
    else:
        raise ValidationError(f"Unsupported matrix file type: {filepath.suffix!r}")
    logger.info("Matrix %dx%d written: %s", d, k, filepath)
    return filepath


def load_matrix(filepath: Path) -> np.ndarray:
    """Read a matrix written by :func:`save_matrix`.

    Raises:
        ShapeMismatchError: If the declared shape does not match the data.
        ValidationError: For unknown suffixes, unreadable or malformed files.
    """
    filepath = Path(filepath)
    suffix = filepath.suffix.lower()
    try:
        if suffix == ".csv":
            with open(filepath, newline="", encoding="utf-8") as f:
                rows = [row for row in csv.reader(f) if row]
            d, k = (int(v) for v in rows[0])
            data = np.array([[float(v) for v in row] for row in rows[1:]], dtype=float)
        elif suffix == ".json":
            payload = json.loads(filepath.read_text(encoding="utf-8"))
            d, k = int(payload["rows"]), int(payload["cols"])
            flat = np.asarray(payload["data"], dtype=float)
            if flat.size != d * k:
                raise ShapeMismatchError(f"Declared {d}x{k} matrix but found {flat.size} entries")
            data = flat.reshape(d, k)
        else:
            raise ValidationError(f"Unsupported matrix file type: {filepath.suffix!r}")
    except OSError as exc:
        raise ValidationError(f"Cannot read matrix file {filepath}: {exc}") from exc
    except (KeyError, IndexError, ValueError, TypeError) as exc:
        raise ValidationError(f"Malformed matrix file {filepath}: {exc}") from exc
    if data.shape != (d, k):
        raise ShapeMismatchError(f"Declared {d}x{k} matrix but found shape {data.shape}")
    return as_matrix(data)
