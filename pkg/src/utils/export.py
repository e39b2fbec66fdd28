"""Export utilities for CSV and JSON report files."""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from utils.logger import get_logger

logger = get_logger(__name__)


def _ensure_parent_dir(filepath: Path) -> None:
    """Create parent directory if it does not exist."""
    filepath.parent.mkdir(parents=True, exist_ok=True)


def _make_serializable(obj: Any) -> Any:
    """Recursively convert numpy types to native Python for JSON.

    Non-finite floats become the strings ``"inf"``, ``"-inf"`` and ``"nan"``
    so the output stays strict JSON.

    Args:
        obj: Object to convert.

    Returns:
        JSON-safe equivalent.
    """
    if isinstance(obj, dict):
        return {str(k): _make_serializable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_make_serializable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _make_serializable(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        value = float(obj)
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return value
    if isinstance(obj, Path):
        return str(obj)
    return obj


def dumps_json(payload: dict[str, Any]) -> str:
    """Render *payload* as the indented JSON text written by :func:`export_json_to_path`."""
    return json.dumps(_make_serializable(payload), indent=2, ensure_ascii=False) + "\n"


def export_json_to_path(payload: dict[str, Any], filepath: Path) -> Path:
    """Write *payload* as indented JSON.

    Key order is preserved and no timestamps are added, so equal payloads give
    byte-identical files.

    Args:
        payload: Report dictionary.
        filepath: Destination path.

    Returns:
        The path that was written.
    """
    _ensure_parent_dir(filepath)
    with open(filepath, "w", encoding="utf-8", newline="\n") as f:
        f.write(dumps_json(payload))
    logger.info("JSON exported: %s", filepath)
    return filepath


def export_csv_to_path(
    headers: Sequence[str],
    rows: Sequence[Sequence[Any]],
    filepath: Path,
) -> Path:
    """Write a header line and data rows as CSV.

    Args:
        headers: Column names.
        rows: One sequence per row, same length as *headers*.
        filepath: Destination path.

    Returns:
        The path that was written.
    """
    _ensure_parent_dir(filepath)
    with open(filepath, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(list(headers))
        for row in rows:
            writer.writerow([_csv_cell(v) for v in row])
    logger.info("CSV exported: %s", filepath)
    return filepath


def _csv_cell(value: Any) -> Any:
    if value is None:
        return ""
    value = _make_serializable(value)
    if isinstance(value, float):
        return repr(value)
    return value
